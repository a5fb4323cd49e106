#include "kerrdiv/csv.hpp"

#include <cstdio>
#include <stdexcept>

namespace kerrdiv {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header) {
    out_.open(path);
    if (!out_) throw std::runtime_error("CsvWriter: cannot open " + path);
    row(header);
}

void CsvWriter::row(const std::vector<std::string>& values) {
    for (size_t i = 0; i < values.size(); ++i) {
        if (i) out_ << ',';
        out_ << values[i];
    }
    out_ << '\n';
    out_.flush();
}

void CsvWriter::row(const std::vector<double>& values) {
    std::vector<std::string> s;
    s.reserve(values.size());
    for (double v : values) s.push_back(format_double(v));
    row(s);
}

} // namespace kerrdiv
