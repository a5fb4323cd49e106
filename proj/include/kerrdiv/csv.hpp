#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace kerrdiv {

/// CSV emitter; every file starts with a header row.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);
    void row(const std::vector<double>& values);
    void row(const std::vector<std::string>& values);

private:
    std::ofstream out_;
};

std::string format_double(double v);

} // namespace kerrdiv
