#pragma once

#include <string>
#include <vector>

namespace kerrdiv {

/// Minimal static line/scatter plots written as standalone SVG files.
class SvgPlot {
public:
    SvgPlot(std::string title, std::string xlabel, std::string ylabel)
        : title_(std::move(title)), xlabel_(std::move(xlabel)), ylabel_(std::move(ylabel)) {}

    void set_logx(bool v) { logx_ = v; }
    void set_logy(bool v) { logy_ = v; }

    void add_series(const std::string& label, std::vector<double> x, std::vector<double> y,
                    bool markers = false);

    void write(const std::string& path) const;

private:
    std::string title_, xlabel_, ylabel_;
    bool logx_ = false, logy_ = false;
    struct Series {
        std::string label;
        std::vector<double> x, y;
        bool markers = false;
    };
    std::vector<Series> series_;
};

} // namespace kerrdiv
