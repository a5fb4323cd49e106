#include "kerrdiv/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace kerrdiv {

namespace {

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

struct Ticks {
    std::vector<double> values;  // in plot (possibly log10) coordinates
    std::vector<std::string> labels;
};

Ticks make_ticks(double lo, double hi, bool logscale) {
    Ticks t;
    if (logscale) {
        const int a = static_cast<int>(std::floor(lo));
        const int b = static_cast<int>(std::ceil(hi));
        for (int d = a; d <= b; ++d) {
            if (d < lo - 1e-9 || d > hi + 1e-9) continue;
            t.values.push_back(d);
            char buf[24];
            std::snprintf(buf, sizeof buf, "1e%d", d);
            t.labels.push_back(buf);
        }
        if (t.values.empty()) {
            t.values = {lo, hi};
            t.labels = {fmt(std::pow(10, lo)), fmt(std::pow(10, hi))};
        }
        return t;
    }
    const double span = hi - lo;
    double step = std::pow(10.0, std::floor(std::log10(span / 4.0)));
    if (span / step > 8) step *= 2;
    if (span / step > 8) step *= 2.5;
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-12 * span; v += step) {
        t.values.push_back(v);
        t.labels.push_back(fmt(v));
    }
    return t;
}

} // namespace

void SvgPlot::add_series(const std::string& label, std::vector<double> x, std::vector<double> y,
                         bool markers) {
    if (x.size() != y.size())
        throw std::invalid_argument("SvgPlot: series length mismatch");
    series_.push_back({label, std::move(x), std::move(y), markers});
}

void SvgPlot::write(const std::string& path) const {
    const double W = 720, H = 480;
    const double ml = 80, mr = 24, mt = 40, mb = 56;

    double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo;
    double ylo = xlo, yhi = -xlo;
    auto tx = [&](double v) { return logx_ ? std::log10(v) : v; };
    auto ty = [&](double v) { return logy_ ? std::log10(v) : v; };
    for (const Series& s : series_) {
        for (size_t i = 0; i < s.x.size(); ++i) {
            if (logx_ && !(s.x[i] > 0)) continue;
            if (logy_ && !(s.y[i] > 0)) continue;
            xlo = std::min(xlo, tx(s.x[i]));
            xhi = std::max(xhi, tx(s.x[i]));
            ylo = std::min(ylo, ty(s.y[i]));
            yhi = std::max(yhi, ty(s.y[i]));
        }
    }
    if (!std::isfinite(xlo) || !std::isfinite(ylo)) { xlo = 0; xhi = 1; ylo = 0; yhi = 1; }
    if (xhi - xlo < 1e-12) { xhi += 0.5; xlo -= 0.5; }
    if (yhi - ylo < 1e-12) { yhi += 0.5; ylo -= 0.5; }
    const double xpad = 0.03 * (xhi - xlo), ypad = 0.05 * (yhi - ylo);
    xlo -= xpad; xhi += xpad; ylo -= ypad; yhi += ypad;

    auto px = [&](double v) { return ml + (tx(v) - xlo) / (xhi - xlo) * (W - ml - mr); };
    auto py = [&](double v) { return H - mb - (ty(v) - ylo) / (yhi - ylo) * (H - mt - mb); };

    std::ofstream out(path);
    if (!out) throw std::runtime_error("SvgPlot: cannot open " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << " " << H << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
        << title_ << "</text>\n";

    const Ticks xt = make_ticks(xlo, xhi, logx_);
    const Ticks yt = make_ticks(ylo, yhi, logy_);
    out << "<g font-size=\"11\" fill=\"#333\">\n";
    for (size_t i = 0; i < xt.values.size(); ++i) {
        const double x = ml + (xt.values[i] - xlo) / (xhi - xlo) * (W - ml - mr);
        out << "<line x1=\"" << x << "\" y1=\"" << mt << "\" x2=\"" << x << "\" y2=\"" << H - mb
            << "\" stroke=\"#ddd\"/>\n"
            << "<text x=\"" << x << "\" y=\"" << H - mb + 16 << "\" text-anchor=\"middle\">"
            << xt.labels[i] << "</text>\n";
    }
    for (size_t i = 0; i < yt.values.size(); ++i) {
        const double y = H - mb - (yt.values[i] - ylo) / (yhi - ylo) * (H - mt - mb);
        out << "<line x1=\"" << ml << "\" y1=\"" << y << "\" x2=\"" << W - mr << "\" y2=\"" << y
            << "\" stroke=\"#ddd\"/>\n"
            << "<text x=\"" << ml - 6 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">"
            << yt.labels[i] << "</text>\n";
    }
    out << "</g>\n";
    out << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << W - ml - mr << "\" height=\""
        << H - mt - mb << "\" fill=\"none\" stroke=\"#333\"/>\n";
    out << "<text x=\"" << (ml + W - mr) / 2 << "\" y=\"" << H - 12
        << "\" text-anchor=\"middle\" font-size=\"13\">" << xlabel_ << "</text>\n";
    out << "<text x=\"18\" y=\"" << (mt + H - mb) / 2
        << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 "
        << (mt + H - mb) / 2 << ")\">" << ylabel_ << "</text>\n";

    for (size_t si = 0; si < series_.size(); ++si) {
        const Series& s = series_[si];
        const char* color = kColors[si % 6];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (size_t i = 0; i < s.x.size(); ++i) {
            if (logx_ && !(s.x[i] > 0)) continue;
            if (logy_ && !(s.y[i] > 0)) continue;
            out << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
        }
        out << "\"/>\n";
        if (s.markers) {
            for (size_t i = 0; i < s.x.size(); ++i) {
                if (logx_ && !(s.x[i] > 0)) continue;
                if (logy_ && !(s.y[i] > 0)) continue;
                out << "<circle cx=\"" << px(s.x[i]) << "\" cy=\"" << py(s.y[i])
                    << "\" r=\"3\" fill=\"" << color << "\"/>\n";
            }
        }
        out << "<rect x=\"" << ml + 10 << "\" y=\"" << mt + 8 + 18 * si
            << "\" width=\"14\" height=\"4\" fill=\"" << color << "\"/>\n"
            << "<text x=\"" << ml + 30 << "\" y=\"" << mt + 14 + 18 * si
            << "\" font-size=\"12\">" << s.label << "</text>\n";
    }
    out << "</svg>\n";
}

} // namespace kerrdiv
