#include "kerrdiv/ansatz.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kerrdiv {

ModeInterpolant::ModeInterpolant(const Grid1D& grid, Eigen::VectorXd samples,
                                 double left_limit_at_interface)
    : grid_(grid), f_(std::move(samples)), left_limit_(left_limit_at_interface) {
    if (f_.size() != grid_.n_points())
        throw std::invalid_argument("ModeInterpolant: sample count mismatch");
    const int m = grid_.interface_index();
    if (m < 3 || m + 3 >= grid_.n_points())
        throw std::invalid_argument("ModeInterpolant: need 4 nodes per side");
}

double ModeInterpolant::operator()(double x1, Side side) const {
    const double left = grid_.left(), right = grid_.right(), h = grid_.spacing();
    if (x1 < left || x1 > right) return 0.0;
    const int n = grid_.n_points();
    const int m = grid_.interface_index();

    if (x1 > 0.25 * h) side = Side::Plus;
    else if (x1 < -0.25 * h) side = Side::Minus;

    const int lo = side == Side::Minus ? 0 : m;
    const int hi = side == Side::Minus ? m : n - 1;
    int cell = static_cast<int>(std::floor((x1 - left) / h));
    cell = std::clamp(cell, lo, hi - 1);
    int j0 = std::clamp(cell - 1, lo, hi - 3);

    const double t = (x1 - grid_.point(j0)) / h;
    double result = 0.0;
    for (int a = 0; a < 4; ++a) {
        double basis = 1.0;
        for (int c = 0; c < 4; ++c) {
            if (c == a) continue;
            basis *= (t - c) / (a - c);
        }
        const int idx = j0 + a;
        const double fv = (idx == m && side == Side::Minus) ? left_limit_ : f_[idx];
        result += basis * fv;
    }
    return result;
}

AnsatzField::AnsatzField(const InterfaceMode& mode, const DielectricProfile& profile,
                         Envelope envelope, double eps)
    : profile_(profile), envelope_(std::move(envelope)), grid_(mode.grid), eps_(eps),
      k0_(mode.k0), omega0_(mode.omega0) {
    if (!(eps > 0.0) || !(eps < 1.0))
        throw std::invalid_argument("AnsatzField: eps must lie in (0, 1)");
    w3_ = ModeInterpolant(grid_, mode.w3, mode.w3[grid_.interface_index()]);
    w2t_ = ModeInterpolant(grid_, mode.w2_imag, mode.w2_imag_left0);
    w1_samples_ = mode.w1;
    w2t_samples_ = mode.w2_imag;
}

double AnsatzField::w1_at(double x1, Side side) const {
    const double e1 = side == Side::Plus ? (x1 >= 0.0 ? profile_.eps1(x1) : profile_.eps1_plus0())
                                         : (x1 < 0.0 ? profile_.eps1(x1) : profile_.eps1_minus0());
    return -k0_ / (omega0_ * e1) * w3_(x1, side);
}

double AnsatzField::w2_imag_at(double x1, Side side) const { return w2t_(x1, side); }

Eigen::Vector2d AnsatzField::u0(const Eigen::Vector2d& x) const {
    return u0(x, x[0] >= 0.0 ? Side::Plus : Side::Minus);
}

Eigen::Vector2d AnsatzField::u0(const Eigen::Vector2d& x, Side side) const {
    const double amp = 2.0 * eps_ * envelope_.value(eps_ * x[1]);
    const double c = std::cos(k0_ * x[1]);
    const double s = std::sin(k0_ * x[1]);
    return {amp * w1_at(x[0], side) * c, -amp * w2t_(x[0], side) * s};
}

double AnsatzField::b(const Eigen::Vector2d& x) const {
    const Side side = x[0] >= 0.0 ? Side::Plus : Side::Minus;
    const double e1 = profile_.eps1(x[0]);
    return -2.0 * eps_ * eps_ * e1 * envelope_.deriv(eps_ * x[1]) * w2t_(x[0], side) *
           std::sin(k0_ * x[1]);
}

double AnsatzField::envelope_cutoff() const {
    double zmax = 1e-6;
    for (int k = 0; k < 64; ++k) {
        double peak = 0.0, tail = 0.0;
        const int samples = 512;
        for (int i = 1; i <= samples; ++i) {
            const double z = zmax * i / samples;
            const double a = std::fabs(envelope_.value(z)) + std::fabs(envelope_.deriv(z));
            peak = std::max(peak, a);
            if (i > samples - 16) tail = std::max(tail, a);
        }
        if (peak == 0.0) return 1.0;
        if (tail <= 1e-12 * peak) return zmax / eps_;
        zmax *= 2.0;
        if (zmax > 1e7)
            throw std::domain_error(
                "AnsatzField::norms: envelope does not decay; pass an explicit x2 halfwidth");
    }
    return zmax / eps_;
}

namespace {

double cubic_table(const std::vector<double>& table, double step, double y) {
    const int n = static_cast<int>(table.size());
    if (n == 1) return table[0];
    double t = y / step;
    int j0 = std::clamp(static_cast<int>(std::floor(t)) - 1, 0, n - 4);
    double result = 0.0;
    for (int a = 0; a < 4; ++a) {
        double basis = 1.0;
        for (int c = 0; c < 4; ++c) {
            if (c == a) continue;
            basis *= (t - j0 - c) / (a - c);
        }
        result += basis * table[j0 + a];
    }
    return result;
}

} // namespace

namespace {

// Largest stride <= wanted that divides the interval count.
int divisor_stride(int intervals, int wanted) {
    int d = std::clamp(wanted, 1, intervals);
    while (d > 1 && intervals % d != 0) --d;
    return d;
}

} // namespace

NormReport AnsatzField::norms_at_resolution(double x2_halfwidth, int points_per_unit,
                                            int tab_stride) const {
    const int n1 = grid_.n_points();
    const double h1 = grid_.spacing();

    // x1 moments of the mode components (trapezoid over the mode grid).
    double Iw1sq = 0, Iw2sq = 0, Iw1_4 = 0, Iw2_4 = 0, Iw1w2 = 0, Ie1w2sq = 0;
    for (int i = 0; i < n1; ++i) {
        const double wgt = (i == 0 || i == n1 - 1) ? 0.5 * h1 : h1;
        const double a = w1_samples_[i], b2 = w2t_samples_[i];
        const double e1 = profile_.eps1(grid_.point(i));
        Iw1sq += wgt * a * a;
        Iw2sq += wgt * b2 * b2;
        Iw1_4 += wgt * a * a * a * a;
        Iw2_4 += wgt * b2 * b2 * b2 * b2;
        Iw1w2 += wgt * a * a * b2 * b2;
        Ie1w2sq += wgt * e1 * e1 * b2 * b2;
    }

    // The log weight is smooth in x1 and evaluated on a strided grid only;
    // |w2~| itself (which has kinks at its zeros) keeps full resolution
    // through per-segment linear moments.
    const int stride = divisor_stride(n1 - 1, tab_stride);
    const int nseg = (n1 - 1) / stride;
    std::vector<double> seg_m0(nseg, 0.0), seg_m1(nseg, 0.0), seg_x(nseg + 1);
    for (int s = 0; s <= nseg; ++s) seg_x[s] = grid_.point(s * stride);
    for (int i = 0; i < n1; ++i) {
        const double wgt = (i == 0 || i == n1 - 1) ? 0.5 * h1 : h1;
        const double val = wgt * profile_.eps1(grid_.point(i)) * std::fabs(w2t_samples_[i]);
        const int s = std::min(i / stride, nseg - 1);
        const double t = static_cast<double>(i - s * stride) / stride;
        seg_m0[s] += val * (1.0 - t);
        seg_m1[s] += val * t;
    }

    const double X2 = x2_halfwidth;
    int n2 = 2 * std::max(4, static_cast<int>(std::ceil(X2 * points_per_unit)));
    const double h2 = 2.0 * X2 / n2;

    // Composite Simpson over [-X2, X2] for the separable x2 factors.
    double IA2c2 = 0, IA2s2 = 0, IA4c4 = 0, IA4c2s2 = 0, IA4s4 = 0, IAd2s2 = 0;
    for (int i = 0; i <= n2; ++i) {
        const double y = -X2 + h2 * i;
        const double w = (i == 0 || i == n2) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        const double A = envelope_.value(eps_ * y);
        const double Ad = envelope_.deriv(eps_ * y);
        const double c2 = std::cos(k0_ * y) * std::cos(k0_ * y);
        const double s2 = 1.0 - c2;
        IA2c2 += w * A * A * c2;
        IA2s2 += w * A * A * s2;
        IA4c4 += w * A * A * A * A * c2 * c2;
        IA4c2s2 += w * A * A * A * A * c2 * s2;
        IA4s4 += w * A * A * A * A * s2 * s2;
        IAd2s2 += w * Ad * Ad * s2;
    }
    const double simpson = h2 / 3.0;
    IA2c2 *= simpson; IA2s2 *= simpson; IA4c4 *= simpson;
    IA4c2s2 *= simpson; IA4s4 *= simpson; IAd2s2 *= simpson;

    NormReport rep;
    rep.U0_L2 = std::sqrt(4.0 * eps_ * eps_ * (Iw1sq * IA2c2 + Iw2sq * IA2s2));
    rep.U0_L4 = std::pow(16.0 * std::pow(eps_, 4) *
                             (Iw1_4 * IA4c4 + 2.0 * Iw1w2 * IA4c2s2 + Iw2_4 * IA4s4),
                         0.25);
    rep.b_L2 = std::sqrt(4.0 * std::pow(eps_, 4) * Ie1w2sq * IAd2s2);

    // L1(log) norm of b: the weight log(2 + |x|) does not separate, so the
    // x1 integral is tabulated against |x2| and interpolated.
    const int ntab = std::clamp(n2 / 16 + 1, 65, 2049);
    const double ytab_step = X2 / (ntab - 1);
    std::vector<double> S(ntab, 0.0);
    for (int j = 0; j < ntab; ++j) {
        const double y = ytab_step * j;
        double acc = 0.0;
        double log_right = std::log(2.0 + std::hypot(seg_x[0], y));
        for (int s = 0; s < nseg; ++s) {
            const double log_left = log_right;
            log_right = std::log(2.0 + std::hypot(seg_x[s + 1], y));
            acc += seg_m0[s] * log_left + seg_m1[s] * log_right;
        }
        S[j] = acc;
    }
    // |sin(k0 y)| kinks at multiples of pi/k0; integrate each half-period
    // with its own Simpson rule so the rule never straddles a kink.
    auto ilog_integrand = [&](double y) {
        return std::fabs(envelope_.deriv(eps_ * y)) * std::fabs(std::sin(k0_ * y)) *
               cubic_table(S, ytab_step, std::fabs(y));
    };
    const double half_period = M_PI / std::fabs(k0_);
    double Ilog = 0.0;
    const long jlo = static_cast<long>(std::floor(-X2 / half_period));
    const long jhi = static_cast<long>(std::ceil(X2 / half_period));
    for (long j = jlo; j < jhi; ++j) {
        const double lo = std::max(-X2, j * half_period);
        const double hi = std::min(X2, (j + 1) * half_period);
        if (hi <= lo) continue;
        int nsub = std::max(16, static_cast<int>(std::ceil((hi - lo) * points_per_unit)));
        nsub += nsub % 2;
        const double hs = (hi - lo) / nsub;
        double acc = ilog_integrand(lo) + ilog_integrand(hi);
        for (int i = 1; i < nsub; ++i)
            acc += (i % 2 == 1 ? 4.0 : 2.0) * ilog_integrand(lo + i * hs);
        Ilog += acc * hs / 3.0;
    }
    rep.b_L1log = 2.0 * eps_ * eps_ * Ilog;
    return rep;
}

NormReport AnsatzField::norms(double x2_halfwidth, int points_per_unit) const {
    const double X2 = x2_halfwidth > 0.0 ? x2_halfwidth : envelope_cutoff();
    const int tab_stride = std::max(1, static_cast<int>(std::floor(0.05 / grid_.spacing())));
    const NormReport coarse = norms_at_resolution(X2, points_per_unit, tab_stride);
    const NormReport fine =
        norms_at_resolution(X2, 2 * points_per_unit, std::max(1, tab_stride / 2));

    auto check = [](double a, double b, const char* name) {
        const double scale = std::max(std::fabs(a), std::fabs(b));
        if (scale > 0.0 && std::fabs(a - b) > 1e-4 * scale)
            throw std::runtime_error(std::string("AnsatzField::norms: quadrature self-check "
                                                 "failed for ") + name);
    };
    check(coarse.U0_L2, fine.U0_L2, "U0_L2");
    check(coarse.U0_L4, fine.U0_L4, "U0_L4");
    check(coarse.b_L2, fine.b_L2, "b_L2");
    check(coarse.b_L1log, fine.b_L1log, "b_L1log");
    return fine;
}

double fit_loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw std::invalid_argument("fit_loglog_slope: need at least two points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(xs.size());
    for (size_t i = 0; i < xs.size(); ++i) {
        const double lx = std::log(xs[i]), ly = std::log(ys[i]);
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace kerrdiv
