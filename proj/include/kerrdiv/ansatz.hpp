#pragma once

#include <vector>

#include <Eigen/Dense>

#include "kerrdiv/dielectric.hpp"
#include "kerrdiv/envelope.hpp"
#include "kerrdiv/mode_solver.hpp"
#include "kerrdiv/side.hpp"

namespace kerrdiv {

/// Piecewise-cubic interpolation of mode samples on a uniform grid. Stencil
/// windows never cross the interface node, so the derivative kink at x1 = 0
/// is not smeared. The sample at the interface carries the plus-side value;
/// an explicit minus-side limit is substituted for left-side windows.
class ModeInterpolant {
public:
    ModeInterpolant() = default;
    ModeInterpolant(const Grid1D& grid, Eigen::VectorXd samples, double left_limit_at_interface);

    /// Value at x1; the side of x1 = 0 picks the one-sided limit.
    double operator()(double x1, Side side) const;
    double operator()(double x1) const { return (*this)(x1, x1 >= 0.0 ? Side::Plus : Side::Minus); }

private:
    Grid1D grid_;
    Eigen::VectorXd f_;
    double left_limit_ = 0.0;
};

struct NormReport {
    double U0_L2 = 0.0;
    double U0_L4 = 0.0;
    double b_L2 = 0.0;
    double b_L1log = 0.0;
};

/// Real-valued wavepacket ansatz built from an interface mode and an
/// envelope:
///
///   U0_1(x) =  2 eps A(eps x2) w1(x1) cos(k0 x2)
///   U0_2(x) = -2 eps A(eps x2) w2~(x1) sin(k0 x2)
///   b(x)    = -2 eps^2 eps1(x1) A'(eps x2) w2~(x1) sin(k0 x2)
///
/// b is the reduced form of div(eps1 U0): the O(eps) part cancels through
/// the mode identity (eps1 w1)' - k eps1 w2~ = 0, so no numerical
/// differentiation is involved.
class AnsatzField {
public:
    AnsatzField(const InterfaceMode& mode, const DielectricProfile& profile,
                Envelope envelope, double eps);

    Eigen::Vector2d u0(const Eigen::Vector2d& x) const;
    Eigen::Vector2d u0(const Eigen::Vector2d& x, Side side) const;
    double b(const Eigen::Vector2d& x) const;

    double eps() const { return eps_; }
    double k0() const { return k0_; }
    double omega0() const { return omega0_; }
    const DielectricProfile& profile() const { return profile_; }
    const Envelope& envelope() const { return envelope_; }
    const Grid1D& mode_grid() const { return grid_; }

    /// Mode components at x1 (used by assembly caches).
    double w1_at(double x1, Side side) const;
    double w2_imag_at(double x1, Side side) const;

    /// L2/L4 norms of U0 and L2/L1(log) norms of b over the plane. The x2
    /// domain is [-x2_halfwidth, x2_halfwidth], or derived from the envelope
    /// tail when x2_halfwidth = 0. Throws std::runtime_error when the
    /// two-resolution self-check disagrees by more than 1e-4 relative.
    NormReport norms(double x2_halfwidth = 0.0, int points_per_unit = 200) const;

private:
    NormReport norms_at_resolution(double x2_halfwidth, int points_per_unit, int x1_stride) const;
    double envelope_cutoff() const;

    DielectricProfile profile_;
    Envelope envelope_;
    Grid1D grid_;
    double eps_;
    double k0_;
    double omega0_;
    ModeInterpolant w3_;
    ModeInterpolant w2t_;
    Eigen::VectorXd w1_samples_, w2t_samples_;
};

/// Least-squares slope of log(y) against log(x).
double fit_loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys);

} // namespace kerrdiv
