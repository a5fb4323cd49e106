#pragma once

#include <functional>
#include <string>

#include "kerrdiv/grid.hpp"
#include "kerrdiv/side.hpp"

namespace kerrdiv {

/// One side of a piecewise-smooth coefficient: value and first derivative.
struct SideFunction {
    std::function<double(double)> value;
    std::function<double(double)> deriv;
};

/// Piecewise-smooth permittivities eps1, eps3 with a single jump at x1 = 0.
/// The convention throughout is that x1 >= 0 evaluates the plus side.
class DielectricProfile {
public:
    DielectricProfile(SideFunction eps1_minus, SideFunction eps1_plus,
                      SideFunction eps3_minus, SideFunction eps3_plus);

    double eps1(double x1) const;
    double eps1_deriv(double x1) const;
    double eps3(double x1) const;

    double eps1_minus0() const { return eps1_minus_.value(0.0); }
    double eps1_plus0() const { return eps1_plus_.value(0.0); }
    double eps3_minus0() const { return eps3_minus_.value(0.0); }
    double eps3_plus0() const { return eps3_plus_.value(0.0); }

    /// Side-resolved values; at x1 = 0 the requested side's limit is taken.
    double eps1_side(double x1, Side side) const;
    double eps3_side(double x1, Side side) const;

    /// Relative jump of eps1 at the interface, nu = (eps1+(0) - eps1-(0)) / eps1-(0).
    double nu() const;

    /// Checks positivity (>= d > 0) and boundedness of value and derivative
    /// on the grid points. Throws std::domain_error on violation.
    void validate(const Grid1D& grid, double d = 1e-12) const;

    /// eps1- == 1, eps1+(x) = 1 + exp(-x), eps3 == 1 on both sides.
    static DielectricProfile fig1();

    static DielectricProfile piecewise_constant(double eps1_minus, double eps1_plus,
                                                double eps3_minus = 1.0,
                                                double eps3_plus = 1.0);

    /// Builds the profile from four expression strings in x.
    static DielectricProfile from_expressions(const std::string& eps1_minus,
                                              const std::string& eps1_plus,
                                              const std::string& eps3_minus,
                                              const std::string& eps3_plus);

    /// Profile reflected through the interface, x1 -> -x1.
    DielectricProfile mirrored() const;

private:
    SideFunction eps1_minus_, eps1_plus_, eps3_minus_, eps3_plus_;
};

} // namespace kerrdiv
