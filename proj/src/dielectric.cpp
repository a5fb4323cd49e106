#include "kerrdiv/dielectric.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "kerrdiv/expression.hpp"

namespace kerrdiv {

DielectricProfile::DielectricProfile(SideFunction eps1_minus, SideFunction eps1_plus,
                                     SideFunction eps3_minus, SideFunction eps3_plus)
    : eps1_minus_(std::move(eps1_minus)), eps1_plus_(std::move(eps1_plus)),
      eps3_minus_(std::move(eps3_minus)), eps3_plus_(std::move(eps3_plus)) {}

double DielectricProfile::eps1(double x1) const {
    return x1 >= 0.0 ? eps1_plus_.value(x1) : eps1_minus_.value(x1);
}

double DielectricProfile::eps1_deriv(double x1) const {
    return x1 >= 0.0 ? eps1_plus_.deriv(x1) : eps1_minus_.deriv(x1);
}

double DielectricProfile::eps3(double x1) const {
    return x1 >= 0.0 ? eps3_plus_.value(x1) : eps3_minus_.value(x1);
}

double DielectricProfile::eps1_side(double x1, Side side) const {
    if (side == Side::Plus) return eps1_plus_.value(std::max(x1, 0.0));
    return x1 < 0.0 ? eps1_minus_.value(x1) : eps1_minus_.value(0.0);
}

double DielectricProfile::eps3_side(double x1, Side side) const {
    if (side == Side::Plus) return eps3_plus_.value(std::max(x1, 0.0));
    return x1 < 0.0 ? eps3_minus_.value(x1) : eps3_minus_.value(0.0);
}

double DielectricProfile::nu() const {
    return (eps1_plus0() - eps1_minus0()) / eps1_minus0();
}

void DielectricProfile::validate(const Grid1D& grid, double d) const {
    for (int i = 0; i < grid.n_points(); ++i) {
        const double x = grid.point(i);
        const double e1 = eps1(x), e3 = eps3(x), e1d = eps1_deriv(x);
        if (!(e1 >= d) || !(e3 >= d))
            throw std::domain_error("DielectricProfile: coefficient below positivity bound at x1=" +
                                    std::to_string(x));
        if (!std::isfinite(e1) || !std::isfinite(e3) || !std::isfinite(e1d))
            throw std::domain_error("DielectricProfile: non-finite coefficient at x1=" +
                                    std::to_string(x));
    }
    // The minus-side limit at 0 is not a grid sample under the x1 >= 0 convention.
    if (!(eps1_minus_.value(0.0) >= d) || !(eps3_minus_.value(0.0) >= d))
        throw std::domain_error("DielectricProfile: minus-side limit at 0 violates positivity");
}

DielectricProfile DielectricProfile::fig1() {
    SideFunction one{[](double) { return 1.0; }, [](double) { return 0.0; }};
    SideFunction plus{[](double x) { return 1.0 + std::exp(-x); },
                      [](double x) { return -std::exp(-x); }};
    return DielectricProfile(one, plus, one, one);
}

DielectricProfile DielectricProfile::piecewise_constant(double e1m, double e1p,
                                                        double e3m, double e3p) {
    auto constant = [](double c) {
        return SideFunction{[c](double) { return c; }, [](double) { return 0.0; }};
    };
    return DielectricProfile(constant(e1m), constant(e1p), constant(e3m), constant(e3p));
}

DielectricProfile DielectricProfile::from_expressions(const std::string& e1m,
                                                      const std::string& e1p,
                                                      const std::string& e3m,
                                                      const std::string& e3p) {
    auto side = [](const std::string& text) {
        Expression expr = Expression::parse(text);
        return SideFunction{[expr](double x) { return expr(x); },
                            [expr](double x) { return expr.derivative(x); }};
    };
    return DielectricProfile(side(e1m), side(e1p), side(e3m), side(e3p));
}

DielectricProfile DielectricProfile::mirrored() const {
    auto flip = [](const SideFunction& f) {
        return SideFunction{[f](double x) { return f.value(-x); },
                            [f](double x) { return -f.deriv(-x); }};
    };
    return DielectricProfile(flip(eps1_plus_), flip(eps1_minus_),
                             flip(eps3_plus_), flip(eps3_minus_));
}

} // namespace kerrdiv
