#include "kerrdiv/envelope.hpp"

#include <cmath>

#include "kerrdiv/expression.hpp"

namespace kerrdiv {

Envelope Envelope::gaussian(double width) {
    return Envelope{
        [width](double y) { return std::exp(-width * y * y); },
        [width](double y) { return -2.0 * width * y * std::exp(-width * y * y); }};
}

Envelope Envelope::zero() {
    return Envelope{[](double) { return 0.0; }, [](double) { return 0.0; }};
}

Envelope Envelope::constant(double c) {
    return Envelope{[c](double) { return c; }, [](double) { return 0.0; }};
}

Envelope Envelope::from_expression(const std::string& text) {
    Expression expr = Expression::parse(text);
    return Envelope{[expr](double y) { return expr(y); },
                    [expr](double y) { return expr.derivative(y); }};
}

} // namespace kerrdiv
