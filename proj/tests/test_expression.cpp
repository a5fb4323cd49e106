#include <doctest.h>

#include <cmath>

#include "kerrdiv/expression.hpp"

using kerrdiv::Expression;

TEST_CASE("expression evaluation") {
    CHECK(Expression::parse("1+exp(-x)")(0.0) == doctest::Approx(2.0));
    CHECK(Expression::parse("2*x^2")(3.0) == doctest::Approx(18.0));
    CHECK(Expression::parse("-x + 4/2")(1.0) == doctest::Approx(1.0));
    CHECK(Expression::parse("sin(pi/2)")(0.0) == doctest::Approx(1.0));
    CHECK(Expression::parse("2^3^1")(0.0) == doctest::Approx(8.0));
    CHECK(Expression::parse(" ( x - 1 ) * ( x + 1 ) ")(2.0) == doctest::Approx(3.0));
}

TEST_CASE("expression derivative") {
    const Expression e = Expression::parse("1+exp(-x)");
    for (double x : {-1.0, 0.0, 2.5})
        CHECK(e.derivative(x) == doctest::Approx(-std::exp(-x)).epsilon(1e-8));
    const Expression g = Expression::parse("tanh(x)*x");
    const double x = 0.7;
    CHECK(g.derivative(x) ==
          doctest::Approx(std::tanh(x) + x / std::pow(std::cosh(x), 2)).epsilon(1e-8));
}

TEST_CASE("expression parse errors") {
    CHECK_THROWS_AS(Expression::parse("1 +"), std::invalid_argument);
    CHECK_THROWS_AS(Expression::parse("foo(2)")(1.0), std::invalid_argument);
    CHECK_THROWS_AS(Expression::parse("y + 1"), std::invalid_argument);
    CHECK_THROWS_AS(Expression::parse("(1"), std::invalid_argument);
}
