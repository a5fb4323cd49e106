#pragma once

#include <functional>
#include <memory>
#include <string>

namespace kerrdiv {

/// A compiled single-variable arithmetic expression.
///
/// Supported grammar: +, -, *, /, ^ (right associative), parentheses,
/// the variable "x", numeric literals, the constants pi and e, and the
/// functions exp, log, sin, cos, tan, sinh, cosh, tanh, sqrt, abs.
class Expression {
public:
    struct Node;

    static Expression parse(const std::string& text);

    double operator()(double x) const;

    /// Derivative by fourth-order central differences.
    double derivative(double x) const;

    const std::string& text() const { return text_; }

private:
    explicit Expression(std::shared_ptr<const Node> root, std::string text);
    std::shared_ptr<const Node> root_;
    std::string text_;
};

} // namespace kerrdiv
