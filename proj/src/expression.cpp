#include "kerrdiv/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <vector>

namespace kerrdiv {

struct Expression::Node {
    enum class Kind { Number, Variable, Unary, Binary, Call };
    Kind kind = Kind::Number;
    double value = 0.0;
    char op = 0;
    std::string func;
    std::shared_ptr<const Node> lhs, rhs;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

class Parser {
public:
    explicit Parser(const std::string& s) : s_(s) {}

    NodePtr run() {
        NodePtr e = expr();
        skip_ws();
        if (pos_ != s_.size())
            fail("trailing characters");
        return e;
    }

private:
    const std::string& s_;
    size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw std::invalid_argument("expression parse error at position " +
                                    std::to_string(pos_) + " in \"" + s_ + "\": " + what);
    }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) { ++pos_; return true; }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }

    NodePtr expr() {
        NodePtr lhs = term();
        for (;;) {
            if (eat('+')) lhs = binary('+', lhs, term());
            else if (eat('-')) lhs = binary('-', lhs, term());
            else return lhs;
        }
    }

    NodePtr term() {
        NodePtr lhs = unary();
        for (;;) {
            if (eat('*')) lhs = binary('*', lhs, unary());
            else if (eat('/')) lhs = binary('/', lhs, unary());
            else return lhs;
        }
    }

    NodePtr unary() {
        if (eat('-')) {
            auto n = std::make_shared<Expression::Node>();
            n->kind = Expression::Node::Kind::Unary;
            n->op = '-';
            n->lhs = unary();
            return n;
        }
        if (eat('+')) return unary();
        return power();
    }

    NodePtr power() {
        NodePtr base = atom();
        if (eat('^')) return binary('^', base, unary());
        return base;
    }

    NodePtr atom() {
        skip_ws();
        if (pos_ >= s_.size()) fail("unexpected end of input");
        char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
            return number();
        if (std::isalpha(static_cast<unsigned char>(c)))
            return identifier();
        if (eat('(')) {
            NodePtr e = expr();
            if (!eat(')')) fail("expected ')'");
            return e;
        }
        fail(std::string("unexpected character '") + c + "'");
    }

    NodePtr number() {
        const char* begin = s_.c_str() + pos_;
        char* end = nullptr;
        double v = std::strtod(begin, &end);
        if (end == begin) fail("bad number");
        pos_ += static_cast<size_t>(end - begin);
        auto n = std::make_shared<Expression::Node>();
        n->kind = Expression::Node::Kind::Number;
        n->value = v;
        return n;
    }

    NodePtr identifier() {
        size_t start = pos_;
        while (pos_ < s_.size() &&
               (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
            ++pos_;
        std::string name = s_.substr(start, pos_ - start);
        if (name == "x") {
            auto n = std::make_shared<Expression::Node>();
            n->kind = Expression::Node::Kind::Variable;
            return n;
        }
        if (name == "pi" || name == "e") {
            auto n = std::make_shared<Expression::Node>();
            n->kind = Expression::Node::Kind::Number;
            n->value = name == "pi" ? M_PI : M_E;
            return n;
        }
        if (peek() == '(') {
            eat('(');
            NodePtr arg = expr();
            if (!eat(')')) fail("expected ')' after function argument");
            auto n = std::make_shared<Expression::Node>();
            n->kind = Expression::Node::Kind::Call;
            n->func = name;
            n->lhs = arg;
            return n;
        }
        fail("unknown identifier '" + name + "'");
    }

    static NodePtr binary(char op, NodePtr lhs, NodePtr rhs) {
        auto n = std::make_shared<Expression::Node>();
        n->kind = Expression::Node::Kind::Binary;
        n->op = op;
        n->lhs = std::move(lhs);
        n->rhs = std::move(rhs);
        return n;
    }
};

double eval(const Expression::Node& n, double x) {
    using Kind = Expression::Node::Kind;
    switch (n.kind) {
    case Kind::Number: return n.value;
    case Kind::Variable: return x;
    case Kind::Unary: return -eval(*n.lhs, x);
    case Kind::Binary: {
        double a = eval(*n.lhs, x), b = eval(*n.rhs, x);
        switch (n.op) {
        case '+': return a + b;
        case '-': return a - b;
        case '*': return a * b;
        case '/': return a / b;
        case '^': return std::pow(a, b);
        }
        break;
    }
    case Kind::Call: {
        double a = eval(*n.lhs, x);
        if (n.func == "exp") return std::exp(a);
        if (n.func == "log") return std::log(a);
        if (n.func == "sin") return std::sin(a);
        if (n.func == "cos") return std::cos(a);
        if (n.func == "tan") return std::tan(a);
        if (n.func == "sinh") return std::sinh(a);
        if (n.func == "cosh") return std::cosh(a);
        if (n.func == "tanh") return std::tanh(a);
        if (n.func == "sqrt") return std::sqrt(a);
        if (n.func == "abs") return std::fabs(a);
        throw std::invalid_argument("unknown function '" + n.func + "'");
    }
    }
    throw std::logic_error("corrupt expression node");
}

} // namespace

Expression::Expression(std::shared_ptr<const Node> root, std::string text)
    : root_(std::move(root)), text_(std::move(text)) {}

Expression Expression::parse(const std::string& text) {
    return Expression(Parser(text).run(), text);
}

double Expression::operator()(double x) const { return eval(*root_, x); }

double Expression::derivative(double x) const {
    const double h = 1e-5 * std::max(1.0, std::fabs(x));
    const double f1 = eval(*root_, x + h), f_1 = eval(*root_, x - h);
    const double f2 = eval(*root_, x + 2 * h), f_2 = eval(*root_, x - 2 * h);
    return (8.0 * (f1 - f_1) - (f2 - f_2)) / (12.0 * h);
}

} // namespace kerrdiv
