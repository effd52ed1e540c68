#pragma once

#include <memory>
#include <string>

namespace irrev {

/// Variables visible to an expression.
struct ExprVars {
    double x = 0.0;
    double t = 0.0;
    double s = 0.0;
};

/// Compiled arithmetic expression over x, t and s.
///
/// Grammar: numbers, the variables x t s, constants pi and e, binary + - * / ^,
/// unary minus, parentheses, and the functions sin cos tan exp log sqrt abs
/// tanh atan step (Heaviside, step(0) = 0), min, max, pow.
/// Immutable after parsing; copies share the tree.
class Expression {
public:
    static Expression parse(const std::string& text);

    double operator()(const ExprVars& vars) const;
    double operator()(double x, double t) const { return (*this)(ExprVars{x, t, 0.0}); }

    const std::string& text() const { return text_; }

    struct Node;

private:
    Expression(std::string text, std::shared_ptr<const Node> root);
    std::string text_;
    std::shared_ptr<const Node> root_;
};

}  // namespace irrev
