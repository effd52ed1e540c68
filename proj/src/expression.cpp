#include "irrev/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <vector>

#include "irrev/error.hpp"

namespace irrev {

struct Expression::Node {
    enum class Kind { Number, VarX, VarT, VarS, Neg, Add, Sub, Mul, Div, Pow, Call };
    Kind kind = Kind::Number;
    double value = 0.0;
    std::string fn;
    std::vector<std::shared_ptr<const Node>> args;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Kind = Expression::Node::Kind;

NodePtr make(Kind k, std::vector<NodePtr> args = {}) {
    auto n = std::make_shared<Expression::Node>();
    n->kind = k;
    n->args = std::move(args);
    return n;
}

class Parser {
public:
    explicit Parser(const std::string& s) : s_(s) {}

    NodePtr parse() {
        NodePtr e = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected character");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw ConfigError("expression '" + s_ + "': " + what + " at offset " +
                          std::to_string(pos_));
    }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr expr() {
        NodePtr lhs = term();
        for (;;) {
            if (accept('+'))
                lhs = make(Kind::Add, {lhs, term()});
            else if (accept('-'))
                lhs = make(Kind::Sub, {lhs, term()});
            else
                return lhs;
        }
    }

    NodePtr term() {
        NodePtr lhs = unary();
        for (;;) {
            if (accept('*'))
                lhs = make(Kind::Mul, {lhs, unary()});
            else if (accept('/'))
                lhs = make(Kind::Div, {lhs, unary()});
            else
                return lhs;
        }
    }

    NodePtr unary() {
        if (accept('-')) return make(Kind::Neg, {unary()});
        if (accept('+')) return unary();
        return power();
    }

    // Right associative; binds tighter than unary minus on its left: -x^2 = -(x^2).
    NodePtr power() {
        NodePtr base = primary();
        if (accept('^')) return make(Kind::Pow, {base, unary()});
        return base;
    }

    NodePtr primary() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end");
        const char c = s_[pos_];
        if (accept('(')) {
            NodePtr e = expr();
            if (!accept(')')) fail("missing ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const char* begin = s_.c_str() + pos_;
            char* end = nullptr;
            const double v = std::strtod(begin, &end);
            if (end == begin) fail("bad number");
            pos_ += static_cast<std::size_t>(end - begin);
            auto n = std::make_shared<Expression::Node>();
            n->value = v;
            return n;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < s_.size() &&
                   (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
                ++pos_;
            const std::string name = s_.substr(start, pos_ - start);
            if (accept('(')) return call(name);
            if (name == "x") return make(Kind::VarX);
            if (name == "t") return make(Kind::VarT);
            if (name == "s") return make(Kind::VarS);
            auto n = std::make_shared<Expression::Node>();
            if (name == "pi")
                n->value = std::numbers::pi;
            else if (name == "e")
                n->value = std::numbers::e;
            else
                fail("unknown identifier '" + name + "'");
            return n;
        }
        fail("unexpected character");
    }

    NodePtr call(const std::string& name) {
        static const std::vector<std::pair<std::string, std::size_t>> known = {
            {"sin", 1},  {"cos", 1},  {"tan", 1},  {"exp", 1},  {"log", 1},
            {"sqrt", 1}, {"abs", 1},  {"tanh", 1}, {"atan", 1}, {"step", 1},
            {"min", 2},  {"max", 2},  {"pow", 2}};
        std::size_t arity = 0;
        for (const auto& [fn, k] : known)
            if (fn == name) arity = k;
        if (arity == 0) fail("unknown function '" + name + "'");
        std::vector<NodePtr> args;
        args.push_back(expr());
        while (accept(',')) args.push_back(expr());
        if (!accept(')')) fail("missing ')' after arguments");
        if (args.size() != arity) fail("wrong number of arguments to '" + name + "'");
        auto n = std::make_shared<Expression::Node>();
        n->kind = Kind::Call;
        n->fn = name;
        n->args = std::move(args);
        return n;
    }

    const std::string& s_;
    std::size_t pos_ = 0;
};

double eval(const Expression::Node& n, const ExprVars& v) {
    switch (n.kind) {
        case Kind::Number: return n.value;
        case Kind::VarX: return v.x;
        case Kind::VarT: return v.t;
        case Kind::VarS: return v.s;
        case Kind::Neg: return -eval(*n.args[0], v);
        case Kind::Add: return eval(*n.args[0], v) + eval(*n.args[1], v);
        case Kind::Sub: return eval(*n.args[0], v) - eval(*n.args[1], v);
        case Kind::Mul: return eval(*n.args[0], v) * eval(*n.args[1], v);
        case Kind::Div: return eval(*n.args[0], v) / eval(*n.args[1], v);
        case Kind::Pow: return std::pow(eval(*n.args[0], v), eval(*n.args[1], v));
        case Kind::Call: break;
    }
    const double a = eval(*n.args[0], v);
    const std::string& f = n.fn;
    if (f == "sin") return std::sin(a);
    if (f == "cos") return std::cos(a);
    if (f == "tan") return std::tan(a);
    if (f == "exp") return std::exp(a);
    if (f == "log") return std::log(a);
    if (f == "sqrt") return std::sqrt(a);
    if (f == "abs") return std::abs(a);
    if (f == "tanh") return std::tanh(a);
    if (f == "atan") return std::atan(a);
    if (f == "step") return a > 0.0 ? 1.0 : 0.0;
    const double b = eval(*n.args[1], v);
    if (f == "min") return std::min(a, b);
    if (f == "max") return std::max(a, b);
    return std::pow(a, b);
}

}  // namespace

Expression::Expression(std::string text, std::shared_ptr<const Node> root)
    : text_(std::move(text)), root_(std::move(root)) {}

Expression Expression::parse(const std::string& text) {
    Parser p(text);
    return Expression(text, p.parse());
}

double Expression::operator()(const ExprVars& vars) const { return eval(*root_, vars); }

}  // namespace irrev
