#include "psv/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace psv {

enum class Op {
    constant, variable,
    neg, absval, sin_, cos_, exp_, sqrt_,
    add, sub, mul, div_, pow_,
    min_, max_
};

struct Expr::Node {
    Op op;
    double value = 0.0;  // constant value or pow exponent
    int axis = 0;
    std::shared_ptr<const Node> a, b;
    int depth = 1;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

constexpr int kMaxExprDepth = 32;

NodePtr make_node(Op op, double value, int axis, NodePtr a, NodePtr b) {
    auto n = std::make_shared<Expr::Node>();
    n->op = op;
    n->value = value;
    n->axis = axis;
    int d = 0;
    if (a) d = std::max(d, a->depth);
    if (b) d = std::max(d, b->depth);
    n->a = std::move(a);
    n->b = std::move(b);
    n->depth = d + 1;
    if (n->depth > kMaxExprDepth) throw Error("expression: tree depth exceeds 32");
    return n;
}

NodePtr constant_node(double v) { return make_node(Op::constant, v, 0, nullptr, nullptr); }

bool is_const(const NodePtr& n, double v) { return n->op == Op::constant && n->value == v; }

double eval_node(const Expr::Node* n, const double* x) {
    switch (n->op) {
        case Op::constant: return n->value;
        case Op::variable: return x[n->axis];
        case Op::neg: return -eval_node(n->a.get(), x);
        case Op::absval: return std::abs(eval_node(n->a.get(), x));
        case Op::sin_: return std::sin(eval_node(n->a.get(), x));
        case Op::cos_: return std::cos(eval_node(n->a.get(), x));
        case Op::exp_: return std::exp(eval_node(n->a.get(), x));
        case Op::sqrt_: return std::sqrt(eval_node(n->a.get(), x));
        case Op::add: return eval_node(n->a.get(), x) + eval_node(n->b.get(), x);
        case Op::sub: return eval_node(n->a.get(), x) - eval_node(n->b.get(), x);
        case Op::mul: return eval_node(n->a.get(), x) * eval_node(n->b.get(), x);
        case Op::div_: return eval_node(n->a.get(), x) / eval_node(n->b.get(), x);
        case Op::pow_: return std::pow(eval_node(n->a.get(), x), n->value);
        case Op::min_: return std::min(eval_node(n->a.get(), x), eval_node(n->b.get(), x));
        case Op::max_: return std::max(eval_node(n->a.get(), x), eval_node(n->b.get(), x));
    }
    return 0.0;
}

// Folding constructors keep derivative trees small.
NodePtr add_node(NodePtr a, NodePtr b) {
    if (a->op == Op::constant && b->op == Op::constant) return constant_node(a->value + b->value);
    if (is_const(a, 0.0)) return b;
    if (is_const(b, 0.0)) return a;
    return make_node(Op::add, 0, 0, std::move(a), std::move(b));
}

NodePtr sub_node(NodePtr a, NodePtr b) {
    if (a->op == Op::constant && b->op == Op::constant) return constant_node(a->value - b->value);
    if (is_const(b, 0.0)) return a;
    if (is_const(a, 0.0)) return make_node(Op::neg, 0, 0, std::move(b), nullptr);
    return make_node(Op::sub, 0, 0, std::move(a), std::move(b));
}

NodePtr mul_node(NodePtr a, NodePtr b) {
    if (a->op == Op::constant && b->op == Op::constant) return constant_node(a->value * b->value);
    if (is_const(a, 0.0) || is_const(b, 0.0)) return constant_node(0.0);
    if (is_const(a, 1.0)) return b;
    if (is_const(b, 1.0)) return a;
    return make_node(Op::mul, 0, 0, std::move(a), std::move(b));
}

NodePtr div_node(NodePtr a, NodePtr b) {
    if (is_const(a, 0.0)) return constant_node(0.0);
    if (is_const(b, 1.0)) return a;
    if (a->op == Op::constant && b->op == Op::constant && b->value != 0.0)
        return constant_node(a->value / b->value);
    return make_node(Op::div_, 0, 0, std::move(a), std::move(b));
}

NodePtr pow_node(NodePtr a, double e) {
    if (e == 0.0) return constant_node(1.0);
    if (e == 1.0) return a;
    if (a->op == Op::constant) return constant_node(std::pow(a->value, e));
    return make_node(Op::pow_, e, 0, std::move(a), nullptr);
}

NodePtr unary_node(Op op, NodePtr a) {
    if (a->op == Op::constant) {
        double v = a->value;
        switch (op) {
            case Op::neg: return constant_node(-v);
            case Op::absval: return constant_node(std::abs(v));
            case Op::sin_: return constant_node(std::sin(v));
            case Op::cos_: return constant_node(std::cos(v));
            case Op::exp_: return constant_node(std::exp(v));
            case Op::sqrt_: return constant_node(std::sqrt(v));
            default: break;
        }
    }
    return make_node(op, 0, 0, std::move(a), nullptr);
}

NodePtr diff_node(const NodePtr& n, int axis) {
    switch (n->op) {
        case Op::constant: return constant_node(0.0);
        case Op::variable: return constant_node(n->axis == axis ? 1.0 : 0.0);
        case Op::neg: return unary_node(Op::neg, diff_node(n->a, axis));
        case Op::absval:
        case Op::min_:
        case Op::max_:
            throw Error("expression: abs/min/max are not differentiable; use finite-difference mode");
        case Op::sin_: return mul_node(unary_node(Op::cos_, n->a), diff_node(n->a, axis));
        case Op::cos_:
            return mul_node(unary_node(Op::neg, unary_node(Op::sin_, n->a)), diff_node(n->a, axis));
        case Op::exp_: return mul_node(unary_node(Op::exp_, n->a), diff_node(n->a, axis));
        case Op::sqrt_:
            // d sqrt(u) = u' / (2 sqrt(u))
            return div_node(diff_node(n->a, axis),
                            mul_node(constant_node(2.0), unary_node(Op::sqrt_, n->a)));
        case Op::add: return add_node(diff_node(n->a, axis), diff_node(n->b, axis));
        case Op::sub: return sub_node(diff_node(n->a, axis), diff_node(n->b, axis));
        case Op::mul:
            return add_node(mul_node(diff_node(n->a, axis), n->b), mul_node(n->a, diff_node(n->b, axis)));
        case Op::div_: {
            NodePtr num = sub_node(mul_node(diff_node(n->a, axis), n->b),
                                   mul_node(n->a, diff_node(n->b, axis)));
            return div_node(num, pow_node(n->b, 2.0));
        }
        case Op::pow_:
            return mul_node(mul_node(constant_node(n->value), pow_node(n->a, n->value - 1.0)),
                            diff_node(n->a, axis));
    }
    return constant_node(0.0);
}

bool differentiable_node(const Expr::Node* n) {
    if (n == nullptr) return true;
    if (n->op == Op::absval || n->op == Op::min_ || n->op == Op::max_) return false;
    return differentiable_node(n->a.get()) && differentiable_node(n->b.get());
}

void print_node(const Expr::Node* n, std::ostream& os) {
    switch (n->op) {
        case Op::constant: os << format_double(n->value); break;
        case Op::variable: os << "x" << (n->axis + 1); break;
        case Op::neg: os << "(-"; print_node(n->a.get(), os); os << ")"; break;
        case Op::absval: os << "abs("; print_node(n->a.get(), os); os << ")"; break;
        case Op::sin_: os << "sin("; print_node(n->a.get(), os); os << ")"; break;
        case Op::cos_: os << "cos("; print_node(n->a.get(), os); os << ")"; break;
        case Op::exp_: os << "exp("; print_node(n->a.get(), os); os << ")"; break;
        case Op::sqrt_: os << "sqrt("; print_node(n->a.get(), os); os << ")"; break;
        case Op::add: os << "("; print_node(n->a.get(), os); os << "+"; print_node(n->b.get(), os); os << ")"; break;
        case Op::sub: os << "("; print_node(n->a.get(), os); os << "-"; print_node(n->b.get(), os); os << ")"; break;
        case Op::mul: os << "("; print_node(n->a.get(), os); os << "*"; print_node(n->b.get(), os); os << ")"; break;
        case Op::div_: os << "("; print_node(n->a.get(), os); os << "/"; print_node(n->b.get(), os); os << ")"; break;
        case Op::pow_: os << "("; print_node(n->a.get(), os); os << "^" << format_double(n->value) << ")"; break;
        case Op::min_: os << "min("; print_node(n->a.get(), os); os << ","; print_node(n->b.get(), os); os << ")"; break;
        case Op::max_: os << "max("; print_node(n->a.get(), os); os << ","; print_node(n->b.get(), os); os << ")"; break;
    }
}

}  // namespace

class ExprParser {
public:
    ExprParser(std::string_view text, int dim) : text_(text), dim_(dim) {}

    Expr run() {
        NodePtr n = parse_expr();
        skip_ws();
        if (pos_ < text_.size()) throw ParseError("unexpected trailing input", pos_);
        return Expr(std::move(n), dim_);
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    int dim_;

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    NodePtr parse_expr() {
        NodePtr n = parse_term();
        for (;;) {
            if (eat('+')) n = add_node(n, parse_term());
            else if (eat('-')) n = sub_node(n, parse_term());
            else return n;
        }
    }

    NodePtr parse_term() {
        NodePtr n = parse_power();
        for (;;) {
            if (eat('*')) n = mul_node(n, parse_power());
            else if (eat('/')) n = div_node(n, parse_power());
            else return n;
        }
    }

    NodePtr parse_power() {
        NodePtr base = parse_unary();
        if (eat('^')) {
            std::size_t at = pos_;
            NodePtr e = parse_unary();
            if (e->op != Op::constant) throw ParseError("pow exponent must be a constant", at);
            return pow_node(base, e->value);
        }
        return base;
    }

    NodePtr parse_unary() {
        if (eat('-')) return unary_node(Op::neg, parse_unary());
        return parse_primary();
    }

    NodePtr parse_primary() {
        skip_ws();
        if (pos_ >= text_.size()) throw ParseError("unexpected end of expression", pos_);
        char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (c == '(') {
            ++pos_;
            NodePtr n = parse_expr();
            if (!eat(')')) throw ParseError("expected ')'", pos_);
            return n;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) return parse_ident();
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }

    NodePtr parse_number() {
        const char* begin = text_.data() + pos_;
        char* end = nullptr;
        double v = std::strtod(begin, &end);
        if (end == begin) throw ParseError("malformed number", pos_);
        pos_ += std::size_t(end - begin);
        return constant_node(v);
    }

    NodePtr parse_ident() {
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        std::string name(text_.substr(start, pos_ - start));
        if (name == "pi") return constant_node(M_PI);
        if (name.size() >= 2 && name[0] == 'x') {
            int axis = std::atoi(name.c_str() + 1);
            if (axis < 1 || axis > dim_)
                throw ParseError("axis index out of range (dimension is " + std::to_string(dim_) + ")", start);
            return make_node(Op::variable, 0, axis - 1, nullptr, nullptr);
        }
        Op op;
        int arity = 1;
        if (name == "sin") op = Op::sin_;
        else if (name == "cos") op = Op::cos_;
        else if (name == "exp") op = Op::exp_;
        else if (name == "sqrt") op = Op::sqrt_;
        else if (name == "abs") op = Op::absval;
        else if (name == "min") { op = Op::min_; arity = 2; }
        else if (name == "max") { op = Op::max_; arity = 2; }
        else throw ParseError("unknown identifier '" + name + "'", start);
        if (!eat('(')) throw ParseError("expected '(' after '" + name + "'", pos_);
        NodePtr a = parse_expr();
        NodePtr b;
        if (arity == 2) {
            if (!eat(',')) throw ParseError("expected ',' in " + name, pos_);
            b = parse_expr();
        }
        if (!eat(')')) throw ParseError("expected ')'", pos_);
        if (arity == 1) return unary_node(op, std::move(a));
        return make_node(op, 0, 0, std::move(a), std::move(b));
    }
};

Expr Expr::parse(std::string_view text, int dim) {
    if (dim < 1 || dim > kMaxDim) throw Error("expression: dimension must be between 1 and 4");
    return ExprParser(text, dim).run();
}

Expr Expr::constant(double v) { return Expr(constant_node(v), 1); }

Expr Expr::variable(int axis, int dim) {
    if (axis < 0 || axis >= dim) throw Error("expression: variable axis out of range");
    return Expr(make_node(Op::variable, 0, axis, nullptr, nullptr), dim);
}

double Expr::eval(const double* x) const {
    if (!node_) throw Error("expression: empty");
    return eval_node(node_.get(), x);
}

Expr Expr::derivative(int axis) const {
    if (!node_) throw Error("expression: empty");
    return Expr(diff_node(node_, axis), dim_);
}

bool Expr::differentiable() const { return differentiable_node(node_.get()); }

std::string Expr::str() const {
    if (!node_) return "";
    std::ostringstream os;
    print_node(node_.get(), os);
    return os.str();
}

GridFunction Expr::sample(const GridPtr& grid, bool nonneg) const {
    if (grid->dim() < dim_) {
        // allow sampling a low-dimensional formula on any grid whose leading axes cover it
    }
    return GridFunction::sample(grid, [this](const double* x) { return eval(x); }, nonneg);
}

Expr Expr::operator+(const Expr& o) const { return Expr(add_node(node_, o.node_), std::max(dim_, o.dim_)); }
Expr Expr::operator-(const Expr& o) const { return Expr(sub_node(node_, o.node_), std::max(dim_, o.dim_)); }
Expr Expr::operator*(const Expr& o) const { return Expr(mul_node(node_, o.node_), std::max(dim_, o.dim_)); }

}  // namespace psv
