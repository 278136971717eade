#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "psv/grid.hpp"

namespace psv {

/// Parse error carrying the byte offset into the source text.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, std::size_t position)
        : Error(msg + " at position " + std::to_string(position)), position_(position) {}
    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

/// Immutable expression tree over variables x1..x4. Supported nodes:
/// constants, neg, abs, sin, cos, exp, sqrt, +, -, *, /, pow with a constant
/// exponent, and binary min/max. Depth is capped at 32.
class Expr {
public:
    Expr() = default;

    static Expr parse(std::string_view text, int dim);
    static Expr constant(double v);
    static Expr variable(int axis, int dim);

    bool valid() const { return node_ != nullptr; }
    double eval(const double* x) const;
    /// Symbolic partial derivative; throws when an abs/min/max node is hit.
    Expr derivative(int axis) const;
    bool differentiable() const;
    std::string str() const;
    int dim() const { return dim_; }

    GridFunction sample(const GridPtr& grid, bool nonneg = false) const;

    Expr operator+(const Expr&) const;
    Expr operator-(const Expr&) const;
    Expr operator*(const Expr&) const;

    struct Node;

private:
    std::shared_ptr<const Node> node_;
    int dim_ = 0;

    explicit Expr(std::shared_ptr<const Node> node, int dim) : node_(std::move(node)), dim_(dim) {}
    friend class ExprParser;
    friend struct ExprOps;
};

}  // namespace psv
