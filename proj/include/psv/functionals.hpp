#pragma once

#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "psv/expr.hpp"
#include "psv/kernel.hpp"
#include "psv/weights.hpp"

namespace psv {

struct LengthRule {
    enum Kind { diameter, side } kind = diameter;
    int axis = 0;

    static LengthRule Diameter() { return {}; }
    static LengthRule Side(int axis) { return {side, axis}; }
};

/// a(R) = len(R)^m * ((1/w(R)) \int_R |grad^m f|^p w)^{1/p}; the derivative
/// magnitude field is precomputed (symbolically when possible).
struct GradientFunctional {
    int order = 1;
    double p = 1.0;
    std::shared_ptr<const Weight> w;            // null = Lebesgue
    LengthRule length;
    std::shared_ptr<const GridFunction> deriv;  // |grad^m f| sampled on the grid
};

/// a(R) = d(R)^delta (mu(R)/w(R))^{1/p}
struct MeasureFunctional {
    double delta = 1.0;
    double p = 1.0;
    std::shared_ptr<const GridFunction> mu;     // density of the measure
    std::shared_ptr<const Weight> w;            // null = Lebesgue
};

/// a(R) = pre(R) * ((1/w(R)) \int_R A(R,x) w(x) dx)^{1/p} with
/// A(R,x) = \int_R |f(x)-f(y)|^p / |x-y|^{n+delta p} dy. The prefactor is
/// |R|^{delta/n} by default and d(R)^delta / e(R)^{n/p} when the
/// eccentricity factor is requested.
struct FractionalFunctional {
    double delta = 0.5;
    double p = 1.0;
    std::shared_ptr<const Weight> w;            // outer weight; null = Lebesgue
    bool eccentricity_factor = false;
    KernelOptions kernel;
};

/// One half of the cube-product fractional pair:
/// a_b(R) = l_b^delta * ((1/W) \int_R \int_{I_b} |f(u)-f(v)|^p /
/// |u_b - v_b|^{n_b + delta p} [w(u)] dv_b du)^{1/p}, W = w(R) or |R|.
struct BlockFractional {
    int block = 0;
    double delta = 0.5;
    double p = 1.0;
    bool weighted = false;
    std::shared_ptr<const Weight> w;
    KernelOptions kernel;
};

struct ConstantFunctional {};

struct SumFunctional;

using Functional = std::variant<GradientFunctional, MeasureFunctional, FractionalFunctional,
                                BlockFractional, ConstantFunctional,
                                std::shared_ptr<const SumFunctional>>;

struct SumFunctional {
    std::vector<Functional> parts;
};

Functional sum_functional(std::vector<Functional> parts);

double eval_functional(const Functional& spec, const GridFunction& f, const Rect& r);

/// Pointwise Euclidean norm of the order-m derivative tensor restricted
/// to a block of axes (all axes when block < 0), including multiplicities.
GridFunction derivative_field(const Expr& f, const GridPtr& grid, int block, int order);
GridFunction derivative_field_fd(const GridFunction& f, int block, int order);

/// Per-axis symbolic partial derivatives sampled on the grid.
std::vector<GridFunction> gradient_fields(const Expr& f, const GridPtr& grid);

/// Kernel axes of a block (block < 0 selects all axes).
std::vector<int> block_axes(const Box& box, int block);

/// A(R, x) = int_R |f(x)-f(y)|^p / |x-y|^{n+delta p} dy at every cell of r\n/// (flat-iteration order).
std::vector<double> fractional_a_values(const GridFunction& f, const Rect& r, double delta,
                                        double p, const KernelOptions& opts = {});

double fractional_seminorm(const GridFunction& f, const Rect& r, double delta, double p,
                           const KernelOptions& opts = {});

}  // namespace psv
