#include "psv/functionals.hpp"

#include <algorithm>
#include <cmath>

namespace psv {

Functional sum_functional(std::vector<Functional> parts) {
    auto s = std::make_shared<SumFunctional>();
    s->parts = std::move(parts);
    return Functional(std::shared_ptr<const SumFunctional>(s));
}

std::vector<int> block_axes(const Box& box, int block) {
    std::vector<int> axes;
    if (block < 0) {
        for (int a = 0; a < box.dim; ++a) axes.push_back(a);
        return axes;
    }
    if (box.basis != Basis::cube_product || block >= box.nblocks)
        throw Error("functional: block index needs a cube_product box with that many blocks");
    int begin = box.block_begin(block);
    for (int a = begin; a < begin + box.blocks[block]; ++a) axes.push_back(a);
    return axes;
}

namespace {

// all ordered m-tuples over the block axes; tuples sharing a multi-index
// enter the tensor norm with their natural multiplicity
void tuples(const std::vector<int>& axes, int order, std::vector<std::vector<int>>& out,
            std::vector<int>& cur) {
    if (int(cur.size()) == order) {
        out.push_back(cur);
        return;
    }
    for (int a : axes) {
        cur.push_back(a);
        tuples(axes, order, out, cur);
        cur.pop_back();
    }
}

}  // namespace

GridFunction derivative_field(const Expr& f, const GridPtr& grid, int block, int order) {
    if (order < 1 || order > 3) throw Error("derivative_field: order must be between 1 and 3");
    if (!f.differentiable())
        throw Error("derivative_field: expression has abs/min/max nodes; use finite-difference mode");
    std::vector<int> axes = block_axes(grid->box(), block);
    std::vector<std::vector<int>> tup;
    std::vector<int> cur;
    tuples(axes, order, tup, cur);

    std::vector<GridFunction> parts;
    parts.reserve(tup.size());
    for (const auto& t : tup) {
        Expr d = f;
        for (int a : t) d = d.derivative(a);
        parts.push_back(d.sample(grid));
    }
    std::vector<double> vals(std::size_t(grid->cell_count()), 0.0);
    for (std::int64_t i = 0; i < grid->cell_count(); ++i) {
        double s = 0.0;
        for (const auto& part : parts) s += part[i] * part[i];
        vals[std::size_t(i)] = std::sqrt(s);
    }
    return GridFunction(grid, std::move(vals), true);
}

GridFunction derivative_field_fd(const GridFunction& f, int block, int order) {
    if (order < 1 || order > 3) throw Error("derivative_field: order must be between 1 and 3");
    const GridPtr& grid = f.grid_ptr();
    std::vector<int> axes = block_axes(grid->box(), block);
    std::vector<std::vector<int>> tup;
    std::vector<int> cur;
    tuples(axes, order, tup, cur);

    std::vector<double> vals(std::size_t(grid->cell_count()), 0.0);
    for (const auto& t : tup) {
        GridFunction d = f;
        for (int a : t) d = numeric_gradient(d)[std::size_t(a)];
        for (std::int64_t i = 0; i < grid->cell_count(); ++i) vals[std::size_t(i)] += d[i] * d[i];
    }
    for (double& v : vals) v = std::sqrt(v);
    return GridFunction(grid, std::move(vals), true);
}

std::vector<GridFunction> gradient_fields(const Expr& f, const GridPtr& grid) {
    std::vector<GridFunction> out;
    for (int a = 0; a < grid->dim(); ++a) out.push_back(f.derivative(a).sample(grid));
    return out;
}

std::vector<double> fractional_a_values(const GridFunction& f, const Rect& r, double delta,
                                        double p, const KernelOptions& opts) {
    std::vector<double> rows = kernel_row_sums(f, r, delta, p, block_axes(r.root, -1), opts);
    // rows carry the outer cell measure; divide it out to get pointwise values
    double vol = f.grid().cell_volume();
    for (double& v : rows) v /= vol;
    return rows;
}

double fractional_seminorm(const GridFunction& f, const Rect& r, double delta, double p,
                           const KernelOptions& opts) {
    std::vector<double> rows = kernel_row_sums(f, r, delta, p, block_axes(r.root, -1), opts);
    // the pair weights carry both cell measures, so the row sum is already
    // the double integral over R x R
    KahanSum acc;
    for (double v : rows) acc.add(v);
    double scale = std::pow(r.measure(), delta / double(r.dim()));
    return scale * std::pow(acc.value() / r.measure(), 1.0 / p);
}

namespace {

double eval_gradient(const GradientFunctional& g, const Rect& r) {
    double len = g.length.kind == LengthRule::diameter ? r.diameter() : r.side(g.length.axis);
    const GridFunction& d = *g.deriv;
    const Grid& grid = d.grid();
    CellRange range = grid.cells(r);
    KahanSum acc;
    double wr;
    if (g.w) {
        const GridFunction& wd = g.w->density();
        for_each_cell(grid, range, [&](std::int64_t i) { acc.add(std::pow(d[i], g.p) * wd[i]); });
        wr = g.w->total(range);
    } else {
        for_each_cell(grid, range, [&](std::int64_t i) { acc.add(std::pow(d[i], g.p)); });
        wr = double(range.count()) * grid.cell_volume();
    }
    double norm = std::pow(acc.value() * grid.cell_volume() / wr, 1.0 / g.p);
    return std::pow(len, double(g.order)) * norm;
}

double eval_measure(const MeasureFunctional& m, const Rect& r) {
    double mu = integrate(*m.mu, r);
    double wr = m.w ? m.w->total(r) : r.measure();
    return std::pow(r.diameter(), m.delta) * std::pow(mu / wr, 1.0 / m.p);
}

double eval_fractional(const FractionalFunctional& s, const GridFunction& f, const Rect& r) {
    std::vector<double> rows = kernel_row_sums(f, r, s.delta, s.p, block_axes(r.root, -1), s.kernel);
    const Grid& grid = f.grid();
    CellRange range = grid.cells(r);
    KahanSum acc;
    double wr;
    if (s.w) {
        const GridFunction& wd = s.w->density();
        std::size_t at = 0;
        for_each_cell(grid, range, [&](std::int64_t i) { acc.add(rows[at++] * wd[i]); });
        wr = s.w->total(range);
    } else {
        for (double v : rows) acc.add(v);
        wr = r.measure();
    }
    double inner = acc.value() / wr;
    int n = r.dim();
    double pre = s.eccentricity_factor
                     ? std::pow(r.diameter(), s.delta) / std::pow(r.eccentricity(), double(n) / s.p)
                     : std::pow(r.measure(), s.delta / double(n));
    return pre * std::pow(inner, 1.0 / s.p);
}

double eval_block(const BlockFractional& b, const GridFunction& f, const Rect& r) {
    std::vector<int> axes = block_axes(r.root, b.block);
    KernelOptions opts = b.kernel;
    std::vector<double> rows = kernel_row_sums(f, r, b.delta, b.p, axes, opts);
    const Grid& grid = f.grid();
    CellRange range = grid.cells(r);
    KahanSum acc;
    double wr;
    if (b.weighted) {
        if (!b.w) throw Error("functional: weighted block form needs a weight");
        const GridFunction& wd = b.w->density();
        std::size_t at = 0;
        for_each_cell(grid, range, [&](std::int64_t i) { acc.add(rows[at++] * wd[i]); });
        wr = b.w->total(range);
    } else {
        for (double v : rows) acc.add(v);
        wr = r.measure();
    }
    double inner = acc.value() / wr;
    double side = r.side(axes.front());
    return std::pow(side, b.delta) * std::pow(inner, 1.0 / b.p);
}

}  // namespace

double eval_functional(const Functional& spec, const GridFunction& f, const Rect& r) {
    return std::visit(
        [&](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, GradientFunctional>) {
                return eval_gradient(s, r);
            } else if constexpr (std::is_same_v<T, MeasureFunctional>) {
                return eval_measure(s, r);
            } else if constexpr (std::is_same_v<T, FractionalFunctional>) {
                return eval_fractional(s, f, r);
            } else if constexpr (std::is_same_v<T, BlockFractional>) {
                return eval_block(s, f, r);
            } else if constexpr (std::is_same_v<T, ConstantFunctional>) {
                return 1.0;
            } else {
                KahanSum acc;
                for (const Functional& part : s->parts) acc.add(eval_functional(part, f, r));
                return acc.value();
            }
        },
        spec);
}

}  // namespace psv
