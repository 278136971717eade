#include "psv/grid.hpp"

#include <algorithm>
#include <cmath>

namespace psv {

namespace {

bool power_of_two(int n) { return n >= 1 && (n & (n - 1)) == 0; }

int log2_int(int n) {
    int l = 0;
    while ((1 << l) < n) ++l;
    return l;
}

}  // namespace

std::int64_t CellRange::count() const {
    std::int64_t c = 1;
    for (int a = 0; a < dim; ++a) c *= (end[a] - begin[a]);
    return c;
}

Grid::Grid(const Box& box, const std::vector<int>& resolution) : box_(box) {
    box_.validate();
    if (int(resolution.size()) != box_.dim) throw Error("grid: one resolution per axis required");
    max_depth_ = 1 << 30;
    cell_count_ = 1;
    cell_volume_ = 1.0;
    for (int a = 0; a < box_.dim; ++a) {
        int n = resolution[std::size_t(a)];
        if (n < 2) throw Error("grid: resolution must be at least 2 on axis " + std::to_string(a + 1));
        if (!power_of_two(n))
            throw Error("grid: resolution must be a power of two on axis " + std::to_string(a + 1) +
                        " (dyadic alignment would break)");
        res_[a] = n;
        step_[a] = box_.side(a) / double(n);
        cell_count_ *= n;
        cell_volume_ *= step_[a];
        max_depth_ = std::min(max_depth_, log2_int(n));
    }
    if (box_.basis == Basis::cube_product) {
        int axis = 0;
        for (int blk = 0; blk < box_.nblocks; ++blk) {
            for (int a = axis; a < axis + box_.blocks[blk]; ++a)
                if (res_[a] != res_[axis])
                    throw Error("grid: cube_product blocks need equal per-axis resolution");
            axis += box_.blocks[blk];
        }
    }
    stride_[0] = 1;
    for (int a = 1; a < box_.dim; ++a) stride_[a] = stride_[a - 1] * res_[a - 1];
}

GridPtr Grid::make(const Box& box, const std::vector<int>& resolution) {
    return std::make_shared<Grid>(box, resolution);
}

bool Grid::aligned(const Rect& r) const {
    if (!r.root.same_extent(box_)) return false;
    return r.level <= max_depth_;
}

CellRange Grid::cells(const Rect& r) const {
    if (!aligned(r))
        throw Error("grid: rectangle " + r.address() + " is not cell-aligned (resolution too coarse)");
    CellRange out;
    out.dim = box_.dim;
    for (int a = 0; a < box_.dim; ++a) {
        std::int64_t per = std::int64_t(res_[a]) >> r.level;
        out.begin[a] = r.index[a] * per;
        out.end[a] = out.begin[a] + per;
    }
    return out;
}

CellRange Grid::all_cells() const {
    CellRange out;
    out.dim = box_.dim;
    for (int a = 0; a < box_.dim; ++a) {
        out.begin[a] = 0;
        out.end[a] = res_[a];
    }
    return out;
}

std::int64_t Grid::flat(const std::array<std::int64_t, kMaxDim>& idx) const {
    std::int64_t f = 0;
    for (int a = 0; a < box_.dim; ++a) f += idx[a] * stride_[a];
    return f;
}

void Grid::unflat(std::int64_t flat, std::array<std::int64_t, kMaxDim>& idx) const {
    for (int a = 0; a < box_.dim; ++a) {
        idx[a] = flat % res_[a];
        flat /= res_[a];
    }
}

void Grid::cell_center(std::int64_t flat, double* x) const {
    std::array<std::int64_t, kMaxDim> idx{};
    unflat(flat, idx);
    for (int a = 0; a < box_.dim; ++a) x[a] = center(a, idx[a]);
}

void for_each_cell(const Grid& grid, const CellRange& range,
                   const std::function<void(std::int64_t)>& fn) {
    int n = range.dim;
    for (int a = 0; a < n; ++a)
        if (range.begin[a] >= range.end[a]) return;
    std::array<std::int64_t, kMaxDim> idx = range.begin;
    for (;;) {
        fn(grid.flat(idx));
        int a = 0;
        for (; a < n; ++a) {
            if (++idx[a] < range.end[a]) break;
            idx[a] = range.begin[a];
        }
        if (a == n) return;
    }
}

GridFunction::GridFunction(GridPtr grid, std::vector<double> values, bool nonneg)
    : grid_(std::move(grid)), values_(std::move(values)), nonneg_(nonneg) {
    if (std::int64_t(values_.size()) != grid_->cell_count())
        throw Error("grid function: value count must equal the grid cell count");
    if (nonneg_)
        for (double v : values_)
            if (v < 0.0) throw Error("grid function: negative value under nonnegativity flag");
}

GridFunction GridFunction::sample(const GridPtr& grid, const std::function<double(const double*)>& fn,
                                  bool nonneg) {
    std::vector<double> vals(std::size_t(grid->cell_count()));
    double x[kMaxDim];
    for (std::int64_t i = 0; i < grid->cell_count(); ++i) {
        grid->cell_center(i, x);
        vals[std::size_t(i)] = fn(x);
    }
    return GridFunction(grid, std::move(vals), nonneg);
}

GridFunction GridFunction::constant(const GridPtr& grid, double value) {
    return GridFunction(grid, std::vector<double>(std::size_t(grid->cell_count()), value), value >= 0.0);
}

GridFunction GridFunction::map(const std::function<double(double)>& fn, bool nonneg) const {
    std::vector<double> vals(values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i) vals[i] = fn(values_[i]);
    return GridFunction(grid_, std::move(vals), nonneg);
}

double integrate(const GridFunction& f, const CellRange& range, const GridFunction* w) {
    KahanSum acc;
    const Grid& g = f.grid();
    if (w != nullptr && w->grid_ptr().get() != f.grid_ptr().get() && !w->grid().box().same_extent(g.box()))
        throw Error("integrate: weight lives on a different grid");
    for_each_cell(g, range, [&](std::int64_t i) {
        double v = f[i];
        if (w) v *= (*w)[i];
        acc.add(v);
    });
    return acc.value() * g.cell_volume();
}

double integrate(const GridFunction& f, const Rect& r, const GridFunction* w) {
    return integrate(f, f.grid().cells(r), w);
}

double average(const GridFunction& f, const Rect& r) {
    CellRange range = f.grid().cells(r);
    return integrate(f, range) / (double(range.count()) * f.grid().cell_volume());
}

double weighted_average(const GridFunction& f, const Rect& r, const GridFunction& w) {
    CellRange range = f.grid().cells(r);
    double wr = integrate(w, range);
    if (wr <= 0.0) throw Error("weighted_average: weight mass vanishes on rectangle");
    return integrate(f, range, &w) / wr;
}

double rect_min(const GridFunction& f, const CellRange& range) {
    double m = std::numeric_limits<double>::infinity();
    for_each_cell(f.grid(), range, [&](std::int64_t i) { m = std::min(m, f[i]); });
    return m;
}

double rect_min(const GridFunction& f, const Rect& r) {
    return rect_min(f, f.grid().cells(r));
}

DyadicSumTree::DyadicSumTree(const GridFunction& g, const Rect& root, bool absolute_value)
    : root_(root), dim_(root.dim()) {
    const Grid& grid = g.grid();
    if (!grid.aligned(root)) throw Error("sum tree: root not aligned");
    deepest_ = grid.max_depth();
    int depth = deepest_ - root.level;
    levels_.resize(std::size_t(depth) + 1);

    // Finest level first: direct compensated sums over each node's cells.
    {
        int rel = depth;
        std::int64_t n_nodes = std::int64_t(1) << (rel * dim_);
        auto& lvl = levels_[std::size_t(rel)];
        lvl.resize(std::size_t(n_nodes));
        std::array<std::int64_t, kMaxDim> rel_idx{};
        for (std::int64_t node = 0; node < n_nodes; ++node) {
            std::int64_t tmp = node;
            for (int a = 0; a < dim_; ++a) {
                rel_idx[a] = tmp & ((std::int64_t(1) << rel) - 1);
                tmp >>= rel;
            }
            Rect r = root;
            r.level = root.level + rel;
            for (int a = 0; a < dim_; ++a) r.index[a] = (root.index[a] << rel) + rel_idx[a];
            KahanSum acc;
            for_each_cell(grid, grid.cells(r), [&](std::int64_t i) {
                acc.add(absolute_value ? std::abs(g[i]) : g[i]);
            });
            lvl[std::size_t(node)] = acc.value() * grid.cell_volume();
        }
    }

    // Parents are exact sums of their 2^dim children.
    for (int rel = depth - 1; rel >= 0; --rel) {
        std::int64_t n_nodes = std::int64_t(1) << (rel * dim_);
        auto& lvl = levels_[std::size_t(rel)];
        lvl.resize(std::size_t(n_nodes));
        const auto& fine = levels_[std::size_t(rel) + 1];
        std::array<std::int64_t, kMaxDim> rel_idx{};
        for (std::int64_t node = 0; node < n_nodes; ++node) {
            std::int64_t tmp = node;
            for (int a = 0; a < dim_; ++a) {
                rel_idx[a] = tmp & ((std::int64_t(1) << rel) - 1);
                tmp >>= rel;
            }
            double s = 0.0;
            for (int combo = 0; combo < (1 << dim_); ++combo) {
                std::array<std::int64_t, kMaxDim> child{};
                for (int a = 0; a < dim_; ++a) child[a] = 2 * rel_idx[a] + ((combo >> a) & 1);
                s += fine[std::size_t(node_flat(rel + 1, child))];
            }
            lvl[std::size_t(node)] = s;
        }
    }
}

std::int64_t DyadicSumTree::node_flat(int rel, const std::array<std::int64_t, kMaxDim>& rel_idx) const {
    std::int64_t f = 0;
    for (int a = dim_ - 1; a >= 0; --a) f = (f << rel) + rel_idx[a];
    return f;
}

double DyadicSumTree::sum(const Rect& r) const {
    if (!root_.contains(r)) throw Error("sum tree: rectangle is not a descendant of the root");
    int rel = r.level - root_.level;
    if (rel >= int(levels_.size())) throw Error("sum tree: rectangle deeper than the tree");
    std::array<std::int64_t, kMaxDim> rel_idx{};
    for (int a = 0; a < dim_; ++a) rel_idx[a] = r.index[a] - (root_.index[a] << rel);
    return levels_[std::size_t(rel)][std::size_t(node_flat(rel, rel_idx))];
}

}  // namespace psv
