#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "psv/geometry.hpp"

namespace psv {

class Grid;
using GridPtr = std::shared_ptr<const Grid>;

/// Half-open per-axis cell index ranges; the cell footprint of a rectangle.
struct CellRange {
    int dim = 1;
    std::array<std::int64_t, kMaxDim> begin{};
    std::array<std::int64_t, kMaxDim> end{};

    std::int64_t count() const;
};

/// Uniform tensor grid over a box. Per-axis resolutions are powers of two so
/// every dyadic rectangle down to max_depth() is a union of whole cells.
class Grid {
public:
    static GridPtr make(const Box& box, const std::vector<int>& resolution);

    const Box& box() const { return box_; }
    int dim() const { return box_.dim; }
    int res(int axis) const { return res_[axis]; }
    std::int64_t cell_count() const { return cell_count_; }
    double cell_volume() const { return cell_volume_; }
    double step(int axis) const { return step_[axis]; }
    double center(int axis, std::int64_t i) const { return box_.lo[axis] + (double(i) + 0.5) * step_[axis]; }
    int max_depth() const { return max_depth_; }

    bool aligned(const Rect& r) const;
    CellRange cells(const Rect& r) const;   // throws Error when not aligned
    CellRange all_cells() const;

    std::int64_t flat(const std::array<std::int64_t, kMaxDim>& idx) const;
    void unflat(std::int64_t flat, std::array<std::int64_t, kMaxDim>& idx) const;
    void cell_center(std::int64_t flat, double* x) const;

    Grid(const Box& box, const std::vector<int>& resolution);

private:
    Box box_;
    std::array<int, kMaxDim> res_{};
    std::array<double, kMaxDim> step_{};
    std::array<std::int64_t, kMaxDim> stride_{};
    std::int64_t cell_count_ = 0;
    double cell_volume_ = 0.0;
    int max_depth_ = 0;
};

/// Iterates cells of a range in flat-index order (axis 0 fastest).
void for_each_cell(const Grid& grid, const CellRange& range,
                   const std::function<void(std::int64_t)>& fn);

/// Real function sampled at cell centers.
class GridFunction {
public:
    GridFunction(GridPtr grid, std::vector<double> values, bool nonneg = false);

    static GridFunction sample(const GridPtr& grid, const std::function<double(const double*)>& fn,
                               bool nonneg = false);
    static GridFunction constant(const GridPtr& grid, double value);

    const Grid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    std::int64_t size() const { return std::int64_t(values_.size()); }
    double operator[](std::int64_t i) const { return values_[std::size_t(i)]; }
    const std::vector<double>& values() const { return values_; }
    bool nonneg() const { return nonneg_; }

    GridFunction map(const std::function<double(double)>& fn, bool nonneg = false) const;

private:
    GridPtr grid_;
    std::vector<double> values_;
    bool nonneg_ = false;
};

double integrate(const GridFunction& f, const CellRange& range, const GridFunction* w = nullptr);
double integrate(const GridFunction& f, const Rect& r, const GridFunction* w = nullptr);
double average(const GridFunction& f, const Rect& r);
/// (1/w(R)) * integral of f*w over R
double weighted_average(const GridFunction& f, const Rect& r, const GridFunction& w);
double rect_min(const GridFunction& f, const Rect& r);
double rect_min(const GridFunction& f, const CellRange& range);

/// Per-dyadic-rectangle sums of one function, built bottom-up so a parent sum
/// equals the sum of its children bit-for-bit. The tree is the single source
/// of rectangle averages for the Calderon-Zygmund decomposition and the
/// dyadic maximal function, which makes their level-set identity cell-exact.
class DyadicSumTree {
public:
    DyadicSumTree(const GridFunction& g, const Rect& root, bool absolute_value);

    const Rect& root() const { return root_; }
    int deepest_level() const { return deepest_; }
    double sum(const Rect& r) const;       // r must be a descendant of root
    double average(const Rect& r) const { return sum(r) / r.measure(); }

private:
    Rect root_;
    int deepest_ = 0;
    int dim_ = 1;
    // per level (relative to root): flattened sums over 2^(rel*dim) nodes
    std::vector<std::vector<double>> levels_;

    std::int64_t node_flat(int rel, const std::array<std::int64_t, kMaxDim>& rel_idx) const;
};

}  // namespace psv
