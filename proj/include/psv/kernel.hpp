#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "psv/grid.hpp"

namespace psv {

/// Options for the pairwise fractional kernel sums.
struct KernelOptions {
    std::int64_t pair_budget = 30'000'000;
    int jobs = 0;                               // 0 = hardware default
    /// Per-axis slope fields (d f / d x_a at cell centers); used for the
    /// same-cell linear-model mass. When absent, central differences of the
    /// sampled values are used.
    const std::vector<GridFunction>* slopes = nullptr;
    bool include_same_cell = true;
};

/// Pair-weight table: W[k] integrates |x - y|^{-beta} exactly over a cell
/// pair at offset k (closed form along one axis, adaptively refined near the
/// diagonal in two dimensions, midpoint far away). Product integration with
/// these weights converges even as delta -> 1, where the plain midpoint rule
/// loses almost all of the kernel mass into the excluded diagonal.
class PairWeights {
public:
    /// steps: cell steps of the participating axes; extents: cell counts.
    PairWeights(const std::vector<double>& steps, const std::vector<std::int64_t>& extents,
                double beta);

    double weight(const std::int64_t* offset) const;  // |offset| per axis
    double beta() const { return beta_; }
    int dim() const { return int(steps_.size()); }

private:
    std::vector<double> steps_;
    std::vector<std::int64_t> extents_;
    double beta_;
    std::vector<double> table_;                 // flattened over nonnegative offsets
    std::vector<std::int64_t> stride_;

    double compute(const std::vector<std::int64_t>& k) const;
};

/// Singular same-cell mass of the locally linear model:
/// integral over C x C of |g . (x-y)|^p / |x-y|^{n_k + delta p} with C the
/// cell of the participating axes. gvec holds the slope components.
double same_cell_mass(const std::vector<double>& steps, const std::vector<double>& gvec,
                      double p, double delta);

/// Row sums S(u) = sum over v != u of (|f(u)-f(v)| / dist)^p * W(u,v), plus
/// the same-cell linear-model mass. Axes taken from `axes` (full kernel:
/// all axes; block kernel: the block's axes, with the off-block volume of u's
/// cell folded into W). Entries follow flat-iteration order over r's cells.
std::vector<double> kernel_row_sums(const GridFunction& f, const Rect& r, double delta, double p,
                                    const std::vector<int>& axes, const KernelOptions& opts = {});

/// Central-difference slope fields, one per axis (one-sided at the border).
std::vector<GridFunction> numeric_gradient(const GridFunction& f);

}  // namespace psv
