#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "psv/expr.hpp"
#include "psv/grid.hpp"

namespace psv {

/// Strictly positive density on a grid.
class Weight {
public:
    explicit Weight(GridFunction density);
    static Weight from_expr(const Expr& e, const GridPtr& grid);
    static Weight constant(const GridPtr& grid, double c);

    const GridFunction& density() const { return g_; }
    const Grid& grid() const { return g_.grid(); }
    double total(const Rect& r) const { return integrate(g_, r); }
    double total(const CellRange& range) const { return integrate(g_, range); }

private:
    GridFunction g_;
};

/// Scan pool: dyadic descendants of a root plus optional random grid-aligned
/// translated rectangles. Finite pools make every constant a lower bound of
/// the true supremum; checks that consume these constants draw their LHS
/// rectangles from the same pool.
struct RectPool {
    Rect root;
    std::vector<Rect> dyadic;
    std::vector<CellRange> extra;

    std::size_t size() const { return dyadic.size() + extra.size(); }
};

RectPool make_rect_pool(const Grid& grid, const Rect& root, int depth, int extra_rects,
                        std::uint64_t seed);

/// A_p product avg(w) * avg(w^{-1/(p-1)})^{p-1} on one cell range (p > 1),
/// or avg(w)/min(w) when p == 1.
double muckenhoupt_product(const Weight& w, double p, const CellRange& range);

double muckenhoupt_constant(const Weight& w, double p, const Rect& root, int depth,
                            int extra_rects, std::uint64_t seed);
double muckenhoupt_over(const Weight& w, double p, const RectPool& pool);

/// Fujii-Wilson supremum of (1/w(R)) \int_R M(w chi_R) with the strong
/// maximal function minorized by shifted dyadic block maxima.
double fujii_wilson_constant(const Weight& w, const Rect& root, int depth, int shifts,
                             std::uint64_t seed);
double fujii_wilson_over(const Weight& w, const std::vector<Rect>& pool, int shifts,
                         std::uint64_t seed);

/// w_r(R) = |R| (avg_R w^r)^{1/r}
double lebesgue_r_average(const Weight& w, double r, const Rect& rect);

struct ReverseHolderResult {
    double eps = 0.0;
    double lhs = 0.0;   // avg w^{1+eps}
    double rhs = 0.0;   // 2 avg(w)^{1+eps}
    bool pass = false;
};

/// Tests avg(w^{1+eps}) <= 2 avg(w)^{1+eps} at eps = 1/(2^{n+1} ainf - 1).
ReverseHolderResult reverse_holder_check(const Weight& w, const Rect& rect, double ainf);

struct WeightReport {
    std::vector<double> p_values;
    std::vector<double> ap_constants;
    double fujii_wilson = 0.0;
    int depth = 0;
    std::size_t rectangles_scanned = 0;
};

WeightReport weight_report(const Weight& w, const Rect& root, const std::vector<double>& ps,
                           int depth, int extra_rects, int shifts, std::uint64_t seed);

}  // namespace psv
