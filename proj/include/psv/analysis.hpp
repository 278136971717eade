#pragma once

#include <optional>
#include <vector>

#include "psv/grid.hpp"

namespace psv {

class Weight;

/// L2(R)-optimal polynomial of degree <= m, orthonormalized against the
/// discrete inner product <f,g>_R = avg_R f*g. Coefficients are stored in
/// the monomial basis of scaled coordinates t_a = (x_a - center_a)/scale_a,
/// so evaluation is cheap.
struct PolyProjection {
    Rect rect;
    int degree = 0;
    std::vector<std::array<int, kMaxDim>> exponents;
    std::vector<double> mono_coef;      // P(x) = sum_k mono_coef[k] * t^expo[k]
    std::array<double, kMaxDim> center{};
    std::array<double, kMaxDim> scale{};
    double gram_residual = 0.0;         // measured orthonormality defect

    double eval(const double* x) const;
    std::array<double, kMaxDim> gradient(const double* x) const;
};

PolyProjection project_polynomial(const GridFunction& f, const Rect& r, int m);

/// avg over R of |f - P_R f| without rebuilding P values by hand.
double projection_l1_residual(const GridFunction& f, const Rect& r, const PolyProjection& p);

/// Values of P_R f (or f - P_R f) on the cells of r, in flat-iteration order.
std::vector<double> projection_values(const GridFunction& f, const PolyProjection& p);

struct CenterRule {
    enum Kind { mean, poly, optimal_delta } kind = mean;
    int degree = 0;      // poly
    double delta = 0.5;  // optimal_delta

    static CenterRule Mean() { return {}; }
    static CenterRule Poly(int m) { return {poly, m, 0.0}; }
    static CenterRule OptimalDelta(double d) { return {optimal_delta, 0, d}; }
};

/// ((1/w(R)) \int_R |f - c*|^q w)^{1/q}; for the optimal_delta rule the
/// exponent q is replaced by delta and c* minimizes the delta-oscillation.
double oscillation(const GridFunction& f, const Rect& r, double q, const Weight* w, CenterRule rule);

/// Normalized weak L^p quasinorm, computed exactly at the breakpoints given
/// by the distinct |f| values.
double weak_norm(const GridFunction& f, const Rect& r, double p, const Weight* w = nullptr);
double weak_norm_values(const std::vector<double>& absval, const std::vector<double>& mass, double p);

/// Dyadic maximal function adapted to r: max over dyadic J with x in J and
/// J inside r of avg_J |g|. Cells outside r hold 0.
GridFunction dyadic_maximal(const GridFunction& g, const Rect& r);

std::vector<Rect> dyadic_descendants(const Grid& grid, const Rect& root, int depth);

/// max over pool rectangles containing x of avg_R |f - P_R f|.
GridFunction sharp_maximal(const GridFunction& f, int m, const std::vector<Rect>& pool);

struct CzResult {
    DisjointFamily family;
    bool root_exceeds = false;          // avg over the root already exceeded L
    std::vector<double> averages;       // avg of g over each selected rectangle
};

/// Maximal dyadic subrectangles of r where the average of g exceeds L.
/// Every selected average lies in (L, 2^n L] when avg_r g <= L.
CzResult cz_decompose(const GridFunction& g, const Rect& r, double L);
CzResult cz_decompose(const DyadicSumTree& tree, double L);

struct TruncationMode {
    enum Kind { level, height } kind = level;
    int k = 0;        // level: clamp(g - 2^k, 0, 2^k)
    double m = 0.0;   // height: min(|g|, m)

    static TruncationMode Level(int k) { return {level, k, 0.0}; }
    static TruncationMode Height(double m) { return {height, 0, m}; }
};

GridFunction truncate(const GridFunction& g, TruncationMode mode);

}  // namespace psv
