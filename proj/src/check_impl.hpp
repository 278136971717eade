#pragma once

// Shared helpers for the theorem-check implementations. Internal header.

#include <cmath>
#include <functional>

#include "psv/analysis.hpp"
#include "psv/checks.hpp"
#include "psv/conditions.hpp"
#include "psv/corpus.hpp"
#include "psv/functionals.hpp"
#include "psv/weights.hpp"

namespace psv::checks {

struct Ctx {
    json params;
    std::uint64_t seed = 1;
    int jobs = 0;
    std::int64_t pair_budget = 30'000'000;

    KernelOptions kernel_options() const {
        KernelOptions o;
        o.jobs = jobs;
        o.pair_budget = pair_budget;
        return o;
    }

    double num(const std::string& key) const { return params.at(key).get<double>(); }
    int geti(const std::string& key) const { return params.at(key).get<int>(); }
    std::string str(const std::string& key) const { return params.at(key).get<std::string>(); }
    bool has(const std::string& key) const { return params.contains(key); }
    std::vector<double> nums(const std::string& key) const {
        return params.at(key).get<std::vector<double>>();
    }
};

using CheckFn = CheckReport (*)(const Ctx&);

struct Entry {
    CatalogEntry meta;
    CheckFn fn;
};

const std::vector<Entry>& registry();

// --- domain & corpus helpers -----------------------------------------------

/// Grid from params: keys dim, res (scaled by `scale`), optional lo/hi
/// arrays, basis ("rects" | "cube_product"), blocks.
GridPtr ctx_grid(const Ctx& ctx, int scale);

struct Sampled {
    std::string name;
    Expr expr;
    GridFunction f;
};

std::vector<Sampled> sampled_corpus(const Ctx& ctx, const GridPtr& grid);

inline Rect grid_root(const GridPtr& g) { return Rect::whole(g->box()); }

// --- report helpers ---------------------------------------------------------

/// Explicit-constant report: ratio = lhs/rhs must stay below 1 + tol.
CheckReport explicit_report(const Ctx& ctx, const std::string& id, double lhs, double rhs,
                            double tol, std::vector<RefinePoint> trace = {},
                            std::string note = {});

struct DimensionalOut {
    double empirical = 0.0;   // measured constant (max ratio over the corpus)
    double lhs = 0.0;         // LHS at the arg-max instance
    double structural = 0.0;  // structural factor at the arg-max instance
    bool extra_ok = true;     // any additional per-check conditions
    std::string note;
};

/// Runs `eval` at the base resolution and at twice the base resolution;
/// passes when the constant is finite, drifts by at most `drift_tol`, and
/// the evaluator's own side conditions hold.
CheckReport dimensional_report(const Ctx& ctx, const std::string& id,
                               const std::function<DimensionalOut(int)>& eval,
                               double drift_tol = 0.10);

/// Tracks a running max of lhs/structural ratios together with the arg-max
/// instance data.
struct RatioMax {
    double ratio = 0.0;
    double lhs = 0.0;
    double structural = 0.0;

    void update(double l, double s) {
        if (s <= 0.0) return;
        double r = l / s;
        if (r > ratio) {
            ratio = r;
            lhs = l;
            structural = s;
        }
    }
};

// --- math helpers -----------------------------------------------------------

/// max over pool of avg_R |f - P_R f| / a(R); the normalizer that turns the
/// starting-point hypothesis into an equality at its arg-max.
double starting_normalizer(const GridFunction& f, const std::vector<Rect>& pool,
                           const Functional& a, int degree);

double strong_norm(const GridFunction& f, const Rect& r, double p, const Weight* w, int degree);

/// Weighted p-norm of |f - P_R f| taken in the weak sense.
double weak_osc_norm(const GridFunction& f, const Rect& r, double p, const Weight* w, int degree);

/// Kolmogorov bridge at q = p/2: || f - P_R f ||_{L^q} <=
/// (p/(p-q))^{1/q} * weak_norm; exact for the discrete measure.
bool kolmogorov_bridge_holds(const GridFunction& f, const Rect& r, double p, const Weight* w,
                             int degree);

/// Upgrades a measured weak (p*, p) bound to a strong one through dyadic
/// truncations. The gradient side uses the discrete per-axis difference sum
/// D1 u = sum_a |d_a u| of the truncated cell values, for which the
/// truncation telescoping is exact: sum_k D1(T_k g) = D1(g) cell by cell.
/// All chain inequalities are then exact statements about the discrete
/// measure and are verified instance by instance.
struct TruncationUpgradeResult {
    double c_direct = 0.0;    // strong-norm constant measured directly
    double c_weak = 0.0;      // weak-norm constant over the truncated pieces
    double c_upgraded = 0.0;  // constant of the strong bound the chain produces
    bool chain_ok = true;     // per-instance chain inequality held
};

/// The oscillation is taken against the weighted median of f on r, so both
/// signed parts vanish on half of the mass; rhs_scale carries the
/// d(R) [w]^{1/p} factor of the inequality under test.
void truncation_upgrade_instance(const GridFunction& f, const Rect& r, double p, double pstar,
                                 const Weight* w, double rhs_scale,
                                 TruncationUpgradeResult& acc);

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    int points = 0;
};

FitResult linear_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace psv::checks
