#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "psv/functionals.hpp"

namespace psv {

struct FamilySamplerOptions {
    double q_stop = 0.3;                 // stop-and-select probability per node
    int max_depth = 6;
    std::optional<double> smallness;     // keep |union|/|root| <= this value
    bool exhaustive_depth2 = false;      // enumerate every family to depth 2
};

/// Random stopping-time families plus deterministic ones (full levels,
/// single nodes). The quantifier "any family of disjoint dyadic
/// subrectangles" is sampled, so downstream verdicts are relative to the
/// sampled pool.
std::vector<DisjointFamily> sample_disjoint_families(const Grid& grid, const Rect& root, int count,
                                                     const FamilySamplerOptions& opts,
                                                     std::uint64_t seed);

struct ConditionVerdict {
    bool smallness_condition = false;    // SD_p^s vs plain D_p
    double p = 1.0;
    double s = 0.0;
    std::size_t families_tested = 0;
    double max_ratio = 0.0;
    std::size_t argmax_family = 0;
    double bound = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    bool degenerate = false;             // a(root) = 0 with a nonzero sum
};

/// max over families of (sum_i a(R_i)^p w(R_i)/w(R))^{1/p} divided by
/// a(R) * (|union|/|R|)^{1/s} (the smallness factor only when s is given).
ConditionVerdict condition_ratio(const Functional& a, const GridFunction& f, double p,
                                 const Weight* w, const Rect& root,
                                 const std::vector<DisjointFamily>& families,
                                 std::optional<double> s, double bound, double tolerance);

enum class ExponentKind {
    classic,        // 1/p - 1/p* = delta/n
    weighted_aq,    // 1/p - 1/p* = (delta/n) / (q + log[w])
    lemma_m,        // 1/p - 1/p* = delta/(n q M)
    a1_fractional,  // 1/p - 1/p* = (delta/n) / (1 + log[w])
};

struct ExponentParams {
    double p = 1.0;
    int n = 1;
    double delta = 1.0;
    double q = 1.0;
    double M = 0.0;
    double weight_constant = 0.0;
};

double sobolev_exponent(ExponentKind kind, const ExponentParams& params);

/// M = 1 + log [w]^{1/q}
double companion_M(double weight_constant, double q);
/// B = (1 + log [w]^{1/q}) / log [w]^{1/q}; blows up as [w] -> 1
double companion_B(double weight_constant, double q);

}  // namespace psv
