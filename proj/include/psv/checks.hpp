#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "psv/grid.hpp"
#include "psv/report.hpp"

namespace psv {

/// One runnable theorem check. `statement` spells out the inequality under
/// test; `explicit_constant` distinguishes checks with a fully pinned
/// constant from those tracking an empirical (dimensional) constant whose
/// pass criterion is finiteness plus refinement stability.
struct CatalogEntry {
    std::string id;
    std::string statement;
    bool explicit_constant = false;
    json defaults;
};

const std::vector<CatalogEntry>& check_catalog();
const CatalogEntry* find_check(const std::string& id);

/// Runs one catalog check with parameter overrides merged over the entry's
/// defaults. Reports are deterministic given (id, params, seed).
CheckReport run_check(const std::string& id, const json& overrides = json::object(),
                      std::uint64_t seed = 1, int jobs = 0,
                      std::int64_t pair_budget = 30'000'000);

/// One report per parameter value, shared seed.
std::vector<CheckReport> sweep_check(const std::string& id, const std::string& parameter,
                                     const std::vector<json>& values,
                                     const json& overrides = json::object(),
                                     std::uint64_t seed = 1, int jobs = 0,
                                     std::int64_t pair_budget = 30'000'000);

struct RieszBound {
    double lhs = 0.0;          // sum over Omega of |z-x|^{alpha-n} vol
    double rhs = 0.0;          // (n/alpha) v_n^{1-alpha/n} |Omega|^{alpha/n}
    double printed_rhs = 0.0;  // v_n^{-alpha/n} alpha^{-1} |Omega|^{alpha/n}, reported only
    bool pass = false;
};

/// Rearrangement bound on the Riesz potential of a cell set: the integral of
/// |z-x|^{alpha-n} over Omega is maximized by the ball of the same volume
/// centered at z, which gives rhs in closed form. The `printed_rhs` variant
/// fails a one-dimensional sanity test and is reported without being
/// asserted.
RieszBound riesz_potential_bound(const Grid& grid, const std::vector<std::int64_t>& omega_cells,
                                 std::int64_t z_cell, double alpha, double slack = 0.05);

double unit_ball_volume(int n);

}  // namespace psv
