#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "psv/expr.hpp"
#include "psv/geometry.hpp"

namespace psv {

struct CorpusEntry {
    std::string name;
    Expr f;
    bool lipschitz = true;
    bool smooth = true;  // symbolic derivatives available
};

/// Test functions: affine, quadratic, sine, a smooth bump, tensor products,
/// and seeded random trigonometric polynomials. Formulas are written in
/// box-normalized coordinates so any domain works.
std::vector<CorpusEntry> default_corpus(const Box& box, std::uint64_t seed, int random_count = 2);

/// Nonnegative densities for measures and flat-ish weights.
Expr positive_density(int dim, int variant);

}  // namespace psv
