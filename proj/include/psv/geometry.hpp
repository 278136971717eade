#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "psv/util.hpp"

namespace psv {

/// Rectangle bases. `rects` is the family of all axis-parallel rectangles;
/// `cube_product` restricts to products of cubes (every axis inside a block
/// shares one side length, so dyadic children stay products of cubes).
enum class Basis { rects, cube_product };

constexpr int kMaxDim = 4;

struct Box {
    int dim = 1;
    std::array<double, kMaxDim> lo{};
    std::array<double, kMaxDim> hi{};
    Basis basis = Basis::rects;
    int nblocks = 0;                       // 0 unless cube_product
    std::array<int, kMaxDim> blocks{};     // block sizes, sum == dim

    static Box make(const std::vector<double>& lo, const std::vector<double>& hi,
                    Basis basis = Basis::rects, const std::vector<int>& blocks = {});
    static Box interval(double a, double b);

    double side(int axis) const { return hi[axis] - lo[axis]; }
    double volume() const;
    double diameter() const;
    int block_of_axis(int axis) const;
    int block_begin(int block) const;      // first axis of a block
    bool same_extent(const Box& other) const;

    void validate() const;                 // throws Error on invariant violation
};

struct RectGeometry {
    std::array<double, kMaxDim> sides{};
    double diameter = 0.0;
    double measure = 0.0;
    double eccentricity = 0.0;
    std::optional<double> block_eccentricity;  // cube_product with 2 blocks
};

/// Dyadic descendant of a root box: level j and one index per axis in
/// [0, 2^j). Subdivision halves every side at once, so eccentricity is
/// invariant along descendants.
struct Rect {
    Box root;
    int level = 0;
    std::array<std::int64_t, kMaxDim> index{};

    static Rect whole(const Box& box);

    int dim() const { return root.dim; }
    double side(int axis) const { return root.side(axis) / double(std::int64_t(1) << level); }
    double lo(int axis) const { return root.lo[axis] + side(axis) * double(index[axis]); }
    double hi(int axis) const { return lo(axis) + side(axis); }
    double measure() const;
    double diameter() const;
    double eccentricity() const;
    std::optional<double> block_eccentricity() const;
    RectGeometry geometry() const;

    std::vector<Rect> children() const;

    bool same_root(const Rect& other) const { return root.same_extent(other.root); }
    /// Dyadic ancestor-or-equal test; both rects must share the root box.
    bool contains(const Rect& other) const;
    bool disjoint_from(const Rect& other) const;

    std::string address() const;
};

/// Pairwise-disjoint dyadic descendants of a common root.
class DisjointFamily {
public:
    static DisjointFamily make(const Rect& root, std::vector<Rect> members);

    const Rect& root() const { return root_; }
    const std::vector<Rect>& members() const { return members_; }
    std::size_t size() const { return members_.size(); }
    double union_measure() const { return union_measure_; }
    /// |union R_i| / |root|
    double covered_fraction() const { return union_measure_ / root_.measure(); }

private:
    Rect root_;
    std::vector<Rect> members_;
    double union_measure_ = 0.0;
};

}  // namespace psv
