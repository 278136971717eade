#include "psv/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace psv {

Box Box::make(const std::vector<double>& lo, const std::vector<double>& hi, Basis basis,
              const std::vector<int>& blocks) {
    if (lo.size() != hi.size()) throw Error("box: lo/hi size mismatch");
    if (lo.empty() || lo.size() > kMaxDim) throw Error("box: dimension must be between 1 and 4");
    Box b;
    b.dim = int(lo.size());
    for (int a = 0; a < b.dim; ++a) {
        b.lo[a] = lo[std::size_t(a)];
        b.hi[a] = hi[std::size_t(a)];
    }
    b.basis = basis;
    if (basis == Basis::cube_product) {
        if (blocks.empty()) throw Error("box: cube_product basis needs a block split");
        b.nblocks = int(blocks.size());
        int total = 0;
        for (std::size_t i = 0; i < blocks.size(); ++i) {
            b.blocks[i] = blocks[i];
            total += blocks[i];
        }
        if (total != b.dim) throw Error("box: block sizes must sum to the dimension");
    }
    b.validate();
    return b;
}

Box Box::interval(double a, double b) { return make({a}, {b}); }

void Box::validate() const {
    if (dim < 1 || dim > kMaxDim) throw Error("box: dimension must be between 1 and 4");
    for (int a = 0; a < dim; ++a)
        if (!(hi[a] > lo[a])) throw Error("box: upper bound must exceed lower bound on axis " + std::to_string(a + 1));
    if (basis == Basis::cube_product) {
        if (nblocks < 1) throw Error("box: cube_product basis needs blocks");
        int axis = 0;
        for (int blk = 0; blk < nblocks; ++blk) {
            if (blocks[blk] < 1) throw Error("box: empty block");
            double s0 = side(axis);
            for (int a = axis; a < axis + blocks[blk]; ++a) {
                if (std::abs(side(a) - s0) > 1e-12 * std::max(1.0, std::abs(s0)))
                    throw Error("box: sides inside block " + std::to_string(blk + 1) + " must be equal");
            }
            axis += blocks[blk];
        }
    }
}

double Box::volume() const {
    double v = 1.0;
    for (int a = 0; a < dim; ++a) v *= side(a);
    return v;
}

double Box::diameter() const {
    double s = 0.0;
    for (int a = 0; a < dim; ++a) s += side(a) * side(a);
    return std::sqrt(s);
}

int Box::block_of_axis(int axis) const {
    int begin = 0;
    for (int blk = 0; blk < nblocks; ++blk) {
        if (axis < begin + blocks[blk]) return blk;
        begin += blocks[blk];
    }
    return -1;
}

int Box::block_begin(int block) const {
    int begin = 0;
    for (int blk = 0; blk < block; ++blk) begin += blocks[blk];
    return begin;
}

bool Box::same_extent(const Box& other) const {
    if (dim != other.dim) return false;
    for (int a = 0; a < dim; ++a)
        if (lo[a] != other.lo[a] || hi[a] != other.hi[a]) return false;
    return true;
}

Rect Rect::whole(const Box& box) {
    box.validate();
    Rect r;
    r.root = box;
    return r;
}

double Rect::measure() const {
    double v = 1.0;
    for (int a = 0; a < dim(); ++a) v *= side(a);
    return v;
}

double Rect::diameter() const {
    double s = 0.0;
    for (int a = 0; a < dim(); ++a) s += side(a) * side(a);
    return std::sqrt(s);
}

double Rect::eccentricity() const {
    return std::pow(measure(), 1.0 / double(dim())) / diameter();
}

std::optional<double> Rect::block_eccentricity() const {
    if (root.basis != Basis::cube_product || root.nblocks != 2) return std::nullopt;
    int n2 = root.blocks[1];
    double l1 = side(root.block_begin(0));
    double l2 = side(root.block_begin(1));
    return std::pow(l2 / l1, double(n2));
}

RectGeometry Rect::geometry() const {
    RectGeometry g;
    for (int a = 0; a < dim(); ++a) g.sides[a] = side(a);
    g.diameter = diameter();
    g.measure = measure();
    g.eccentricity = eccentricity();
    g.block_eccentricity = block_eccentricity();
    return g;
}

std::vector<Rect> Rect::children() const {
    std::vector<Rect> out;
    int n = dim();
    out.reserve(std::size_t(1) << n);
    for (int combo = 0; combo < (1 << n); ++combo) {
        Rect c = *this;
        c.level = level + 1;
        for (int a = 0; a < n; ++a) c.index[a] = 2 * index[a] + ((combo >> a) & 1);
        out.push_back(c);
    }
    return out;
}

bool Rect::contains(const Rect& other) const {
    if (other.level < level) return false;
    int shift = other.level - level;
    for (int a = 0; a < dim(); ++a)
        if ((other.index[a] >> shift) != index[a]) return false;
    return true;
}

bool Rect::disjoint_from(const Rect& other) const {
    return !contains(other) && !other.contains(*this);
}

std::string Rect::address() const {
    std::ostringstream os;
    os << "L" << level << ":(";
    for (int a = 0; a < dim(); ++a) os << (a ? "," : "") << index[a];
    os << ")";
    return os.str();
}

DisjointFamily DisjointFamily::make(const Rect& root, std::vector<Rect> members) {
    DisjointFamily fam;
    fam.root_ = root;
    KahanSum total;
    for (std::size_t i = 0; i < members.size(); ++i) {
        const Rect& m = members[i];
        if (!m.same_root(root)) throw Error("family: member has a different root box");
        if (!root.contains(m)) throw Error("family: member " + m.address() + " is not a descendant of the root");
        for (std::size_t j = 0; j < i; ++j)
            if (!m.disjoint_from(members[j]))
                throw Error("family: members overlap: " + m.address() + " and " + members[j].address());
        total.add(m.measure());
    }
    fam.members_ = std::move(members);
    fam.union_measure_ = total.value();
    return fam;
}

}  // namespace psv
