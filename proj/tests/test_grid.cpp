#include <doctest.h>

#include <cmath>

#include "psv/grid.hpp"

using namespace psv;

TEST_CASE("uniform midpoint grid") {
    GridPtr g = Grid::make(Box::interval(0.0, 1.0), {4});
    CHECK(g->cell_count() == 4);
    CHECK(g->cell_volume() == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(g->center(0, 0) == doctest::Approx(1.0 / 8));
    CHECK(g->center(0, 1) == doctest::Approx(3.0 / 8));
    CHECK(g->center(0, 3) == doctest::Approx(7.0 / 8));
}

TEST_CASE("2d grid cells") {
    GridPtr g = Grid::make(Box::make({0, 0}, {1, 2}), {2, 2});
    CHECK(g->cell_count() == 4);
    CHECK(g->cell_volume() == doctest::Approx(0.5));
    // cell volume * count = |box|
    CHECK(g->cell_volume() * double(g->cell_count()) == doctest::Approx(2.0).epsilon(1e-13));
}

TEST_CASE("non power of two rejected") {
    CHECK_THROWS_AS(Grid::make(Box::interval(0, 1), {3}), Error);
    CHECK_THROWS_AS(Grid::make(Box::interval(0, 1), {1}), Error);
}

TEST_CASE("box invariants") {
    CHECK_THROWS_AS(Box::make({0.0}, {0.0}), Error);
    // single-axis blocks are always cube blocks, whatever the side lengths
    Box ok = Box::make({0, 0}, {1, 2}, Basis::cube_product, {1, 1});
    CHECK(ok.nblocks == 2);
}

TEST_CASE("cube_product equal-side block validation") {
    // 2+1 split: first block must have equal sides
    CHECK_THROWS_AS(Box::make({0, 0, 0}, {1, 2, 1}, Basis::cube_product, {2, 1}), Error);
    Box ok = Box::make({0, 0, 0}, {1, 1, 2}, Basis::cube_product, {2, 1});
    CHECK(ok.nblocks == 2);
}

TEST_CASE("children and eccentricity") {
    Box b = Box::make({0, 0}, {1, 2});
    Rect r = Rect::whole(b);
    CHECK(r.measure() == doctest::Approx(2.0));
    CHECK(r.diameter() == doctest::Approx(std::sqrt(5.0)));
    CHECK(r.eccentricity() == doctest::Approx(std::sqrt(2.0 / 5.0)));

    auto kids = r.children();
    CHECK(kids.size() == 4);
    bool found = false;
    for (const Rect& c : kids) {
        CHECK(c.eccentricity() == doctest::Approx(r.eccentricity()).epsilon(1e-14));
        if (c.lo(0) == 0.0 && c.hi(0) == doctest::Approx(0.5) && c.lo(1) == 0.0 &&
            c.hi(1) == doctest::Approx(1.0))
            found = true;
    }
    CHECK(found);
}

TEST_CASE("unit cube eccentricity is n^{-1/2}") {
    for (int n = 1; n <= 3; ++n) {
        std::vector<double> lo(std::size_t(n), 0.0), hi(std::size_t(n), 1.0);
        Rect r = Rect::whole(Box::make(lo, hi));
        CHECK(r.eccentricity() == doctest::Approx(1.0 / std::sqrt(double(n))).epsilon(1e-14));
    }
}

TEST_CASE("block eccentricity invariant") {
    Box b = Box::make({0, 0}, {1, 2}, Basis::cube_product, {1, 1});
    Rect r = Rect::whole(b);
    REQUIRE(r.block_eccentricity().has_value());
    CHECK(*r.block_eccentricity() == doctest::Approx(2.0));
    for (const Rect& c : r.children())
        CHECK(*c.block_eccentricity() == doctest::Approx(2.0).epsilon(1e-14));
    // plain basis: absent
    CHECK(!Rect::whole(Box::make({0, 0}, {1, 2})).block_eccentricity().has_value());
}

TEST_CASE("eccentricity invariance to depth 8 random roots") {
    Rng rng(20240817u);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        int n = 1 + int(rng.below(3));
        std::vector<double> lo, hi;
        for (int a = 0; a < n; ++a) {
            double l = rng.uniform(-3.0, 3.0);
            lo.push_back(l);
            hi.push_back(l + rng.uniform(0.1, 5.0));
        }
        Rect root = Rect::whole(Box::make(lo, hi));
        double e0 = root.eccentricity();
        Rect r = root;
        for (int d = 0; d < 8; ++d) {
            auto kids = r.children();
            r = kids[rng.below(kids.size())];
            worst = std::max(worst, std::abs(r.eccentricity() - e0));
        }
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("alignment depth") {
    GridPtr g = Grid::make(Box::make({0, 0}, {1, 1}), {8, 4});
    CHECK(g->max_depth() == 2);
    Rect r = Rect::whole(g->box());
    auto kids = r.children();
    CHECK(g->aligned(kids[0]));
    auto grand = kids[0].children();
    CHECK(g->aligned(grand[0]));
    CHECK(!g->aligned(grand[0].children()[0]));
    CHECK_THROWS_AS(g->cells(grand[0].children()[0]), Error);
}

TEST_CASE("integrate constants and averages") {
    GridPtr g = Grid::make(Box::interval(0, 1), {1024});
    GridFunction one = GridFunction::constant(g, 1.0);
    Rect r = Rect::whole(g->box());
    CHECK(integrate(one, r) == doctest::Approx(1.0).epsilon(1e-14));

    GridFunction x = GridFunction::sample(g, [](const double* p) { return p[0]; });
    CHECK(average(x, r) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("integration additive over children") {
    GridPtr g = Grid::make(Box::make({0, 0}, {1, 2}), {32, 32});
    GridFunction f = GridFunction::sample(g, [](const double* p) {
        return std::sin(3.0 * p[0]) * std::exp(p[1]) + 0.3;
    });
    Rect r = Rect::whole(g->box());
    double total = integrate(f, r);
    double parts = 0.0;
    for (const Rect& c : r.children()) parts += integrate(f, c);
    CHECK(parts == doctest::Approx(total).epsilon(1e-12));
}

TEST_CASE("disjoint family validation") {
    GridPtr g = Grid::make(Box::interval(0, 1), {8});
    Rect r = Rect::whole(g->box());
    auto kids = r.children();
    auto grand = kids[0].children();

    auto fam = DisjointFamily::make(r, {kids[0], kids[1]});
    CHECK(fam.covered_fraction() == doctest::Approx(1.0));

    CHECK_THROWS_AS(DisjointFamily::make(r, {kids[0], grand[0]}), Error);
    CHECK_THROWS_AS(DisjointFamily::make(r, {kids[0], kids[0]}), Error);
    CHECK_THROWS_AS(DisjointFamily::make(kids[0], {kids[1]}), Error);
}

TEST_CASE("adversarial overlap addresses property") {
    Rng rng(99u);
    GridPtr g = Grid::make(Box::make({0, 0}, {1, 1}), {16, 16});
    Rect root = Rect::whole(g->box());
    for (int trial = 0; trial < 200; ++trial) {
        // descend to a random node, then pick one of its ancestors: must throw
        Rect node = root;
        int depth = 1 + int(rng.below(4));
        for (int d = 0; d < depth; ++d) {
            auto kids = node.children();
            node = kids[rng.below(kids.size())];
        }
        Rect anc = root;
        int cut = int(rng.below(std::uint64_t(depth)));
        for (int d = 0; d < cut; ++d) {
            Rect want = node;
            // ancestor at level d+1 along the path
            int shift = node.level - (d + 1);
            Rect a2 = root;
            a2.level = d + 1;
            for (int ax = 0; ax < 2; ++ax) a2.index[ax] = want.index[ax] >> shift;
            anc = a2;
        }
        if (anc.level == node.level) continue;
        CHECK_THROWS_AS(DisjointFamily::make(root, {node, anc}), Error);
    }
}

TEST_CASE("sum tree matches direct integration and is exactly additive") {
    GridPtr g = Grid::make(Box::make({0, 0}, {1, 1}), {16, 16});
    GridFunction f = GridFunction::sample(g, [](const double* p) { return p[0] * p[0] - p[1]; });
    Rect root = Rect::whole(g->box());
    DyadicSumTree tree(f, root, false);
    CHECK(tree.sum(root) == doctest::Approx(integrate(f, root)).epsilon(1e-13));
    for (const Rect& c : root.children()) {
        double direct = integrate(f, c);
        CHECK(tree.sum(c) == doctest::Approx(direct).epsilon(1e-12));
    }
    // exact additivity by construction
    double kids = 0.0;
    for (const Rect& c : root.children()) kids += tree.sum(c);
    CHECK(kids == tree.sum(root));
}

TEST_CASE("partition exactness over a covering disjoint family") {
    GridPtr g = Grid::make(Box::make({0, 0}, {1, 1}), {32, 32});
    GridFunction f = GridFunction::sample(g, [](const double* p) {
        return std::cos(5.0 * p[0]) * (1.0 + p[1]) - 0.4;
    });
    Rect root = Rect::whole(g->box());
    Rng rng(1234u);

    // random recursive split: each node is either selected or fully split,
    // so the family tiles the root exactly
    std::vector<Rect> family;
    std::function<void(const Rect&)> split = [&](const Rect& r) {
        if (r.level >= g->max_depth() || rng.uniform() < 0.4) {
            family.push_back(r);
            return;
        }
        for (const Rect& c : r.children()) split(c);
    };
    split(root);
    auto fam = DisjointFamily::make(root, family);
    CHECK(fam.covered_fraction() == doctest::Approx(1.0).epsilon(1e-14));

    KahanSum parts;
    for (const Rect& r : fam.members()) parts.add(integrate(f, r));
    CHECK(parts.value() == doctest::Approx(integrate(f, root)).epsilon(1e-12));
}
