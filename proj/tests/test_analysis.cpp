#include <doctest.h>

#include <cmath>

#include "psv/analysis.hpp"
#include "psv/weights.hpp"

using namespace psv;

namespace {

GridPtr unit_line(int n) { return Grid::make(Box::interval(0, 1), {n}); }

}  // namespace

TEST_CASE("projection m=0 is the average") {
    GridPtr g = unit_line(256);
    GridFunction x = GridFunction::sample(g, [](const double* p) { return p[0]; });
    Rect r = Rect::whole(g->box());
    PolyProjection p = project_polynomial(x, r, 0);
    double at[1] = {0.123};
    CHECK(p.eval(at) == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(p.gram_residual <= 1e-9);
}

TEST_CASE("projection reproduces polynomials of its degree") {
    GridPtr g = Grid::make(Box::make({0, 0}, {1, 1}), {32, 32});
    GridFunction f = GridFunction::sample(g, [](const double* p) {
        return 1.0 + 2.0 * p[0] - 0.7 * p[1] + 0.25 * p[0] * p[1];
    });
    Rect r = Rect::whole(g->box());
    PolyProjection proj = project_polynomial(f, r, 2);
    double resid = projection_l1_residual(f, r, proj);
    CHECK(resid <= 1e-8);
    CHECK(proj.gram_residual <= 1e-9);
}

TEST_CASE("projection m=1 of x^2: best affine fit is x - 1/6") {
    GridPtr g = unit_line(1024);
    GridFunction f = GridFunction::sample(g, [](const double* p) { return p[0] * p[0]; });
    Rect r = Rect::whole(g->box());
    PolyProjection proj = project_polynomial(f, r, 1);
    double at0[1] = {0.0}, at1[1] = {1.0};
    CHECK(proj.eval(at0) == doctest::Approx(-1.0 / 6).epsilon(2e-5));
    CHECK(proj.eval(at1) == doctest::Approx(5.0 / 6).epsilon(2e-5));
    // avg |f - P f| = sqrt(3)/27 in the continuum
    CHECK(projection_l1_residual(f, r, proj) == doctest::Approx(std::sqrt(3.0) / 27.0).epsilon(1e-3));
    // residual orthogonal to {1, x}
    CHECK(oscillation(f, r, 1.0, nullptr, CenterRule::Poly(1)) ==
          doctest::Approx(std::sqrt(3.0) / 27.0).epsilon(1e-3));
}

TEST_CASE("projection residual orthogonality") {
    GridPtr g = unit_line(512);
    GridFunction f = GridFunction::sample(g, [](const double* p) { return p[0] * p[0]; });
    Rect r = Rect::whole(g->box());
    PolyProjection proj = project_polynomial(f, r, 1);
    std::vector<double> pv = projection_values(f, proj);
    KahanSum s0, s1;
    std::size_t at = 0;
    for_each_cell(*g, g->cells(r), [&](std::int64_t i) {
        double resid = f[i] - pv[at++];
        double x = g->center(0, i);
        s0.add(resid);
        s1.add(resid * x);
    });
    CHECK(std::abs(s0.value()) / double(g->cell_count()) <= 1e-9);
    CHECK(std::abs(s1.value()) / double(g->cell_count()) <= 1e-9);
}

TEST_CASE("too few cells for basis") {
    GridPtr g = unit_line(2);
    GridFunction f = GridFunction::constant(g, 1.0);
    Rect r = Rect::whole(g->box());
    CHECK_THROWS_AS(project_polynomial(f, r, 3), Error);
}

TEST_CASE("oscillation of x with mean center") {
    GridPtr g = unit_line(512);
    GridFunction x = GridFunction::sample(g, [](const double* p) { return p[0]; });
    Rect r = Rect::whole(g->box());
    CHECK(oscillation(x, r, 1.0, nullptr, CenterRule::Mean()) == doctest::Approx(0.25).epsilon(1e-12));
    GridFunction c = GridFunction::constant(g, 3.7);
    CHECK(oscillation(c, r, 1.0, nullptr, CenterRule::Mean()) == doctest::Approx(0.0));
    CHECK(oscillation(c, r, 2.0, nullptr, CenterRule::Poly(1)) == doctest::Approx(0.0));
}

TEST_CASE("optimal delta oscillation of x: 2/9 at delta=1/2") {
    GridPtr g = unit_line(4096);
    GridFunction x = GridFunction::sample(g, [](const double* p) { return p[0]; });
    Rect r = Rect::whole(g->box());
    double v = oscillation(x, r, 1.0, nullptr, CenterRule::OptimalDelta(0.5));
    CHECK(v == doctest::Approx(2.0 / 9.0).epsilon(2e-3));
}

TEST_CASE("oscillation orderings") {
    GridPtr g = unit_line(512);
    GridFunction f = GridFunction::sample(g, [](const double* p) {
        return std::sin(7.0 * p[0]) + 0.3 * p[0];
    });
    Rect r = Rect::whole(g->box());
    double mean1 = oscillation(f, r, 1.0, nullptr, CenterRule::Mean());
    // optimal L^1 center cannot beat the mean by more than 2x (triangle)
    // and delta-oscillation <= L^1 oscillation (Jensen with delta < 1)
    double del = oscillation(f, r, 1.0, nullptr, CenterRule::OptimalDelta(0.5));
    CHECK(del <= mean1 * (1 + 1e-9));
    // monotone in q
    double q2 = oscillation(f, r, 2.0, nullptr, CenterRule::Mean());
    CHECK(mean1 <= q2 * (1 + 1e-12));
}

TEST_CASE("weak norm exact breakpoints") {
    std::vector<double> vals{1, 2, 3, 4};
    std::vector<double> mass{0.25, 0.25, 0.25, 0.25};
    CHECK(weak_norm_values(vals, mass, 1.0) == doctest::Approx(1.5).epsilon(1e-15));
}

TEST_CASE("weak norm below strong norm; Kolmogorov inequality") {
    GridPtr g = unit_line(256);
    Rng rng(4242u);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> v(256);
        for (double& x : v) x = rng.uniform(-2.0, 2.0);
        GridFunction f(g, std::move(v));
        Rect r = Rect::whole(g->box());
        double w2 = weak_norm(f, r, 2.0);
        KahanSum sq, l1;
        for (std::int64_t i = 0; i < f.size(); ++i) {
            sq.add(f[i] * f[i]);
            l1.add(std::abs(f[i]));
        }
        double strong2 = std::sqrt(sq.value() / 256.0);
        double norm1 = l1.value() / 256.0;
        CHECK(w2 <= strong2 * (1 + 1e-12));
        // Kolmogorov with q=1 < p=2: ||f||_1 <= 2 * weak_2
        CHECK(norm1 <= 2.0 * w2 * (1 + 1e-12));
    }
}

TEST_CASE("dyadic maximal of a constant") {
    GridPtr g = unit_line(64);
    GridFunction c = GridFunction::constant(g, -2.5);
    Rect r = Rect::whole(g->box());
    GridFunction m = dyadic_maximal(c, r);
    for (std::int64_t i = 0; i < m.size(); ++i) CHECK(m[i] == doctest::Approx(2.5).epsilon(1e-13));
}

TEST_CASE("dyadic maximal dominates the root average") {
    GridPtr g = Grid::make(Box::make({0, 0}, {1, 1}), {32, 32});
    GridFunction f = GridFunction::sample(g, [](const double* p) {
        return std::exp(p[0]) * (p[1] < 0.5 ? 2.0 : 0.1);
    });
    Rect r = Rect::whole(g->box());
    GridFunction m = dyadic_maximal(f, r);
    double avg = average(f.map([](double v) { return std::abs(v); }), r);
    for_each_cell(*g, g->cells(r), [&](std::int64_t i) { CHECK(m[i] >= avg * (1 - 1e-12)); });
}

TEST_CASE("cz single spike") {
    GridPtr g = unit_line(256);
    GridFunction f = GridFunction::sample(g, [](const double* p) { return p[0] < 0.25 ? 4.0 : 0.0; });
    Rect r = Rect::whole(g->box());
    CzResult cz = cz_decompose(f, r, 2.0);
    CHECK(!cz.root_exceeds);
    REQUIRE(cz.family.size() == 1);
    const Rect& sel = cz.family.members()[0];
    CHECK(sel.level == 2);
    CHECK(sel.lo(0) == doctest::Approx(0.0));
    CHECK(sel.hi(0) == doctest::Approx(0.25));
    CHECK(cz.averages[0] == doctest::Approx(4.0));  // == 2^n * L, sandwich tight
}

TEST_CASE("cz empty when below level") {
    GridPtr g = unit_line(64);
    GridFunction one = GridFunction::constant(g, 1.0);
    CzResult cz = cz_decompose(one, Rect::whole(g->box()), 2.0);
    CHECK(cz.family.size() == 0);
    CHECK(!cz.root_exceeds);
}

TEST_CASE("cz sandwich and level-set identity on random data") {
    Rng rng(777u);
    GridPtr g = Grid::make(Box::make({0, 0}, {1, 1}), {32, 32});
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<double> v(std::size_t(g->cell_count()));
        for (double& x : v) x = rng.uniform(0.0, 2.0);
        GridFunction f(g, std::move(v), true);
        Rect root = Rect::whole(g->box());
        double L = 1.5;
        CzResult cz = cz_decompose(f, root, L);
        double n2 = std::pow(2.0, 2);
        KahanSum covered;
        for (std::size_t k = 0; k < cz.family.size(); ++k) {
            CHECK(cz.averages[k] > L);
            CHECK(cz.averages[k] <= n2 * L * (1 + 1e-12));
            covered.add(cz.family.members()[k].measure());
        }
        double avg_root = average(f, root);
        CHECK(covered.value() < root.measure() * avg_root / L + 1e-12);

        // cell-exact level set identity with the dyadic maximal function
        GridFunction m = dyadic_maximal(f, root);
        std::vector<bool> in_union(std::size_t(g->cell_count()), false);
        for (const Rect& sel : cz.family.members())
            for_each_cell(*g, g->cells(sel), [&](std::int64_t i) { in_union[std::size_t(i)] = true; });
        for (std::int64_t i = 0; i < g->cell_count(); ++i)
            CHECK(in_union[std::size_t(i)] == (m[i] > L));
    }
}

TEST_CASE("sharp maximal vanishes on matching polynomials") {
    GridPtr g = unit_line(64);
    GridFunction f = GridFunction::sample(g, [](const double* p) { return 3.0 * p[0] - 1.0; });
    Rect root = Rect::whole(g->box());
    std::vector<Rect> pool = dyadic_descendants(*g, root, 3);
    GridFunction sharp = sharp_maximal(f, 1, pool);
    for (std::int64_t i = 0; i < sharp.size(); ++i) CHECK(sharp[i] <= 1e-9);
}

TEST_CASE("sharp maximal of half indicator at root pool") {
    GridPtr g = unit_line(64);
    GridFunction f = GridFunction::sample(g, [](const double* p) { return p[0] < 0.5 ? 1.0 : 0.0; });
    Rect root = Rect::whole(g->box());
    GridFunction sharp = sharp_maximal(f, 0, {root});
    for (std::int64_t i = 0; i < sharp.size(); ++i)
        CHECK(sharp[i] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("sharp maximal grows with the pool") {
    GridPtr g = unit_line(64);
    GridFunction f = GridFunction::sample(g, [](const double* p) { return std::sin(9 * p[0]); });
    Rect root = Rect::whole(g->box());
    GridFunction s1 = sharp_maximal(f, 0, dyadic_descendants(*g, root, 1));
    GridFunction s3 = sharp_maximal(f, 0, dyadic_descendants(*g, root, 3));
    for (std::int64_t i = 0; i < s1.size(); ++i) CHECK(s3[i] >= s1[i] * (1 - 1e-12));
}

TEST_CASE("truncation clamp and telescoping") {
    GridPtr g = Grid::make(Box::interval(0, 4), {256});
    GridFunction f = GridFunction::sample(g, [](const double* p) { return p[0]; }, true);
    GridFunction t1 = truncate(f, TruncationMode::Level(1));
    for_each_cell(*g, g->all_cells(), [&](std::int64_t i) {
        double x = g->center(0, i);
        CHECK(t1[i] == doctest::Approx(std::max(0.0, std::min(x - 2.0, 2.0))).epsilon(1e-14));
        CHECK(t1[i] >= 0.0);
        CHECK(t1[i] <= 2.0);
    });

    // telescoping sum over the covered bands reconstructs g
    GridPtr g2 = Grid::make(Box::interval(0, 1), {128});
    GridFunction h = GridFunction::sample(g2, [](const double* p) { return 0.26 + 3.0 * p[0]; }, true);
    std::vector<GridFunction> parts;
    for (int k = -2; k <= 2; ++k) parts.push_back(truncate(h, TruncationMode::Level(k)));
    for (std::int64_t i = 0; i < h.size(); ++i) {
        double s = 0.25;  // sum of all bands below k = -2 equals 2^{-2}
        for (const auto& part : parts) s += part[i];
        CHECK(s == doctest::Approx(h[i]).epsilon(1e-12));
    }
}

TEST_CASE("truncation is 1-Lipschitz") {
    Rng rng(31337u);
    auto tk = [](double v, int k) {
        double h = std::ldexp(1.0, k);
        return std::clamp(v - h, 0.0, h);
    };
    for (int trial = 0; trial < 100000; ++trial) {
        double a = rng.uniform(0.0, 8.0), b = rng.uniform(0.0, 8.0);
        int k = int(rng.below(5)) - 2;
        CHECK(std::abs(tk(a, k) - tk(b, k)) <= std::abs(a - b) + 1e-15);
    }
}

TEST_CASE("level truncation rejects signed input") {
    GridPtr g = unit_line(16);
    GridFunction f = GridFunction::sample(g, [](const double* p) { return p[0] - 0.5; });
    CHECK_THROWS_AS(truncate(f, TruncationMode::Level(0)), Error);
    CHECK_NOTHROW(truncate(f, TruncationMode::Height(0.3)));
}

TEST_CASE("projection idempotence on nested rects") {
    // P_{R_j}(P_R f) = P_R f restricted to R_j: projecting the projection
    // onto a child changes nothing
    GridPtr g = Grid::make(Box::make({0, 0}, {1, 1}), {64, 64});
    GridFunction f = GridFunction::sample(g, [](const double* p) {
        return std::sin(2.5 * p[0]) * std::exp(0.5 * p[1]);
    });
    Rect root = Rect::whole(g->box());
    PolyProjection pr = project_polynomial(f, root, 1);
    std::vector<double> pr_values(std::size_t(g->cell_count()), 0.0);
    std::size_t at = 0;
    std::vector<double> pv = projection_values(f, pr);
    for_each_cell(*g, g->cells(root), [&](std::int64_t i) { pr_values[std::size_t(i)] = pv[at++]; });
    GridFunction prf(g, std::move(pr_values));
    for (const Rect& child : root.children()) {
        PolyProjection nested = project_polynomial(prf, child, 1);
        double resid = projection_l1_residual(prf, child, nested);
        CHECK(resid <= 1e-9);
    }
}

TEST_CASE("optimal L1 center orderings") {
    // optimal-center L1 oscillation <= mean-center <= 2x optimal
    GridPtr g = Grid::make(Box::interval(0, 1), {512});
    GridFunction f = GridFunction::sample(g, [](const double* p) {
        return std::exp(2.0 * p[0]) - 3.0 * p[0];
    });
    Rect root = Rect::whole(g->box());
    double mean_osc = oscillation(f, root, 1.0, nullptr, CenterRule::Mean());
    // the (weighted) median minimizes the L1 oscillation
    std::vector<double> vals(f.values());
    std::sort(vals.begin(), vals.end());
    double med = vals[vals.size() / 2];
    KahanSum acc;
    for (std::int64_t i = 0; i < f.size(); ++i) acc.add(std::abs(f[i] - med));
    double opt_osc = acc.value() / double(f.size());
    CHECK(opt_osc <= mean_osc * (1 + 1e-12));
    CHECK(mean_osc <= 2.0 * opt_osc * (1 + 1e-12));
}
