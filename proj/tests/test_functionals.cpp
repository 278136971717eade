#include <doctest.h>

#include <cmath>

#include "psv/functionals.hpp"

using namespace psv;

TEST_CASE("derivative field basics") {
    GridPtr g = Grid::make(Box::interval(0, 1), {256});
    GridFunction d = derivative_field(Expr::parse("x1", 1), g, -1, 1);
    for (std::int64_t i = 0; i < d.size(); ++i) CHECK(d[i] == doctest::Approx(1.0));

    GridPtr g2 = Grid::make(Box::make({0, 0}, {1, 1}, Basis::cube_product, {1, 1}), {32, 32});
    GridFunction d2 = derivative_field(Expr::parse("x1", 2), g2, 1, 1);  // block 2 of f(x)=x1
    for (std::int64_t i = 0; i < d2.size(); ++i) CHECK(d2[i] == doctest::Approx(0.0));
}

TEST_CASE("second derivative of sin(pi x) is exact under symbolic mode") {
    GridPtr g = Grid::make(Box::interval(0, 1), {128});
    GridFunction d = derivative_field(Expr::parse("sin(pi*x1)", 1), g, -1, 2);
    for (std::int64_t i = 0; i < d.size(); ++i) {
        double x = g->center(0, i);
        CHECK(d[i] == doctest::Approx(M_PI * M_PI * std::abs(std::sin(M_PI * x))).epsilon(1e-12));
    }
}

TEST_CASE("non-differentiable expressions advise finite differences") {
    GridPtr g = Grid::make(Box::interval(0, 1), {64});
    CHECK_THROWS_AS(derivative_field(Expr::parse("abs(x1)", 1), g, -1, 1), Error);
    CHECK_THROWS_AS(derivative_field(Expr::parse("x1", 1), g, -1, 4), Error);
    GridFunction fd = derivative_field_fd(Expr::parse("abs(x1-0.5)", 1).sample(g), -1, 1);
    // away from the kink the central differences are exact for |x-1/2|
    CHECK(fd[5] == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("measure functional evaluates d^delta (mu/w)^{1/p}") {
    GridPtr g = Grid::make(Box::make({0, 0}, {1, 2}), {32, 32});
    Rect root = Rect::whole(g->box());
    auto w = std::make_shared<Weight>(Weight::constant(g, 2.0));
    auto mu = std::make_shared<GridFunction>(w->density());
    MeasureFunctional meas;
    meas.delta = 0.5;
    meas.p = 2.0;
    meas.mu = mu;
    meas.w = w;
    GridFunction f = GridFunction::constant(g, 0.0);
    // mu = w means a(R) = d(R)^delta exactly
    CHECK(eval_functional(Functional(meas), f, root) ==
          doctest::Approx(std::pow(std::sqrt(5.0), 0.5)).epsilon(1e-12));
}

TEST_CASE("constant functional and sums") {
    GridPtr g = Grid::make(Box::interval(0, 1), {64});
    Rect root = Rect::whole(g->box());
    GridFunction f = GridFunction::constant(g, 0.0);
    Functional one{ConstantFunctional{}};
    CHECK(eval_functional(one, f, root) == 1.0);
    Functional sum = sum_functional({one, one, one});
    CHECK(eval_functional(sum, f, root) == doctest::Approx(3.0));
}

TEST_CASE("gradient functional on f(x)=x matches |R| on subintervals") {
    GridPtr g = Grid::make(Box::interval(0, 1), {256});
    Rect root = Rect::whole(g->box());
    GradientFunctional gf;
    gf.order = 1;
    gf.p = 1.0;
    gf.length = LengthRule::Diameter();
    gf.deriv = std::make_shared<GridFunction>(derivative_field(Expr::parse("x1", 1), g, -1, 1));
    GridFunction f = Expr::parse("x1", 1).sample(g);
    for (const Rect& r : root.children())
        CHECK(eval_functional(Functional(gf), f, r) == doctest::Approx(r.measure()).epsilon(1e-12));
}

TEST_CASE("homogeneity of gradient and fractional functionals") {
    GridPtr g = Grid::make(Box::interval(0, 1), {128});
    Rect root = Rect::whole(g->box());
    Expr e = Expr::parse("sin(2*x1)+x1^2", 1);
    GridFunction f = e.sample(g);
    GridFunction f3(g, [&] {
        std::vector<double> v = f.values();
        for (double& x : v) x *= -3.0;
        return v;
    }());

    GradientFunctional gf;
    gf.order = 1;
    gf.p = 2.0;
    gf.deriv = std::make_shared<GridFunction>(derivative_field(e, g, -1, 1));
    GradientFunctional gf3 = gf;
    gf3.deriv = std::make_shared<GridFunction>(gf.deriv->map([](double v) { return 3.0 * v; }, true));
    CHECK(eval_functional(Functional(gf3), f3, root) ==
          doctest::Approx(3.0 * eval_functional(Functional(gf), f, root)).epsilon(1e-12));

    FractionalFunctional fr;
    fr.delta = 0.5;
    fr.p = 1.0;
    CHECK(eval_functional(Functional(fr), f3, root) ==
          doctest::Approx(3.0 * eval_functional(Functional(fr), f, root)).epsilon(1e-6));
}

TEST_CASE("block functional vanishes iff constant along the block") {
    GridPtr g = Grid::make(Box::make({0, 0}, {1, 1}, Basis::cube_product, {1, 1}), {32, 32});
    Rect root = Rect::whole(g->box());
    GridFunction f = Expr::parse("x2^2", 2).sample(g);
    BlockFractional b0;
    b0.block = 0;
    b0.delta = 0.5;
    b0.p = 1.0;
    BlockFractional b1 = b0;
    b1.block = 1;
    CHECK(eval_functional(Functional(b0), f, root) == doctest::Approx(0.0));
    CHECK(eval_functional(Functional(b1), f, root) > 0.0);
}

TEST_CASE("one-parameter gradient domination of the fractional functional") {
    // l^d (avg kernel sum) <= c/(d(1-d)) l avg|f'| with a stable constant
    GridPtr g1 = Grid::make(Box::interval(0, 1), {256});
    GridPtr g2 = Grid::make(Box::interval(0, 1), {512});
    Expr e = Expr::parse("sin(3*x1)+0.5*x1", 1);
    double c1 = 0.0, c2 = 0.0;
    for (auto [g, c] : {std::pair{g1, &c1}, std::pair{g2, &c2}}) {
        GridFunction f = e.sample(g);
        std::vector<GridFunction> slopes = gradient_fields(e, g);
        GridFunction grad = derivative_field(e, g, -1, 1);
        KernelOptions opts;
        opts.slopes = &slopes;
        Rect root = Rect::whole(g->box());
        double delta = 0.5;
        double lhs = fractional_seminorm(f, root, delta, 1.0, opts);
        double rhs = average(grad, root) / (delta * (1.0 - delta));
        *c = lhs / rhs;
    }
    CHECK(c1 == doctest::Approx(c2).epsilon(0.02));
    CHECK(c1 > 0.0);
    CHECK(c1 < 10.0);
}
