#include <doctest.h>

#include <cmath>

#include "psv/expr.hpp"

using namespace psv;

TEST_CASE("parse and eval basics") {
    Expr e = Expr::parse("x1^2 + 3*x2 - 1", 2);
    double x[2] = {2.0, 0.5};
    CHECK(e.eval(x) == doctest::Approx(4.0 + 1.5 - 1.0));

    Expr t = Expr::parse("sin(pi*x1)", 1);
    double y[1] = {0.5};
    CHECK(t.eval(y) == doctest::Approx(1.0));

    Expr m = Expr::parse("min(x1, max(x2, 0.25))", 2);
    double z[2] = {0.9, 0.1};
    CHECK(m.eval(z) == doctest::Approx(0.25));
}

TEST_CASE("axis out of range carries position") {
    try {
        Expr::parse("x1 + x3", 2);
        CHECK(false);
    } catch (const ParseError& e) {
        CHECK(e.position() == 5);
        CHECK(std::string(e.what()).find("axis index out of range") != std::string::npos);
    }
}

TEST_CASE("parse errors") {
    CHECK_THROWS_AS(Expr::parse("x1 +", 1), ParseError);
    CHECK_THROWS_AS(Expr::parse("foo(x1)", 1), ParseError);
    CHECK_THROWS_AS(Expr::parse("x1 ^ x1", 1), ParseError);  // exponent must be constant
    CHECK_THROWS_AS(Expr::parse("min(x1)", 1), ParseError);
    CHECK_THROWS_AS(Expr::parse("(x1", 1), ParseError);
}

TEST_CASE("derivatives") {
    Expr e = Expr::parse("x1^2*sin(x2)", 2);
    Expr d1 = e.derivative(0);
    Expr d2 = e.derivative(1);
    double x[2] = {1.5, 0.7};
    CHECK(d1.eval(x) == doctest::Approx(2.0 * 1.5 * std::sin(0.7)));
    CHECK(d2.eval(x) == doctest::Approx(1.5 * 1.5 * std::cos(0.7)));

    Expr q = Expr::parse("sqrt(x1)", 1);
    double y[1] = {4.0};
    CHECK(q.derivative(0).eval(y) == doctest::Approx(0.25));

    Expr r = Expr::parse("1/(1+x1)", 1);
    CHECK(r.derivative(0).eval(y) == doctest::Approx(-1.0 / 25.0));
}

TEST_CASE("second derivative of sin(pi x) is exact") {
    Expr f = Expr::parse("sin(pi*x1)", 1);
    Expr d2 = f.derivative(0).derivative(0);
    double x[1] = {0.3};
    CHECK(d2.eval(x) == doctest::Approx(-M_PI * M_PI * std::sin(M_PI * 0.3)).epsilon(1e-12));
}

TEST_CASE("abs and min are not differentiable") {
    Expr e = Expr::parse("abs(x1)", 1);
    CHECK(!e.differentiable());
    CHECK_THROWS_AS(e.derivative(0), Error);
    CHECK(Expr::parse("x1*x1", 1).differentiable());
}

TEST_CASE("printable form round trips") {
    Expr e = Expr::parse("0.5*x1 + sin(pi*x2)^2", 2);
    Expr back = Expr::parse(e.str(), 2);
    double x[2] = {0.37, 0.81};
    CHECK(back.eval(x) == doctest::Approx(e.eval(x)).epsilon(1e-15));
}

TEST_CASE("depth cap") {
    std::string deep = "x1";
    for (int i = 0; i < 40; ++i) deep = "sin(" + deep + ")";
    CHECK_THROWS_AS(Expr::parse(deep, 1), Error);
}

TEST_CASE("printed canonical forms round-trip across dimensions") {
    double x[4] = {0.31, 0.87, -0.21, 0.4};
    for (const char* probe : {"abs(x1-0.5)^1.5 + min(x1, 0.2)",
                              "sin(pi*x1)*cos(x2) - x2^3/(1+x1^2)",
                              "exp(-x3)*sqrt(1+x1^2) + max(x2, x3)"}) {
        Expr e = Expr::parse(probe, 3);
        Expr back = Expr::parse(e.str(), 3);
        CHECK(back.eval(x) == doctest::Approx(e.eval(x)).epsilon(1e-15));
    }
}
