#include "psv/corpus.hpp"

#include <cmath>
#include <sstream>

namespace psv {

namespace {

// box-normalized coordinate t_a = (x_a - lo_a)/side_a as an expression string
std::string scaled_axis(const Box& box, int a) {
    return "((x" + std::to_string(a + 1) + "-(" + format_double(box.lo[a]) + "))/" +
           format_double(box.side(a)) + ")";
}

std::string affine(const Box& box) {
    std::ostringstream os;
    os << "0.3";
    for (int a = 0; a < box.dim; ++a)
        os << "+" << format_double(0.7 + 0.4 * a) << "*" << scaled_axis(box, a);
    return os.str();
}

std::string quadratic(const Box& box) {
    std::ostringstream os;
    os << scaled_axis(box, 0) << "^2";
    for (int a = 1; a < box.dim; ++a) os << "-0.5*" << scaled_axis(box, a) << "^2";
    return os.str();
}

std::string sine(const Box& box) {
    std::ostringstream os;
    os << "sin(pi*" << scaled_axis(box, 0) << ")";
    if (box.dim > 1) os << "*(1+0.5*" << scaled_axis(box, 1) << ")";
    return os.str();
}

std::string bump(const Box& box) {
    // radial exp(-1/(1.02 - s)) with s in [0,1]; the 0.02 margin keeps the
    // denominator away from zero so symbolic derivatives stay bounded
    std::ostringstream os;
    os << "exp(-1/(1.02-(";
    for (int a = 0; a < box.dim; ++a) {
        if (a) os << "+";
        os << "(2*" << scaled_axis(box, a) << "-1)^2";
    }
    os << ")/" << box.dim << "))";
    return os.str();
}

std::string tensor(const Box& box) {
    std::ostringstream os;
    os << "(" << scaled_axis(box, 0) << "+0.2)";
    for (int a = 1; a < box.dim; ++a)
        os << "*cos(" << format_double(1.5 + a) << "*" << scaled_axis(box, a) << ")";
    return os.str();
}

std::string random_trig(const Box& box, Rng& rng) {
    std::ostringstream os;
    bool first = true;
    for (int k = 1; k <= 3; ++k) {
        for (int a = 0; a < box.dim; ++a) {
            double amp = rng.uniform(-1.0, 1.0) / double(k);
            double phase = rng.uniform(0.0, 2.0 * M_PI);
            if (!first) os << "+";
            first = false;
            os << format_double(amp) << "*sin(" << k << "*pi*" << scaled_axis(box, a) << "+"
               << format_double(phase) << ")";
        }
    }
    return os.str();
}

}  // namespace

std::vector<CorpusEntry> default_corpus(const Box& box, std::uint64_t seed, int random_count) {
    int dim = box.dim;
    std::vector<CorpusEntry> out;
    out.push_back({"affine", Expr::parse(affine(box), dim), true, true});
    out.push_back({"quadratic", Expr::parse(quadratic(box), dim), true, true});
    out.push_back({"sine", Expr::parse(sine(box), dim), true, true});
    out.push_back({"bump", Expr::parse(bump(box), dim), true, true});
    if (dim > 1) out.push_back({"tensor", Expr::parse(tensor(box), dim), true, true});
    Rng rng(seed ^ 0x7d2f8c4b1a6e9350ULL);
    for (int k = 0; k < random_count; ++k) {
        std::ostringstream name;
        name << "trig" << k;
        out.push_back({name.str(), Expr::parse(random_trig(box, rng), dim), true, true});
    }
    return out;
}

Expr positive_density(int dim, int variant) {
    switch (variant % 3) {
        case 0: return Expr::parse("1", dim);
        case 1: return Expr::parse("1+0.5*sin(2*pi*x1)", dim);
        default: {
            std::ostringstream os;
            os << "0.2+(x" << (dim > 1 ? 2 : 1) << ")^2";
            return Expr::parse(os.str(), dim);
        }
    }
}

}  // namespace psv
