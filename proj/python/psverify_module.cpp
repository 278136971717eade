// Python bindings for the main operations: grids, weights, oscillations,
// kernel functionals, condition testers and the theorem-check catalog.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "psv/analysis.hpp"
#include "psv/checks.hpp"
#include "psv/conditions.hpp"
#include "psv/config.hpp"
#include "psv/functionals.hpp"
#include "psv/corpus.hpp"
#include "psv/weights.hpp"

namespace py = pybind11;
using namespace psv;

namespace {

/// const-qualified shared grids need a wrapper to serve as a pybind holder
struct GridHandle {
    GridPtr ptr;
};

/// keeps the functional variant opaque (the stl variant caster would try to
/// convert the alternatives)
struct FunctionalHandle {
    Functional value;
};

GridHandle make_grid(const std::vector<double>& lo, const std::vector<double>& hi,
                  const std::vector<int>& resolution, const std::string& basis,
                  const std::vector<int>& blocks) {
    Basis b = basis == "cube_product" ? Basis::cube_product : Basis::rects;
    return GridHandle{Grid::make(Box::make(lo, hi, b, blocks), resolution)};
}

GridFunction sample_expr(const GridHandle& grid, const std::string& expr) {
    return Expr::parse(expr, grid.ptr->dim()).sample(grid.ptr);
}

py::dict report_dict(const CheckReport& rep) {
    py::dict d;
    d["id"] = rep.id;
    d["lhs"] = rep.lhs;
    d["rhs"] = rep.rhs;
    d["empirical"] = rep.empirical;
    d["ratio"] = rep.ratio;
    d["pass"] = rep.pass;
    d["note"] = rep.note;
    d["seed"] = rep.seed;
    d["params"] = rep.params.dump();
    py::list trace;
    for (const RefinePoint& p : rep.trace) trace.append(py::make_tuple(p.resolution, p.value));
    d["trace"] = trace;
    return d;
}

}  // namespace

PYBIND11_MODULE(_psverify, m) {
    m.doc() = "numerical verification of weighted Poincare-Sobolev type inequalities on "
              "dyadic rectangle families";

    py::register_exception<Error>(m, "VerifyError");

    py::class_<Box>(m, "Box")
        .def_static(
            "make",
            [](const std::vector<double>& lo, const std::vector<double>& hi,
               const std::string& basis, const std::vector<int>& blocks) {
                Basis b = basis == "cube_product" ? Basis::cube_product : Basis::rects;
                return Box::make(lo, hi, b, blocks);
            },
            py::arg("lo"), py::arg("hi"), py::arg("basis") = "rects",
            py::arg("blocks") = std::vector<int>{})
        .def_property_readonly("dim", [](const Box& b) { return b.dim; })
        .def("volume", &Box::volume)
        .def("diameter", &Box::diameter);

    py::class_<Rect>(m, "Rect")
        .def_static("whole", &Rect::whole)
        .def_property_readonly("level", [](const Rect& r) { return r.level; })
        .def("measure", &Rect::measure)
        .def("diameter", &Rect::diameter)
        .def("eccentricity", &Rect::eccentricity)
        .def("block_eccentricity",
             [](const Rect& r) -> py::object {
                 auto e = r.block_eccentricity();
                 return e ? py::cast(*e) : py::none();
             })
        .def("children", &Rect::children)
        .def("contains", &Rect::contains)
        .def("disjoint_from", &Rect::disjoint_from)
        .def("__repr__", [](const Rect& r) { return "<Rect " + r.address() + ">"; });

    py::class_<GridHandle>(m, "Grid")
        .def_property_readonly("dim", [](const GridHandle& g) { return g.ptr->dim(); })
        .def_property_readonly("cell_count", [](const GridHandle& g) { return g.ptr->cell_count(); })
        .def_property_readonly("cell_volume", [](const GridHandle& g) { return g.ptr->cell_volume(); })
        .def_property_readonly("max_depth", [](const GridHandle& g) { return g.ptr->max_depth(); })
        .def("root", [](const GridHandle& g) { return Rect::whole(g.ptr->box()); })
        .def("aligned", [](const GridHandle& g, const Rect& r) { return g.ptr->aligned(r); });

    m.def("build_grid", &make_grid, py::arg("lo"), py::arg("hi"), py::arg("resolution"),
          py::arg("basis") = "rects", py::arg("blocks") = std::vector<int>{});

    py::class_<GridFunction>(m, "GridFunction")
        .def("values", [](const GridFunction& f) { return f.values(); })
        .def("__len__", [](const GridFunction& f) { return f.size(); });

    m.def("sample", &sample_expr, py::arg("grid"), py::arg("expression"));
    m.def(
        "integrate",
        [](const GridFunction& f, const Rect& r) { return integrate(f, r); },
        py::arg("f"), py::arg("rect"));
    m.def("average", &average, py::arg("f"), py::arg("rect"));

    py::class_<Weight>(m, "Weight").def("total", py::overload_cast<const Rect&>(&Weight::total, py::const_));
    m.def(
        "make_weight",
        [](const GridHandle& grid, const std::string& expr) {
            return Weight::from_expr(Expr::parse(expr, grid.ptr->dim()), grid.ptr);
        },
        py::arg("grid"), py::arg("expression"));
    m.def(
        "muckenhoupt_constant",
        [](const Weight& w, double p, const Rect& root, int depth, int extra, std::uint64_t seed) {
            return muckenhoupt_constant(w, p, root, depth, extra, seed);
        },
        py::arg("weight"), py::arg("p"), py::arg("root"), py::arg("depth") = 6,
        py::arg("extra_rects") = 16, py::arg("seed") = 1);
    m.def(
        "fujii_wilson_constant",
        [](const Weight& w, const Rect& root, int depth, int shifts, std::uint64_t seed) {
            return fujii_wilson_constant(w, root, depth, shifts, seed);
        },
        py::arg("weight"), py::arg("root"), py::arg("depth") = 4, py::arg("shifts") = 2,
        py::arg("seed") = 1);
    m.def("lebesgue_r_average", &lebesgue_r_average, py::arg("weight"), py::arg("r"),
          py::arg("rect"));
    m.def(
        "reverse_holder_check",
        [](const Weight& w, const Rect& r, double ainf) {
            ReverseHolderResult res = reverse_holder_check(w, r, ainf);
            py::dict d;
            d["eps"] = res.eps;
            d["lhs"] = res.lhs;
            d["rhs"] = res.rhs;
            d["pass"] = res.pass;
            return d;
        },
        py::arg("weight"), py::arg("rect"), py::arg("ainf"));

    m.def(
        "oscillation",
        [](const GridFunction& f, const Rect& r, double q, const Weight* w,
           const std::string& center, int degree, double delta) {
            CenterRule rule = CenterRule::Mean();
            if (center == "poly") rule = CenterRule::Poly(degree);
            else if (center == "optimal_delta") rule = CenterRule::OptimalDelta(delta);
            else if (center != "mean") throw Error("oscillation: unknown center rule");
            return oscillation(f, r, q, w, rule);
        },
        py::arg("f"), py::arg("rect"), py::arg("q") = 1.0, py::arg("weight") = nullptr,
        py::arg("center") = "mean", py::arg("degree") = 0, py::arg("delta") = 0.5);
    m.def(
        "weak_norm",
        [](const GridFunction& f, const Rect& r, double p, const Weight* w) {
            return weak_norm(f, r, p, w);
        },
        py::arg("f"), py::arg("rect"), py::arg("p"), py::arg("weight") = nullptr);
    m.def("dyadic_maximal", &dyadic_maximal, py::arg("g"), py::arg("rect"));
    m.def(
        "cz_decompose",
        [](const GridFunction& g, const Rect& r, double L) {
            CzResult res = cz_decompose(g, r, L);
            py::dict d;
            d["rectangles"] = res.family.members();
            d["averages"] = res.averages;
            d["root_exceeds"] = res.root_exceeds;
            d["union_measure"] = res.family.union_measure();
            return d;
        },
        py::arg("g"), py::arg("rect"), py::arg("level"));
    m.def(
        "truncate",
        [](const GridFunction& g, const std::string& mode, double value) {
            if (mode == "level") return truncate(g, TruncationMode::Level(int(value)));
            if (mode == "height") return truncate(g, TruncationMode::Height(value));
            throw Error("truncate: mode must be 'level' or 'height'");
        },
        py::arg("g"), py::arg("mode"), py::arg("value"));

    m.def(
        "fractional_seminorm",
        [](const GridFunction& f, const Rect& r, double delta, double p) {
            return fractional_seminorm(f, r, delta, p);
        },
        py::arg("f"), py::arg("rect"), py::arg("delta"), py::arg("p") = 1.0);

    m.def(
        "sobolev_exponent",
        [](const std::string& kind, double p, int n, double delta, double q, double M,
           double weight_constant) {
            ExponentParams ep;
            ep.p = p;
            ep.n = n;
            ep.delta = delta;
            ep.q = q;
            ep.M = M;
            ep.weight_constant = weight_constant;
            ExponentKind k;
            if (kind == "classic") k = ExponentKind::classic;
            else if (kind == "weighted_aq") k = ExponentKind::weighted_aq;
            else if (kind == "lemma_m") k = ExponentKind::lemma_m;
            else if (kind == "a1_fractional") k = ExponentKind::a1_fractional;
            else throw Error("sobolev_exponent: unknown kind");
            return sobolev_exponent(k, ep);
        },
        py::arg("kind"), py::arg("p"), py::arg("n"), py::arg("delta") = 1.0, py::arg("q") = 1.0,
        py::arg("M") = 0.0, py::arg("weight_constant") = 0.0);
    m.def("companion_M", &companion_M, py::arg("weight_constant"), py::arg("q"));
    m.def("companion_B", &companion_B, py::arg("weight_constant"), py::arg("q"));

    m.def(
        "riesz_potential_bound",
        [](const GridHandle& grid, const std::vector<std::int64_t>& omega, std::int64_t z,
           double alpha, double slack) {
            RieszBound rb = riesz_potential_bound(*grid.ptr, omega, z, alpha, slack);
            py::dict d;
            d["lhs"] = rb.lhs;
            d["rhs"] = rb.rhs;
            d["printed_rhs"] = rb.printed_rhs;
            d["pass"] = rb.pass;
            return d;
        },
        py::arg("grid"), py::arg("omega_cells"), py::arg("z_cell"), py::arg("alpha"),
        py::arg("slack") = 0.05);

    py::class_<DisjointFamily>(m, "DisjointFamily")
        .def("__len__", [](const DisjointFamily& f) { return f.size(); })
        .def("covered_fraction", &DisjointFamily::covered_fraction)
        .def("members", [](const DisjointFamily& f) { return f.members(); });
    m.def(
        "sample_disjoint_families",
        [](const GridHandle& grid, const Rect& root, int count, int max_depth,
           py::object smallness, std::uint64_t seed) {
            FamilySamplerOptions opts;
            opts.max_depth = max_depth;
            if (!smallness.is_none()) opts.smallness = smallness.cast<double>();
            return sample_disjoint_families(*grid.ptr, root, count, opts, seed);
        },
        py::arg("grid"), py::arg("root"), py::arg("count"), py::arg("max_depth") = 4,
        py::arg("smallness") = py::none(), py::arg("seed") = 1);

    py::class_<FunctionalHandle>(m, "Functional");
    m.def(
        "measure_functional",
        [](const GridFunction& mu, py::object w, double delta, double p) {
            MeasureFunctional meas;
            meas.delta = delta;
            meas.p = p;
            meas.mu = std::make_shared<GridFunction>(mu);
            if (!w.is_none()) meas.w = std::make_shared<Weight>(w.cast<Weight>());
            return FunctionalHandle{Functional(meas)};
        },
        py::arg("mu"), py::arg("w") = py::none(), py::arg("delta") = 1.0, py::arg("p") = 1.0);
    m.def("constant_functional", []() { return FunctionalHandle{Functional(ConstantFunctional{})}; });
    m.def(
        "condition_ratio",
        [](const FunctionalHandle& a, const GridFunction& f, double p, py::object w,
           const Rect& root, const std::vector<DisjointFamily>& families, py::object s,
           double bound, double tolerance) {
            std::optional<double> sv;
            if (!s.is_none()) sv = s.cast<double>();
            Weight const* wp = nullptr;
            Weight wcopy = w.is_none() ? Weight::constant(f.grid_ptr(), 1.0) : w.cast<Weight>();
            if (!w.is_none()) wp = &wcopy;
            ConditionVerdict v =
                condition_ratio(a.value, f, p, wp, root, families, sv, bound, tolerance);
            py::dict d;
            d["max_ratio"] = v.max_ratio;
            d["pass"] = v.pass;
            d["families_tested"] = v.families_tested;
            d["argmax_family"] = v.argmax_family;
            d["bound"] = v.bound;
            d["degenerate"] = v.degenerate;
            return d;
        },
        py::arg("functional"), py::arg("f"), py::arg("p"), py::arg("w"), py::arg("root"),
        py::arg("families"), py::arg("s") = py::none(), py::arg("bound") = 1.0,
        py::arg("tolerance") = 1e-10);

    m.def("list_checks", []() {
        py::list out;
        for (const CatalogEntry& e : check_catalog()) {
            py::dict d;
            d["id"] = e.id;
            d["statement"] = e.statement;
            d["explicit_constant"] = e.explicit_constant;
            d["defaults"] = e.defaults.dump();
            out.append(d);
        }
        return out;
    });
    m.def(
        "run_check",
        [](const std::string& id, const std::string& overrides, std::uint64_t seed, int jobs) {
            json o = overrides.empty() ? json::object() : json::parse(overrides);
            return report_dict(run_check(id, o, seed, jobs));
        },
        py::arg("id"), py::arg("overrides") = "", py::arg("seed") = 1, py::arg("jobs") = 0);
    m.def(
        "sweep",
        [](const std::string& id, const std::string& parameter, const std::string& values,
           std::uint64_t seed) {
            std::vector<json> vals;
            for (const json& v : json::parse(values)) vals.push_back(v);
            py::list out;
            for (const CheckReport& rep : sweep_check(id, parameter, vals, json::object(), seed))
                out.append(report_dict(rep));
            return out;
        },
        py::arg("id"), py::arg("parameter"), py::arg("values"), py::arg("seed") = 1);
}
