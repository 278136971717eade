// Poincare, fractional, reverse Holder, John-Nirenberg and weak-starting
// checks.

#include <algorithm>
#include <cmath>

#include "check_impl.hpp"

namespace psv::checks {

namespace {

// P1: avg_R |f - f_R| <= (1/2) d(R) avg_R |grad f|, explicit constant, with
// the discretization slack shrinking under refinement.
CheckReport check_p1(const Ctx& ctx) {
    double constant = ctx.num("constant");
    double tol = ctx.num("tol");
    int depth = ctx.geti("depth");

    auto max_ratio_at = [&](int dim, int res) {
        Box box = dim == 1 ? Box::interval(0, 1) : Box::make({0, 0}, {1, 1});
        GridPtr grid = Grid::make(box, std::vector<int>(std::size_t(dim), res));
        RatioMax rm;
        Ctx sub = ctx;
        sub.params["dim"] = dim;
        for (const Sampled& s : sampled_corpus(sub, grid)) {
            GridFunction grad = derivative_field(s.expr, grid, -1, 1);
            for (const Rect& r : dyadic_descendants(*grid, grid_root(grid), depth)) {
                double lhs = oscillation(s.f, r, 1.0, nullptr, CenterRule::Mean());
                double rhs = constant * r.diameter() * average(grad, r);
                rm.update(lhs, rhs);
            }
        }
        return rm;
    };

    RatioMax best;
    {
        RatioMax r1 = max_ratio_at(1, ctx.geti("res"));
        RatioMax r2 = max_ratio_at(2, ctx.geti("res2d"));
        best = r1.ratio >= r2.ratio ? r1 : r2;
    }

    // measured slack against a finer reference must shrink monotonically;
    // once the slack reaches the pool-max noise floor (different arg-max
    // rectangles between grids) it may fluctuate at the 1e-4 level
    std::vector<RefinePoint> trace;
    double ref = max_ratio_at(1, 2 * ctx.geti("res")).ratio;
    bool monotone = true;
    double prev = std::numeric_limits<double>::infinity();
    for (int n : {ctx.geti("res") / 8, ctx.geti("res") / 4, ctx.geti("res") / 2, ctx.geti("res")}) {
        if (n < 16) continue;
        double r = max_ratio_at(1, n).ratio;
        trace.push_back({n, r});
        double slack = std::abs(r - ref);
        if (slack > prev * (1.0 + 1e-9) + 1e-4) monotone = false;
        prev = slack;
    }

    CheckReport rep = explicit_report(ctx, "P1", best.lhs, best.structural, tol, std::move(trace));
    if (!monotone) {
        rep.pass = false;
        rep.note = "discretization slack not monotone";
    }
    return rep;
}

// P2: avg_R |f - P_R f| <= C d(R)^m avg_R |grad^m f|, dimensional constant.
CheckReport check_p2(const Ctx& ctx) {
    int depth = ctx.geti("depth");
    auto orders = ctx.params.at("orders").get<std::vector<int>>();
    return dimensional_report(ctx, "P2", [&](int scale) {
        GridPtr grid = ctx_grid(ctx, scale);
        RatioMax rm;
        for (const Sampled& s : sampled_corpus(ctx, grid)) {
            for (int m : orders) {
                GridFunction grad = derivative_field(s.expr, grid, -1, m);
                for (const Rect& r : dyadic_descendants(*grid, grid_root(grid), depth)) {
                    double lhs = oscillation(s.f, r, 1.0, nullptr, CenterRule::Poly(m - 1));
                    double rhs = std::pow(r.diameter(), m) * average(grad, r);
                    rm.update(lhs, rhs);
                }
            }
        }
        return DimensionalOut{rm.ratio, rm.lhs, rm.structural, true, {}};
    });
}

// P3: the weighted variant via Holder; its constant cannot exceed the
// unweighted one because the Holder step is an exact discrete inequality
// when the weight constant comes from a pool containing the rectangle.
CheckReport check_p3(const Ctx& ctx) {
    int depth = ctx.geti("depth");
    int m = ctx.geti("m");
    double p = ctx.num("p");
    return dimensional_report(ctx, "P3", [&](int scale) {
        GridPtr grid = ctx_grid(ctx, scale);
        Weight w = Weight::from_expr(Expr::parse(ctx.str("w"), grid->dim()), grid);
        Rect root = grid_root(grid);
        RectPool pool = make_rect_pool(*grid, root, depth, 16, ctx.seed);
        double apw = muckenhoupt_over(w, p, pool);
        RatioMax weighted, unweighted;
        for (const Sampled& s : sampled_corpus(ctx, grid)) {
            GridFunction grad = derivative_field(s.expr, grid, -1, m);
            for (const Rect& r : pool.dyadic) {
                double lhs = oscillation(s.f, r, 1.0, nullptr, CenterRule::Poly(m - 1));
                KahanSum acc;
                for_each_cell(*grid, grid->cells(r), [&](std::int64_t i) {
                    acc.add(std::pow(grad[i], p) * w.density()[i]);
                });
                double wnorm = std::pow(acc.value() * grid->cell_volume() / w.total(r), 1.0 / p);
                weighted.update(lhs, std::pow(apw, 1.0 / p) * std::pow(r.diameter(), m) * wnorm);
                unweighted.update(lhs, std::pow(r.diameter(), m) * average(grad, r));
            }
        }
        bool holder_ok = weighted.ratio <= unweighted.ratio * (1.0 + 1e-9);
        return DimensionalOut{weighted.ratio, weighted.lhs, weighted.structural, holder_ok,
                              holder_ok ? "" : "weighted constant exceeds unweighted"};
    });
}

// F1: avg_Q |f - f_Q| <= c_n * (1-D rough fractional functional).
CheckReport check_f1(const Ctx& ctx) {
    int depth = ctx.geti("depth");
    std::vector<double> deltas = ctx.nums("deltas");
    return dimensional_report(ctx, "F1", [&](int scale) {
        GridPtr grid = ctx_grid(ctx, scale);
        RatioMax rm;
        for (const Sampled& s : sampled_corpus(ctx, grid)) {
            std::vector<GridFunction> slopes = gradient_fields(s.expr, grid);
            KernelOptions opts = ctx.kernel_options();
            opts.slopes = &slopes;
            for (double delta : deltas)
                for (const Rect& r : dyadic_descendants(*grid, grid_root(grid), depth)) {
                    double lhs = oscillation(s.f, r, 1.0, nullptr, CenterRule::Mean());
                    double rhs = fractional_seminorm(s.f, r, delta, 1.0, opts);
                    rm.update(lhs, rhs);
                }
        }
        return DimensionalOut{rm.ratio, rm.lhs, rm.structural, true, {}};
    });
}

// F2: weak-type fractional Sobolev with the p* factor.
CheckReport check_f2(const Ctx& ctx) {
    double delta = ctx.num("delta");
    double p = ctx.num("p");
    int depth = ctx.geti("depth");
    return dimensional_report(ctx, "F2", [&](int scale) {
        GridPtr grid = ctx_grid(ctx, scale);
        ExponentParams ep;
        ep.p = p;
        ep.n = grid->dim();
        ep.delta = delta;
        double pstar = sobolev_exponent(ExponentKind::classic, ep);
        RatioMax rm;
        bool bridge_ok = true;
        for (const Sampled& s : sampled_corpus(ctx, grid)) {
            std::vector<GridFunction> slopes = gradient_fields(s.expr, grid);
            KernelOptions opts = ctx.kernel_options();
            opts.slopes = &slopes;
            for (const Rect& r : dyadic_descendants(*grid, grid_root(grid), depth)) {
                double lhs = weak_osc_norm(s.f, r, pstar, nullptr, 0);
                double rhs = pstar * fractional_seminorm(s.f, r, delta, p, opts);
                rm.update(lhs, rhs);
                bridge_ok = bridge_ok && kolmogorov_bridge_holds(s.f, r, pstar, nullptr, 0);
            }
        }
        return DimensionalOut{rm.ratio, rm.lhs, rm.structural, bridge_ok,
                              bridge_ok ? "" : "Kolmogorov bridge violated"};
    });
}

// F3: the (1-delta) gain for f(x) = x against the closed-form ratio
// (2-delta)/8; product-integration makes the seminorm exact here.
CheckReport check_f3(const Ctx& ctx) {
    std::vector<double> deltas = ctx.nums("deltas");
    Expr fx = Expr::parse("x1", 1);

    auto worst_at = [&](int res, std::string* note, bool* in_band) {
        GridPtr grid = Grid::make(Box::interval(0, 1), {res});
        GridFunction f = fx.sample(grid);
        Rect root = grid_root(grid);
        std::vector<GridFunction> slopes = gradient_fields(fx, grid);
        KernelOptions opts = ctx.kernel_options();
        opts.slopes = &slopes;
        double osc = oscillation(f, root, 1.0, nullptr, CenterRule::Mean());
        double worst = 0.0;
        for (double delta : deltas) {
            double semi = fractional_seminorm(f, root, delta, 1.0, opts);
            double ratio = osc / ((1.0 - delta) * semi);
            double expect = (2.0 - delta) / 8.0;
            worst = std::max(worst, std::abs(ratio - expect) / expect);
            if (in_band && !(ratio >= 0.125 - 1e-6 && ratio <= 0.1875 + 1e-6)) *in_band = false;
            if (note)
                *note += (note->empty() ? "" : " ") + format_double(delta) + "->" + format_double(ratio);
        }
        return worst;
    };

    bool in_band = true;
    std::string note;
    double worst_dev = worst_at(ctx.geti("res"), &note, &in_band);
    std::vector<RefinePoint> trace;
    trace.push_back({ctx.geti("res") / 2, worst_at(ctx.geti("res") / 2, nullptr, nullptr)});
    trace.push_back({ctx.geti("res"), worst_dev});

    CheckReport rep = explicit_report(ctx, "F3", worst_dev, ctx.num("tol"), 0.0, std::move(trace), note);
    rep.rhs = ctx.num("tol");
    rep.ratio = worst_dev / ctx.num("tol");
    rep.pass = worst_dev <= ctx.num("tol") && in_band;
    if (!in_band) rep.note += " (ratio left the [1/8, 3/16] band)";
    return rep;
}

// F4: one-parameter weighted fractional Poincare-Sobolev with the
// (1-delta)^{1/p} gain for an A_1-type weight.
CheckReport check_f4(const Ctx& ctx) {
    double delta = ctx.num("delta");
    double p = ctx.num("p");
    int depth = ctx.geti("depth");
    double frozen_a1 = 0.0;
    return dimensional_report(ctx, "F4", [&](int scale) {
        GridPtr grid = ctx_grid(ctx, scale);
        auto w = std::make_shared<Weight>(Weight::from_expr(Expr::parse(ctx.str("w"), grid->dim()), grid));
        Rect root = grid_root(grid);
        RectPool pool = make_rect_pool(*grid, root, depth, 16, ctx.seed);
        if (scale == 1) frozen_a1 = muckenhoupt_over(*w, 1.0, pool);
        double a1 = frozen_a1;
        ExponentParams ep;
        ep.p = p;
        ep.n = grid->dim();
        ep.delta = delta;
        ep.weight_constant = a1;
        double pstar = sobolev_exponent(ExponentKind::a1_fractional, ep);

        FractionalFunctional frac;
        frac.delta = delta;
        frac.p = p;
        frac.w = w;
        frac.kernel = ctx.kernel_options();
        Functional a(frac);

        RatioMax rm;
        for (const Sampled& s : sampled_corpus(ctx, grid)) {
            for (const Rect& r : pool.dyadic) {
                double lhs = strong_norm(s.f, r, pstar, w.get(), 0);
                double rhs = std::pow(1.0 - delta, 1.0 / p) * std::pow(a1, 1.0 / p) *
                             eval_functional(a, s.f, r);
                rm.update(lhs, rhs);
            }
        }
        return DimensionalOut{rm.ratio, rm.lhs, rm.structural, true, "p*=" + format_double(pstar)};
    });
}

// F5: fractional functional dominated by the gradient functional with the
// 1/(delta(1-delta)) blowup, plus the Riesz rearrangement bound it rests on.
CheckReport check_f5(const Ctx& ctx) {
    std::vector<double> deltas = ctx.nums("deltas");
    int depth = ctx.geti("depth");
    return dimensional_report(ctx, "F5", [&](int scale) {
        GridPtr grid = ctx_grid(ctx, scale);
        RatioMax rm;
        for (const Sampled& s : sampled_corpus(ctx, grid)) {
            std::vector<GridFunction> slopes = gradient_fields(s.expr, grid);
            KernelOptions opts = ctx.kernel_options();
            opts.slopes = &slopes;
            GridFunction grad = derivative_field(s.expr, grid, -1, 1);
            for (double delta : deltas)
                for (const Rect& r : dyadic_descendants(*grid, grid_root(grid), depth)) {
                    double lhs = fractional_seminorm(s.f, r, delta, 1.0, opts);
                    double len = std::pow(r.measure(), 1.0 / grid->dim());
                    double rhs = len * average(grad, r) / (delta * (1.0 - delta));
                    rm.update(lhs, rhs);
                }
        }

        // Riesz potential over a centered interval is the tight case
        std::vector<std::int64_t> omega;
        std::int64_t n = grid->cell_count();
        for (std::int64_t i = n / 4; i < 3 * n / 4; ++i) omega.push_back(i);
        RieszBound rb = riesz_potential_bound(*grid, omega, n / 2, 0.5, 0.05);
        std::string note = "riesz lhs=" + format_double(rb.lhs) + " rhs=" + format_double(rb.rhs) +
                           " printed=" + format_double(rb.printed_rhs);
        return DimensionalOut{rm.ratio, rm.lhs, rm.structural, rb.pass, note};
    });
}

// W1: sharp reverse Holder at eps = 1/(2^{n+1}[w] - 1) across the
// power-weight catalog, all dyadic rectangles to depth 6.
CheckReport check_w1(const Ctx& ctx) {
    struct Item {
        std::string expr;
        int dim;
    };
    std::vector<Item> cat = {{"abs(x1)^0.5", 1},
                             {"abs(x1)^(-0.5)", 1},
                             {"abs(x1)^0.3", 1},
                             {"(abs(x1)^(-0.3))*(abs(x2)^(-0.3))", 2},
                             {"(abs(x1)^0.3)*(abs(x2)^0.3)", 2}};
    double worst = 0.0;
    std::string note;
    int depth = ctx.geti("depth");
    for (const Item& item : cat) {
        int res = item.dim == 1 ? ctx.geti("res") : ctx.geti("res2d");
        std::vector<double> lo(std::size_t(item.dim), -1.0), hi(std::size_t(item.dim), 1.0);
        GridPtr grid = Grid::make(Box::make(lo, hi), std::vector<int>(std::size_t(item.dim), res));
        Weight w = Weight::from_expr(Expr::parse(item.expr, item.dim), grid);
        Rect root = grid_root(grid);
        double ainf = fujii_wilson_constant(w, root, std::min(depth, grid->max_depth()), 2, ctx.seed);
        for (const Rect& r : dyadic_descendants(*grid, root, depth)) {
            ReverseHolderResult res_r = reverse_holder_check(w, r, ainf);
            worst = std::max(worst, res_r.lhs / res_r.rhs);
        }
        note += (note.empty() ? "" : " ") + item.expr + ":ainf=" + format_double(ainf);
    }
    return explicit_report(ctx, "W1", worst, 1.0, 1e-9, {}, note);
}

// J1: John-Nirenberg-type bound for M^d(f - P_R f) / M_m^sharp f in both
// the w_r and the A_infty normalizations.
CheckReport check_j1(const Ctx& ctx) {
    int m = ctx.geti("m");
    double r_exp = ctx.num("r");
    std::vector<double> ps = ctx.nums("p_values");
    int sharp_depth = ctx.geti("depth");
    return dimensional_report(ctx, "J1", [&](int scale) {
        GridPtr grid = ctx_grid(ctx, scale);
        Weight w = Weight::from_expr(Expr::parse(ctx.str("w"), grid->dim()), grid);
        Rect root = grid_root(grid);
        double fw = fujii_wilson_constant(w, root, 3, 2, ctx.seed);
        double wr = lebesgue_r_average(w, r_exp, root);
        double w_root = w.total(root);

        RatioMax rm;
        double scale_guard = 0.0;
        for (const Sampled& s : sampled_corpus(ctx, grid)) {
            PolyProjection proj = project_polynomial(s.f, root, m);
            std::vector<double> pv = projection_values(s.f, proj);
            std::vector<double> resid(std::size_t(grid->cell_count()));
            std::size_t at = 0;
            for_each_cell(*grid, grid->cells(root),
                          [&](std::int64_t i) { resid[std::size_t(i)] = s.f[i] - pv[at++]; });
            GridFunction rf(grid, std::move(resid));
            GridFunction md = dyadic_maximal(rf, root);
            GridFunction sharp = sharp_maximal(s.f, m, dyadic_descendants(*grid, root, sharp_depth));
            double top = 0.0;
            for (std::int64_t i = 0; i < md.size(); ++i) top = std::max(top, md[i]);
            scale_guard = std::max(scale_guard, top);
            for (double p : ps) {
                KahanSum acc;
                bool degenerate = false;
                for_each_cell(*grid, grid->cells(root), [&](std::int64_t i) {
                    if (sharp[i] <= 1e-13 * top) {
                        if (md[i] > 1e-10 * top) degenerate = true;
                        return;
                    }
                    acc.add(std::pow(md[i] / sharp[i], p) * w.density()[i]);
                });
                if (degenerate) throw Error("J1: sharp maximal vanishes where the dyadic maximal does not");
                double integral = acc.value() * grid->cell_volume();
                double lhs_general = std::pow(integral / wr, 1.0 / p);
                double rprime = r_exp / (r_exp - 1.0);
                rm.update(lhs_general, p * rprime);
                double lhs_ainf = std::pow(integral / w_root, 1.0 / p);
                rm.update(lhs_ainf, p * fw);
            }
        }
        return DimensionalOut{rm.ratio, rm.lhs, rm.structural, true, {}};
    });
}

// J2: good-lambda exponential decay, fitted as log w(level set)/w(R)
// against 1/gamma on the corpus envelope.
CheckReport check_j2(const Ctx& ctx) {
    GridPtr grid = ctx_grid(ctx, 1);
    Weight w = Weight::from_expr(Expr::parse(ctx.str("w"), grid->dim()), grid);
    Rect root = grid_root(grid);
    double w_root = w.total(root);
    std::vector<double> gammas = ctx.nums("gammas");
    double lambda_factor = ctx.num("lambda_factor");
    int m = ctx.geti("m");
    int sharp_depth = ctx.geti("depth");

    std::vector<Sampled> corpus = sampled_corpus(ctx, grid);
    {
        // a lacunary series exercises many scales at once
        Expr rough = Expr::parse(
            "sin(2*pi*x1)*cos(2*pi*x2)+0.7*sin(4*pi*x1+0.3)*cos(4*pi*x2)+0.5*sin(8*pi*x1+1.1)"
            "*cos(8*pi*x2)+0.35*sin(16*pi*x1+2.3)*cos(16*pi*x2)+0.25*sin(32*pi*x1+0.9)*cos(32*pi*x2)",
            2);
        corpus.push_back({"lacunary", rough, rough.sample(grid)});
    }

    // envelope over the corpus and over a grid of levels lambda (quantiles
    // of the dyadic maximal function); the statement is uniform in both
    std::vector<double> env(gammas.size(), 0.0);
    std::vector<double> quantiles = {0.3, 0.5, 0.75, 0.9, 0.97, 0.995};
    for (const Sampled& s : corpus) {
        PolyProjection proj = project_polynomial(s.f, root, m);
        std::vector<double> pv = projection_values(s.f, proj);
        std::vector<double> resid(std::size_t(grid->cell_count()));
        std::size_t at = 0;
        for_each_cell(*grid, grid->cells(root),
                      [&](std::int64_t i) { resid[std::size_t(i)] = s.f[i] - pv[at++]; });
        GridFunction rf(grid, std::move(resid));
        GridFunction md = dyadic_maximal(rf, root);
        GridFunction sharp = sharp_maximal(s.f, m, dyadic_descendants(*grid, root, sharp_depth));
        std::vector<double> sorted_md(md.values());
        std::sort(sorted_md.begin(), sorted_md.end());
        for (double quant : quantiles) {
            double lambda =
                lambda_factor * sorted_md[std::size_t(quant * double(sorted_md.size() - 1))];
            if (lambda <= 0.0) continue;
            for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
                double gamma = gammas[gi];
                KahanSum mass;
                for_each_cell(*grid, grid->cells(root), [&](std::int64_t i) {
                    if (md[i] > lambda && sharp[i] <= gamma * lambda) mass.add(w.density()[i]);
                });
                env[gi] = std::max(env[gi], mass.value() * grid->cell_volume() / w_root);
            }
        }
    }

    std::vector<double> xs, ys;
    for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
        if (env[gi] > 0.0 && env[gi] < 1.0) {
            xs.push_back(1.0 / gammas[gi]);
            ys.push_back(std::log(env[gi]));
        }
    }
    FitResult fit = linear_fit(xs, ys);

    CheckReport rep;
    rep.id = "J2";
    rep.params = ctx.params;
    rep.seed = ctx.seed;
    rep.lhs = fit.r_squared;
    rep.rhs = 0.9;
    rep.ratio = fit.r_squared / 0.9;
    rep.empirical = fit.slope;
    rep.structural = 1.0;
    rep.pass = fit.points >= 4 && fit.slope < 0.0 && fit.r_squared >= 0.9;
    rep.note = "slope=" + format_double(fit.slope) + " r2=" + format_double(fit.r_squared) +
               " points=" + std::to_string(fit.points);
    for (std::size_t gi = 0; gi < gammas.size(); ++gi)
        rep.trace.push_back({int(std::lround(1000.0 * gammas[gi])), env[gi]});
    return rep;
}

// D1: the L^delta starting point self-improves to L^1 with the explicit
// constant chain from the stopping-time proof.
CheckReport check_d1(const Ctx& ctx) {
    double delta = ctx.num("delta");
    int depth = ctx.geti("depth");
    int fam_count = ctx.geti("families");
    return dimensional_report(ctx, "D1", [&](int scale) {
        GridPtr grid = ctx_grid(ctx, scale);
        Rect root = grid_root(grid);
        int n = grid->dim();
        double s = double(n);  // measure functional with delta' = 1 sits in SD^{n}
        RatioMax rm;
        double worst_anorm = 0.0;
        for (const Sampled& smp : sampled_corpus(ctx, grid)) {
            auto mu = std::make_shared<GridFunction>(derivative_field(smp.expr, grid, -1, 1));
            MeasureFunctional meas;
            meas.delta = 1.0;
            meas.p = 1.0;
            meas.mu = mu;
            Functional a(meas);

            FamilySamplerOptions fopts;
            fopts.max_depth = depth;
            auto fams = sample_disjoint_families(*grid, root, fam_count, fopts, ctx.seed);
            ConditionVerdict cv =
                condition_ratio(a, smp.f, 1.0, nullptr, root, fams, s, 1.0, 1e-10);
            worst_anorm = std::max(worst_anorm, cv.max_ratio);

            std::vector<Rect> pool = dyadic_descendants(*grid, root, depth);
            double x_delta = 0.0, x_one_raw = 0.0;
            for (const Rect& r : pool) {
                double ar = eval_functional(a, smp.f, r);
                if (ar <= 0.0) continue;
                double od = oscillation(smp.f, r, 1.0, nullptr, CenterRule::OptimalDelta(delta));
                x_delta = std::max(x_delta, od / ar);
                // median minimizes the L^1 oscillation
                const Grid& gr = *grid;
                std::vector<std::pair<double, double>> vals;
                for_each_cell(gr, gr.cells(r), [&](std::int64_t i) {
                    vals.push_back({smp.f[i], gr.cell_volume()});
                });
                std::sort(vals.begin(), vals.end());
                double half = 0.5 * double(vals.size()) * gr.cell_volume();
                double cum = 0.0, med = vals.back().first;
                for (const auto& v : vals) {
                    cum += v.second;
                    if (cum >= half) {
                        med = v.first;
                        break;
                    }
                }
                KahanSum l1;
                for (const auto& v : vals) l1.add(std::abs(v.first - med));
                x_one_raw = std::max(x_one_raw, l1.value() / double(vals.size()) / ar);
            }
            if (x_delta <= 0.0) continue;
            double x_one = x_one_raw / x_delta;  // normalize so the hypothesis is tight
            double anorm = std::max(cv.max_ratio, 1e-12);
            double bound = (1.0 + s) * std::pow(2.0, (n + 2.0 - delta) / delta) * M_E *
                           std::max(std::pow(2.0, s / delta) * std::pow(anorm, s), 1.0);
            rm.update(x_one, bound);
        }
        bool sd_ok = worst_anorm <= 1.0 + 1e-10;
        return DimensionalOut{rm.ratio, rm.lhs, rm.structural, sd_ok,
                              "X1/bound=" + format_double(rm.ratio) +
                                  (sd_ok ? "" : "; SD norm above 1")};
    });
}

}  // namespace

void register_pf(std::vector<Entry>& out) {
    out.push_back({{"P1",
                    "avg_R |f-f_R| <= (1/2) d(R) avg_R |grad f| on rectangles, constant 1/2 "
                    "explicit, slack shrinking with resolution",
                    true,
                    json{{"res", 512}, {"res2d", 128}, {"constant", 0.5}, {"tol", 0.02},
                         {"depth", 3}, {"dim", 1}, {"random_fns", 2}}},
                   check_p1});
    out.push_back({{"P2",
                    "avg_R |f-P_R f| <= C d(R)^m avg_R |grad^m f| (dimensional constant)",
                    false,
                    json{{"res", 256}, {"dim", 1}, {"orders", json::array({1, 2})}, {"depth", 3},
                         {"random_fns", 2}}},
                   check_p2});
    out.push_back({{"P3",
                    "avg_R |f-P_R f| <= C [w]_{Ap}^{1/p} d(R)^m ||grad^m f||_{Lp(w)} via Holder",
                    false,
                    json{{"res", 256}, {"dim", 1}, {"m", 1}, {"p", 2.0},
                         {"w", "1+0.8*sin(2*pi*x1)"}, {"depth", 3}, {"random_fns", 2}}},
                   check_p3});
    out.push_back({{"F1",
                    "avg_Q |f-f_Q| <= c_n l(Q)^d avg_Q int_Q |f(x)-f(y)|/|x-y|^{n+d} (rough "
                    "fractional start)",
                    false,
                    json{{"res", 512}, {"dim", 1}, {"deltas", json::array({0.3, 0.5, 0.7})},
                         {"depth", 2}, {"random_fns", 2}}},
                   check_f1});
    out.push_back({{"F2",
                    "||f-f_Q||_{weak p*} <= c_n p* [f]_{W^{d,p}(Q)} with 1/p - 1/p* = d/n",
                    false,
                    json{{"res", 512}, {"dim", 1}, {"delta", 0.5}, {"p", 1.0}, {"depth", 2},
                         {"random_fns", 2}}},
                   check_f2});
    out.push_back({{"F3",
                    "osc/( (1-d) [f]_{W^{d,1}} ) equals (2-d)/8 for f(x)=x, the "
                    "Bourgain-Brezis-Mironescu gain neither saturates nor blows up",
                    true,
                    json{{"res", 2048}, {"dim", 1},
                         {"deltas", json::array({0.5, 0.9, 0.99, 0.999})}, {"tol", 0.01}}},
                   check_f3});
    out.push_back({{"F4",
                    "||f-f_Q||_{Lp*(w)} <= C (1-d)^{1/p} [w]_{A1}^{1/p} a(Q), weighted "
                    "fractional exponent p*",
                    false,
                    json{{"res", 512}, {"dim", 1}, {"lo", json::array({-1.0})},
                         {"hi", json::array({1.0})}, {"delta", 0.6}, {"p", 1.0},
                         {"w", "abs(x1)^(-0.3)"}, {"depth", 3}, {"random_fns", 2}}},
                   check_f4});
    out.push_back({{"F5",
                    "l^d avg int kernel <= c_n/(d(1-d)) l avg |grad f|, with the Riesz "
                    "rearrangement bound",
                    false,
                    json{{"res", 512}, {"dim", 1}, {"deltas", json::array({0.25, 0.5, 0.75})},
                         {"depth", 2}, {"random_fns", 2}}},
                   check_f5});
    out.push_back({{"W1",
                    "avg w^{1+eps} <= 2 (avg w)^{1+eps} at eps = 1/(2^{n+1}[w]_Ainf - 1), "
                    "power-weight catalog, dyadic depth 6",
                    true,
                    json{{"res", 512}, {"res2d", 64}, {"dim", 1}, {"depth", 6}}},
                   check_w1});
    out.push_back({{"J1",
                    "(1/w_r(R)) int (M^d(f-P_Rf)/M_m# f)^p w <= (c p r')^p and the A_infty "
                    "variant <= (c p [w]_Ainf)^p",
                    false,
                    json{{"res", 64}, {"dim", 2}, {"m", 0}, {"r", 2.0},
                         {"p_values", json::array({1.0, 2.0})},
                         {"w", "(abs(x1)^(-0.2))*(abs(x2)^(-0.2))"},
                         {"lo", json::array({-1.0, -1.0})}, {"hi", json::array({1.0, 1.0})},
                         {"depth", 4}, {"random_fns", 2}}},
                   check_j1});
    out.push_back({{"J2",
                    "good-lambda: w{M^d > l, M# <= g l} decays exponentially in 1/g "
                    "(log-linear fit, quality >= 0.9)",
                    true,
                    json{{"res", 64}, {"dim", 2}, {"m", 0}, {"lambda_factor", 1.0},
                         {"gammas",
                          json::array({0.33, 0.38, 0.44, 0.5, 0.58, 0.67, 0.77, 0.88, 1.0})},
                         {"w", "(abs(x1)^(-0.2))*(abs(x2)^(-0.2))"},
                         {"lo", json::array({-1.0, -1.0})}, {"hi", json::array({1.0, 1.0})},
                         {"depth", 4}, {"random_fns", 2}}},
                   check_j2});
    out.push_back({{"D1",
                    "inf_c (avg |f-c|^d)^{1/d} <= a(R) self-improves to inf_c avg |f-c| <= C "
                    "a(R) with the stopping-time constant",
                    false,
                    json{{"res", 256}, {"dim", 1}, {"delta", 0.5}, {"depth", 4},
                         {"families", 60}, {"random_fns", 2}}},
                   check_d1});
}

}  // namespace psv::checks
