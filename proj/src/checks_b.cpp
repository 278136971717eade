// Cube-product (biparameter and multifold) checks.

#include <algorithm>
#include <cmath>

#include "check_impl.hpp"

namespace psv::checks {

namespace {

std::shared_ptr<Weight> b_weight(const Ctx& ctx, const GridPtr& grid) {
    return std::make_shared<Weight>(
        Weight::from_expr(Expr::parse(ctx.str("w"), grid->dim()), grid));
}

// B1: avg_R |f - f_R| <= c (l_1 avg |grad_1 f| + l_2 avg |grad_2 f|), with a
// second route through the fractional halves at delta = 1/2 and the
// one-parameter gradient domination; the routes must agree within factor 4.
CheckReport check_b1(const Ctx& ctx) {
    int depth = ctx.geti("depth");
    return dimensional_report(ctx, "B1", [&](int scale) {
        GridPtr grid = ctx_grid(ctx, scale);
        const Box& box = grid->box();
        Rect root = grid_root(grid);
        std::vector<Rect> pool = dyadic_descendants(*grid, root, depth);

        RatioMax direct, via_frac, frac_vs_grad;
        for (const Sampled& s : sampled_corpus(ctx, grid)) {
            std::vector<GridFunction> slopes = gradient_fields(s.expr, grid);
            KernelOptions opts = ctx.kernel_options();
            opts.slopes = &slopes;
            std::vector<GridFunction> block_grads;
            for (int b = 0; b < box.nblocks; ++b)
                block_grads.push_back(derivative_field(s.expr, grid, b, 1));
            for (const Rect& r : pool) {
                double osc = oscillation(s.f, r, 1.0, nullptr, CenterRule::Mean());
                double den_grad = 0.0;
                double den_frac = 0.0;
                for (int b = 0; b < box.nblocks; ++b) {
                    int ax = box.block_begin(b);
                    double lb = r.side(ax);
                    double grad_term = lb * average(block_grads[std::size_t(b)], r);
                    den_grad += grad_term;
                    BlockFractional bf;
                    bf.block = b;
                    bf.delta = 0.5;
                    bf.p = 1.0;
                    bf.kernel = opts;
                    double frac_term = eval_functional(Functional(bf), s.f, r);
                    den_frac += frac_term;
                    // one-parameter domination per block at delta = 1/2
                    frac_vs_grad.update(frac_term * 0.25, grad_term);
                }
                direct.update(osc, den_grad);
                via_frac.update(osc, den_frac);
            }
        }
        double c1 = direct.ratio;
        double c2 = 4.0 * via_frac.ratio * (frac_vs_grad.ratio / 0.25) * 0.25;
        // c2 = via_frac * frac_vs_grad / (delta (1-delta)) with delta = 1/2
        bool ok = c1 <= c2 * (1.0 + 1e-9) && c2 <= 4.0 * c1 * (1.0 + 0.02);
        std::string note = "direct=" + format_double(c1) + " via_fractional=" + format_double(c2);
        return DimensionalOut{c1, direct.lhs, direct.structural, ok, note};
    });
}

// B2: the biparameter fractional (1,1) starting point.
CheckReport check_b2(const Ctx& ctx) {
    int depth = ctx.geti("depth");
    double d1 = ctx.num("delta1");
    double d2 = ctx.num("delta2");
    return dimensional_report(ctx, "B2", [&](int scale) {
        GridPtr grid = ctx_grid(ctx, scale);
        Rect root = grid_root(grid);
        RatioMax rm;
        for (const Sampled& s : sampled_corpus(ctx, grid)) {
            std::vector<GridFunction> slopes = gradient_fields(s.expr, grid);
            KernelOptions opts = ctx.kernel_options();
            opts.slopes = &slopes;
            for (const Rect& r : dyadic_descendants(*grid, root, depth)) {
                double osc = oscillation(s.f, r, 1.0, nullptr, CenterRule::Mean());
                double den = 0.0;
                for (int b = 0; b < 2; ++b) {
                    BlockFractional bf;
                    bf.block = b;
                    bf.delta = b == 0 ? d1 : d2;
                    bf.p = 1.0;
                    bf.kernel = opts;
                    den += eval_functional(Functional(bf), s.f, r);
                }
                rm.update(osc, den);
            }
        }
        return DimensionalOut{rm.ratio, rm.lhs, rm.structural, true, {}};
    });
}

// B3: biparameter gain (1-delta_i)^{1/p_i} in front of each half.
CheckReport check_b3(const Ctx& ctx) {
    int depth = ctx.geti("depth");
    double p1 = ctx.num("p1");
    double p2 = ctx.num("p2");
    std::vector<double> deltas = ctx.nums("deltas");
    return dimensional_report(ctx, "B3", [&](int scale) {
        GridPtr grid = ctx_grid(ctx, scale);
        Rect root = grid_root(grid);
        RatioMax rm;
        for (const Sampled& s : sampled_corpus(ctx, grid)) {
            std::vector<GridFunction> slopes = gradient_fields(s.expr, grid);
            KernelOptions opts = ctx.kernel_options();
            opts.slopes = &slopes;
            for (double delta : deltas) {
                for (const Rect& r : dyadic_descendants(*grid, root, depth)) {
                    double osc = oscillation(s.f, r, 1.0, nullptr, CenterRule::Mean());
                    double den = 0.0;
                    for (int b = 0; b < 2; ++b) {
                        double pb = b == 0 ? p1 : p2;
                        BlockFractional bf;
                        bf.block = b;
                        bf.delta = delta;
                        bf.p = pb;
                        bf.kernel = opts;
                        den += std::pow(1.0 - delta, 1.0 / pb) *
                               eval_functional(Functional(bf), s.f, r);
                    }
                    rm.update(osc, den);
                }
            }
        }
        return DimensionalOut{rm.ratio, rm.lhs, rm.structural, true, {}};
    });
}

// B4: the m-fold product version (three one-dimensional blocks).
CheckReport check_b4(const Ctx& ctx) {
    int depth = ctx.geti("depth");
    double delta = ctx.num("delta");
    return dimensional_report(ctx, "B4", [&](int scale) {
        GridPtr grid = ctx_grid(ctx, scale);
        const Box& box = grid->box();
        Rect root = grid_root(grid);
        RatioMax rm;
        for (const Sampled& s : sampled_corpus(ctx, grid)) {
            std::vector<GridFunction> slopes = gradient_fields(s.expr, grid);
            KernelOptions opts = ctx.kernel_options();
            opts.slopes = &slopes;
            for (const Rect& r : dyadic_descendants(*grid, root, depth)) {
                double osc = oscillation(s.f, r, 1.0, nullptr, CenterRule::Mean());
                double den = 0.0;
                for (int b = 0; b < box.nblocks; ++b) {
                    BlockFractional bf;
                    bf.block = b;
                    bf.delta = delta;
                    bf.p = 1.0;
                    bf.kernel = opts;
                    den += (1.0 - delta) * eval_functional(Functional(bf), s.f, r);
                }
                rm.update(osc, den);
            }
        }
        return DimensionalOut{rm.ratio, rm.lhs, rm.structural, true, {}};
    });
}

// B5: biparameter Poincare-Sobolev at the damped exponent; strong route for
// nontrivial weights, weak route plus truncation for flat ones.
CheckReport check_b5(const Ctx& ctx) {
    double p = ctx.num("p");
    double q = ctx.num("q");
    int depth = ctx.geti("depth");
    double frozen_awq = 0.0, frozen_apw = 0.0;
    return dimensional_report(ctx, "B5", [&](int scale) {
        GridPtr grid = ctx_grid(ctx, scale);
        const Box& box = grid->box();
        Rect root = grid_root(grid);
        auto w = b_weight(ctx, grid);
        RectPool pool = make_rect_pool(*grid, root, depth, 16, ctx.seed);
        if (scale == 1) {
            frozen_awq = muckenhoupt_over(*w, q, pool);
            frozen_apw = muckenhoupt_over(*w, p, pool);
        }
        double awq = frozen_awq;
        double apw = frozen_apw;
        int n = grid->dim();
        bool strong_route = awq >= std::exp(q);

        double pstar;
        if (strong_route) {
            pstar = 1.0 / (1.0 / p - (1.0 / n) / (q + std::log(awq)));
        } else {
            pstar = 1.0 / (1.0 / p - 1.0 / (double(n) * q));
        }
        if (pstar <= p) throw Error("B5: exponent regime violated");

        RatioMax rm;
        TruncationUpgradeResult up;
        for (const Sampled& s : sampled_corpus(ctx, grid)) {
            std::vector<GridFunction> block_grads;
            for (int b = 0; b < box.nblocks; ++b)
                block_grads.push_back(derivative_field(s.expr, grid, b, 1));
            for (const Rect& r : pool.dyadic) {
                double den = 0.0;
                for (int b = 0; b < box.nblocks; ++b) {
                    int ax = box.block_begin(b);
                    KahanSum acc;
                    for_each_cell(*grid, grid->cells(r), [&](std::int64_t i) {
                        acc.add(std::pow(block_grads[std::size_t(b)][i], p) * w->density()[i]);
                    });
                    double norm =
                        std::pow(acc.value() * grid->cell_volume() / w->total(r), 1.0 / p);
                    den += r.side(ax) * norm;
                }
                den *= std::pow(apw, 1.0 / p);
                if (strong_route) {
                    double lhs = strong_norm(s.f, r, pstar, w.get(), 0);
                    rm.update(lhs, den);
                } else {
                    double lhs = weak_osc_norm(s.f, r, pstar, w.get(), 0);
                    rm.update(lhs, den);
                    truncation_upgrade_instance(s.f, r, p, pstar, w.get(),
                                                r.diameter() * std::pow(apw, 1.0 / p), up);
                }
            }
        }
        bool ok = true;
        std::string note = std::string(strong_route ? "strong" : "weak+truncation") +
                           " route, p*=" + format_double(pstar) + " [w]_q=" + format_double(awq);
        if (!strong_route) {
            ok = up.chain_ok && up.c_upgraded <= 4.0 * up.c_direct * (1.0 + 0.02);
            note += " direct=" + format_double(up.c_direct) +
                    " upgraded=" + format_double(up.c_upgraded);
        }
        return DimensionalOut{rm.ratio, rm.lhs, rm.structural, ok, note};
    });
}

// B6: the weighted biparameter fractional bound with the (1-delta)^{1/p}
// gain; weight evaluated at the outer integration point in both halves.
CheckReport check_b6(const Ctx& ctx) {
    double p = ctx.num("p");
    double delta = ctx.num("delta");
    int depth = ctx.geti("depth");
    double frozen_a1 = 0.0;
    return dimensional_report(ctx, "B6", [&](int scale) {
        GridPtr grid = ctx_grid(ctx, scale);
        Rect root = grid_root(grid);
        auto w = b_weight(ctx, grid);
        RectPool pool = make_rect_pool(*grid, root, depth, 16, ctx.seed);
        if (scale == 1) frozen_a1 = muckenhoupt_over(*w, 1.0, pool);
        double a1 = frozen_a1;
        ExponentParams ep;
        ep.p = p;
        ep.n = grid->dim();
        ep.delta = delta;
        ep.weight_constant = a1;
        double pstar = sobolev_exponent(ExponentKind::a1_fractional, ep);

        RatioMax rm;
        for (const Sampled& s : sampled_corpus(ctx, grid)) {
            std::vector<GridFunction> slopes = gradient_fields(s.expr, grid);
            KernelOptions opts = ctx.kernel_options();
            opts.slopes = &slopes;
            for (const Rect& r : pool.dyadic) {
                double lhs = strong_norm(s.f, r, pstar, w.get(), 0);
                double den = 0.0;
                for (int b = 0; b < 2; ++b) {
                    BlockFractional bf;
                    bf.block = b;
                    bf.delta = delta;
                    bf.p = p;
                    bf.weighted = true;
                    bf.w = w;
                    bf.kernel = opts;
                    den += eval_functional(Functional(bf), s.f, r);
                }
                den *= std::pow(a1, 1.0 / p) * std::pow(1.0 - delta, 1.0 / p);
                rm.update(lhs, den);
            }
        }
        return DimensionalOut{rm.ratio, rm.lhs, rm.structural, true,
                              "p*=" + format_double(pstar) + " [w]_A1=" + format_double(a1)};
    });
}

}  // namespace

void register_b(std::vector<Entry>& out) {
    json biparam_domain{{"res", 32},
                        {"dim", 2},
                        {"blocks", json::array({1, 1})},
                        {"depth", 2},
                        {"random_fns", 2}};
    {
        json d = biparam_domain;
        out.push_back({{"B1",
                        "avg_R |f-f_R| <= c (l1 avg |grad_1 f| + l2 avg |grad_2 f|); two "
                        "derivation routes agree within factor 4",
                        false, d},
                       check_b1});
    }
    {
        json d = biparam_domain;
        d["delta1"] = 0.5;
        d["delta2"] = 0.5;
        out.push_back({{"B2",
                        "avg_R |f-f_R| <= c1 a1(R) + c2 a2(R) with one-block fractional "
                        "integrals",
                        false, d},
                       check_b2});
    }
    {
        json d = biparam_domain;
        d["p1"] = 1.0;
        d["p2"] = 1.0;
        d["deltas"] = json::array({0.5, 0.9});
        out.push_back({{"B3",
                        "biparameter gain: osc <= sum_i c_i (1-delta_i)^{1/p_i} a_i(R)",
                        false, d},
                       check_b3});
    }
    {
        json d{{"res", 16}, {"dim", 3}, {"blocks", json::array({1, 1, 1})}, {"depth", 1},
               {"delta", 0.5}, {"random_fns", 1}};
        out.push_back({{"B4",
                        "m-fold product version of the fractional (1,1) start (three blocks)",
                        false, d},
                       check_b4});
    }
    {
        json d = biparam_domain;
        d["p"] = 1.0;
        d["q"] = 1.0;
        d["w"] = "(abs(x1-0.5)^(-0.1))*(abs(x2-0.5)^(-0.1))";
        out.push_back({{"B5",
                        "biparameter Poincare-Sobolev at the damped exponent; strong route "
                        "when [w] >= e^q, weak plus truncation otherwise",
                        false, d},
                       check_b5});
    }
    {
        json d = biparam_domain;
        d["p"] = 1.0;
        d["delta"] = 0.5;
        d["w"] = "(abs(x1-0.5)^(-0.3))*(abs(x2-0.5)^(-0.3))";
        out.push_back({{"B6",
                        "weighted biparameter fractional bound with the (1-delta)^{1/p} gain "
                        "at the A_1-damped exponent",
                        false, d},
                       check_b6});
    }
}

}  // namespace psv::checks
