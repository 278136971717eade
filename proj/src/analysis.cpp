#include "psv/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "psv/weights.hpp"

namespace psv {

namespace {

std::vector<std::array<int, kMaxDim>> multi_indices(int dim, int max_degree) {
    std::vector<std::array<int, kMaxDim>> out;
    std::array<int, kMaxDim> alpha{};
    for (;;) {
        int total = 0;
        for (int a = 0; a < dim; ++a) total += alpha[a];
        if (total <= max_degree) out.push_back(alpha);
        int a = 0;
        for (; a < dim; ++a) {
            if (++alpha[a] <= max_degree) break;
            alpha[a] = 0;
        }
        if (a == dim) break;
    }
    std::sort(out.begin(), out.end(), [dim](const auto& x, const auto& y) {
        int sx = 0, sy = 0;
        for (int a = 0; a < dim; ++a) { sx += x[a]; sy += y[a]; }
        if (sx != sy) return sx < sy;
        return x < y;
    });
    return out;
}

double mono_eval(const std::array<int, kMaxDim>& alpha, const double* t, int dim) {
    double v = 1.0;
    for (int a = 0; a < dim; ++a)
        for (int k = 0; k < alpha[a]; ++k) v *= t[a];
    return v;
}

}  // namespace

double PolyProjection::eval(const double* x) const {
    int n = rect.dim();
    double t[kMaxDim];
    for (int a = 0; a < n; ++a) t[a] = (x[a] - center[a]) / scale[a];
    double v = 0.0;
    for (std::size_t k = 0; k < exponents.size(); ++k) v += mono_coef[k] * mono_eval(exponents[k], t, n);
    return v;
}

std::array<double, kMaxDim> PolyProjection::gradient(const double* x) const {
    int n = rect.dim();
    double t[kMaxDim];
    for (int a = 0; a < n; ++a) t[a] = (x[a] - center[a]) / scale[a];
    std::array<double, kMaxDim> g{};
    for (std::size_t k = 0; k < exponents.size(); ++k) {
        for (int a = 0; a < n; ++a) {
            if (exponents[k][a] == 0) continue;
            auto alpha = exponents[k];
            alpha[a] -= 1;
            g[a] += mono_coef[k] * double(exponents[k][a]) * mono_eval(alpha, t, n) / scale[a];
        }
    }
    return g;
}

PolyProjection project_polynomial(const GridFunction& f, const Rect& r, int m) {
    if (m < 0 || m > 3) throw Error("projection: degree must be between 0 and 3");
    const Grid& grid = f.grid();
    CellRange range = grid.cells(r);
    int n = r.dim();

    PolyProjection proj;
    proj.rect = r;
    proj.degree = m;
    proj.exponents = multi_indices(n, m);
    std::size_t D = proj.exponents.size();
    if (std::int64_t(D) > range.count())
        throw Error("projection: too few cells in rectangle for degree " + std::to_string(m));

    for (int a = 0; a < n; ++a) {
        proj.center[a] = 0.5 * (r.lo(a) + r.hi(a));
        proj.scale[a] = 0.5 * r.side(a);
    }

    // Gram matrix and moment vector of scaled monomials under avg_R.
    std::vector<KahanSum> gram(D * D), rhs(D);
    std::vector<double> psi(D);
    double x[kMaxDim], t[kMaxDim];
    std::int64_t cells = 0;
    for_each_cell(grid, range, [&](std::int64_t i) {
        grid.cell_center(i, x);
        for (int a = 0; a < n; ++a) t[a] = (x[a] - proj.center[a]) / proj.scale[a];
        for (std::size_t k = 0; k < D; ++k) psi[k] = mono_eval(proj.exponents[k], t, n);
        for (std::size_t k = 0; k < D; ++k) {
            for (std::size_t l = 0; l <= k; ++l) gram[k * D + l].add(psi[k] * psi[l]);
            rhs[k].add(f[i] * psi[k]);
        }
        ++cells;
    });

    std::vector<double> G(D * D), b(D);
    for (std::size_t k = 0; k < D; ++k) {
        for (std::size_t l = 0; l <= k; ++l) {
            double v = gram[k * D + l].value() / double(cells);
            G[k * D + l] = v;
            G[l * D + k] = v;
        }
        b[k] = rhs[k].value() / double(cells);
    }

    // Cholesky G = L L^T; scaled monomials at degree <= 3 keep this benign.
    std::vector<double> L(D * D, 0.0);
    for (std::size_t k = 0; k < D; ++k) {
        for (std::size_t l = 0; l <= k; ++l) {
            double s = G[k * D + l];
            for (std::size_t j = 0; j < l; ++j) s -= L[k * D + j] * L[l * D + j];
            if (l == k) {
                if (s <= 0.0) throw Error("projection: degenerate Gram matrix");
                L[k * D + k] = std::sqrt(s);
            } else {
                L[k * D + l] = s / L[l * D + l];
            }
        }
    }

    // Orthonormal-basis coefficients: L y = b. Monomial form: L^T d = y.
    std::vector<double> y(D), d(D);
    for (std::size_t k = 0; k < D; ++k) {
        double s = b[k];
        for (std::size_t j = 0; j < k; ++j) s -= L[k * D + j] * y[j];
        y[k] = s / L[k * D + k];
    }
    for (std::size_t k = D; k-- > 0;) {
        double s = y[k];
        for (std::size_t j = k + 1; j < D; ++j) s -= L[j * D + k] * d[j];
        d[k] = s / L[k * D + k];
    }
    proj.mono_coef = std::move(d);

    // Orthonormality defect, measured directly: avg over cells of
    // phi phi^T with phi = L^{-1} psi must be the identity.
    std::vector<KahanSum> ortho(D * D);
    std::vector<double> phi(D);
    for_each_cell(grid, range, [&](std::int64_t i) {
        grid.cell_center(i, x);
        for (int a = 0; a < n; ++a) t[a] = (x[a] - proj.center[a]) / proj.scale[a];
        for (std::size_t k = 0; k < D; ++k) psi[k] = mono_eval(proj.exponents[k], t, n);
        for (std::size_t k = 0; k < D; ++k) {
            double s = psi[k];
            for (std::size_t j = 0; j < k; ++j) s -= L[k * D + j] * phi[j];
            phi[k] = s / L[k * D + k];
        }
        for (std::size_t k = 0; k < D; ++k)
            for (std::size_t l = 0; l <= k; ++l) ortho[k * D + l].add(phi[k] * phi[l]);
    });
    double resid = 0.0;
    for (std::size_t k = 0; k < D; ++k)
        for (std::size_t l = 0; l <= k; ++l) {
            double v = ortho[k * D + l].value() / double(cells);
            resid = std::max(resid, std::abs(v - (k == l ? 1.0 : 0.0)));
        }
    proj.gram_residual = resid;
    return proj;
}

std::vector<double> projection_values(const GridFunction& f, const PolyProjection& p) {
    const Grid& grid = f.grid();
    CellRange range = grid.cells(p.rect);
    std::vector<double> out;
    out.reserve(std::size_t(range.count()));
    double x[kMaxDim];
    for_each_cell(grid, range, [&](std::int64_t i) {
        grid.cell_center(i, x);
        out.push_back(p.eval(x));
    });
    return out;
}

double projection_l1_residual(const GridFunction& f, const Rect& r, const PolyProjection& p) {
    const Grid& grid = f.grid();
    CellRange range = grid.cells(r);
    KahanSum acc;
    double x[kMaxDim];
    for_each_cell(grid, range, [&](std::int64_t i) {
        grid.cell_center(i, x);
        acc.add(std::abs(f[i] - p.eval(x)));
    });
    return acc.value() / double(range.count());
}

namespace {

struct OscData {
    std::vector<double> values;
    std::vector<double> mass;  // w * cellvol per cell
    double total = 0.0;
};

OscData gather(const GridFunction& f, const Rect& r, const Weight* w) {
    const Grid& grid = f.grid();
    CellRange range = grid.cells(r);
    OscData d;
    d.values.reserve(std::size_t(range.count()));
    d.mass.reserve(std::size_t(range.count()));
    KahanSum tot;
    for_each_cell(grid, range, [&](std::int64_t i) {
        d.values.push_back(f[i]);
        double m = grid.cell_volume() * (w ? w->density()[i] : 1.0);
        d.mass.push_back(m);
        tot.add(m);
    });
    d.total = tot.value();
    return d;
}

double power_mean(const OscData& d, double c, double q) {
    KahanSum acc;
    for (std::size_t i = 0; i < d.values.size(); ++i)
        acc.add(std::pow(std::abs(d.values[i] - c), q) * d.mass[i]);
    return std::pow(acc.value() / d.total, 1.0 / q);
}

// 256 value-quantile probes, then golden-section refinement in the winning
// bracket; the objective is continuous but not convex below delta = 1 and
// its minimizer lies between min f and max f.
double optimal_center(const OscData& d, double delta) {
    std::vector<double> sorted = d.values;
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> probes;
    const int kProbes = 256;
    for (int k = 0; k < kProbes; ++k) {
        std::size_t at = std::size_t((double(k) + 0.5) / kProbes * double(sorted.size()));
        at = std::min(at, sorted.size() - 1);
        probes.push_back(sorted[at]);
    }
    probes.erase(std::unique(probes.begin(), probes.end()), probes.end());

    auto obj = [&](double c) {
        KahanSum acc;
        for (std::size_t i = 0; i < d.values.size(); ++i)
            acc.add(std::pow(std::abs(d.values[i] - c), delta) * d.mass[i]);
        return acc.value();
    };

    std::size_t best = 0;
    double best_val = obj(probes[0]);
    for (std::size_t k = 1; k < probes.size(); ++k) {
        double v = obj(probes[k]);
        if (v < best_val) { best_val = v; best = k; }
    }
    double lo = probes[best == 0 ? 0 : best - 1];
    double hi = probes[std::min(best + 1, probes.size() - 1)];
    if (hi <= lo) return probes[best];

    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double c1 = b - phi * (b - a), c2 = a + phi * (b - a);
    double f1 = obj(c1), f2 = obj(c2);
    for (int it = 0; it < 80 && (b - a) > 1e-12 * std::max(1.0, std::abs(b)); ++it) {
        if (f1 < f2) {
            b = c2; c2 = c1; f2 = f1;
            c1 = b - phi * (b - a); f1 = obj(c1);
        } else {
            a = c1; c1 = c2; f1 = f2;
            c2 = a + phi * (b - a); f2 = obj(c2);
        }
    }
    double mid = 0.5 * (a + b);
    return obj(mid) < best_val ? mid : probes[best];
}

}  // namespace

double oscillation(const GridFunction& f, const Rect& r, double q, const Weight* w, CenterRule rule) {
    if (rule.kind != CenterRule::optimal_delta && q <= 0.0) throw Error("oscillation: q must be positive");
    OscData d = gather(f, r, w);
    if (d.values.empty()) throw Error("oscillation: empty rectangle");
    switch (rule.kind) {
        case CenterRule::mean: {
            KahanSum acc;
            for (std::size_t i = 0; i < d.values.size(); ++i) acc.add(d.values[i] * d.mass[i]);
            return power_mean(d, acc.value() / d.total, q);
        }
        case CenterRule::poly: {
            PolyProjection p = project_polynomial(f, r, rule.degree);
            const Grid& grid = f.grid();
            CellRange range = grid.cells(r);
            KahanSum acc;
            double x[kMaxDim];
            std::size_t at = 0;
            for_each_cell(grid, range, [&](std::int64_t i) {
                grid.cell_center(i, x);
                acc.add(std::pow(std::abs(f[i] - p.eval(x)), q) * d.mass[at++]);
            });
            return std::pow(acc.value() / d.total, 1.0 / q);
        }
        case CenterRule::optimal_delta: {
            double delta = rule.delta;
            if (!(delta > 0.0 && delta < 1.0)) throw Error("oscillation: delta must lie in (0,1)");
            double c = optimal_center(d, delta);
            return power_mean(d, c, delta);
        }
    }
    throw Error("oscillation: unknown center rule");
}

double weak_norm_values(const std::vector<double>& absval, const std::vector<double>& mass, double p) {
    if (absval.empty()) return 0.0;
    std::vector<std::size_t> order(absval.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return absval[a] > absval[b]; });
    KahanSum total;
    for (double m : mass) total.add(m);
    double tot = total.value();

    double best = 0.0;
    KahanSum cum;
    std::size_t i = 0;
    while (i < order.size()) {
        double v = absval[order[i]];
        while (i < order.size() && absval[order[i]] == v) {
            cum.add(mass[order[i]]);
            ++i;
        }
        if (v > 0.0) best = std::max(best, v * std::pow(cum.value() / tot, 1.0 / p));
    }
    return best;
}

double weak_norm(const GridFunction& f, const Rect& r, double p, const Weight* w) {
    if (p <= 0.0) throw Error("weak norm: p must be positive");
    OscData d = gather(f, r, w);
    for (double& v : d.values) v = std::abs(v);
    return weak_norm_values(d.values, d.mass, p);
}

std::vector<Rect> dyadic_descendants(const Grid& grid, const Rect& root, int depth) {
    if (!grid.aligned(root)) throw Error("dyadic_descendants: root not aligned");
    depth = std::min(depth, grid.max_depth() - root.level);
    std::vector<Rect> out{root};
    std::size_t begin = 0;
    for (int d = 0; d < depth; ++d) {
        std::size_t end = out.size();
        for (std::size_t i = begin; i < end; ++i)
            for (const Rect& c : out[i].children()) out.push_back(c);
        begin = end;
    }
    return out;
}

GridFunction dyadic_maximal(const GridFunction& g, const Rect& r) {
    DyadicSumTree tree(g, r, /*absolute_value=*/true);
    const Grid& grid = g.grid();
    std::vector<double> vals(std::size_t(grid.cell_count()), 0.0);
    int n = r.dim();
    for (int rel = 0; rel + r.level <= tree.deepest_level(); ++rel) {
        std::int64_t per = std::int64_t(1) << rel;
        std::array<std::int64_t, kMaxDim> idx{};
        for (;;) {
            Rect node = r;
            node.level = r.level + rel;
            for (int a = 0; a < n; ++a) node.index[a] = (r.index[a] << rel) + idx[a];
            double avg = tree.average(node);
            for_each_cell(grid, grid.cells(node), [&](std::int64_t i) {
                if (avg > vals[std::size_t(i)]) vals[std::size_t(i)] = avg;
            });
            int a = 0;
            for (; a < n; ++a) {
                if (++idx[a] < per) break;
                idx[a] = 0;
            }
            if (a == n) break;
        }
    }
    return GridFunction(g.grid_ptr(), std::move(vals), true);
}

GridFunction sharp_maximal(const GridFunction& f, int m, const std::vector<Rect>& pool) {
    if (pool.empty()) throw Error("sharp maximal: empty pool");
    const Grid& grid = f.grid();
    std::vector<double> vals(std::size_t(grid.cell_count()), -1.0);
    for (const Rect& r : pool) {
        PolyProjection p = project_polynomial(f, r, m);
        double resid = projection_l1_residual(f, r, p);
        for_each_cell(grid, grid.cells(r), [&](std::int64_t i) {
            if (resid > vals[std::size_t(i)]) vals[std::size_t(i)] = resid;
        });
    }
    for (double& v : vals) v = std::max(v, 0.0);
    return GridFunction(f.grid_ptr(), std::move(vals), true);
}

namespace {

void cz_recurse(const DyadicSumTree& tree, const Rect& node, int deepest, double L,
                std::vector<Rect>& out, std::vector<double>& avgs) {
    if (node.level >= deepest) return;
    for (const Rect& c : node.children()) {
        double a = tree.average(c);
        if (a > L) {
            out.push_back(c);
            avgs.push_back(a);
        } else {
            cz_recurse(tree, c, deepest, L, out, avgs);
        }
    }
}

}  // namespace

CzResult cz_decompose(const DyadicSumTree& tree, double L) {
    if (L <= 0.0) throw Error("cz: level must be positive");
    const Rect& root = tree.root();
    double root_avg = tree.average(root);
    std::vector<Rect> selected;
    std::vector<double> avgs;
    bool exceeded = root_avg > L;
    if (exceeded) {
        selected.push_back(root);
        avgs.push_back(root_avg);
    } else {
        cz_recurse(tree, root, tree.deepest_level(), L, selected, avgs);
    }
    return CzResult{DisjointFamily::make(root, std::move(selected)), exceeded, std::move(avgs)};
}

CzResult cz_decompose(const GridFunction& g, const Rect& r, double L) {
    for (std::int64_t i = 0; i < g.size(); ++i)
        if (g[i] < 0.0) throw Error("cz: function must be nonnegative");
    DyadicSumTree tree(g, r, false);
    return cz_decompose(tree, L);
}

GridFunction truncate(const GridFunction& g, TruncationMode mode) {
    if (mode.kind == TruncationMode::level) {
        for (std::int64_t i = 0; i < g.size(); ++i)
            if (g[i] < 0.0) throw Error("truncate: level mode requires a nonnegative function");
        double h = std::ldexp(1.0, mode.k);
        return g.map([h](double v) { return std::clamp(v - h, 0.0, h); }, true);
    }
    double m = mode.m;
    return g.map([m](double v) { return std::min(std::abs(v), m); }, true);
}

}  // namespace psv
