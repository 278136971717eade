#include "psv/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace psv {

namespace {

// Closed-form 1-D pair integral of |x-y|^{-beta} over [0,h] x [kh,(k+1)h],
// divided by h^{2-beta}. Second differences of t^{2-beta} cancel badly for
// large k, so an asymptotic series takes over.
double psi_one_dim(std::int64_t k, double beta) {
    double a = 2.0 - beta;
    if (k == 0) return 2.0 / ((1.0 - beta) * (2.0 - beta));
    if (k < 64) {
        double kk = double(k);
        double num = std::pow(kk + 1.0, a) - 2.0 * std::pow(kk, a) + std::pow(kk - 1.0, a);
        return num / ((1.0 - beta) * (2.0 - beta));
    }
    double k2 = 1.0 / (double(k) * double(k));
    double c1 = beta * (beta + 1.0) / 12.0;
    double c2 = beta * (beta + 1.0) * (beta + 2.0) * (beta + 3.0) / 360.0;
    return std::pow(double(k), -beta) * (1.0 + c1 * k2 + c2 * k2 * k2);
}

struct BoxSpec {
    int dim;
    double lo[kMaxDim];
    double hi[kMaxDim];
};

// Adaptive midpoint refinement of \int_box T2(u) |u|^{-beta} du where
// T2(u) = prod_a (h_a - |u_a - k_a h_a|) is the cell-overlap density.
struct NearIntegrator {
    int dim;
    double beta;
    const double* steps;
    const std::int64_t* offset;

    double density(const double* u) const {
        double t = 1.0;
        double r2 = 0.0;
        for (int a = 0; a < dim; ++a) {
            double d = steps[a] - std::abs(u[a] - double(offset[a]) * steps[a]);
            if (d <= 0.0) return 0.0;
            t *= d;
            r2 += u[a] * u[a];
        }
        if (r2 == 0.0) return 0.0;
        return t * std::pow(r2, -0.5 * beta);
    }

    double midpoint(const BoxSpec& b) const {
        double u[kMaxDim];
        double vol = 1.0;
        for (int a = 0; a < b.dim; ++a) {
            u[a] = 0.5 * (b.lo[a] + b.hi[a]);
            vol *= (b.hi[a] - b.lo[a]);
        }
        return density(u) * vol;
    }

    double integrate(const BoxSpec& b, double coarse, double tol, int depth) const {
        double fine = 0.0;
        int n_sub = 1 << b.dim;
        BoxSpec sub;
        sub.dim = b.dim;
        double subvals[16];
        for (int s = 0; s < n_sub; ++s) {
            for (int a = 0; a < b.dim; ++a) {
                double mid = 0.5 * (b.lo[a] + b.hi[a]);
                if ((s >> a) & 1) {
                    sub.lo[a] = mid;
                    sub.hi[a] = b.hi[a];
                } else {
                    sub.lo[a] = b.lo[a];
                    sub.hi[a] = mid;
                }
            }
            subvals[s] = midpoint(sub);
            fine += subvals[s];
        }
        if (depth >= 14 || std::abs(fine - coarse) <= tol) return fine;
        double total = 0.0;
        double child_tol = tol * 0.45;
        for (int s = 0; s < n_sub; ++s) {
            for (int a = 0; a < b.dim; ++a) {
                double mid = 0.5 * (b.lo[a] + b.hi[a]);
                if ((s >> a) & 1) {
                    sub.lo[a] = mid;
                    sub.hi[a] = b.hi[a];
                } else {
                    sub.lo[a] = b.lo[a];
                    sub.hi[a] = mid;
                }
            }
            total += integrate(sub, subvals[s], child_tol, depth + 1);
        }
        return total;
    }

    double run() const {
        BoxSpec b;
        b.dim = dim;
        for (int a = 0; a < dim; ++a) {
            b.lo[a] = (double(offset[a]) - 1.0) * steps[a];
            b.hi[a] = (double(offset[a]) + 1.0) * steps[a];
        }
        double coarse = midpoint(b);
        return integrate(b, coarse, 1e-6 * std::abs(coarse) + 1e-300, 0);
    }
};

constexpr std::int64_t kNearOffset = 8;

std::int64_t stride_of(const Grid& grid, int axis) {
    std::array<std::int64_t, kMaxDim> a{}, b{};
    b[axis] = 1;
    return grid.flat(b) - grid.flat(a);
}

std::size_t pw_table_size(const std::vector<std::int64_t>& kext) {
    std::size_t t = 1;
    for (std::int64_t e : kext) t *= std::size_t(e);
    return t;
}

}  // namespace

PairWeights::PairWeights(const std::vector<double>& steps, const std::vector<std::int64_t>& extents,
                         double beta)
    : steps_(steps), extents_(extents), beta_(beta) {
    int n = int(steps_.size());
    if (n < 1 || n > kMaxDim) throw Error("pair weights: dimension out of range");
    stride_.assign(std::size_t(n), 1);
    std::int64_t total = 1;
    for (int a = 0; a < n; ++a) {
        stride_[std::size_t(a)] = total;
        total *= extents_[std::size_t(a)];
    }
    table_.assign(std::size_t(total), 0.0);
    std::vector<std::int64_t> k(std::size_t(n), 0);
    for (std::int64_t flat = 0; flat < total; ++flat) {
        std::int64_t tmp = flat;
        for (int a = 0; a < n; ++a) {
            k[std::size_t(a)] = tmp % extents_[std::size_t(a)];
            tmp /= extents_[std::size_t(a)];
        }
        table_[std::size_t(flat)] = compute(k);
    }
}

double PairWeights::compute(const std::vector<std::int64_t>& k) const {
    int n = dim();
    bool zero = true;
    std::int64_t kmax = 0;
    for (int a = 0; a < n; ++a) {
        if (k[std::size_t(a)] != 0) zero = false;
        kmax = std::max(kmax, k[std::size_t(a)]);
    }
    if (zero) return 0.0;  // same-cell mass handled by the linear model

    if (n == 1) {
        double h = steps_[0];
        return std::pow(h, 2.0 - beta_) * psi_one_dim(k[0], beta_);
    }

    if (kmax <= kNearOffset && n == 2) {
        NearIntegrator ni{n, beta_, steps_.data(), k.data()};
        return ni.run();
    }

    // midpoint approximation: vol_u * vol_v * dist^{-beta}
    double vol = 1.0, r2 = 0.0;
    for (int a = 0; a < n; ++a) {
        vol *= steps_[std::size_t(a)] * steps_[std::size_t(a)];
        double d = double(k[std::size_t(a)]) * steps_[std::size_t(a)];
        r2 += d * d;
    }
    return vol * std::pow(r2, -0.5 * beta_);
}

double PairWeights::weight(const std::int64_t* offset) const {
    std::int64_t flat = 0;
    for (int a = 0; a < dim(); ++a) flat += std::abs(offset[a]) * stride_[std::size_t(a)];
    return table_[std::size_t(flat)];
}

namespace {

// Direction table for the 2-D same-cell mass; scale is factored out so the
// cache key is (p, delta, aspect).
struct SameCellTable2D {
    std::vector<double> values;  // J at angles phi_k in [0, pi)
    double h1 = 1.0;
    double exponent = 0.0;       // J scales like h1^exponent

    double at(double phi) const {
        double x = phi / M_PI;
        x -= std::floor(x);
        double pos = x * double(values.size());
        std::size_t i = std::size_t(pos) % values.size();
        std::size_t j = (i + 1) % values.size();
        double frac = pos - std::floor(pos);
        return values[i] * (1.0 - frac) + values[j] * frac;
    }
};

double ring_integral_2d(double beta, double p, double phi, double rho, int j) {
    // ring B_j \ B_{j+1} with B_j = [-2^-j, 2^-j] x [-rho 2^-j, rho 2^-j]
    double sx = std::ldexp(1.0, -j);
    double sy = rho * sx;
    double total = 0.0;
    const int kPts = 6;
    double gx = std::cos(phi), gy = std::sin(phi);
    for (int bx = 0; bx < 4; ++bx) {
        for (int by = 0; by < 4; ++by) {
            if ((bx == 1 || bx == 2) && (by == 1 || by == 2)) continue;  // B_{j+1}
            double x0 = -sx + 0.5 * sx * bx;
            double y0 = -sy + 0.5 * sy * by;
            double dx = 0.5 * sx / kPts, dy = 0.5 * sy / kPts;
            double acc = 0.0;
            for (int ix = 0; ix < kPts; ++ix)
                for (int iy = 0; iy < kPts; ++iy) {
                    double ux = x0 + (ix + 0.5) * dx;
                    double uy = y0 + (iy + 0.5) * dy;
                    double r2 = ux * ux + uy * uy;
                    if (r2 == 0.0) continue;
                    double t = (1.0 - std::abs(ux)) * (rho - std::abs(uy));
                    if (t <= 0.0) continue;
                    double r = std::sqrt(r2);
                    double cosang = (ux * gx + uy * gy) / r;
                    acc += t * std::pow(std::abs(cosang), p) * std::pow(r, -beta);
                }
            total += acc * dx * dy;
        }
    }
    return total;
}

SameCellTable2D build_same_cell_table(double p, double delta, double h1, double rho) {
    SameCellTable2D tab;
    tab.h1 = h1;
    double beta = 2.0 + delta * p - p;
    tab.exponent = 4.0 - beta;
    const int kAngles = 96;
    tab.values.resize(kAngles);
    for (int k = 0; k < kAngles; ++k) {
        double phi = M_PI * (double(k) / kAngles);
        double total = 0.0, prev = 0.0;
        int j = 0;
        for (; j < 48; ++j) {
            double rj = ring_integral_2d(beta, p, phi, rho, j);
            total += rj;
            if (j > 4 && rj < 1e-12 * total) break;
            prev = rj;
        }
        // geometric tail: ratio tends to 2^{beta-4+2} = 2^{-(2-beta)}
        if (prev > 0.0) {
            double ratio = std::pow(2.0, beta - 2.0);
            if (ratio < 1.0) total += prev * ratio / (1.0 - ratio);
        }
        tab.values[std::size_t(k)] = total;
    }
    return tab;
}

const SameCellTable2D& same_cell_table(double p, double delta, double rho) {
    static std::map<std::tuple<double, double, double>, SameCellTable2D> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto key = std::make_tuple(p, delta, std::round(rho * 1e9) / 1e9);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, build_same_cell_table(p, delta, 1.0, rho)).first;
    return it->second;
}

}  // namespace

double same_cell_mass(const std::vector<double>& steps, const std::vector<double>& gvec,
                      double p, double delta) {
    int n = int(steps.size());
    double beta = double(n) + delta * p - p;
    if (n == 1) {
        double h = steps[0];
        return std::pow(std::abs(gvec[0]), p) * std::pow(h, 2.0 - beta) * 2.0 /
               ((1.0 - beta) * (2.0 - beta));
    }
    if (n == 2) {
        double gnorm = std::hypot(gvec[0], gvec[1]);
        if (gnorm == 0.0) return 0.0;
        double phi = std::atan2(gvec[1], gvec[0]);
        if (phi < 0.0) phi += M_PI;
        double rho = steps[1] / steps[0];
        const SameCellTable2D& tab = same_cell_table(p, delta, rho);
        return std::pow(gnorm, p) * tab.at(phi) * std::pow(steps[0], tab.exponent);
    }
    // dimensions 3 and 4: the diagonal mass is left to the excluded-diagonal
    // midpoint rule; the refinement trace reports the resulting drift
    return 0.0;
}

std::vector<GridFunction> numeric_gradient(const GridFunction& f) {
    const Grid& grid = f.grid();
    const GridPtr& gp = f.grid_ptr();
    std::vector<GridFunction> out;
    int n = grid.dim();
    for (int a = 0; a < n; ++a) {
        std::vector<double> d(std::size_t(grid.cell_count()));
        std::array<std::int64_t, kMaxDim> idx{};
        for (std::int64_t i = 0; i < grid.cell_count(); ++i) {
            grid.unflat(i, idx);
            std::int64_t na = grid.res(a);
            double h = grid.step(a);
            std::int64_t plus = idx[a] + 1 < na ? i + stride_of(grid, a) : i;
            std::int64_t minus = idx[a] > 0 ? i - stride_of(grid, a) : i;
            double span = double(plus - minus) / double(stride_of(grid, a));
            d[std::size_t(i)] = span > 0 ? (f[plus] - f[minus]) / (span * h) : 0.0;
        }
        out.emplace_back(gp, std::move(d));
    }
    return out;
}

std::vector<double> kernel_row_sums(const GridFunction& f, const Rect& r, double delta, double p,
                                    const std::vector<int>& axes, const KernelOptions& opts) {
    if (!(delta > 0.0 && delta < 1.0)) throw Error("kernel: delta must lie in (0,1)");
    if (p < 1.0) throw Error("kernel: p must be at least 1");
    const Grid& grid = f.grid();
    CellRange range = grid.cells(r);
    int n = grid.dim();
    int nk = int(axes.size());
    if (nk < 1 || nk > n) throw Error("kernel: bad axis selection");

    std::vector<double> ksteps;
    std::vector<std::int64_t> kext;
    for (int a : axes) {
        ksteps.push_back(grid.step(a));
        kext.push_back(range.end[a] - range.begin[a]);
    }
    double beta = double(nk) + delta * p - p;

    std::int64_t ucount = range.count();
    std::int64_t vcount = 1;
    for (std::int64_t e : kext) vcount *= e;
    if (ucount * vcount > opts.pair_budget) {
        throw Error("kernel: pair budget exceeded (" + std::to_string(ucount * vcount) + " > " +
                    std::to_string(opts.pair_budget) + "); reduce the resolution by a factor of " +
                    std::to_string(std::max<std::int64_t>(2, (ucount * vcount) / opts.pair_budget)));
    }

    PairWeights pw(ksteps, kext, beta);

    // effective weight per offset: W(k) / dist(k)^p so that one multiply by
    // |f(u) - f(v)|^p finishes a pair
    std::vector<double> eff(pw_table_size(kext), 0.0);
    {
        std::vector<std::int64_t> k(std::size_t(nk), 0);
        for (std::size_t flat = 0; flat < eff.size(); ++flat) {
            std::size_t tmp = flat;
            bool zero = true;
            double r2 = 0.0;
            for (int a = 0; a < nk; ++a) {
                k[std::size_t(a)] = std::int64_t(tmp % std::size_t(kext[std::size_t(a)]));
                tmp /= std::size_t(kext[std::size_t(a)]);
                if (k[std::size_t(a)] != 0) zero = false;
                double d = double(k[std::size_t(a)]) * ksteps[std::size_t(a)];
                r2 += d * d;
            }
            if (zero) continue;
            eff[flat] = pw.weight(k.data()) * std::pow(r2, -0.5 * p);
        }
    }

    // off-block volume of a cell (block kernels integrate x over its full
    // cell but y only over the block axes)
    double offblock_vol = 1.0;
    if (nk < n) {
        std::vector<bool> in_axes(std::size_t(n), false);
        for (int a : axes) in_axes[std::size_t(a)] = true;
        for (int a = 0; a < n; ++a)
            if (!in_axes[std::size_t(a)]) offblock_vol *= grid.step(a);
    }

    // slope source for the same-cell mass
    std::vector<GridFunction> numeric;
    const std::vector<GridFunction>* slopes = opts.slopes;
    if (opts.include_same_cell && slopes == nullptr) {
        numeric = numeric_gradient(f);
        slopes = &numeric;
    }

    std::vector<double> rows(std::size_t(ucount), 0.0);

    // enumerate the rect's cells once so tiles can index them directly
    std::vector<std::int64_t> cell_flats;
    cell_flats.reserve(std::size_t(ucount));
    for_each_cell(grid, range, [&](std::int64_t i) { cell_flats.push_back(i); });

    std::vector<std::int64_t> kstride(std::size_t(nk), 0);
    for (int a = 0; a < nk; ++a) kstride[std::size_t(a)] = stride_of(grid, axes[std::size_t(a)]);
    std::vector<std::size_t> effstride(std::size_t(nk), 1);
    for (int a = 1; a < nk; ++a)
        effstride[std::size_t(a)] = effstride[std::size_t(a) - 1] * std::size_t(kext[std::size_t(a) - 1]);

    std::int64_t tile = std::max<std::int64_t>(1, ucount / (8 * std::max(1, opts.jobs == 0 ? default_jobs() : opts.jobs)));
    parallel_tiles(ucount, tile, opts.jobs, [&](std::int64_t b, std::int64_t e, std::size_t) {
        std::array<std::int64_t, kMaxDim> uidx{};
        std::vector<std::int64_t> voff(std::size_t(nk), 0);
        for (std::int64_t ui = b; ui < e; ++ui) {
            std::int64_t uflat = cell_flats[std::size_t(ui)];
            grid.unflat(uflat, uidx);
            double fu = f[uflat];
            KahanSum acc;

            // iterate v over the kernel axes' cells in the rect
            std::fill(voff.begin(), voff.end(), 0);
            for (;;) {
                std::int64_t vflat = uflat;
                std::size_t effidx = 0;
                for (int a = 0; a < nk; ++a) {
                    std::int64_t vpos = range.begin[axes[std::size_t(a)]] + voff[std::size_t(a)];
                    std::int64_t dk = vpos - uidx[axes[std::size_t(a)]];
                    vflat += dk * kstride[std::size_t(a)];
                    effidx += std::size_t(std::abs(dk)) * effstride[std::size_t(a)];
                }
                double wv = eff[effidx];
                if (wv != 0.0) {
                    double df = std::abs(fu - f[vflat]);
                    double gpow;
                    if (p == 1.0) gpow = df;
                    else if (p == 2.0) gpow = df * df;
                    else gpow = std::pow(df, p);
                    acc.add(gpow * wv);
                }
                int a = 0;
                for (; a < nk; ++a) {
                    if (++voff[std::size_t(a)] < kext[std::size_t(a)]) break;
                    voff[std::size_t(a)] = 0;
                }
                if (a == nk) break;
            }

            double row = acc.value();
            if (opts.include_same_cell && nk <= 2) {
                std::vector<double> g(std::size_t(nk), 0.0);
                for (int a = 0; a < nk; ++a) g[std::size_t(a)] = (*slopes)[std::size_t(axes[std::size_t(a)])][uflat];
                row += same_cell_mass(ksteps, g, p, delta);
            }
            rows[std::size_t(ui)] = row * offblock_vol;
        }
    });

    return rows;
}

}  // namespace psv
