#include "psv/weights.hpp"

#include "psv/analysis.hpp"

#include <algorithm>
#include <cmath>

namespace psv {

Weight::Weight(GridFunction density) : g_(std::move(density)) {
    const Grid& grid = g_.grid();
    for (std::int64_t i = 0; i < g_.size(); ++i) {
        if (!(g_[i] > 0.0)) {
            double x[kMaxDim];
            grid.cell_center(i, x);
            std::string where;
            for (int a = 0; a < grid.dim(); ++a)
                where += (a ? "," : "(") + format_double(x[a]);
            throw Error("weight: nonpositive value " + format_double(g_[i]) + " at cell " + where + ")");
        }
    }
}

Weight Weight::from_expr(const Expr& e, const GridPtr& grid) {
    return Weight(e.sample(grid));
}

Weight Weight::constant(const GridPtr& grid, double c) {
    return Weight(GridFunction::constant(grid, c));
}

RectPool make_rect_pool(const Grid& grid, const Rect& root, int depth, int extra_rects,
                        std::uint64_t seed) {
    RectPool pool;
    pool.root = root;
    pool.dyadic = dyadic_descendants(grid, root, depth);
    Rng rng(seed ^ 0x9d8ef3a1c47b2e65ULL);
    CellRange root_cells = grid.cells(root);
    const Box& box = grid.box();
    for (int k = 0; k < extra_rects; ++k) {
        CellRange r;
        r.dim = grid.dim();
        if (box.basis == Basis::cube_product) {
            int axis = 0;
            for (int blk = 0; blk < box.nblocks; ++blk) {
                std::int64_t n = root_cells.end[axis] - root_cells.begin[axis];
                std::int64_t ext = 1 + std::int64_t(rng.below(std::uint64_t(n)));
                for (int a = axis; a < axis + box.blocks[blk]; ++a) {
                    std::int64_t na = root_cells.end[a] - root_cells.begin[a];
                    std::int64_t off = std::int64_t(rng.below(std::uint64_t(na - ext + 1)));
                    r.begin[a] = root_cells.begin[a] + off;
                    r.end[a] = r.begin[a] + ext;
                }
                axis += box.blocks[blk];
            }
        } else {
            for (int a = 0; a < grid.dim(); ++a) {
                std::int64_t n = root_cells.end[a] - root_cells.begin[a];
                std::int64_t ext = 1 + std::int64_t(rng.below(std::uint64_t(n)));
                std::int64_t off = std::int64_t(rng.below(std::uint64_t(n - ext + 1)));
                r.begin[a] = root_cells.begin[a] + off;
                r.end[a] = r.begin[a] + ext;
            }
        }
        pool.extra.push_back(r);
    }
    return pool;
}

double muckenhoupt_product(const Weight& w, double p, const CellRange& range) {
    const Grid& grid = w.grid();
    double vol = double(range.count()) * grid.cell_volume();
    double avg_w = integrate(w.density(), range) / vol;
    if (p == 1.0) {
        double mn = rect_min(w.density(), range);
        return avg_w / mn;
    }
    double e = -1.0 / (p - 1.0);
    KahanSum dual;
    for_each_cell(grid, range, [&](std::int64_t i) { dual.add(std::pow(w.density()[i], e)); });
    double avg_dual = dual.value() * grid.cell_volume() / vol;
    return avg_w * std::pow(avg_dual, p - 1.0);
}

double muckenhoupt_over(const Weight& w, double p, const RectPool& pool) {
    if (p < 1.0) throw Error("muckenhoupt: p must be at least 1");
    const Grid& grid = w.grid();
    double best = 0.0;
    for (const Rect& r : pool.dyadic) best = std::max(best, muckenhoupt_product(w, p, grid.cells(r)));
    for (const CellRange& r : pool.extra) best = std::max(best, muckenhoupt_product(w, p, r));
    return best;
}

double muckenhoupt_constant(const Weight& w, double p, const Rect& root, int depth,
                            int extra_rects, std::uint64_t seed) {
    RectPool pool = make_rect_pool(w.grid(), root, depth, extra_rects, seed);
    return muckenhoupt_over(w, p, pool);
}

namespace {

/// (1/w(R)) * integral over R of the shifted-dyadic minorant of M(w chi_R).
double fujii_wilson_on(const Weight& w, const Rect& rect, int shifts, Rng& rng) {
    const Grid& grid = w.grid();
    CellRange cells = grid.cells(rect);
    int n = grid.dim();
    std::array<std::int64_t, kMaxDim> size{};
    for (int a = 0; a < n; ++a) size[a] = cells.end[a] - cells.begin[a];

    std::vector<double> maxima(std::size_t(cells.count()), 0.0);

    // local flat index within the rect, axis 0 fastest
    std::array<std::int64_t, kMaxDim> stride{};
    stride[0] = 1;
    for (int a = 1; a < n; ++a) stride[a] = stride[a - 1] * size[a - 1];

    int levels = 0;
    while ((std::int64_t(1) << (levels + 1)) <= *std::min_element(size.begin(), size.begin() + n))
        ++levels;

    for (int s = 0; s <= shifts; ++s) {
        std::array<std::int64_t, kMaxDim> offset{};
        if (s > 0)
            for (int a = 0; a < n; ++a) offset[a] = std::int64_t(rng.below(std::uint64_t(size[a])));
        for (int lev = 0; lev <= levels; ++lev) {
            std::array<std::int64_t, kMaxDim> bsize{};
            double block_measure = 1.0;
            for (int a = 0; a < n; ++a) {
                bsize[a] = std::max<std::int64_t>(1, size[a] >> lev);
                block_measure *= double(bsize[a]) * grid.step(a);
            }
            // tile the rect with blocks anchored at begin - offset
            std::array<std::int64_t, kMaxDim> t_end{};
            for (int a = 0; a < n; ++a)
                t_end[a] = (size[a] + offset[a] + bsize[a] - 1) / bsize[a];
            std::array<std::int64_t, kMaxDim> ti{};
            for (;;) {
                // block cell range clipped to the rect
                CellRange blk;
                blk.dim = n;
                bool empty = false;
                for (int a = 0; a < n; ++a) {
                    std::int64_t b0 = cells.begin[a] - offset[a] + ti[a] * bsize[a];
                    std::int64_t b1 = b0 + bsize[a];
                    blk.begin[a] = std::max(b0, cells.begin[a]);
                    blk.end[a] = std::min(b1, cells.end[a]);
                    if (blk.begin[a] >= blk.end[a]) empty = true;
                }
                if (!empty) {
                    double val = integrate(w.density(), blk) / block_measure;
                    // assign to all covered cells
                    for_each_cell(grid, blk, [&](std::int64_t flat) {
                        std::array<std::int64_t, kMaxDim> idx{};
                        grid.unflat(flat, idx);
                        std::int64_t loc = 0;
                        for (int a = 0; a < n; ++a) loc += (idx[a] - cells.begin[a]) * stride[a];
                        if (val > maxima[std::size_t(loc)]) maxima[std::size_t(loc)] = val;
                    });
                }
                int a = 0;
                for (; a < n; ++a) {
                    if (++ti[a] < t_end[a]) break;
                    ti[a] = 0;
                }
                if (a == n) break;
            }
        }
    }

    KahanSum acc;
    for (double v : maxima) acc.add(v);
    double integral = acc.value() * grid.cell_volume();
    return integral / w.total(rect);
}

}  // namespace

double fujii_wilson_over(const Weight& w, const std::vector<Rect>& pool, int shifts,
                         std::uint64_t seed) {
    Rng rng(seed ^ 0x1f3a5c7e9b2d4f60ULL);
    double best = 0.0;
    for (const Rect& r : pool) best = std::max(best, fujii_wilson_on(w, r, shifts, rng));
    return best;
}

double fujii_wilson_constant(const Weight& w, const Rect& root, int depth, int shifts,
                             std::uint64_t seed) {
    std::vector<Rect> pool = dyadic_descendants(w.grid(), root, depth);
    return fujii_wilson_over(w, pool, shifts, seed);
}

double lebesgue_r_average(const Weight& w, double r, const Rect& rect) {
    if (r <= 1.0) throw Error("lebesgue_r_average: r must exceed 1");
    const Grid& grid = w.grid();
    CellRange range = grid.cells(rect);
    KahanSum acc;
    for_each_cell(grid, range, [&](std::int64_t i) { acc.add(std::pow(w.density()[i], r)); });
    double avg = acc.value() * grid.cell_volume() / rect.measure();
    return rect.measure() * std::pow(avg, 1.0 / r);
}

ReverseHolderResult reverse_holder_check(const Weight& w, const Rect& rect, double ainf) {
    if (ainf < 1.0) throw Error("reverse holder: A_infty constant must be at least 1");
    int n = rect.dim();
    ReverseHolderResult res;
    res.eps = 1.0 / (std::pow(2.0, n + 1) * ainf - 1.0);
    const Grid& grid = w.grid();
    CellRange range = grid.cells(rect);
    KahanSum acc;
    for_each_cell(grid, range, [&](std::int64_t i) { acc.add(std::pow(w.density()[i], 1.0 + res.eps)); });
    res.lhs = acc.value() * grid.cell_volume() / rect.measure();
    double avg = integrate(w.density(), range) / rect.measure();
    res.rhs = 2.0 * std::pow(avg, 1.0 + res.eps);
    res.pass = res.lhs <= res.rhs * (1.0 + 1e-12);
    return res;
}

WeightReport weight_report(const Weight& w, const Rect& root, const std::vector<double>& ps,
                           int depth, int extra_rects, int shifts, std::uint64_t seed) {
    WeightReport rep;
    rep.depth = depth;
    RectPool pool = make_rect_pool(w.grid(), root, depth, extra_rects, seed);
    rep.rectangles_scanned = pool.size();
    for (double p : ps) {
        rep.p_values.push_back(p);
        rep.ap_constants.push_back(muckenhoupt_over(w, p, pool));
    }
    rep.fujii_wilson = fujii_wilson_over(w, pool.dyadic, shifts, seed);
    return rep;
}

}  // namespace psv
