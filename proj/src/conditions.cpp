#include "psv/conditions.hpp"

#include <algorithm>
#include <cmath>

namespace psv {

namespace {

void stopping_walk(const Rect& node, int max_level, double q_stop, Rng& rng,
                   std::vector<Rect>& out) {
    if (rng.uniform() < q_stop) {
        out.push_back(node);
        return;
    }
    if (node.level >= max_level) return;
    for (const Rect& c : node.children()) stopping_walk(c, max_level, q_stop, rng, out);
}

std::vector<Rect> full_level(const Rect& root, int rel) {
    std::vector<Rect> out{root};
    for (int d = 0; d < rel; ++d) {
        std::vector<Rect> next;
        for (const Rect& r : out)
            for (const Rect& c : r.children()) next.push_back(c);
        out = std::move(next);
    }
    return out;
}

void thin_to_smallness(std::vector<Rect>& members, const Rect& root, double smallness, Rng& rng) {
    double target = smallness * root.measure();
    double total = 0.0;
    for (const Rect& m : members) total += m.measure();
    while (!members.empty() && total > target) {
        std::size_t kick = std::size_t(rng.below(members.size()));
        total -= members[kick].measure();
        members.erase(members.begin() + std::ptrdiff_t(kick));
    }
}

// every disjoint family whose members live at level <= 2 below the root
void enumerate_depth2(const Rect& node, int rel_left, std::vector<std::vector<Rect>>& families,
                      std::vector<Rect>& cur) {
    // options per child subtree: empty, the child itself, or families of its children
    if (rel_left == 0) return;
    std::vector<Rect> kids = node.children();
    std::vector<std::vector<std::vector<Rect>>> sub(kids.size());
    for (std::size_t i = 0; i < kids.size(); ++i) {
        sub[i].push_back({});                  // skip
        sub[i].push_back({kids[i]});           // take
        if (rel_left > 1) {
            std::vector<std::vector<Rect>> deeper;
            std::vector<Rect> tmp;
            enumerate_depth2(kids[i], rel_left - 1, deeper, tmp);
            for (auto& fam : deeper)
                if (!fam.empty()) sub[i].push_back(fam);
        }
    }
    std::vector<std::size_t> idx(kids.size(), 0);
    for (;;) {
        std::vector<Rect> fam = cur;
        for (std::size_t i = 0; i < kids.size(); ++i)
            for (const Rect& r : sub[i][idx[i]]) fam.push_back(r);
        families.push_back(std::move(fam));
        std::size_t a = 0;
        for (; a < kids.size(); ++a) {
            if (++idx[a] < sub[a].size()) break;
            idx[a] = 0;
        }
        if (a == kids.size()) break;
    }
}

}  // namespace

std::vector<DisjointFamily> sample_disjoint_families(const Grid& grid, const Rect& root, int count,
                                                     const FamilySamplerOptions& opts,
                                                     std::uint64_t seed) {
    if (!grid.aligned(root)) throw Error("families: root not aligned");
    int max_level = std::min(root.level + opts.max_depth, grid.max_depth());
    Rng rng(seed ^ 0x51a7bd3c92e04f18ULL);

    std::vector<std::vector<Rect>> raw;

    if (opts.exhaustive_depth2) {
        std::vector<Rect> cur;
        enumerate_depth2(root, std::min(2, max_level - root.level), raw, cur);
    } else {
        raw.push_back({root});
        for (int rel = 1; rel <= std::min(3, max_level - root.level); ++rel)
            raw.push_back(full_level(root, rel));
        // a few single-node families
        for (int rel = 1; rel <= max_level - root.level && int(raw.size()) < count / 4 + 4; ++rel) {
            std::vector<Rect> lvl = full_level(root, rel);
            raw.push_back({lvl[std::size_t(rng.below(lvl.size()))]});
        }
        while (int(raw.size()) < count) {
            std::vector<Rect> members;
            stopping_walk(root, max_level, opts.q_stop, rng, members);
            raw.push_back(std::move(members));
        }
    }

    std::vector<DisjointFamily> out;
    for (auto& members : raw) {
        if (int(out.size()) >= count && !opts.exhaustive_depth2) break;
        if (opts.smallness) thin_to_smallness(members, root, *opts.smallness, rng);
        out.push_back(DisjointFamily::make(root, std::move(members)));
    }
    return out;
}

ConditionVerdict condition_ratio(const Functional& a, const GridFunction& f, double p,
                                 const Weight* w, const Rect& root,
                                 const std::vector<DisjointFamily>& families,
                                 std::optional<double> s, double bound, double tolerance) {
    ConditionVerdict v;
    v.smallness_condition = s.has_value();
    v.p = p;
    v.s = s.value_or(0.0);
    v.families_tested = families.size();
    v.bound = bound;
    v.tolerance = tolerance;

    double a_root = eval_functional(a, f, root);
    double w_root = w ? w->total(root) : root.measure();

    for (std::size_t fi = 0; fi < families.size(); ++fi) {
        const DisjointFamily& fam = families[fi];
        if (!fam.root().same_root(root) || fam.root().level != root.level)
            throw Error("condition_ratio: family rooted elsewhere");
        KahanSum acc;
        for (const Rect& ri : fam.members()) {
            double ai = eval_functional(a, f, ri);
            double wi = w ? w->total(ri) : ri.measure();
            acc.add(std::pow(ai, p) * wi);
        }
        double lhs = std::pow(acc.value() / w_root, 1.0 / p);
        double rhs = a_root;
        if (s) {
            double frac = fam.covered_fraction();
            rhs *= std::pow(frac, 1.0 / *s);
        }
        double ratio;
        if (rhs > 0.0) {
            ratio = lhs / rhs;
        } else if (lhs > 0.0) {
            ratio = std::numeric_limits<double>::infinity();
            v.degenerate = true;
        } else {
            ratio = 0.0;
        }
        if (ratio > v.max_ratio) {
            v.max_ratio = ratio;
            v.argmax_family = fi;
        }
    }
    v.pass = !v.degenerate && v.max_ratio <= bound * (1.0 + tolerance);
    return v;
}

double sobolev_exponent(ExponentKind kind, const ExponentParams& pr) {
    if (pr.p < 1.0) throw Error("sobolev_exponent: p must be at least 1");
    if (pr.n < 1) throw Error("sobolev_exponent: dimension must be positive");
    double gap = 0.0;
    switch (kind) {
        case ExponentKind::classic:
            gap = pr.delta / double(pr.n);
            break;
        case ExponentKind::weighted_aq:
            if (pr.weight_constant < 1.0) throw Error("sobolev_exponent: weight constant below 1");
            if (!(pr.q >= 1.0 && pr.q <= pr.p)) throw Error("sobolev_exponent: need 1 <= q <= p");
            gap = pr.delta / double(pr.n) / (pr.q + std::log(pr.weight_constant));
            break;
        case ExponentKind::lemma_m:
            if (pr.M <= 1.0) throw Error("sobolev_exponent: M must exceed 1");
            gap = pr.delta / (double(pr.n) * pr.q * pr.M);
            break;
        case ExponentKind::a1_fractional:
            if (pr.weight_constant < 1.0) throw Error("sobolev_exponent: weight constant below 1");
            gap = pr.delta / double(pr.n) / (1.0 + std::log(pr.weight_constant));
            break;
    }
    double inv = 1.0 / pr.p - gap;
    if (inv <= 0.0) throw Error("sobolev_exponent: parameter regime gives a nonpositive 1/p*");
    double pstar = 1.0 / inv;
    if (pstar <= pr.p) throw Error("sobolev_exponent: p* does not exceed p");
    return pstar;
}

double companion_M(double weight_constant, double q) {
    if (weight_constant < 1.0) throw Error("companion_M: weight constant below 1");
    return 1.0 + std::log(weight_constant) / q;
}

double companion_B(double weight_constant, double q) {
    double lg = std::log(weight_constant) / q;
    if (lg <= 0.0) return std::numeric_limits<double>::infinity();  // flat-weight blowup
    return (1.0 + lg) / lg;
}

}  // namespace psv
