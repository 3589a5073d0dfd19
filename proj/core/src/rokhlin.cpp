#include "ordent/rokhlin.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

#include "ordent/errors.hpp"
#include "ordent/rng.hpp"

namespace ordent {

namespace {

IntervalUnion iterated_preimage(const PiecewiseMonotoneMap& t, const IntervalUnion& a, int k) {
    IntervalUnion u = a;
    for (int i = 0; i < k; ++i) u = t.preimage(u).exact();
    return u;
}

// Disjoint up to endpoint touches: a zero-length intersection is a finite
// point set, null under every measure in scope.
bool exactly_disjoint(const IntervalUnion& a, const IntervalUnion& b) {
    return a.intersect(b).length() == 0.0;
}

// ---- exact_search: deterministic iterated local search on a dyadic grid ---
//
// Cells are [u 2^-g, (u+1) 2^-g).  For the grid map of a full piecewise-linear
// builtin the conflict relation "some point of cell u lands in cell v within
// d-1 steps" is computed exactly through interval preimages of single cells,
// so the search itself never touches floating arithmetic beyond dyadics.
struct GridConflicts {
    int g;
    std::vector<std::vector<std::int32_t>> adj;  // symmetric conflict lists
    std::vector<bool> self_bad;

    GridConflicts(const PiecewiseMonotoneMap& t, int g_, int d) : g(g_) {
        const std::int64_t q = 1ll << g;
        adj.assign(static_cast<std::size_t>(q), {});
        self_bad.assign(static_cast<std::size_t>(q), false);
        // forward images of one cell after k steps, as a set of cells
        for (std::int64_t u = 0; u < q; ++u) {
            IntervalUnion cur = IntervalUnion::from_normalized(
                {Interval::half_open(std::ldexp(static_cast<double>(u), -g),
                                     std::ldexp(static_cast<double>(u + 1), -g))});
            std::set<std::int64_t> hit;
            for (int k = 1; k < d; ++k) {
                // image of cur under T, branch by branch
                std::vector<Interval> img;
                for (const auto& cell : cur.cells()) {
                    for (const auto& br : t.branches()) {
                        if (br.is_singleton) continue;
                        Interval dom = cell.intersect(br.domain);
                        if (dom.is_empty() || dom.length() <= 0.0) continue;
                        const double fa = br.forward(dom.lo), fb = br.forward(dom.hi);
                        img.push_back(br.direction == Direction::increasing
                                          ? Interval(fa, fb, dom.lo_closed, dom.hi_closed)
                                          : Interval(fb, fa, dom.hi_closed, dom.lo_closed));
                    }
                }
                cur = IntervalUnion::normalize(std::move(img));
                for (const auto& cell : cur.cells()) {
                    std::int64_t lo = static_cast<std::int64_t>(std::floor(std::ldexp(cell.lo, g)));
                    std::int64_t hi = static_cast<std::int64_t>(std::ceil(std::ldexp(cell.hi, g)));
                    for (std::int64_t v = std::max<std::int64_t>(0, lo);
                         v < std::min<std::int64_t>(q, hi); ++v) {
                        Interval vc(std::ldexp(static_cast<double>(v), -g),
                                    std::ldexp(static_cast<double>(v + 1), -g), true, false);
                        if (cell.intersect(vc).length() > 0.0) hit.insert(v);
                    }
                }
            }
            for (std::int64_t v : hit) {
                if (v == u) {
                    self_bad[static_cast<std::size_t>(u)] = true;
                } else {
                    adj[static_cast<std::size_t>(u)].push_back(static_cast<std::int32_t>(v));
                    adj[static_cast<std::size_t>(v)].push_back(static_cast<std::int32_t>(u));
                }
            }
        }
        for (auto& lst : adj) {
            std::sort(lst.begin(), lst.end());
            lst.erase(std::unique(lst.begin(), lst.end()), lst.end());
        }
    }
};

struct IlsResult {
    std::vector<std::int32_t> cells;
    std::int64_t best = 0;
};

IlsResult ils_search(const GridConflicts& gc, std::int64_t target, std::uint64_t iters,
                     std::uint64_t seed) {
    const std::int64_t q = static_cast<std::int64_t>(gc.adj.size());
    std::vector<char> in(static_cast<std::size_t>(q), 0);
    std::vector<char> best_set(static_cast<std::size_t>(q), 0);
    std::int64_t size = 0, best = 0;

    std::uint64_t rng = seed * 2654435769ull + 0x9E3779B97F4A7C15ull;
    auto rnd = [&rng]() {
        rng ^= rng << 13;
        rng ^= rng >> 7;
        rng ^= rng << 17;
        return rng;
    };

    std::vector<std::int32_t> cand;
    for (std::int64_t u = 0; u < q; ++u)
        if (!gc.self_bad[static_cast<std::size_t>(u)]) cand.push_back(static_cast<std::int32_t>(u));
    if (cand.empty()) return {};

    std::int32_t conf[64];
    for (std::uint64_t it = 0; it < iters; ++it) {
        const std::int32_t u = cand[rnd() % cand.size()];
        if (in[static_cast<std::size_t>(u)]) {
            if ((rnd() & 1023) == 0) {
                in[static_cast<std::size_t>(u)] = 0;
                --size;
            }
            continue;
        }
        int ncf = 0;
        for (std::int32_t v : gc.adj[static_cast<std::size_t>(u)]) {
            if (in[static_cast<std::size_t>(v)]) {
                if (ncf < 64) conf[ncf] = v;
                ++ncf;
            }
        }
        if (ncf == 0) {
            in[static_cast<std::size_t>(u)] = 1;
            ++size;
        } else if (ncf == 1 && (rnd() % 100) < 35) {
            in[static_cast<std::size_t>(conf[0])] = 0;
            in[static_cast<std::size_t>(u)] = 1;
        } else if (ncf == 2 && (rnd() % 1000) < 25) {
            in[static_cast<std::size_t>(conf[0])] = 0;
            in[static_cast<std::size_t>(conf[1])] = 0;
            in[static_cast<std::size_t>(u)] = 1;
            --size;
        }
        if (size > best) {
            best = size;
            best_set = in;
            if (best >= target) break;
        }
    }
    IlsResult out;
    out.best = best;
    for (std::int64_t u = 0; u < q; ++u)
        if (best_set[static_cast<std::size_t>(u)]) out.cells.push_back(static_cast<std::int32_t>(u));
    return out;
}

RokhlinTower exact_search_base(const PiecewiseMonotoneMap& t, const InvariantMeasure& mu, int d,
                               double eps, std::uint64_t seed) {
    if (t.tail())
        throw ConfigError("build_base(exact_search): map must have finitely many branches");
    double best_measure = 0.0;
    for (int g = 2; g <= 14; ++g) {
        const std::int64_t q = 1ll << g;
        const std::int64_t target =
            static_cast<std::int64_t>(std::ceil((1.0 - eps) * static_cast<double>(q) / d - 1e-9));
        GridConflicts gc(t, g, d);
        const std::uint64_t iters = (g < 9) ? 2'000'000 : (g < 12 ? 300'000'000 : 450'000'000);
        IlsResult res = ils_search(gc, target, iters, seed ^ (0x9E37ull * g));
        best_measure = std::max(best_measure, std::ldexp(static_cast<double>(res.best), -g));
        if (res.best < target) continue;

        std::vector<Interval> cells;
        cells.reserve(res.cells.size());
        for (std::int32_t u : res.cells)
            cells.push_back(Interval::half_open(std::ldexp(static_cast<double>(u), -g),
                                                std::ldexp(static_cast<double>(u) + 1.0, -g)));
        IntervalUnion base = IntervalUnion::normalize(std::move(cells));

        // certify: exact pairwise disjointness of the d preimage levels
        bool ok = true;
        IntervalUnion level = base;
        for (int k = 1; k < d && ok; ++k) {
            level = t.preimage(level).exact();
            if (!exactly_disjoint(base, level)) ok = false;
        }
        const double m = measure_of(mu, base);
        if (ok && m >= (1.0 - eps) / d) {
            RokhlinTower tw;
            tw.base = base;
            tw.height = d;
            tw.base_measure = m;
            tw.epsilon = eps;
            tw.verification = "exact";
            return tw;
        }
    }
    throw SearchExhaustedError("build_base: no dyadic base reached (1-eps)/d", best_measure);
}

RokhlinTower first_return_base(const PiecewiseMonotoneMap& t, const InvariantMeasure& mu, int d,
                               double eps, std::uint64_t seed) {
    // seed set C around the measure median with mu(C) = eps/(4d); points with
    // hitting time tau(x) = 0 mod d, tau >= 1, avoid B for d-1 steps exactly,
    // so only the interval approximation of B needs statistical verification.
    const double half = eps / (8.0 * d);
    const Interval c(mu.quantile(0.5 - half), mu.quantile(0.5 + half), true, false);
    const int r_cap = 64 * d;

    auto tau = [&](double x) {
        for (int j = 0; j <= r_cap; ++j) {
            if (c.contains(x)) return j;
            x = t.eval(x);
        }
        return -1;
    };
    ApproxTarget target;
    target.support = t.domain();
    target.contains = [&](double x) {
        const int j = tau(x);
        return j >= 1 && j % d == 0;
    };
    IntervalUnion base = approximate_by_intervals(target, mu, eps / (6.0 * d * d), seed);

    // statistical disjointness check at 99% confidence
    const std::uint64_t n_check = 40'000;
    std::uint64_t bad = 0;
    for (std::uint64_t i = 0; i < n_check; ++i) {
        double x = sample_at(mu, seed ^ 0x7071ull, i);
        if (!base.contains(x)) continue;
        double y = x;
        for (int k = 1; k < d; ++k) {
            y = t.eval(y);
            if (base.contains(y)) {
                ++bad;
                break;
            }
        }
    }
    const double hoeffding = std::sqrt(std::log(2.0 / 0.01) / (2.0 * n_check));
    const double viol = static_cast<double>(bad) / n_check + hoeffding;

    RokhlinTower tw;
    tw.base = base;
    tw.height = d;
    tw.base_measure = measure_of(mu, base);
    tw.epsilon = eps;
    tw.verification = "statistical(violation_mass<=" + std::to_string(viol) + "@99%)";
    if (tw.base_measure < (1.0 - eps) / d)
        throw SearchExhaustedError("build_base(first_return): measure target missed",
                                   tw.base_measure);
    return tw;
}

}  // namespace

RokhlinTower build_base(const PiecewiseMonotoneMap& t, const InvariantMeasure& mu, int d,
                        double eps, TowerStrategy strategy, std::uint64_t seed) {
    if (d < 1) throw ConfigError("build_base: d must be >= 1");
    if (!(eps > 0.0 && eps < 1.0) && d != 1)
        throw ConfigError("build_base: eps must lie in (0,1)");
    if (d == 1) {
        RokhlinTower tw;
        tw.base = IntervalUnion::from_normalized({t.domain()});
        tw.height = 1;
        tw.base_measure = 1.0;
        tw.epsilon = eps;
        tw.verification = "exact";
        return tw;
    }
    return strategy == TowerStrategy::exact_search ? exact_search_base(t, mu, d, eps, seed)
                                                   : first_return_base(t, mu, d, eps, seed);
}

IntervalUnion approximate_by_intervals(const ApproxTarget& target, const InvariantMeasure& mu,
                                       double eps, std::uint64_t seed, std::uint64_t budget) {
    if (target.exact) return *target.exact;

    struct Cell {
        double lo, hi;
        int depth;
    };
    std::deque<Cell> work{{target.support.lo, target.support.hi, 0}};
    std::vector<Interval> in_cells;
    double boundary_mass = 0.0;
    std::uint64_t used = 0;
    const int max_depth = 40;

    while (!work.empty()) {
        const Cell cell = work.front();
        work.pop_front();
        bool any_in = false, any_out = false;
        for (int i = 0; i < 24; ++i) {
            const double x =
                cell.lo + (cell.hi - cell.lo) * (i + counter_uniform(seed, 0xA99ull, used + i)) / 24.0;
            (target.contains(x) ? any_in : any_out) = true;
        }
        used += 24;
        if (++used > budget)
            throw BudgetExceededError("approximate_by_intervals: sampling budget exhausted");
        if (any_in && !any_out) {
            in_cells.push_back(Interval::half_open(cell.lo, cell.hi));
        } else if (any_in && any_out) {
            if (cell.depth < max_depth &&
                mu.interval_mass(cell.lo, cell.hi) > eps / 64.0) {
                const double mid = 0.5 * (cell.lo + cell.hi);
                work.push_back({cell.lo, mid, cell.depth + 1});
                work.push_back({mid, cell.hi, cell.depth + 1});
            } else {
                // unresolved sliver: include iff the midpoint is in, and
                // charge its whole mass to the error budget
                boundary_mass += mu.interval_mass(cell.lo, cell.hi);
                if (target.contains(0.5 * (cell.lo + cell.hi)))
                    in_cells.push_back(Interval::half_open(cell.lo, cell.hi));
            }
        }
    }
    IntervalUnion out = IntervalUnion::normalize(std::move(in_cells));

    // 99%-confidence symmetric-difference estimate
    const std::uint64_t n_check = 20'000;
    std::uint64_t mismatch = 0;
    for (std::uint64_t i = 0; i < n_check; ++i) {
        const double x = mu.quantile(counter_uniform(seed, 0xA9Bull, i));
        if (target.contains(x) != out.contains(x)) ++mismatch;
    }
    const double est = static_cast<double>(mismatch) / n_check +
                       std::sqrt(std::log(2.0 / 0.01) / (2.0 * n_check));
    if (std::max(est, boundary_mass) > eps)
        throw BudgetExceededError("approximate_by_intervals: cannot reach eps = " +
                                  std::to_string(eps));
    return out;
}

QPartition build_q_partition(const PiecewiseMonotoneMap& t, const IntervalPartition& m,
                             const std::vector<Interval>& a, int d, double epsilon,
                             std::uint64_t cell_budget) {
    if (d < 1) throw ConfigError("build_q_partition: d must be >= 1");
    // disjointness of the A_i
    {
        std::vector<Interval> raw = a;
        IntervalUnion ua = IntervalUnion::normalize(raw);
        double sum = 0.0;
        for (const auto& iv : a) sum += iv.length();
        if (std::abs(sum - ua.length()) > 1e-12)
            throw ConfigError("build_q_partition: base intervals overlap");
    }

    // trimmed floors: \hat A_i = A_i minus all k-step preimages of the bases
    std::vector<IntervalUnion> pre_a(static_cast<std::size_t>(d));
    {
        IntervalUnion ua = IntervalUnion::normalize(std::vector<Interval>(a));
        pre_a[0] = ua;
        for (int k = 1; k < d; ++k) pre_a[k] = t.preimage(pre_a[k - 1]).exact();
    }
    IntervalUnion trim;
    for (int k = 1; k < d; ++k) trim = trim.unite(pre_a[static_cast<std::size_t>(k)]);
    std::vector<IntervalUnion> hat(static_cast<std::size_t>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i)
        hat[i] = IntervalUnion::from_normalized({a[i]}).subtract(trim);

    // floors T^{-l}(\hat A_i), l = 0..d-1
    std::vector<std::vector<IntervalUnion>> floors(static_cast<std::size_t>(d));
    for (int l = 0; l < d; ++l) {
        floors[static_cast<std::size_t>(l)].resize(a.size());
        for (std::size_t i = 0; i < a.size(); ++i)
            floors[static_cast<std::size_t>(l)][i] = iterated_preimage(t, hat[i], l);
    }

    // refinement partition P: breakpoints of the base partition pulled back
    // through 0..2d-2 preimage levels, plus monotony boundaries at each level
    std::set<double> breaks{t.domain().lo, t.domain().hi};
    auto add_union_breaks = [&breaks](const IntervalUnion& u) {
        for (const auto& cell : u.cells()) {
            breaks.insert(cell.lo);
            breaks.insert(cell.hi);
        }
    };
    std::vector<double> level_breaks;
    for (const auto& iv : a) {
        level_breaks.push_back(iv.lo);
        level_breaks.push_back(iv.hi);
    }
    for (const auto& cell : m.cells()) {
        level_breaks.push_back(cell.lo);
        level_breaks.push_back(cell.hi);
    }
    for (int level = 0; level <= 2 * d - 2; ++level) {
        for (double b : level_breaks) breaks.insert(b);
        if (level == 2 * d - 2) break;
        // pull the current level's break set back one preimage
        std::sort(level_breaks.begin(), level_breaks.end());
        level_breaks.erase(std::unique(level_breaks.begin(), level_breaks.end()),
                           level_breaks.end());
        std::vector<Interval> cells;
        for (std::size_t i = 0; i + 1 < level_breaks.size(); ++i)
            cells.push_back(Interval::half_open(level_breaks[i], level_breaks[i + 1]));
        IntervalUnion pulled =
            t.preimage(IntervalUnion::normalize(std::move(cells))).exact();
        std::vector<double> next;
        for (const auto& cell : pulled.cells()) {
            next.push_back(cell.lo);
            next.push_back(cell.hi);
        }
        for (const auto& br : t.branches()) {
            next.push_back(br.domain.lo);
            next.push_back(br.domain.hi);
        }
        level_breaks = std::move(next);
        if (breaks.size() + level_breaks.size() > cell_budget)
            throw CellExplosionError("build_q_partition: refinement exceeds cell budget");
    }
    for (int l = 0; l < d; ++l)
        for (const auto& f : floors[static_cast<std::size_t>(l)]) add_union_breaks(f);

    std::vector<double> bp(breaks.begin(), breaks.end());
    if (bp.size() > cell_budget)
        throw CellExplosionError("build_q_partition: refinement exceeds cell budget");

    std::vector<Interval> q_cells;
    std::vector<std::string> q_labels;
    std::vector<std::size_t> good;
    for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
        if (!(bp[i] < bp[i + 1])) continue;
        const bool last = (i + 2 == bp.size());
        Interval cell = last ? Interval::closed(bp[i], bp[i + 1])
                             : Interval::half_open(bp[i], bp[i + 1]);
        const double mid = cell.midpoint();
        bool is_good = false;
        for (int l = 0; l < d && !is_good; ++l)
            for (const auto& f : floors[static_cast<std::size_t>(l)])
                if (f.contains(mid)) {
                    is_good = true;
                    break;
                }
        if (is_good) good.push_back(q_cells.size());
        q_cells.push_back(cell);
        q_labels.push_back(std::to_string(q_cells.size() - 1));
    }

    QPartition q;
    q.cells = IntervalPartition(t.domain(), std::move(q_cells), std::move(q_labels));
    q.good_set = std::move(good);
    q.epsilon = epsilon;
    q.height = d;
    return q;
}

QReport verify_q_partition(const PiecewiseMonotoneMap& t, const InvariantMeasure& mu,
                           const QPartition& q, std::optional<double> eps_override) {
    QReport r;
    r.epsilon_used = eps_override.value_or(q.epsilon);

    // (i): structural -- disjoint intervals covering the domain up to null
    {
        std::vector<Interval> cells = q.cells.cells();
        std::sort(cells.begin(), cells.end(),
                  [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
        bool disjoint = true;
        double total = 0.0;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            total += cells[i].length();
            if (i + 1 < cells.size() &&
                cells[i].intersect(cells[i + 1]).length() > 0.0)
                disjoint = false;
        }
        r.item_i = disjoint && std::abs(total - q.cells.domain().length()) <= 1e-9;
    }

    // (ii): exact self-avoidance of good cells for k = 1..d-1
    {
        bool ok = true;
        for (std::size_t j : q.good_set) {
            IntervalUnion cell = IntervalUnion::from_normalized({q.cells.cells()[j]});
            IntervalUnion level = cell;
            for (int k = 1; k < q.height && ok; ++k) {
                level = t.preimage(level).exact();
                if (cell.intersect(level).length() != 0.0) ok = false;
            }
            if (!ok) break;
        }
        r.item_ii = ok;
    }

    // (iii): H(Q) finite
    r.entropy = shannon_entropy(mu, q.cells);
    r.item_iii = std::isfinite(r.entropy.value);

    // (iv): mass of the good set
    {
        std::vector<Interval> cells;
        for (std::size_t j : q.good_set) cells.push_back(q.cells.cells()[j]);
        r.good_mass = measure_of(mu, IntervalUnion::normalize(std::move(cells)));
        r.item_iv = r.good_mass >= 1.0 - r.epsilon_used - 1e-12;
    }
    return r;
}

VisitReport visit_bound_check(const PiecewiseMonotoneMap& t, const InvariantMeasure& mu,
                              const IntervalUnion& b, int d, int n, std::uint64_t n_windows,
                              std::uint64_t seed) {
    VisitReport r;
    r.windows = n_windows;
    r.bound = (d >= 1) ? static_cast<double>(n - 2) / d + 1.0 : 0.0;
    for (std::uint64_t i = 0; i < n_windows; ++i) {
        double x = sample_at(mu, seed, i);
        std::uint64_t count = 0;
        for (int s = 0; s <= n - 2; ++s) {
            if (b.contains(x)) ++count;
            x = t.eval(x);
        }
        r.max_count = std::max(r.max_count, count);
        if (static_cast<double>(count) > r.bound) ++r.violations;
    }
    return r;
}

}  // namespace ordent
