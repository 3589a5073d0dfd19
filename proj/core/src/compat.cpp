#include "ordent/compat.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "ordent/errors.hpp"
#include "ordent/rng.hpp"

namespace ordent {

std::uint64_t lemma_bound(const CylinderIndex& w) {
    const std::size_t n = w.length();
    if (n < 2) throw ConfigError("lemma_bound: need |w| >= 2");
    int matches = 0;
    for (std::size_t s = 0; s + 1 < n; ++s)
        if (w.word[s] == w.word[n - 1]) ++matches;
    return 1ull << matches;
}

namespace {

constexpr int kScan = 1024;
constexpr double kRootTol = 1e-12;
constexpr double kTinyCell = 1e-10;

struct PairScan {
    std::vector<double> roots;
    bool had_sign_change = false;
};

// Roots of g on [a,b] via an even scan plus bisection.  g is continuous here
// (pinned-branch composition), so bracketing is sound.
PairScan isolate_roots(const std::function<double(double)>& g, double a, double b, int points,
                       std::uint64_t& evals) {
    PairScan out;
    std::vector<double> xs(points + 1), vs(points + 1);
    for (int i = 0; i <= points; ++i) {
        xs[i] = a + (b - a) * static_cast<double>(i) / points;
        vs[i] = g(xs[i]);
    }
    evals += points + 1;
    for (int i = 0; i < points; ++i) {
        double lo = xs[i], hi = xs[i + 1];
        double flo = vs[i], fhi = vs[i + 1];
        if (flo == 0.0) {
            out.roots.push_back(lo);
            continue;
        }
        if (flo * fhi >= 0.0) continue;
        out.had_sign_change = true;
        while (hi - lo > kRootTol) {
            const double mid = 0.5 * (lo + hi);
            const double fm = g(mid);
            ++evals;
            if (fm == 0.0) {
                lo = hi = mid;
                break;
            }
            if (flo * fm < 0.0) {
                hi = mid;
                fhi = fm;
            } else {
                lo = mid;
                flo = fm;
            }
        }
        out.roots.push_back(0.5 * (lo + hi));
    }
    if (vs[points] == 0.0) out.roots.push_back(xs[points]);
    return out;
}

int count_sign_changes(const std::function<double(double)>& g, double a, double b, int points,
                       std::uint64_t& evals) {
    int changes = 0;
    double prev = g(a);
    for (int i = 1; i <= points; ++i) {
        const double x = a + (b - a) * static_cast<double>(i) / points;
        const double v = g(x);
        if (prev != 0.0 && v != 0.0 && prev * v < 0.0) ++changes;
        if (v != 0.0) prev = v;
    }
    evals += points + 1;
    return changes;
}

}  // namespace

CompatReport compatible_patterns_exact(const PiecewiseMonotoneMap& t, const InvariantMeasure& mu,
                                       const CylinderIndex& w, std::uint64_t eval_budget) {
    const int n = static_cast<int>(w.length());
    if (n < 2) throw ConfigError("compatible_patterns_exact: need |w| >= 2");
    for (int label : w.word) {
        if (label < 0 || label >= static_cast<int>(t.branches().size()))
            throw OutOfDomainError("compatible_patterns_exact: invalid label");
        if (t.branches()[label].is_singleton)
            throw EmptyCylinderError("compatible_patterns_exact: singleton branch in word");
    }

    CompatReport rep;
    rep.word = w;
    rep.bound = lemma_bound(w);

    const IntervalUnion cyl = t.cylinder(w);
    if (cyl.empty() || cyl.length() <= 0.0)
        throw EmptyCylinderError("compatible_patterns_exact: empty cylinder for word " +
                                 w.to_string());
    if (cyl.size() != 1)
        throw Error("compatible_patterns_exact: cylinder is not a single interval");
    rep.cylinder = cyl.cells().front();
    rep.cylinder_measure = measure_of(mu, cyl);
    const double a = rep.cylinder.lo, b = rep.cylinder.hi;

    std::uint64_t evals = 0;
    auto iterate = [&](double x, int k) { return t.eval_pinned(x, w, k); };

    // root isolation per pair, with the doubled-density consistency guard
    std::vector<double> cuts{a, b};
    std::map<std::pair<int, int>, bool> pair_has_root;
    const double scale = std::max(1.0, std::max(std::abs(a), std::abs(b)));
    for (int s = 0; s < n; ++s) {
        for (int u = s + 1; u < n; ++u) {
            auto g = [&](double x) { return iterate(x, s) - iterate(x, u); };
            if (evals > eval_budget)
                throw BudgetExceededError("compatible_patterns_exact: evaluation budget");
            PairScan scan = isolate_roots(g, a, b, kScan, evals);
            // identically-zero differences would mean a positive-measure tie
            bool all_zero = true;
            for (int i = 0; i <= 16 && all_zero; ++i) {
                const double x = a + (b - a) * i / 16.0;
                if (std::abs(g(x)) > 1e-15 * scale) all_zero = false;
            }
            evals += 17;
            if (all_zero)
                throw Error("compatible_patterns_exact: T^s - T^t vanishes identically on the "
                            "cylinder (map not aperiodic there)");
            const int coarse = static_cast<int>(
                std::count_if(scan.roots.begin(), scan.roots.end(),
                              [&](double r) { return r > a && r < b; }));
            const int fine = count_sign_changes(g, a, b, 2 * kScan, evals);
            if (fine > coarse) {
                // rescan disagreement: take the finer subdivision and flag
                PairScan finer = isolate_roots(g, a, b, 4 * kScan, evals);
                scan = finer;
                rep.scan_consistent = false;
            }
            pair_has_root[{s, u}] = !scan.roots.empty();
            for (double r : scan.roots) cuts.push_back(r);
        }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    // classify every subdivision cell by its midpoint window
    std::map<OrdinalPattern, double> pattern_mass;
    std::vector<std::set<std::uint64_t>> lag_classes(static_cast<std::size_t>(n));
    bool propagation_ok = true;
    auto classify = [&](double x, double mass) {
        std::vector<double> window(static_cast<std::size_t>(n));
        for (int k = 0; k < n; ++k) window[static_cast<std::size_t>(k)] = iterate(x, k);
        evals += n;
        ComparisonMatrix c(n);
        try {
            c = comparison_encoding(window);
        } catch (const TieError&) {
            return;  // sampled a boundary point; neighbouring cells cover it
        }
        pattern_mass[pattern_from_comparisons(c)] += mass;
        for (int d = 1; d < n; ++d) lag_classes[d].insert(c.lag_bits(d));
        // propagation rule: for w_s = w_t and t < n-1, applying T preserves
        // the comparison on an increasing branch and flips it on a decreasing one
        for (int s = 0; s < n; ++s) {
            for (int u = s + 1; u + 1 < n; ++u) {
                if (w.word[s] != w.word[u]) continue;
                const bool decreasing =
                    t.branches()[w.word[s]].direction == Direction::decreasing;
                const bool lhs = c.bit(s, u);
                const bool rhs = c.bit(s + 1, u + 1);
                if (lhs != (decreasing ? !rhs : rhs)) propagation_ok = false;
            }
        }
    };

    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double lo = cuts[i], hi = cuts[i + 1];
        const double len = hi - lo;
        if (len <= 0.0) continue;
        const double mass = mu.interval_mass(lo, hi);
        classify(0.5 * (lo + hi), mass);
        if (len < kTinyCell) {
            classify(lo + 0.05 * len, 0.0);
            classify(hi - 0.05 * len, 0.0);
        }
    }

    for (const auto& [pat, mass] : pattern_mass) {
        rep.patterns.push_back(pat);
        rep.pattern_measures.push_back(mass);
    }
    rep.count = rep.patterns.size();
    rep.roots.assign(cuts.begin() + 1, cuts.end() - 1);

    rep.per_d_counts.resize(static_cast<std::size_t>(n) - 1);
    std::uint64_t prod = 1;
    bool case_split_ok = true;
    for (int d = 1; d < n; ++d) {
        const std::uint64_t cnt = lag_classes[d].size();
        rep.per_d_counts[d - 1] = cnt;
        prod *= cnt;
        if (w.word[n - 1 - d] == w.word[n - 1]) {
            if (cnt > 2) case_split_ok = false;
        } else {
            if (cnt != 1) case_split_ok = false;
        }
    }

    bool constant_ok = true;
    for (int s = 0; s < n; ++s)
        for (int u = s + 1; u < n; ++u)
            if (w.word[s] != w.word[u] && pair_has_root[{s, u}]) constant_ok = false;

    rep.count_within_bound = rep.count <= rep.bound;
    rep.factorization_ok = rep.count <= prod;
    rep.per_d_case_split_ok = case_split_ok;
    rep.constant_bits_ok = constant_ok;
    rep.propagation_ok = propagation_ok;
    return rep;
}

std::vector<std::uint64_t> per_d_factorization(const PiecewiseMonotoneMap& t,
                                               const InvariantMeasure& mu,
                                               const CylinderIndex& w) {
    CompatReport rep = compatible_patterns_exact(t, mu, w);
    if (!rep.factorization_ok)
        throw Error("per_d_factorization: |S_n| exceeds the per-d product for word " +
                    w.to_string());
    if (!rep.per_d_case_split_ok)
        throw Error("per_d_factorization: case split violated for word " + w.to_string());
    return rep.per_d_counts;
}

std::set<OrdinalPattern> sampled_patterns(const PiecewiseMonotoneMap& t, const CylinderIndex& w,
                                          std::uint64_t count, std::uint64_t seed) {
    const IntervalUnion cyl = t.cylinder(w);
    std::set<OrdinalPattern> out;
    if (cyl.empty() || cyl.length() <= 0.0) return out;
    const Interval c = cyl.cells().front();
    const int n = static_cast<int>(w.length());
    std::vector<double> window(static_cast<std::size_t>(n));
    for (std::uint64_t i = 0; i < count; ++i) {
        const double x = c.lo + (c.hi - c.lo) * counter_uniform(seed, 0xC0917, i);
        for (int k = 0; k < n; ++k) window[static_cast<std::size_t>(k)] = t.eval_pinned(x, w, k);
        try {
            out.insert(pattern_of(window, TiePolicy::discard));
        } catch (const TieDiscard&) {
        }
    }
    return out;
}

LemmaSummary verify_lemma(const PiecewiseMonotoneMap& t, const InvariantMeasure& mu, int n_max,
                          std::uint64_t eval_budget) {
    if (n_max < 2 || n_max > 8)
        throw ConfigError("verify_lemma: n_max must be in 2..8 (combinatorial budget)");

    LemmaSummary sum;
    sum.n_max = n_max;

    std::vector<int> real_branches;
    for (std::size_t i = 0; i < t.branches().size(); ++i)
        if (!t.branches()[i].is_singleton) real_branches.push_back(static_cast<int>(i));

    for (int n = 2; n <= n_max; ++n) {
        double weighted_log = 0.0;
        double resolved_mass = 0.0;

        std::vector<int> word;
        auto dfs = [&](auto&& self) -> void {
            if (static_cast<int>(word.size()) == n) {
                CylinderIndex w{std::vector<int>(word)};
                CompatReport rep;
                try {
                    rep = compatible_patterns_exact(t, mu, w, eval_budget);
                } catch (const EmptyCylinderError&) {
                    return;
                }
                ++sum.words_checked;
                if (!rep.count_within_bound) {
                    ++sum.violations;
                    std::ostringstream os;
                    os << "pattern-count bound violated: word " << w.to_string() << ", count "
                       << rep.count << " > bound " << rep.bound << ", cylinder ["
                       << rep.cylinder.lo << ", " << rep.cylinder.hi << "], roots:";
                    for (double r : rep.roots) os << " " << r;
                    throw Error(os.str());
                }
                sum.max_count_over_bound_ratio =
                    std::max(sum.max_count_over_bound_ratio,
                             static_cast<double>(rep.count) / static_cast<double>(rep.bound));
                if (rep.count == rep.bound && rep.bound >= 2 &&
                    sum.equality_witnesses.size() < 64)
                    sum.equality_witnesses.push_back(w);
                if (!rep.scan_consistent) sum.all_scans_consistent = false;
                if (!rep.factorization_ok || !rep.per_d_case_split_ok ||
                    !rep.constant_bits_ok || !rep.propagation_ok)
                    sum.all_side_checks_ok = false;
                weighted_log += rep.cylinder_measure * std::log(static_cast<double>(rep.count));
                resolved_mass += rep.cylinder_measure;
                return;
            }
            for (int label : real_branches) {
                word.push_back(label);
                // prune on empty prefix cylinders
                if (t.cylinder(CylinderIndex{std::vector<int>(word)}).length() > 0.0)
                    self(self);
                word.pop_back();
            }
        };
        dfs(dfs);

        sum.error_terms.push_back(weighted_log / n);
        if (n == n_max) sum.tail_word_mass = std::max(0.0, 1.0 - resolved_mass);
    }
    return sum;
}

}  // namespace ordent
