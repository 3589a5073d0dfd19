#include "ordent/estimators.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <numbers>
#include <thread>

#include "ordent/errors.hpp"
#include "ordent/rng.hpp"

namespace ordent {

void PatternDistribution::add(std::uint64_t pattern_rank, std::uint64_t window_index) {
    counts[pattern_rank][window_index % kBlocks] += 1;
    ++total;
}

std::uint64_t PatternDistribution::count_of(std::uint64_t pattern_rank) const {
    auto it = counts.find(pattern_rank);
    if (it == counts.end()) return 0;
    std::uint64_t s = 0;
    for (auto c : it->second) s += c;
    return s;
}

PatternDistribution PatternDistribution::merge(const PatternDistribution& a,
                                               const PatternDistribution& b) {
    if (a.n != 0 && b.n != 0 && a.n != b.n)
        throw Error("PatternDistribution::merge: mismatched orders");
    PatternDistribution out = a;
    out.n = a.n ? a.n : b.n;
    for (const auto& [rank, blocks] : b.counts) {
        auto& dst = out.counts[rank];
        for (int i = 0; i < kBlocks; ++i) dst[i] += blocks[i];
    }
    out.total += b.total;
    out.discarded_ties += b.discarded_ties;
    return out;
}

std::string estimator_name(Estimator e) {
    switch (e) {
        case Estimator::plugin: return "plugin";
        case Estimator::miller_madow: return "miller_madow";
        case Estimator::quotient: return "quotient";
        case Estimator::difference: return "difference";
    }
    return "?";
}

bool EntropyEstimate::has_flag(const std::string& f) const {
    return std::find(flags.begin(), flags.end(), f) != flags.end();
}

namespace {

double kahan(const std::vector<double>& xs) {
    double s = 0.0, c = 0.0;
    for (double x : xs) {
        const double y = x - c;
        const double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    return s;
}

// Plugin (or Miller-Madow) entropy of a histogram given as (count, blocks)
// rows, plus a leave-one-block-out jackknife standard error.  Rows must come
// in a deterministic order.
struct HistEntropy {
    double value = 0.0;      // entropy in nats (not divided by n)
    double std_error = 0.0;  // jackknife SE of value
};

HistEntropy hist_entropy(const std::vector<std::array<std::uint64_t, PatternDistribution::kBlocks>>& rows,
                         std::uint64_t total, bool miller_madow) {
    constexpr int kB = PatternDistribution::kBlocks;
    auto entropy_of = [&](int skip_block) {
        std::uint64_t tot = 0;
        for (const auto& r : rows)
            for (int b = 0; b < kB; ++b)
                if (b != skip_block) tot += r[b];
        if (tot == 0) return 0.0;
        double h = 0.0, comp = 0.0;
        std::uint64_t distinct = 0;
        for (const auto& r : rows) {
            std::uint64_t c = 0;
            for (int b = 0; b < kB; ++b)
                if (b != skip_block) c += r[b];
            if (c == 0) continue;
            ++distinct;
            const double p = static_cast<double>(c) / static_cast<double>(tot);
            const double y = phi(p) - comp;
            const double t = h + y;
            comp = (t - h) - y;
            h = t;
        }
        if (miller_madow && distinct > 0)
            h += static_cast<double>(distinct - 1) / (2.0 * static_cast<double>(tot));
        return h;
    };

    HistEntropy out;
    out.value = entropy_of(-1);
    // jackknife over non-empty blocks
    std::vector<double> loo;
    for (int b = 0; b < kB; ++b) {
        std::uint64_t block_total = 0;
        for (const auto& r : rows) block_total += r[b];
        if (block_total == 0) continue;
        loo.push_back(entropy_of(b));
    }
    const std::size_t nb = loo.size();
    if (nb >= 2 && total > 0) {
        double mean = 0.0;
        for (double v : loo) mean += v;
        mean /= static_cast<double>(nb);
        double ss = 0.0;
        for (double v : loo) ss += (v - mean) * (v - mean);
        out.std_error = std::sqrt(ss * static_cast<double>(nb - 1) / static_cast<double>(nb));
    }
    return out;
}

}  // namespace

PatternDistribution empirical_pattern_distribution(const PiecewiseMonotoneMap& t,
                                                   const InvariantMeasure& mu, int n,
                                                   std::uint64_t n_samples, std::uint64_t seed,
                                                   int threads) {
    if (n < 2) throw ConfigError("empirical_pattern_distribution: need n >= 2");
    if (threads < 1) threads = 1;

    auto run_range = [&](std::uint64_t lo, std::uint64_t hi) {
        PatternDistribution d;
        d.n = n;
        std::vector<double> window(static_cast<std::size_t>(n));
        for (std::uint64_t i = lo; i < hi; ++i) {
            window[0] = sample_at(mu, seed, i);
            for (int k = 1; k < n; ++k) window[k] = t.eval(window[k - 1]);
            try {
                const OrdinalPattern p = pattern_of(window, TiePolicy::discard);
                d.add(rank(p), i);
            } catch (const TieDiscard&) {
                ++d.discarded_ties;
            }
        }
        return d;
    };

    if (threads == 1 || n_samples < 4096) return run_range(0, n_samples);

    // fixed chunk grid merged in order: worker count never changes the result
    const std::uint64_t n_chunks = 256;
    std::vector<PatternDistribution> parts(n_chunks);
    std::vector<std::thread> pool;
    std::atomic<std::uint64_t> next{0};
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::uint64_t c = next.fetch_add(1);
                if (c >= n_chunks) return;
                const std::uint64_t lo = n_samples * c / n_chunks;
                const std::uint64_t hi = n_samples * (c + 1) / n_chunks;
                parts[c] = run_range(lo, hi);
            }
        });
    }
    for (auto& th : pool) th.join();
    PatternDistribution out;
    out.n = n;
    for (const auto& p : parts) out = PatternDistribution::merge(out, p);
    return out;
}

EntropyEstimate permutation_entropy_estimate(const PatternDistribution& dist,
                                             Estimator estimator) {
    if (dist.total == 0)
        throw EmptyDistributionError("permutation_entropy_estimate: empty distribution");
    if (estimator != Estimator::plugin && estimator != Estimator::miller_madow)
        throw ConfigError("permutation_entropy_estimate: estimator must be plugin/miller_madow");

    std::vector<std::array<std::uint64_t, PatternDistribution::kBlocks>> rows;
    rows.reserve(dist.counts.size());
    for (const auto& [rank_key, blocks] : dist.counts) rows.push_back(blocks);

    const HistEntropy he = hist_entropy(rows, dist.total, estimator == Estimator::miller_madow);
    EntropyEstimate out;
    out.n = dist.n;
    out.samples = dist.total;
    out.estimator = estimator;
    out.value = he.value / dist.n;
    out.std_error = he.std_error / dist.n;
    if (dist.distinct() * 10 > dist.total) out.flags.push_back("undersampled");
    return out;
}

namespace {

// Enumerate positive-measure cylinders of P^(depth) by suffix recursion:
// S(j . w) = P_j ∩ T^{-1}(S(w)), so each node costs one preimage shared by
// all of its children.  Masses are recorded in DFS order (deterministic).
struct CylinderEnumerator {
    const PiecewiseMonotoneMap& t;
    const IntervalPartition& p;
    const InvariantMeasure& mu;
    std::uint64_t budget;
    std::uint64_t nodes = 0;
    std::vector<double> masses;

    void run(int depth) {
        masses.clear();
        std::vector<IntervalUnion> cell_unions;
        cell_unions.reserve(p.size());
        for (const auto& cell : p.cells())
            cell_unions.push_back(IntervalUnion::from_normalized({cell}));
        IntervalUnion omega = IntervalUnion::from_normalized({t.domain()});
        rec(depth, omega, cell_unions);
    }

    void rec(int remaining, const IntervalUnion& suffix_set,
             const std::vector<IntervalUnion>& cell_unions) {
        IntervalUnion pulled = t.preimage(suffix_set).resolved;
        for (std::size_t j = 0; j < cell_unions.size(); ++j) {
            IntervalUnion s = cell_unions[j].intersect(pulled);
            if (s.length() <= 0.0) continue;
            if (++nodes > budget)
                throw CellExplosionError("partition_entropy_rate_estimate: cylinder budget exceeded");
            if (remaining == 1) {
                masses.push_back(measure_of(mu, s));
            } else {
                rec(remaining - 1, s, cell_unions);
            }
        }
    }
};

double exact_level_entropy(const PiecewiseMonotoneMap& t, const InvariantMeasure& mu,
                           const IntervalPartition& p, int depth, std::uint64_t budget) {
    if (depth == 0) return 0.0;
    CylinderEnumerator e{t, p, mu, budget};
    e.run(depth);
    std::vector<double> terms;
    terms.reserve(e.masses.size());
    for (double m : e.masses) terms.push_back(phi(m));
    return kahan(terms);
}

// Encoded-word histogram for the sampled mode; packs words into u64 when the
// alphabet and depth allow, with an ordered-map fallback otherwise.
struct WordHist {
    bool packed;
    std::uint64_t base;
    std::map<std::uint64_t, std::array<std::uint64_t, PatternDistribution::kBlocks>> packed_counts;
    std::map<std::vector<std::int32_t>, std::array<std::uint64_t, PatternDistribution::kBlocks>>
        vec_counts;
    std::uint64_t total = 0;

    explicit WordHist(std::size_t alphabet, int depth) {
        base = static_cast<std::uint64_t>(alphabet) + 2;
        packed = depth * std::log2(static_cast<double>(base)) < 62.0;
    }

    void add(const std::vector<std::int32_t>& word, std::uint64_t index) {
        const int b = static_cast<int>(index % PatternDistribution::kBlocks);
        if (packed) {
            std::uint64_t key = 0;
            for (auto s : word) key = key * base + static_cast<std::uint64_t>(s + 1);
            packed_counts[key][b] += 1;
        } else {
            vec_counts[word][b] += 1;
        }
        ++total;
    }

    std::vector<std::array<std::uint64_t, PatternDistribution::kBlocks>> rows() const {
        std::vector<std::array<std::uint64_t, PatternDistribution::kBlocks>> out;
        if (packed) {
            out.reserve(packed_counts.size());
            for (const auto& [k, v] : packed_counts) out.push_back(v);
        } else {
            out.reserve(vec_counts.size());
            for (const auto& [k, v] : vec_counts) out.push_back(v);
        }
        return out;
    }
};

}  // namespace

EntropyEstimate partition_entropy_rate_estimate(const PiecewiseMonotoneMap& t,
                                                const InvariantMeasure& mu,
                                                const IntervalPartition& p, int n,
                                                RateMode mode, Estimator estimator,
                                                std::uint64_t n_samples, std::uint64_t seed,
                                                std::uint64_t cell_budget) {
    if (n < 1) throw ConfigError("partition_entropy_rate_estimate: need n >= 1");
    if (estimator != Estimator::quotient && estimator != Estimator::difference)
        throw ConfigError("partition_entropy_rate_estimate: estimator must be quotient/difference");

    EntropyEstimate out;
    out.n = n;
    out.estimator = estimator;
    if (p.tail() && p.tail()->entropy_bound) out.tail_bound = *p.tail()->entropy_bound;

    if (mode == RateMode::exact_cells) {
        const double h_n = exact_level_entropy(t, mu, p, n, cell_budget);
        if (estimator == Estimator::quotient) {
            out.value = h_n / n;
        } else {
            const double h_prev = exact_level_entropy(t, mu, p, n - 1, cell_budget);
            out.value = h_n - h_prev;
        }
        return out;
    }

    // sampled: code N fresh orbits with the partition's cell indices
    if (n_samples == 0) throw ConfigError("sampled mode needs n_samples > 0");
    WordHist hist(p.size(), n);
    WordHist hist_prev(p.size(), n - 1);
    std::vector<std::int32_t> word(static_cast<std::size_t>(n));
    for (std::uint64_t i = 0; i < n_samples; ++i) {
        double x = sample_at(mu, seed, i);
        for (int k = 0; k < n; ++k) {
            const auto cell = p.cell_of(x);
            word[k] = cell ? static_cast<std::int32_t>(*cell) : -1;
            if (k + 1 < n) x = t.eval(x);
        }
        hist.add(word, i);
        if (estimator == Estimator::difference && n >= 2) {
            std::vector<std::int32_t> prefix(word.begin(), word.end() - 1);
            hist_prev.add(prefix, i);
        }
    }
    const HistEntropy he = hist_entropy(hist.rows(), hist.total, false);
    out.samples = n_samples;
    if (estimator == Estimator::quotient) {
        out.value = he.value / n;
        out.std_error = he.std_error / n;
    } else {
        const HistEntropy hp = hist_entropy(hist_prev.rows(), hist_prev.total, false);
        out.value = he.value - hp.value;
        out.std_error = he.std_error + hp.std_error;
    }
    return out;
}

namespace {

double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double b,
                            double fa, double fm, double fb, double whole, double tol,
                            int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0) return left + right;
    if (std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, 48);
}

}  // namespace

double rokhlin_formula_oracle(const PiecewiseMonotoneMap& t, double tol) {
    const double ln2 = std::numbers::ln2;
    if (t.name() == "doubling" || t.name() == "tent") {
        // |T'| = 2 everywhere: the integral of a constant against a
        // probability density; quadrature kept for uniformity
        const InvariantMeasure mu = make_measure("lebesgue");
        return adaptive_simpson([&](double x) { return ln2 * mu.density(x); }, 0.0, 1.0, tol);
    }
    if (t.name() == "gauss") {
        // integral of -2 ln x / ((1+x) ln 2); log-singular at 0, handled by a
        // series on [0, delta]:  -2/ln2 * sum (-1)^k * int_0^d x^k ln x dx
        const double delta = 1e-3;
        double series = 0.0;
        const double ld = std::log(delta);
        double dk = delta;  // delta^{k+1}
        for (int k = 0; k <= 12; ++k) {
            const double kk = k + 1.0;
            const double term = dk * (ld / kk - 1.0 / (kk * kk));
            series += (k % 2 == 0 ? term : -term);
            dk *= delta;
        }
        series *= -2.0 / ln2;
        const double main = adaptive_simpson(
            [&](double x) { return -2.0 * std::log(x) / ((1.0 + x) * ln2); }, delta, 1.0,
            tol * 0.5);
        return series + main;
    }
    if (t.name() == "logistic") {
        // substitute x = sin^2(pi u / 2): the arcsine measure becomes uniform
        // and the integrand is ln(4 |cos(pi u)|), log-singular at u = 1/2
        const double pi = std::numbers::pi;
        const double delta = 1e-4;
        const double main = adaptive_simpson(
            [&](double u) { return std::log(4.0 * std::abs(std::cos(pi * u))); }, 0.0,
            0.5 - delta, tol * 0.25);
        // int_{1/2-delta}^{1/2} ln(4 cos(pi u)) du = int_0^delta ln(4 sin(pi v)) dv
        const double near = delta * std::log(4.0) + delta * (std::log(pi * delta) - 1.0) -
                            pi * pi * delta * delta * delta / 18.0;
        return 2.0 * (main + near);
    }
    throw Error("rokhlin_formula_oracle: unsupported map " + t.name());
}

BoundsReport check_bounds(const EntropyEstimate& hpe, const EntropyEstimate& hks_lower,
                          double hks_ref) {
    BoundsReport r;
    r.hpe = hpe.value;
    r.hks_ref = hks_ref;
    r.slack = 3.0 * hpe.std_error + hpe.tail_bound + hks_lower.tail_bound +
              3.0 * hks_lower.std_error;
    r.lower_margin = hpe.value - (hks_ref - r.slack);
    r.upper_margin = (hks_ref + std::numbers::ln2 + r.slack) - hpe.value;
    r.pass = r.lower_margin >= 0.0 && r.upper_margin >= 0.0;
    return r;
}

}  // namespace ordent
