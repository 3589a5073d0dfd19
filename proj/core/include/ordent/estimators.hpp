#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ordent/maps.hpp"
#include "ordent/measures.hpp"
#include "ordent/ordinal.hpp"

namespace ordent {

/// Mergeable ordinal-pattern histogram.  Counts are split over a fixed number
/// of sample blocks (by window index mod kBlocks) so the jackknife error
/// estimate survives merging; block assignment depends only on the global
/// window index, never on the worker layout.
struct PatternDistribution {
    static constexpr int kBlocks = 16;

    int n = 0;
    std::map<std::uint64_t, std::array<std::uint64_t, kBlocks>> counts;  // rank -> per-block
    std::uint64_t total = 0;
    std::uint64_t discarded_ties = 0;

    void add(std::uint64_t pattern_rank, std::uint64_t window_index);
    std::uint64_t count_of(std::uint64_t pattern_rank) const;
    std::size_t distinct() const { return counts.size(); }

    static PatternDistribution merge(const PatternDistribution& a, const PatternDistribution& b);
};

enum class Estimator { plugin, miller_madow, quotient, difference };

std::string estimator_name(Estimator e);

/// An entropy-rate estimate in nats with estimator metadata.
struct EntropyEstimate {
    double value = 0.0;
    int n = 0;
    std::uint64_t samples = 0;
    double std_error = 0.0;
    Estimator estimator = Estimator::plugin;
    double tail_bound = 0.0;
    std::vector<std::string> flags;

    bool has_flag(const std::string& f) const;
};

/// Draw N fresh start points from mu, build length-n forward windows, bin the
/// ordinal patterns.  Ties are discarded and counted, never jittered.  The
/// result is bit-identical for a fixed seed regardless of `threads`.
PatternDistribution empirical_pattern_distribution(const PiecewiseMonotoneMap& t,
                                                   const InvariantMeasure& mu, int n,
                                                   std::uint64_t n_samples, std::uint64_t seed,
                                                   int threads = 1);

/// Permutation entropy from a pattern histogram: H(frequencies)/n, plugin or
/// Miller-Madow corrected, with a 16-block jackknife standard error.  Flags
/// "undersampled" when distinct patterns exceed total/10.
EntropyEstimate permutation_entropy_estimate(const PatternDistribution& dist,
                                             Estimator estimator = Estimator::plugin);

enum class RateMode { exact_cells, sampled };

/// Entropy rate h(T,P) at depth n: exact_cells enumerates the positive-measure
/// cylinders of P^(n) (budget-guarded), sampled bins N coded orbit words.
/// quotient returns H(P^(n))/n, difference returns H(P^(n)) - H(P^(n-1)).
EntropyEstimate partition_entropy_rate_estimate(const PiecewiseMonotoneMap& t,
                                                const InvariantMeasure& mu,
                                                const IntervalPartition& p, int n,
                                                RateMode mode = RateMode::exact_cells,
                                                Estimator estimator = Estimator::quotient,
                                                std::uint64_t n_samples = 0,
                                                std::uint64_t seed = 0,
                                                std::uint64_t cell_budget = 10'000'000);

/// Independent KS-entropy reference: adaptive quadrature of the integral of
/// log|T'| against the invariant density, for the smooth-branch builtins.
/// The absolute quadrature error is at most tol.
double rokhlin_formula_oracle(const PiecewiseMonotoneMap& t, double tol = 1e-9);

struct BoundsReport {
    bool pass = false;
    double hpe = 0.0;
    double hks_ref = 0.0;
    double slack = 0.0;
    double lower_margin = 0.0;  ///< hpe - (hks_ref - slack); >= 0 when passing
    double upper_margin = 0.0;  ///< (hks_ref + ln2 + slack) - hpe; >= 0 when passing
};

/// Bracket check: hks_ref - slack <= hpe <= hks_ref + ln 2 + slack with
/// slack = 3 * std_error + tail bounds of both estimates.
BoundsReport check_bounds(const EntropyEstimate& hpe, const EntropyEstimate& hks_lower,
                          double hks_ref);

}  // namespace ordent
