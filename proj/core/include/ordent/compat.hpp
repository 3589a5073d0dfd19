#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "ordent/maps.hpp"
#include "ordent/measures.hpp"
#include "ordent/ordinal.hpp"

namespace ordent {

/// Exact compatible-pattern set of one cylinder word, together with the
/// combinatorial bounds it is checked against.
struct CompatReport {
    CylinderIndex word;
    Interval cylinder;                   ///< the cylinder interval M(w)
    double cylinder_measure = 0.0;       ///< invariant-measure mass of M(w)
    std::vector<OrdinalPattern> patterns;
    std::vector<double> pattern_measures;  ///< mass of M(w) ∩ P_pi, same order
    std::uint64_t count = 0;               ///< |S_n(w)|
    std::uint64_t bound = 0;               ///< 2^{#matches of the last symbol}
    std::vector<std::uint64_t> per_d_counts;  ///< |F_n^d(w)| for d = 1..n-1
    std::vector<double> roots;                ///< subdivision points found

    bool count_within_bound = false;          ///< |S_n| <= 2^{#matches}
    bool factorization_ok = false;            ///< |S_n| <= prod_d |F_n^d|
    bool per_d_case_split_ok = false;         ///< =1 / <=2 per the label case split
    bool constant_bits_ok = false;            ///< no sign change when labels differ
    bool propagation_ok = false;              ///< bit(s,t) vs bit(s+1,t+1) rule
    bool scan_consistent = true;              ///< doubled-density rescan agrees
};

/// 2^{#{s in 0..n-2 : w_s = w_{n-1}}}; requires |w| >= 2.
std::uint64_t lemma_bound(const CylinderIndex& w);

/// Exact S_n(w) by subdividing the cylinder at every sign change of
/// T^s - T^t, (s,t) in E_n.  Each difference is continuous on the cylinder
/// because the word pins every iterate to one monotone branch.  Sign changes
/// are isolated by a 1024-point scan plus bisection to 1e-12; a 2048-point
/// rescan must find no new sign changes or the report is flagged.
/// Throws EmptyCylinderError / BudgetExceededError.
CompatReport compatible_patterns_exact(const PiecewiseMonotoneMap& t, const InvariantMeasure& mu,
                                       const CylinderIndex& w,
                                       std::uint64_t eval_budget = 200'000'000);

/// The per-lag counts |F_n^d(w)| from the same subdivision; verifies the
/// factorization |S_n| <= prod_d |F_n^d| and the {=1, <=2} case split.
std::vector<std::uint64_t> per_d_factorization(const PiecewiseMonotoneMap& t,
                                               const InvariantMeasure& mu,
                                               const CylinderIndex& w);

/// Patterns seen by uniform sampling inside the cylinder; used to cross-check
/// that sampling never finds a pattern missing from the exact set.
std::set<OrdinalPattern> sampled_patterns(const PiecewiseMonotoneMap& t, const CylinderIndex& w,
                                          std::uint64_t count, std::uint64_t seed);

struct LemmaSummary {
    int n_max = 0;
    std::uint64_t words_checked = 0;
    std::uint64_t violations = 0;
    double max_count_over_bound_ratio = 0.0;
    std::vector<double> error_terms;  ///< (1/n) sum mu(M(w)) ln|S_n(w)|, n = 2..n_max
    std::vector<CylinderIndex> equality_witnesses;  ///< count == bound >= 2
    double tail_word_mass = 0.0;  ///< length-n_max word mass lost to truncation
    bool all_scans_consistent = true;
    bool all_side_checks_ok = true;  ///< factorization, case split, propagation
};

/// Exhaustively checks the pattern-count bound over all positive-measure
/// words of length 2..n_max (depth-first with empty-cylinder pruning).
/// A bound violation aborts with a reproduction bundle in the message.
LemmaSummary verify_lemma(const PiecewiseMonotoneMap& t, const InvariantMeasure& mu, int n_max,
                          std::uint64_t eval_budget = 2'000'000'000);

}  // namespace ordent
