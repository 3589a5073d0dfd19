#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ordent {

/// Ordinal pattern of a window (x_0, ..., x_{n-1}): the permutation pi with
/// x_{pi_0} <= x_{pi_1} <= ... <= x_{pi_{n-1}}, i.e. pi lists positions in
/// ascending value order.  Worked example: window (0.2, 0.5, 0.1) sorts as
/// x_2 < x_0 < x_1, so pi = (2, 0, 1).  This is *not* the inverse rank-vector
/// convention.
struct OrdinalPattern {
    std::vector<std::uint8_t> pi;

    int order() const { return static_cast<int>(pi.size()); }
    bool operator==(const OrdinalPattern&) const = default;
    bool operator<(const OrdinalPattern& o) const { return pi < o.pi; }

    /// Prints as a tuple, e.g. "(2,0,1)".
    std::string to_string() const;
};

enum class TiePolicy {
    strict,   ///< exact tie throws TieError
    discard,  ///< exact tie throws TieDiscard, which estimators count
};

/// Pairwise-comparison encoding of a window: bit (s,t), s < t, is 1 iff
/// x_s <= x_t.  The index pairs form the set E_n; the upper triangle is
/// bit-packed row-wise.
class ComparisonMatrix {
  public:
    explicit ComparisonMatrix(int n);

    int order() const { return n_; }

    bool bit(int s, int t) const { return bits_[idx(s, t)]; }
    void set_bit(int s, int t, bool v) { bits_[idx(s, t)] = v; }

    /// Pairs (s,t) in E_n with t - s = d (the lag-d class E_n^d), in order.
    std::vector<std::pair<int, int>> lag_pairs(int d) const;

    /// Bits restricted to E_n^d, packed low-to-high in pair order.
    std::uint64_t lag_bits(int d) const;

    bool operator==(const ComparisonMatrix&) const = default;

  private:
    std::size_t idx(int s, int t) const;
    int n_;
    std::vector<bool> bits_;
};

/// Pattern of a window.  Throws TieError (strict) or TieDiscard (discard) on
/// an exact tie between two entries; ties are a null event for aperiodic maps.
OrdinalPattern pattern_of(std::span<const double> window, TiePolicy policy = TiePolicy::strict);

/// All pairwise comparison bits of a tie-free window.
ComparisonMatrix comparison_encoding(std::span<const double> window);

/// The unique pattern consistent with C.  Throws InconsistentComparisonsError
/// when no permutation matches (non-transitive bits).
OrdinalPattern pattern_from_comparisons(const ComparisonMatrix& c);

/// Lehmer-style bijective rank within the n! patterns of order n;
/// rank(identity) = 0.  Valid for n <= 20 (fits in 64 bits).
std::uint64_t rank(const OrdinalPattern& p);
OrdinalPattern unrank(std::uint64_t k, int n);

std::uint64_t factorial(int n);

}  // namespace ordent
