#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace ordent {

/// Straddle tolerance for split_by, in units of domain length.
inline constexpr double kSplitTol = 1e-12;

/// One interval of the real line with endpoint topology.
///
/// Endpoint flags are tracked but measure-null: every measure in scope is
/// non-atomic, so the half-open/closed distinction never moves a probability.
/// Set-equality helpers therefore compare up to null sets.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool lo_closed = false;
    bool hi_closed = false;

    Interval() = default;
    Interval(double lo_, double hi_, bool lo_c = true, bool hi_c = false)
        : lo(lo_), hi(hi_), lo_closed(lo_c), hi_closed(hi_c) {}

    static Interval empty() { return Interval(0.0, 0.0, false, false); }
    static Interval singleton(double x) { return Interval(x, x, true, true); }
    /// [lo, hi)
    static Interval half_open(double lo, double hi) { return Interval(lo, hi, true, false); }
    /// [lo, hi]
    static Interval closed(double lo, double hi) { return Interval(lo, hi, true, true); }

    bool is_empty() const { return lo > hi || (lo == hi && !(lo_closed && hi_closed)); }
    bool is_singleton() const { return lo == hi && lo_closed && hi_closed; }
    double length() const { return is_empty() ? 0.0 : hi - lo; }

    bool contains(double x) const {
        if (is_empty()) return false;
        if (x < lo || x > hi) return false;
        if (x == lo && !lo_closed) return false;
        if (x == hi && !hi_closed) return false;
        return true;
    }

    double midpoint() const { return 0.5 * (lo + hi); }

    Interval intersect(const Interval& other) const;

    /// Same point set (endpoint flags included).
    bool operator==(const Interval& other) const = default;
};

/// A finite union of pairwise disjoint intervals, sorted by lo and maximally
/// merged (no two adjacent cells can be joined into one interval).
class IntervalUnion {
  public:
    IntervalUnion() = default;
    explicit IntervalUnion(std::vector<Interval> raw) { *this = normalize(std::move(raw)); }

    static IntervalUnion normalize(std::vector<Interval> raw);

    /// Trusted constructor: `cells` must already be normalized.
    static IntervalUnion from_normalized(std::vector<Interval> cells);

    const std::vector<Interval>& cells() const { return cells_; }
    bool empty() const { return cells_.empty(); }
    std::size_t size() const { return cells_.size(); }

    double length() const;
    bool contains(double x) const;  // binary search
    Interval hull() const;

    IntervalUnion intersect(const IntervalUnion& other) const;
    IntervalUnion intersect(const Interval& other) const;
    IntervalUnion unite(const IntervalUnion& other) const;
    IntervalUnion subtract(const IntervalUnion& other) const;

    /// Lebesgue length of the symmetric difference (null-set equality check).
    double sym_diff_length(const IntervalUnion& other) const;

    bool operator==(const IntervalUnion& other) const = default;

  private:
    std::vector<Interval> cells_;
};

/// Aggregated remainder of a countable partition that was truncated to
/// finitely many resolved cells.
struct TailCell {
    Interval hull;
    double measure_bound = 0.0;            ///< upper bound on the tail's measure
    std::optional<double> entropy_bound;   ///< certified bound on the tail's
                                           ///< contribution to the Shannon entropy
                                           ///< of the underlying full partition
};

/// An indexed partition of an ambient interval into intervals, with an
/// optional aggregated tail cell.  Resolved cells plus the tail cover the
/// domain up to a null set and are pairwise disjoint.
class IntervalPartition {
  public:
    IntervalPartition() = default;
    IntervalPartition(Interval domain, std::vector<Interval> cells,
                      std::vector<std::string> labels,
                      std::optional<TailCell> tail = std::nullopt);

    const Interval& domain() const { return domain_; }
    const std::vector<Interval>& cells() const { return cells_; }
    const std::vector<std::string>& labels() const { return labels_; }
    const std::optional<TailCell>& tail() const { return tail_; }
    std::size_t size() const { return cells_.size(); }

    /// Index of the resolved cell containing x, or nullopt (tail / uncovered).
    std::optional<std::size_t> cell_of(double x) const;

    /// Total length of resolved cells plus tail hull, for coverage checks.
    double coverage_length() const;

    /// The trivial one-cell partition {domain}.
    static IntervalPartition trivial(Interval domain);

  private:
    Interval domain_;
    std::vector<Interval> cells_;
    std::vector<std::string> labels_;
    std::optional<TailCell> tail_;
    std::vector<std::size_t> order_;  // cell indices sorted by lo, for lookup
};

/// Maximal disjoint sorted normalization of a raw cell list.
IntervalUnion normalize(std::vector<Interval> raw);

/// Common refinement P ∨ Q = {P_i ∩ Q_j ≠ ∅} with pair labels "i|j".
/// Tails aggregate: the result tail bounds the union of both input tails.
IntervalPartition refine(const IntervalPartition& p, const IntervalPartition& q);

/// The cells of P whose union is A, for A in the sigma-algebra generated by P
/// (up to kSplitTol in symmetric-difference length).  Throws
/// NotInSigmaAlgebraError if some cell of P straddles the boundary of A.
std::vector<std::pair<std::string, Interval>> split_by(const IntervalUnion& a,
                                                       const IntervalPartition& p);

}  // namespace ordent
