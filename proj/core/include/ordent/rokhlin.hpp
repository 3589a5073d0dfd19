#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ordent/interval.hpp"
#include "ordent/maps.hpp"
#include "ordent/measures.hpp"

namespace ordent {

/// Base of a Rokhlin tower: B, T^{-1}(B), ..., T^{-(d-1)}(B) pairwise
/// disjoint with mu(B) >= (1-eps)/d.
struct RokhlinTower {
    IntervalUnion base;
    int height = 1;
    double base_measure = 0.0;
    double epsilon = 0.0;            ///< the eps the construction targeted
    std::string verification;        ///< "exact" or "statistical(...)"
};

enum class TowerStrategy { exact_search, first_return };

/// Find a tower base for an aperiodic builtin map.
///
/// exact_search runs a deterministic local search over dyadic-grid cell sets
/// whose return-conflict structure is computed in integer arithmetic, then
/// certifies the result with exact interval-union preimage intersections.
/// Requires a finitely-branched map whose preimages are exactly computable.
///
/// first_return samples the hitting time of a small quantile-centred seed
/// interval, takes the levels with hitting time = 0 mod d, approximates by
/// grid intervals and verifies disjointness statistically (99% Hoeffding).
///
/// Throws SearchExhaustedError with the best measure found.
RokhlinTower build_base(const PiecewiseMonotoneMap& t, const InvariantMeasure& mu, int d,
                        double eps, TowerStrategy strategy = TowerStrategy::exact_search,
                        std::uint64_t seed = 1);

/// A measurable target to be approximated by a finite interval union.
struct ApproxTarget {
    std::function<bool(double)> contains;
    Interval support = Interval::closed(0.0, 1.0);
    std::optional<IntervalUnion> exact;  ///< supplied when the target already is a union
};

/// Finite union A with estimated mu(A ∆ target) <= eps; the estimate includes
/// a 99%-confidence sampling slack.  Throws BudgetExceededError when the
/// refinement cannot reach eps within budget.
IntervalUnion approximate_by_intervals(const ApproxTarget& target, const InvariantMeasure& mu,
                                       double eps, std::uint64_t seed = 1,
                                       std::uint64_t budget = 1u << 22);

/// The interval partition Q of the tower theorem, built from trimmed tower
/// floors split along a refinement partition P assembled from iterated
/// preimages of the floor endpoints and the monotony boundaries.
struct QPartition {
    IntervalPartition cells;
    std::vector<std::size_t> good_set;  ///< labels J~ (cells inside trimmed floors)
    double epsilon = 0.0;
    int height = 1;
};

/// Builds Q from the monotony partition M and disjoint base intervals A.
/// All preimages must be exactly computable (no truncation tail).
/// Throws CellExplosionError past `cell_budget` cells.
QPartition build_q_partition(const PiecewiseMonotoneMap& t, const IntervalPartition& m,
                             const std::vector<Interval>& a, int d, double epsilon = 0.0,
                             std::uint64_t cell_budget = 1'000'000);

struct QReport {
    bool item_i = false;    ///< countably many intervals partitioning the domain
    bool item_ii = false;   ///< Q_j ∩ T^{-k}(Q_j) = ∅ for good j, k < d
    bool item_iii = false;  ///< H(Q) finite
    bool item_iv = false;   ///< mu(good cells) >= 1 - eps
    double good_mass = 0.0;
    EntropyValue entropy;
    double epsilon_used = 0.0;
    bool all_pass() const { return item_i && item_ii && item_iii && item_iv; }
};

QReport verify_q_partition(const PiecewiseMonotoneMap& t, const InvariantMeasure& mu,
                           const QPartition& q,
                           std::optional<double> eps_override = std::nullopt);

struct VisitReport {
    std::uint64_t windows = 0;
    std::uint64_t violations = 0;
    double bound = 0.0;       ///< (n-2)/d + 1
    std::uint64_t max_count = 0;
};

/// Samples N windows of length n and checks that orbit visits to B at times
/// s <= n-2 never exceed (n-2)/d + 1.
VisitReport visit_bound_check(const PiecewiseMonotoneMap& t, const InvariantMeasure& mu,
                              const IntervalUnion& b, int d, int n, std::uint64_t n_windows,
                              std::uint64_t seed);

}  // namespace ordent
