#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ordent/interval.hpp"

namespace ordent {

enum class Direction { increasing, decreasing };

/// One monotone branch of a piecewise-monotone interval map.
struct MonotoneBranch {
    Interval domain;
    Direction direction = Direction::increasing;
    std::function<double(double)> forward;
    std::function<double(double)> inverse;  ///< inverse of forward, defined on the image
    bool is_singleton = false;              ///< degenerate single-point cell

    /// Image of the branch domain (monotone, so endpoint images suffice).
    Interval image() const;
};

/// Branch label returned by branch_of for points below the resolved branches
/// of a truncated countable map.
inline constexpr int kTailBranch = -1;

/// Word of branch labels (i_0, ..., i_{n-1}); selects the cylinder of points
/// whose first n iterates visit the prescribed monotony cells.
struct CylinderIndex {
    std::vector<int> word;

    CylinderIndex() = default;
    CylinderIndex(std::initializer_list<int> w) : word(w) {}
    explicit CylinderIndex(std::vector<int> w) : word(std::move(w)) {}

    std::size_t length() const { return word.size(); }
    std::string to_string() const;
};

/// Aggregated remainder of a truncated countable branch family.
struct MapTail {
    Interval region;                      ///< hull of all omitted branch cells
    double measure_bound = 0.0;           ///< invariant-measure mass of the region
    double entropy_bound = 0.0;           ///< certified entropy contribution bound
    std::function<double(double)> eval;   ///< exact map values inside the region
};

/// Result of a preimage computation on a truncated map: the exactly resolved
/// part plus a tail cell bounding the unresolved contribution.
struct PreimageResult {
    IntervalUnion resolved;
    std::optional<TailCell> tail;

    /// Resolved cells; throws if an unresolved tail is present.
    const IntervalUnion& exact() const;
};

/// A piecewise-monotone self-map of an interval: ordered monotone branches
/// whose domains partition the ambient interval (the monotony partition M),
/// optionally truncated to finitely many branches plus a tail region.
class PiecewiseMonotoneMap {
  public:
    PiecewiseMonotoneMap(std::string name, Interval domain,
                         std::vector<MonotoneBranch> branches,
                         std::optional<MapTail> tail = std::nullopt,
                         std::string default_measure = "lebesgue");

    const std::string& name() const { return name_; }
    const Interval& domain() const { return domain_; }
    const std::vector<MonotoneBranch>& branches() const { return branches_; }
    const std::optional<MapTail>& tail() const { return tail_; }
    /// Name of the builtin invariant measure this map preserves, if any.
    const std::string& default_measure() const { return default_measure_; }

    /// T(x); clamped into the ambient domain.  Throws OutOfDomainError.
    double eval(double x) const;

    /// Index of the branch whose cell contains x, or kTailBranch.
    int branch_of(double x) const;

    /// Exact preimage T^{-1}(A) within the resolved branches; the omitted
    /// branches contribute a tail cell with an invariant-measure bound.
    PreimageResult preimage(const IntervalUnion& a) const;

    /// Cylinder M(w) = ⋂_k T^{-k}(M_{w_k}), computed by pulling the last cell
    /// back through branch inverses.  One interval for continuous branches.
    IntervalUnion cylinder(const CylinderIndex& w) const;

    /// Iterate T^k(x) with every step pinned to the branch w_k, bypassing the
    /// cell lookup.  Continuous on the closed cylinder of w; used by the
    /// exact pattern subdivision.
    double eval_pinned(double x, const CylinderIndex& w, int iterates) const;

    /// The monotony partition M as an IntervalPartition (tail cell included).
    IntervalPartition monotony_partition() const;

  private:
    std::string name_;
    Interval domain_;
    std::vector<MonotoneBranch> branches_;
    std::optional<MapTail> tail_;
    std::string default_measure_;
};

/// Builtin maps.  Defaults follow the library conventions: gauss is truncated
/// at n_max branches (default 10^4) with a certified tail cell.
PiecewiseMonotoneMap make_doubling();
PiecewiseMonotoneMap make_tent();
PiecewiseMonotoneMap make_logistic();
PiecewiseMonotoneMap make_gauss(int n_max = 10000);

/// Lookup by name: "doubling", "tent", "logistic", "gauss".
/// Throws ConfigError for unknown names; n_max applies to gauss only.
PiecewiseMonotoneMap make_builtin(const std::string& name, int n_max = 10000);

/// Piecewise-linear custom map from its JSON description:
///   {"domain":[0,1], "pieces":[{"x0":..,"x1":..,"y0":..,"y1":..}, ...]}
/// Throws ConfigError on malformed input or a zero-slope piece.
PiecewiseMonotoneMap load_custom(const std::string& json_text);

/// Bisection-backed inverse for a monotone continuous forward map, refined to
/// 1e-14; fallback for custom nonlinear branches.
std::function<double(double)> make_bisection_inverse(std::function<double(double)> forward,
                                                     Interval domain, Direction direction);

}  // namespace ordent
