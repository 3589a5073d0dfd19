#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ordent/interval.hpp"
#include "ordent/maps.hpp"

namespace ordent {

/// phi(x) = -x ln x, extended by phi(0) = 0; the Shannon entropy summand.
inline double phi(double x) { return x > 0.0 ? -x * std::log(x) : 0.0; }

/// An absolutely continuous invariant probability measure on the ambient
/// interval, given as a density/CDF/quantile triple.  interval_mass is a
/// cancellation-safe form of cdf(hi) - cdf(lo); the builtins supply closed
/// forms.
struct InvariantMeasure {
    std::string name;
    std::function<double(double)> density;
    std::function<double(double)> cdf;
    std::function<double(double)> quantile;
    std::function<double(double, double)> interval_mass;

    double mass(const Interval& iv) const {
        return iv.is_empty() ? 0.0 : interval_mass(iv.lo, iv.hi);
    }
};

/// Builtin measures: "lebesgue" (uniform on [0,1]), "gauss"
/// (density 1/((1+x) ln 2)), "arcsine" (density 1/(pi sqrt(x(1-x)))).
InvariantMeasure make_measure(const std::string& name);

/// An entropy in nats together with its certified truncation error: the true
/// quantity lies in [value, value + tail_bound].
struct EntropyValue {
    double value = 0.0;
    double tail_bound = 0.0;
    std::size_t cell_count = 0;
};

/// mu(A) as the sum of per-cell masses (compensated summation).
double measure_of(const InvariantMeasure& mu, const IntervalUnion& a);

/// `count` i.i.d. draws from mu via quantile transform of the counter-based
/// uniform stream; bit-reproducible for a given seed under any parallel split.
std::vector<double> sample(const InvariantMeasure& mu, std::uint64_t seed, std::size_t count);

/// Value of draw number `index` of the same stream sample() uses.
double sample_at(const InvariantMeasure& mu, std::uint64_t seed, std::uint64_t index);

/// H(P) = sum of phi(mu(P_i)) over resolved cells.  A tail cell contributes
/// no value but a tail_bound: the partition's certified entropy bound when it
/// carries one (countable truncations such as the Gauss monotony partition),
/// otherwise the single-cell bound phi(min(beta, 1/e)) for tail measure bound
/// beta, i.e. the tail treated as one unresolved cell.
EntropyValue shannon_entropy(const InvariantMeasure& mu, const IntervalPartition& p);

/// H(M) for the Gauss monotony partition: partial sum over digits n <= n_max
/// of phi(log2((n+1)^2/(n(n+2)))) plus the certified closed-form tail bound.
/// Requires n_max >= 3.
EntropyValue gauss_monotony_entropy(std::int64_t n_max);

/// Certified upper bound on sum_{n > n_from} phi(mu(M_n)) for the Gauss map:
/// sum of (ln ln 2 + 2 ln n)/(n^2 ln 2) over a leading chunk plus an integral
/// remainder.  Valid for n_from >= 1.
double gauss_entropy_tail_bound(std::int64_t n_from);

/// |mu(T^{-1}A) - mu(A)| as the distance from mu(A) to the certified interval
/// [mu(resolved), mu(resolved) + tail bound]; zero means invariance holds
/// within the truncation slack.
double check_invariance(const PiecewiseMonotoneMap& t, const InvariantMeasure& mu,
                        const IntervalUnion& a);

}  // namespace ordent
