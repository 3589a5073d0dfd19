#include "ordent/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ordent/errors.hpp"
#include "ordent/rng.hpp"

namespace ordent {

namespace {

constexpr std::uint64_t kSampleStream = 0x5a17;

double kahan_sum(const std::vector<double>& terms) {
    double s = 0.0, c = 0.0;
    for (double x : terms) {
        const double y = x - c;
        const double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    return s;
}

}  // namespace

InvariantMeasure make_measure(const std::string& name) {
    const double ln2 = std::numbers::ln2;
    if (name == "lebesgue") {
        return InvariantMeasure{
            "lebesgue",
            [](double) { return 1.0; },
            [](double x) { return std::clamp(x, 0.0, 1.0); },
            [](double u) { return u; },
            [](double lo, double hi) { return hi - lo; },
        };
    }
    if (name == "gauss") {
        return InvariantMeasure{
            "gauss",
            [ln2](double x) { return 1.0 / ((1.0 + x) * ln2); },
            [ln2](double x) { return std::log1p(std::clamp(x, 0.0, 1.0)) / ln2; },
            [](double u) { return std::exp2(u) - 1.0; },
            // log2(1+hi) - log2(1+lo), cancellation-free
            [ln2](double lo, double hi) { return std::log1p((hi - lo) / (1.0 + lo)) / ln2; },
        };
    }
    if (name == "arcsine") {
        const double pi = std::numbers::pi;
        return InvariantMeasure{
            "arcsine",
            [pi](double x) { return 1.0 / (pi * std::sqrt(std::max(x * (1.0 - x), 1e-300))); },
            [pi](double x) { return 2.0 / pi * std::asin(std::sqrt(std::clamp(x, 0.0, 1.0))); },
            [pi](double u) {
                const double s = std::sin(0.5 * pi * u);
                return s * s;
            },
            [pi](double lo, double hi) {
                return 2.0 / pi *
                       (std::asin(std::sqrt(std::clamp(hi, 0.0, 1.0))) -
                        std::asin(std::sqrt(std::clamp(lo, 0.0, 1.0))));
            },
        };
    }
    throw ConfigError("unknown measure: " + name);
}

double measure_of(const InvariantMeasure& mu, const IntervalUnion& a) {
    double s = 0.0, c = 0.0;
    for (const auto& cell : a.cells()) {
        const double y = mu.mass(cell) - c;
        const double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    return s;
}

double sample_at(const InvariantMeasure& mu, std::uint64_t seed, std::uint64_t index) {
    return mu.quantile(counter_uniform(seed, kSampleStream, index));
}

std::vector<double> sample(const InvariantMeasure& mu, std::uint64_t seed, std::size_t count) {
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = sample_at(mu, seed, i);
    return out;
}

EntropyValue shannon_entropy(const InvariantMeasure& mu, const IntervalPartition& p) {
    std::vector<double> terms;
    terms.reserve(p.size());
    for (const auto& cell : p.cells()) terms.push_back(phi(mu.mass(cell)));
    EntropyValue out;
    out.value = kahan_sum(terms);
    out.cell_count = p.size();
    if (p.tail()) {
        if (p.tail()->entropy_bound) {
            out.tail_bound = *p.tail()->entropy_bound;
        } else {
            const double beta =
                std::min(p.tail()->measure_bound, mu.mass(p.tail()->hull));
            out.tail_bound = phi(std::min(beta, 1.0 / std::numbers::e));
        }
    }
    return out;
}

double gauss_entropy_tail_bound(std::int64_t n_from) {
    if (n_from < 1) throw ConfigError("gauss_entropy_tail_bound: n_from must be >= 1");
    const double ln2 = std::numbers::ln2;
    const double c = std::log(ln2);  // ln ln 2 < 0
    // summand (c + 2 ln n)/(n^2 ln2) is positive and decreasing for n >= 2
    const std::int64_t chunk = 4096;
    double s = 0.0;
    for (std::int64_t n = n_from + 1; n <= n_from + chunk; ++n) {
        const double ln_n = std::log(static_cast<double>(n));
        s += (c + 2.0 * ln_n) / (ln2 * static_cast<double>(n) * static_cast<double>(n));
    }
    const double m = static_cast<double>(n_from + chunk);
    s += (c + 2.0 * std::log(m) + 2.0) / (ln2 * m);
    return std::max(s, 0.0);
}

EntropyValue gauss_monotony_entropy(std::int64_t n_max) {
    if (n_max < 3) throw ConfigError("gauss_monotony_entropy: n_max must be >= 3");
    const double ln2 = std::numbers::ln2;
    double s = 0.0, comp = 0.0;
    for (std::int64_t n = 1; n <= n_max; ++n) {
        const double nn = static_cast<double>(n);
        const double cell_mass = std::log1p(1.0 / (nn * (nn + 2.0))) / ln2;
        const double y = phi(cell_mass) - comp;
        const double t = s + y;
        comp = (t - s) - y;
        s = t;
    }
    EntropyValue out;
    out.value = s;
    out.tail_bound = gauss_entropy_tail_bound(n_max);
    out.cell_count = static_cast<std::size_t>(n_max);
    return out;
}

double check_invariance(const PiecewiseMonotoneMap& t, const InvariantMeasure& mu,
                        const IntervalUnion& a) {
    const PreimageResult pre = t.preimage(a);
    const double m_res = measure_of(mu, pre.resolved);
    const double m_a = measure_of(mu, a);
    const double slack = pre.tail ? pre.tail->measure_bound : 0.0;
    // distance from mu(A) to the certified interval [m_res, m_res + slack]
    return std::max({0.0, m_res - m_a, m_a - m_res - slack});
}

}  // namespace ordent
