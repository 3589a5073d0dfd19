#include "ordent/ordinal.hpp"

#include <algorithm>
#include <numeric>

#include "ordent/errors.hpp"

namespace ordent {

std::string OrdinalPattern::to_string() const {
    std::string s = "(";
    for (std::size_t i = 0; i < pi.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(static_cast<int>(pi[i]));
    }
    s += ")";
    return s;
}

ComparisonMatrix::ComparisonMatrix(int n) : n_(n), bits_(static_cast<std::size_t>(n) * (n - 1) / 2) {}

std::size_t ComparisonMatrix::idx(int s, int t) const {
    // row-wise upper triangle: row s holds pairs (s, s+1..n-1)
    return static_cast<std::size_t>(s) * (2 * n_ - s - 1) / 2 + (t - s - 1);
}

std::vector<std::pair<int, int>> ComparisonMatrix::lag_pairs(int d) const {
    std::vector<std::pair<int, int>> out;
    for (int s = 0; s + d < n_; ++s) out.emplace_back(s, s + d);
    return out;
}

std::uint64_t ComparisonMatrix::lag_bits(int d) const {
    std::uint64_t packed = 0;
    int pos = 0;
    for (int s = 0; s + d < n_; ++s, ++pos)
        if (bit(s, s + d)) packed |= (1ull << pos);
    return packed;
}

OrdinalPattern pattern_of(std::span<const double> window, TiePolicy policy) {
    const int n = static_cast<int>(window.size());
    OrdinalPattern p;
    p.pi.resize(n);
    std::iota(p.pi.begin(), p.pi.end(), 0);
    std::sort(p.pi.begin(), p.pi.end(), [&](std::uint8_t a, std::uint8_t b) {
        if (window[a] != window[b]) return window[a] < window[b];
        return a < b;  // deterministic order; the tie is detected below
    });
    for (int i = 0; i + 1 < n; ++i) {
        if (window[p.pi[i]] == window[p.pi[i + 1]]) {
            if (policy == TiePolicy::strict)
                throw TieError("pattern_of: exact tie between window entries");
            throw TieDiscard("pattern_of: tied window discarded");
        }
    }
    return p;
}

ComparisonMatrix comparison_encoding(std::span<const double> window) {
    const int n = static_cast<int>(window.size());
    ComparisonMatrix c(n);
    for (int s = 0; s < n; ++s) {
        for (int t = s + 1; t < n; ++t) {
            if (window[s] == window[t])
                throw TieError("comparison_encoding: exact tie between window entries");
            c.set_bit(s, t, window[s] <= window[t]);
        }
    }
    return c;
}

OrdinalPattern pattern_from_comparisons(const ComparisonMatrix& c) {
    const int n = c.order();
    // position s sits below exactly (number of t with x_s <= x_t) positions;
    // for a transitive comparison set the "dominance counts" are a permutation
    // of 0..n-1 and determine pi uniquely.
    std::vector<int> greater(n, 0);  // how many entries are strictly above s
    for (int s = 0; s < n; ++s)
        for (int t = s + 1; t < n; ++t) {
            if (c.bit(s, t))
                ++greater[s];
            else
                ++greater[t];
        }
    // entry with k elements above it has ascending position n-1-k
    OrdinalPattern p;
    p.pi.assign(n, 0);
    std::vector<bool> seen(n, false);
    for (int s = 0; s < n; ++s) {
        const int pos = n - 1 - greater[s];
        if (pos < 0 || pos >= n || seen[pos])
            throw InconsistentComparisonsError(
                "pattern_from_comparisons: bits are not transitive");
        seen[pos] = true;
        p.pi[pos] = static_cast<std::uint8_t>(s);
    }
    // dominance counts can coincide with a permutation while individual bits
    // still contradict it; verify round trip
    std::vector<int> pos(n, 0);
    for (int i = 0; i < n; ++i) pos[p.pi[i]] = i;
    for (int s = 0; s < n; ++s)
        for (int t = s + 1; t < n; ++t)
            if (c.bit(s, t) != (pos[s] < pos[t]))
                throw InconsistentComparisonsError(
                    "pattern_from_comparisons: bits are not transitive");
    return p;
}

std::uint64_t factorial(int n) {
    std::uint64_t f = 1;
    for (int i = 2; i <= n; ++i) f *= static_cast<std::uint64_t>(i);
    return f;
}

std::uint64_t rank(const OrdinalPattern& p) {
    const int n = p.order();
    std::uint64_t r = 0;
    for (int i = 0; i < n; ++i) {
        int smaller = 0;
        for (int j = i + 1; j < n; ++j)
            if (p.pi[j] < p.pi[i]) ++smaller;
        r += static_cast<std::uint64_t>(smaller) * factorial(n - 1 - i);
    }
    return r;
}

OrdinalPattern unrank(std::uint64_t k, int n) {
    if (k >= factorial(n)) throw OutOfDomainError("unrank: k out of range for order n");
    std::vector<std::uint8_t> avail(n);
    std::iota(avail.begin(), avail.end(), 0);
    OrdinalPattern p;
    p.pi.reserve(n);
    for (int i = n - 1; i >= 0; --i) {
        const std::uint64_t f = factorial(i);
        const std::uint64_t d = k / f;
        k %= f;
        p.pi.push_back(avail[d]);
        avail.erase(avail.begin() + static_cast<std::ptrdiff_t>(d));
    }
    return p;
}

}  // namespace ordent
