#pragma once

#include <cstdint>

namespace ordent {

// Philox-2x64-10 counter-based generator.  Stateless: the value at (seed,
// stream, index) never depends on how many draws happened before, so parallel
// workers slicing an index range reproduce the serial stream bit for bit.
namespace detail {

inline void philox2x64_round(std::uint64_t& x0, std::uint64_t& x1, std::uint64_t key) {
    constexpr std::uint64_t kMul = 0xD2B74407B1CE6E93ull;
    const unsigned __int128 prod = static_cast<unsigned __int128>(kMul) * x0;
    const std::uint64_t hi = static_cast<std::uint64_t>(prod >> 64);
    const std::uint64_t lo = static_cast<std::uint64_t>(prod);
    x0 = hi ^ key ^ x1;
    x1 = lo;
}

inline std::uint64_t philox2x64(std::uint64_t ctr0, std::uint64_t ctr1, std::uint64_t key) {
    constexpr std::uint64_t kWeyl = 0x9E3779B97F4A7C15ull;
    std::uint64_t x0 = ctr0, x1 = ctr1;
    for (int round = 0; round < 10; ++round) {
        philox2x64_round(x0, x1, key);
        key += kWeyl;
    }
    return x0;
}

}  // namespace detail

/// Raw 64-bit word at position `index` of stream `stream` under `seed`.
inline std::uint64_t counter_bits(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    return detail::philox2x64(index, stream, seed);
}

/// Uniform double in the open interval (0,1); safe as a quantile argument.
inline double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    const std::uint64_t bits = counter_bits(seed, stream, index);
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

/// Small stateful view over a counter stream, for call sites that just want
/// a sequence of draws.  Copying it forks the position, not the stream.
class CounterRng {
  public:
    CounterRng(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

    double uniform() { return counter_uniform(seed_, stream_, index_++); }
    std::uint64_t bits() { return counter_bits(seed_, stream_, index_++); }

    /// Uniform integer in [0, n); n must be > 0.
    std::uint64_t below(std::uint64_t n) { return bits() % n; }

  private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t index_ = 0;
};

}  // namespace ordent
