#pragma once

#include <cstdint>
#include <random>

namespace cellload {

// Deterministic random source.  std::mt19937_64 has a standard-specified
// sequence, and the distributions below are implemented by hand because the
// standard library distribution adapters are implementation-defined; this
// keeps generated scenarios and datasets reproducible across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1) with 53 bits of mantissa.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller; the second variate of each pair is
    // cached, so the draw order is part of the stream contract.
    double normal();

private:
    std::mt19937_64 engine_;
    bool has_cached_ = false;
    double cached_ = 0.0;
};

// Mixes a base seed with a stream tag so distinct purposes (placement,
// rates, noise, test queries, ...) consume independent substreams.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

namespace streams {
inline constexpr std::uint64_t placement = 1;
inline constexpr std::uint64_t rates = 2;
inline constexpr std::uint64_t noise = 3;
inline constexpr std::uint64_t test_queries = 4;
inline constexpr std::uint64_t mono_pairs = 5;
inline constexpr std::uint64_t bench_rep = 6;
}  // namespace streams

}  // namespace cellload
