#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace layoutforge {

/// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix64(std::uint64_t x);

/// Seed of the stream identified by (seed, index, tag). The tag names the
/// consumer ("anneal", "oracle-mc", "level", ...) so that different uses of
/// one user seed never share a sequence.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index, std::string_view tag);

/// Portable random source: std::mt19937_64 (bit-exact across standard
/// libraries) with hand-written distributions, since the std:: distribution
/// algorithms are implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    static Rng stream(std::uint64_t seed, std::uint64_t index, std::string_view tag) {
        return Rng(derive_seed(seed, index, tag));
    }

    std::uint64_t next() { return engine_(); }
    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Uniform integer in [0, n); n must be positive.
    std::uint64_t below(std::uint64_t n);
    /// Standard normal via Box-Muller (one draw per call).
    double normal();

private:
    std::mt19937_64 engine_;
};

}  // namespace layoutforge
