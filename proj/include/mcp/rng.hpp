#pragma once

#include <cstdint>

namespace mcp {

// Counter-based pseudo-random source built on the SplitMix64 finalizer.
// value(seed, counter) is a pure function, so draws can be indexed by
// (protein stream, residue position) and parallel runs replicate serial
// runs bit-exactly on every platform.
namespace rng {

inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// i-th 64-bit value of the stream identified by `seed`.
inline std::uint64_t value(std::uint64_t seed, std::uint64_t counter) {
    return mix64(seed + counter * 0x9E3779B97F4A7C15ULL);
}

/// Derive an independent child stream (per protein, per fold, per draw).
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t stream_id) {
    return mix64(seed ^ mix64(stream_id + 0x632BE59BD9B4E019ULL));
}

/// Uniform double in [0, 1) from the top 53 bits.
inline double uniform(std::uint64_t seed, std::uint64_t counter) {
    return static_cast<double>(value(seed, counter) >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n) by 128-bit multiply; n must be > 0.
inline std::uint64_t below(std::uint64_t seed, std::uint64_t counter, std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(value(seed, counter)) * n) >> 64);
}

}  // namespace rng

/// Sequential convenience wrapper over the counter-based source.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t next_u64() { return rng::value(seed_, counter_++); }
    double next_uniform() { return rng::uniform(seed_, counter_++); }
    std::uint64_t next_below(std::uint64_t n) { return rng::below(seed_, counter_++, n); }

private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

}  // namespace mcp
