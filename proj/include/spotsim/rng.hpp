#pragma once

#include <cstdint>
#include <string_view>

namespace spotsim {

/// SplitMix64 finalizer. Bijective on 64-bit words, used both as the
/// generator step and to derive independent stream keys.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

constexpr std::uint64_t hash_u64(std::uint64_t seed, std::uint64_t v) {
    return mix64(seed + 0x9E3779B97F4A7C15ULL * (v + 1));
}

constexpr std::uint64_t hash_name(std::uint64_t seed, std::string_view name) {
    // FNV-1a over the name folded into the seed.
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (char c : name) {
        h ^= static_cast<std::uint8_t>(c);
        h *= 0x100000001B3ULL;
    }
    return mix64(seed ^ h);
}

/// Stream key for (master seed, module name, frame). Module execution order
/// cannot change results because every consumer owns its derived stream.
constexpr std::uint64_t derive_stream(std::uint64_t seed, std::string_view module,
                                      std::uint64_t frame) {
    return hash_u64(hash_name(seed, module), frame);
}

/// Counter-based generator: the raw output is the SplitMix64 sequence for the
/// given key. Cheap to construct, so per-voxel / per-frame streams are derived
/// freely and parallel evaluation stays bit-identical to sequential.
class Rng {
public:
    explicit Rng(std::uint64_t key) : state_(key) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix64(state_);
    }

    /// Uniform in [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Uniform integer in [0, n). n must be positive.
    std::uint64_t uniform_int(std::uint64_t n);

    /// Standard normal via Box-Muller; consumes two words per call.
    double normal();

    /// Exact Poisson sample: inversion by multiplication below mean 30,
    /// transformed rejection (PTRD) above.
    std::int64_t poisson(double mean);

private:
    std::uint64_t state_;
};

}  // namespace spotsim
