#pragma once

#include <cstdint>

namespace dpre {

// SplitMix64 finalizer (Stafford mix13). Full-avalanche 64-bit mixer,
// the workhorse behind both the keyed lattice field and the sequential
// streams used for sampling.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Keyed mixing of a seed with up to two stream labels. Used to derive
// replica seeds and independent sub-streams reproducibly: the result
// depends only on the inputs, never on call order.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                 std::uint64_t b = 0) {
    std::uint64_t h = mix64(master ^ 0x6A09E667F3BCC909ULL);
    h = mix64(h + 0x9E3779B97F4A7C15ULL * (a + 1));
    h = mix64(h + 0xC2B2AE3D27D4EB4FULL * (b + 1));
    return h;
}

// Map 64 random bits to a double in the open interval (0,1).
inline double bits_to_unit(std::uint64_t bits) {
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

// Minimal counter-based generator (SplitMix64 sequence). Deterministic
// across platforms; every consumer draws from a caller-owned instance.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in (0,1), never exactly 0 or 1.
    double next_unit() { return bits_to_unit(next_u64()); }

private:
    std::uint64_t state_;
};

} // namespace dpre
