#pragma once

#include <cstdint>
#include <memory>
#include <unordered_map>
#include <vector>

#include "dpre/environment.hpp"

namespace dpre {

// Deterministic lazily evaluated disorder field over N x Z: value(n, z) is a
// pure function of (master_seed, n, z), so far-apart rectangles, replica
// overlays and repeated queries all see one consistent realization without
// storing anything. Overlays (for composite fields along a path) take
// precedence over the keyed values; the base field is never modified.
class LatticeField {
public:
    LatticeField(std::uint64_t master_seed, EnvironmentLaw env)
        : seed_(master_seed), env_(std::move(env)) {}

    std::uint64_t seed() const { return seed_; }
    const EnvironmentLaw& env() const { return env_; }

    // Uniform driving value at a site, before the inverse transform.
    double uniform_at(std::int64_t n, std::int64_t z) const;

    double value(std::int64_t n, std::int64_t z) const;

    // Composite field: site (k, positions[k-1]) carries tilted[k-1], with
    // times k = 1..positions.size(). Off-path sites are untouched.
    LatticeField with_path_overlay(const std::vector<std::int64_t>& positions,
                                   const std::vector<double>& tilted) const;
    LatticeField with_site_overlay(std::int64_t n, std::int64_t z,
                                   double v) const;

    std::size_t overlay_size() const {
        return overlay_ ? overlay_->size() : 0;
    }

private:
    static std::uint64_t site_key(std::int64_t n, std::int64_t z) {
        return (static_cast<std::uint64_t>(n) << 32) ^
               static_cast<std::uint32_t>(z);
    }

    std::uint64_t seed_;
    EnvironmentLaw env_;
    std::shared_ptr<const std::unordered_map<std::uint64_t, double>> overlay_;
};

} // namespace dpre
