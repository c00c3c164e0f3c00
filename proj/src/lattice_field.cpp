#include "dpre/lattice_field.hpp"

#include <stdexcept>

#include "dpre/rng.hpp"

namespace dpre {

double LatticeField::uniform_at(std::int64_t n, std::int64_t z) const {
    std::uint64_t h = seed_;
    h = mix64(h ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(n)));
    h = mix64(h ^ (0xC2B2AE3D27D4EB4FULL * static_cast<std::uint64_t>(z)));
    return bits_to_unit(h);
}

double LatticeField::value(std::int64_t n, std::int64_t z) const {
    if (n < 1) throw std::invalid_argument("LatticeField::value: n must be >= 1");
    if (overlay_) {
        auto it = overlay_->find(site_key(n, z));
        if (it != overlay_->end()) return it->second;
    }
    return env_.sample_from_uniform(uniform_at(n, z));
}

LatticeField LatticeField::with_path_overlay(
    const std::vector<std::int64_t>& positions,
    const std::vector<double>& tilted) const {
    if (positions.size() != tilted.size())
        throw std::invalid_argument(
            "with_path_overlay: positions/tilted length mismatch");
    auto merged = overlay_
                      ? std::make_shared<std::unordered_map<std::uint64_t, double>>(
                            *overlay_)
                      : std::make_shared<std::unordered_map<std::uint64_t, double>>();
    for (std::size_t k = 0; k < positions.size(); ++k)
        (*merged)[site_key(static_cast<std::int64_t>(k) + 1, positions[k])] =
            tilted[k];
    LatticeField f = *this;
    f.overlay_ = std::move(merged);
    return f;
}

LatticeField LatticeField::with_site_overlay(std::int64_t n, std::int64_t z,
                                             double v) const {
    auto merged = overlay_
                      ? std::make_shared<std::unordered_map<std::uint64_t, double>>(
                            *overlay_)
                      : std::make_shared<std::unordered_map<std::uint64_t, double>>();
    (*merged)[site_key(n, z)] = v;
    LatticeField f = *this;
    f.overlay_ = std::move(merged);
    return f;
}

} // namespace dpre
