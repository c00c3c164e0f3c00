#pragma once

#include <cstdint>
#include <string>

namespace dpre {

inline constexpr const char* kVersion = "polymerlab 0.1.0";

// FNV-1a 64-bit digest of the canonical config string; stamped into every
// output row so results can be traced back to their exact configuration.
inline std::string config_digest(const std::string& canonical) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : canonical) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    char buf[17];
    static const char* hex = "0123456789abcdef";
    for (int i = 15; i >= 0; --i) {
        buf[i] = hex[h & 0xF];
        h >>= 4;
    }
    buf[16] = '\0';
    return buf;
}

} // namespace dpre
