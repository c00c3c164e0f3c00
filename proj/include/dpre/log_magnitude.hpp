#pragma once

#include <cmath>
#include <cstdint>
#include <string>

namespace dpre {

// Signed log-scale number: (sign, ln|x|). Tail-exponent-zero quantiles
// exceed any fixed-width integer, so downstream code compares magnitudes
// and shifts them by logarithms instead of holding exact values.
//
// When the represented value is an exact integer (|x| <= 2^62) the integer
// is kept alongside the log so that comparisons between two exact values
// agree with integer comparison bit-for-bit.
struct LogMagnitude {
    int sign = 0;          // -1, 0, +1
    double lnmag = 0.0;    // ln|x|; meaningless when sign == 0
    std::int64_t exact = 0;
    bool has_exact = true; // true iff `exact` holds the value

    // lnmag values at or above this are treated as saturated: the true
    // magnitude is beyond double range even on log scale (reachable for
    // doubly-logarithmic tails). Order among saturated values must be
    // resolved by the caller from the generating uniform.
    static constexpr double saturation = 1e300;

    static LogMagnitude zero() { return LogMagnitude{0, 0.0, 0, true}; }

    static LogMagnitude from_int(std::int64_t v) {
        LogMagnitude m;
        m.exact = v;
        m.has_exact = true;
        if (v == 0) {
            m.sign = 0;
            m.lnmag = 0.0;
        } else {
            m.sign = v > 0 ? 1 : -1;
            m.lnmag = std::log(static_cast<double>(v > 0 ? v : -v));
        }
        return m;
    }

    static LogMagnitude from_lnmag(int sign, double lnmag) {
        LogMagnitude m;
        m.sign = sign;
        m.lnmag = sign == 0 ? 0.0 : lnmag;
        m.has_exact = (sign == 0);
        m.exact = 0;
        return m;
    }

    bool is_saturated() const { return sign != 0 && lnmag >= saturation; }

    // Multiply the represented value by a positive scalar c: on log scale
    // this is an exact shift of lnmag by ln c.
    LogMagnitude scaled_by_positive(double c) const {
        LogMagnitude m = *this;
        if (sign != 0) {
            m.lnmag = lnmag + std::log(c);
            m.has_exact = false;
        }
        return m;
    }

    std::string to_string() const {
        if (sign == 0) return "0";
        if (has_exact) return std::to_string(exact);
        return (sign < 0 ? std::string("-exp(") : std::string("exp(")) +
               std::to_string(lnmag) + ")";
    }
};

// Total order by (sign, sign * lnmag); exact integers compare exactly.
inline int compare(const LogMagnitude& a, const LogMagnitude& b) {
    if (a.sign != b.sign) return a.sign < b.sign ? -1 : 1;
    if (a.sign == 0) return 0;
    if (a.has_exact && b.has_exact) {
        if (a.exact == b.exact) return 0;
        return a.exact < b.exact ? -1 : 1;
    }
    const double ka = a.sign * a.lnmag;
    const double kb = b.sign * b.lnmag;
    if (ka == kb) return 0;
    return ka < kb ? -1 : 1;
}

inline bool operator<(const LogMagnitude& a, const LogMagnitude& b) {
    return compare(a, b) < 0;
}
inline bool operator<=(const LogMagnitude& a, const LogMagnitude& b) {
    return compare(a, b) <= 0;
}
inline bool operator>(const LogMagnitude& a, const LogMagnitude& b) {
    return compare(a, b) > 0;
}
inline bool operator>=(const LogMagnitude& a, const LogMagnitude& b) {
    return compare(a, b) >= 0;
}
inline bool operator==(const LogMagnitude& a, const LogMagnitude& b) {
    return compare(a, b) == 0;
}

} // namespace dpre
