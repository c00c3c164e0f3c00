#include <doctest.h>

#include <cmath>
#include <vector>

#include "dpre/log_magnitude.hpp"

using dpre::LogMagnitude;

TEST_CASE("comparison agrees with integer comparison on the exact range") {
    std::vector<std::int64_t> values = {0,
                                        1,
                                        -1,
                                        2,
                                        7,
                                        -42,
                                        1000,
                                        999999999,
                                        1000000000000000LL - 1,
                                        1000000000000000LL,
                                        -1000000000000000LL,
                                        999999999999999LL};
    for (std::int64_t x : values)
        for (std::int64_t y : values) {
            const LogMagnitude a = LogMagnitude::from_int(x);
            const LogMagnitude b = LogMagnitude::from_int(y);
            CHECK((a < b) == (x < y));
            CHECK((a == b) == (x == y));
            CHECK((a >= b) == (x >= y));
        }
}

TEST_CASE("adjacent huge integers stay distinguishable") {
    // ln(x) and ln(x+1) collide in double precision near 1e15; the exact
    // payload must keep the order strict anyway.
    const std::int64_t x = 999999999999999LL;
    const LogMagnitude a = LogMagnitude::from_int(x);
    const LogMagnitude b = LogMagnitude::from_int(x + 1);
    CHECK(a < b);
    CHECK_FALSE(b < a);
    CHECK_FALSE(a == b);
}

TEST_CASE("positive scaling shifts lnmag by exactly ln c") {
    const LogMagnitude a = LogMagnitude::from_int(12345);
    const double c = 17.5;
    const LogMagnitude s = a.scaled_by_positive(c);
    CHECK(s.lnmag == a.lnmag + std::log(c));
    CHECK(s.sign == 1);
    CHECK_FALSE(s.has_exact);

    const LogMagnitude z = LogMagnitude::zero().scaled_by_positive(c);
    CHECK(z.sign == 0);
}

TEST_CASE("lnmag-valued magnitudes order by (sign, sign*lnmag)") {
    const LogMagnitude big = LogMagnitude::from_lnmag(1, 1e6);
    const LogMagnitude bigger = LogMagnitude::from_lnmag(1, 2e6);
    const LogMagnitude neg = LogMagnitude::from_lnmag(-1, 5e6);
    CHECK(big < bigger);
    CHECK(neg < big);
    CHECK(neg < LogMagnitude::zero());
    CHECK(LogMagnitude::zero() < big);
    CHECK(LogMagnitude::from_int(7) < big);
}

TEST_CASE("saturation flag") {
    CHECK(LogMagnitude::from_lnmag(1, 1e300).is_saturated());
    CHECK_FALSE(LogMagnitude::from_lnmag(1, 1e5).is_saturated());
    CHECK_FALSE(LogMagnitude::zero().is_saturated());
}
