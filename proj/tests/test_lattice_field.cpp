#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "dpre/lattice_field.hpp"
#include "dpre/numerics.hpp"
#include "oracles.hpp"

using dpre::EnvironmentLaw;
using dpre::LatticeField;

TEST_CASE("determinism and query-order independence") {
    const LatticeField field(123456789, EnvironmentLaw::gaussian());
    std::vector<std::pair<std::int64_t, std::int64_t>> sites;
    for (std::int64_t n = 1; n <= 100; ++n)
        for (std::int64_t z = -50; z <= 50; ++z) sites.emplace_back(n, z);

    std::vector<double> forward;
    forward.reserve(sites.size());
    for (const auto& [n, z] : sites) forward.push_back(field.value(n, z));

    std::mt19937_64 shuffle_rng(7);
    std::vector<std::size_t> order(sites.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    for (std::size_t idx : order)
        CHECK(field.value(sites[idx].first, sites[idx].second) == forward[idx]);

    CHECK(field.value(3, 17) == field.value(3, 17));
    CHECK_THROWS_AS(field.value(0, 0), std::invalid_argument);
}

TEST_CASE("marginal distribution matches the environment law") {
    const LatticeField field(99, EnvironmentLaw::gaussian());
    std::vector<double> sample;
    sample.reserve(100000);
    for (std::int64_t z = 0; z < 100000; ++z)
        sample.push_back(field.value(5, z));
    const double d =
        oracle::ks_statistic(sample, [](double x) { return dpre::normal_cdf(x); });
    CHECK(d < oracle::ks_critical_1pct(sample.size()));
}

TEST_CASE("adjacent sites are uncorrelated") {
    const LatticeField field(2024, EnvironmentLaw::gaussian());
    const int n = 100000;
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (int z = 0; z < n; ++z) {
        const double x = field.value(7, z);
        const double y = field.value(7, z + 1);
        sx += x;
        sy += y;
        sxx += x * x;
        syy += y * y;
        sxy += x * y;
    }
    const double corr = (sxy - sx * sy / n) /
                        std::sqrt((sxx - sx * sx / n) * (syy - sy * sy / n));
    CHECK(std::fabs(corr) <= 4.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("seed separation") {
    // continuous values from different seeds collide (essentially) never
    const LatticeField a(1, EnvironmentLaw::gaussian());
    const LatticeField b(2, EnvironmentLaw::gaussian());
    int agree = 0;
    for (std::int64_t z = 0; z < 10000; ++z)
        if (a.value(1, z) == b.value(1, z)) ++agree;
    CHECK(agree == 0);

    // discrete values agree at chance level
    const EnvironmentLaw bern = EnvironmentLaw::bernoulli(0.5);
    const LatticeField c(1, bern), d(2, bern);
    agree = 0;
    const int n = 10000;
    for (std::int64_t z = 0; z < n; ++z)
        if (c.value(1, z) == d.value(1, z)) ++agree;
    const double f = static_cast<double>(agree) / n;
    const double se = std::sqrt(0.25 / n);
    CHECK(std::fabs(f - 0.5) <= 4.0 * se);
}

TEST_CASE("path overlays") {
    const LatticeField base(55, EnvironmentLaw::gaussian());

    // empty overlay leaves everything unchanged
    const LatticeField same = base.with_path_overlay({}, {});
    for (std::int64_t z = -5; z <= 5; ++z)
        CHECK(same.value(1, z) == base.value(1, z));

    // single-site overlay
    const LatticeField one = base.with_site_overlay(3, 0, 7.5);
    CHECK(one.value(3, 0) == 7.5);
    CHECK(one.value(3, 1) == base.value(3, 1));
    CHECK(one.value(2, 0) == base.value(2, 0));
    CHECK(base.value(3, 0) != 7.5); // base untouched

    // path overlay: times 1..N at the path positions
    const std::vector<std::int64_t> path = {2, -1, 0};
    const std::vector<double> tilt = {10.0, 11.0, 12.0};
    const LatticeField comp = base.with_path_overlay(path, tilt);
    CHECK(comp.value(1, 2) == 10.0);
    CHECK(comp.value(2, -1) == 11.0);
    CHECK(comp.value(3, 0) == 12.0);
    CHECK(comp.value(1, 0) == base.value(1, 0));
    CHECK(comp.value(4, 2) == base.value(4, 2));

    CHECK_THROWS_AS(base.with_path_overlay({1, 2}, {0.5}),
                    std::invalid_argument);
}
