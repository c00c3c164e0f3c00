#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "dpre/errors.hpp"
#include "dpre/increment_law.hpp"
#include "dpre/rng.hpp"
#include "oracles.hpp"

using dpre::IncrementLaw;
using dpre::LogMagnitude;
using dpre::Rng;

namespace {

std::vector<IncrementLaw> all_heavy_families() {
    return {IncrementLaw::critical(-2.0), IncrementLaw::log_tail(1.0),
            IncrementLaw::log_log_tail(1.0), IncrementLaw::power_tail(2.0)};
}

} // namespace

TEST_CASE("pmf symmetry and baseline values") {
    for (const IncrementLaw& law : all_heavy_families())
        for (std::int64_t n : {std::int64_t(1), std::int64_t(7),
                               std::int64_t(1000000)})
            CHECK(law.pmf(n) == law.pmf(-n));

    const IncrementLaw nn = IncrementLaw::nearest_neighbor();
    CHECK(nn.pmf(1) == 0.5);
    CHECK(nn.pmf(-1) == 0.5);
    CHECK(nn.pmf(0) == 0.0);
    CHECK(nn.pmf(2) == 0.0);

    const IncrementLaw nn_atom = IncrementLaw::nearest_neighbor(0.5);
    CHECK(nn_atom.pmf(0) == 0.5);
    CHECK(nn_atom.pmf(1) == 0.25);
}

TEST_CASE("critical pmf matches the brute-force normalization oracle") {
    const IncrementLaw law = IncrementLaw::critical(-2.0, 3, 0.5);
    const double a_oracle = oracle::critical_norm_const(-2.0, 3, 0.5);
    CHECK(std::fabs(law.norm_const() - a_oracle) <= 1e-7 * a_oracle);

    const double expected = a_oracle * std::pow(std::log(std::log(4.0)), -2.0) /
                            (4.0 * std::log(4.0) * std::log(4.0));
    CHECK(law.pmf(1) == doctest::Approx(expected).epsilon(1e-7));
}

TEST_CASE("tail basics") {
    for (const IncrementLaw& law : all_heavy_families()) {
        CHECK(law.tail(1) == 0.5 * (1.0 - law.mass_at_zero()));
        double prev = law.tail(1);
        for (std::int64_t n : {std::int64_t(2), std::int64_t(10),
                               std::int64_t(500), std::int64_t(999999),
                               std::int64_t(1000001), std::int64_t(50000000),
                               std::int64_t(2000000000)}) {
            const double t = law.tail(n);
            CHECK(t <= prev);
            CHECK(t > 0.0);
            prev = t;
        }
    }
}

TEST_CASE("critical tail(1e4) matches brute-force partial summation") {
    const IncrementLaw law = IncrementLaw::critical(-2.0);
    const oracle::TailBracket br =
        oracle::critical_tail_bruteforce(law, 10000, 100000000);
    const double t = law.tail(10000);
    CHECK(t == doctest::Approx(br.mid()).epsilon(1e-6));
}

TEST_CASE("normalization identity at any cut") {
    for (const IncrementLaw& law : all_heavy_families()) {
        for (std::int64_t cut : {std::int64_t(10), std::int64_t(1000),
                                 std::int64_t(1000005)}) {
            double s = law.pmf(0);
            for (std::int64_t m = 1; m <= cut; ++m) s += 2.0 * law.pmf(m);
            s += 2.0 * law.tail(cut + 1);
            CHECK(s == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("pmf equals tail difference") {
    for (const IncrementLaw& law : all_heavy_families()) {
        for (std::int64_t m = 1; m <= 10000; ++m) {
            const double diff = law.tail(m) - law.tail(m + 1);
            CHECK(law.pmf(m) == doctest::Approx(diff).epsilon(1e-6));
        }
    }
}

TEST_CASE("unimodality and symmetry over a wide range") {
    for (const IncrementLaw& law : all_heavy_families()) {
        double prev = law.pmf(0);
        for (std::int64_t m = 1; m <= 100000; ++m) {
            const double cur = law.pmf(m);
            CHECK(cur <= prev * (1.0 + 1e-12));
            prev = cur;
        }
        CHECK(law.pmf(-100000) == law.pmf(100000));
    }
}

TEST_CASE("entropy closed forms and dichotomy") {
    const dpre::EntropyResult nn = IncrementLaw::nearest_neighbor().entropy();
    CHECK(nn.finite);
    CHECK(nn.value == doctest::Approx(std::log(2.0)).epsilon(1e-15));

    // finite iff alpha < -1
    const std::map<double, bool> expectation = {{-3.0, true},  {-2.0, true},
                                                {-1.5, true},  {-1.0, false},
                                                {0.0, false},  {1.0, false}};
    for (const auto& [alpha, finite] : expectation) {
        const dpre::EntropyResult r = IncrementLaw::critical(alpha).entropy();
        CHECK(r.finite == finite);
        if (!finite) CHECK(r.value > 0.0); // divergent lower bound
    }

    CHECK_FALSE(IncrementLaw::log_tail(1.0).entropy().finite);
    CHECK_FALSE(IncrementLaw::log_log_tail(1.0).entropy().finite);
    CHECK(IncrementLaw::power_tail(2.0).entropy().finite);
}

TEST_CASE("critical entropy matches the brute-force oracle") {
    const dpre::EntropyResult r = IncrementLaw::critical(-2.0).entropy(1e-6);
    const oracle::TailBracket br =
        oracle::entropy_bruteforce(-2.0, 3, 0.5, 10000000);
    CHECK(r.bracket_width < 1e-6);
    CHECK(std::fabs(r.value - br.mid()) <=
          r.bracket_width + br.width() + 1e-7);
}

TEST_CASE("quantile: atom, round trip, lattice step") {
    const IncrementLaw law = IncrementLaw::critical(-2.0);
    CHECK(law.quantile_logmag(0.3).sign == 0); // below the atom mass
    CHECK(law.quantile_logmag(0.5).sign == 0); // at the atom boundary

    const std::int64_t x = 10000;
    const double u = law.cdf_abs(x);
    const LogMagnitude q = law.quantile_logmag(u);
    REQUIRE(q.has_exact);
    CHECK(q.exact == x);
    const LogMagnitude q2 = law.quantile_logmag(u + 1e-12);
    REQUIRE(q2.has_exact);
    CHECK(q2.exact == x + 1);

    // quantile(CDF(x)) = x on a grid; CDF(quantile(u)) >= u within one step
    for (std::int64_t g : {std::int64_t(1), std::int64_t(3), std::int64_t(17),
                           std::int64_t(123), std::int64_t(55555)}) {
        const LogMagnitude qq = law.quantile_logmag(law.cdf_abs(g));
        REQUIRE(qq.has_exact);
        CHECK(qq.exact == g);
    }
    Rng rng(7);
    for (int i = 0; i < 200; ++i) {
        const double v = 0.5 + 0.499999 * rng.next_unit();
        const LogMagnitude qq = law.quantile_logmag(v);
        if (qq.has_exact && qq.exact >= 1) {
            CHECK(law.cdf_abs(qq.exact) >= v);
            CHECK(law.cdf_abs(qq.exact - 1) < v);
        }
    }
}

TEST_CASE("deep-tail quantile for the alpha = 0 family") {
    // tail(x) ~ A / log x, so ln x at u = 1 - 1e-3 solves A/L = 5e-4.
    const IncrementLaw law = IncrementLaw::critical(0.0, 3, 0.5);
    const double a_oracle = oracle::critical_norm_const(0.0, 3, 0.5);
    const double u = 1.0 - 1e-3;
    const LogMagnitude q = law.quantile_logmag(u);
    REQUIRE_FALSE(q.has_exact);
    // independent bisection on the closed-form tail A/ln x
    double lo = 21.0, hi = 1e9;
    const double target = 0.5 * (1.0 - u);
    while (hi - lo > 1e-7 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (a_oracle / mid > target)
            lo = mid;
        else
            hi = mid;
    }
    CHECK(q.lnmag == doctest::Approx(0.5 * (lo + hi)).epsilon(0.01));
}

TEST_CASE("quantile coupling is monotone in u") {
    for (const IncrementLaw& law : all_heavy_families()) {
        LogMagnitude prev = LogMagnitude::zero();
        for (double u :
             {0.51, 0.7, 0.9, 0.99, 0.9999, 1.0 - 1e-6, 1.0 - 1e-9,
              1.0 - 1e-12}) {
            const LogMagnitude q = law.quantile_logmag(u);
            CHECK(prev <= q);
            prev = q;
        }
    }
}

TEST_CASE("quantile rejects u outside (0,1)") {
    const IncrementLaw law = IncrementLaw::power_tail(2.0);
    CHECK_THROWS_AS(law.quantile_logmag(0.0), std::domain_error);
    CHECK_THROWS_AS(law.quantile_logmag(1.0), std::domain_error);
    CHECK_THROWS_AS(law.quantile_logmag(-0.5), std::domain_error);
}

TEST_CASE("sample_exact: determinism, frequencies, KS") {
    const IncrementLaw nn = IncrementLaw::nearest_neighbor();
    {
        Rng a(42), b(42);
        for (int i = 0; i < 100; ++i)
            CHECK(nn.sample_exact(a, 100) == nn.sample_exact(b, 100));
    }
    {
        Rng rng(1);
        std::int64_t plus = 0;
        const int n = 1000000;
        for (int i = 0; i < n; ++i)
            if (*nn.sample_exact(rng, 10) == 1) ++plus;
        const double f = static_cast<double>(plus) / n;
        const double se = std::sqrt(0.25 / n);
        CHECK(std::fabs(f - 0.5) <= 4.0 * se);
    }
    const IncrementLaw law = IncrementLaw::critical(-2.0);
    {
        Rng rng(2);
        std::int64_t zero = 0;
        const int n = 1000000;
        for (int i = 0; i < n; ++i) {
            const auto v = law.sample_exact(rng, 1000000000);
            if (v && *v == 0) ++zero;
        }
        const double f = static_cast<double>(zero) / n;
        const double se = std::sqrt(0.5 * 0.5 / n);
        CHECK(std::fabs(f - 0.5) <= 4.0 * se);
    }
    {
        // empirical pmf within 4 SE per bin over 10^6 draws; draws beyond
        // the cap land outside every bin and stay in the denominator
        Rng rng(3);
        const int n = 1000000;
        std::map<std::int64_t, std::int64_t> hist;
        for (int i = 0; i < n; ++i) {
            const auto v = law.sample_exact(rng, 1000000000);
            if (v && *v >= -3 && *v <= 3) ++hist[*v];
        }
        for (std::int64_t k = -3; k <= 3; ++k) {
            const double p = law.pmf(k);
            const double se = std::sqrt(p * (1.0 - p) / n);
            CHECK(std::fabs(static_cast<double>(hist[k]) / n - p) <= 4.0 * se);
        }
    }
    {
        // two-sided KS on the signed CDF, 10^5 draws, 1% critical value;
        // power-tail quantiles stay far inside the cap
        const IncrementLaw pt = IncrementLaw::power_tail(2.0);
        Rng rng(4);
        const int n = 100000;
        std::map<std::int64_t, std::int64_t> hist;
        for (int i = 0; i < n; ++i) {
            const auto v = pt.sample_exact(rng, 1000000000);
            REQUIRE(v.has_value());
            ++hist[*v];
        }
        double cum = 0.0, d = 0.0;
        for (const auto& [x, c] : hist) {
            const double f_lo = cum / n;
            cum += c;
            const double f_hi = cum / n;
            const double f = pt.cdf_signed(x);
            const double f_left = pt.cdf_signed(x - 1);
            d = std::max(d, std::fabs(f_hi - f));
            d = std::max(d, std::fabs(f_lo - f_left));
        }
        CHECK(d < oracle::ks_critical_1pct(n));
    }
}

TEST_CASE("sample_exact cap handling") {
    const IncrementLaw law = IncrementLaw::power_tail(0.5, 0.5);
    Rng rng(9);
    int overflow = 0;
    for (int i = 0; i < 20000; ++i)
        if (!law.sample_exact(rng, 5)) ++overflow;
    // P[|X| > 5] = 2 * tail(6) = (1 - k0) / sqrt(6)
    const double p = 2.0 * law.tail(6);
    const double se = std::sqrt(p * (1.0 - p) / 20000.0);
    CHECK(std::fabs(overflow / 20000.0 - p) <= 4.0 * se);
    CHECK_THROWS_AS(law.sample_exact(rng, 2000000000), std::invalid_argument);
    CHECK_THROWS_AS(law.sample_exact(rng, 0), std::invalid_argument);
}

TEST_CASE("s_n: trivial branch, direct-search oracle, monotonicity") {
    // threshold above the entire tail -> s_n = 1
    const IncrementLaw pt_heavy = IncrementLaw::power_tail(2.0, 0.9);
    // tail(1) = 0.05; (log 9)^2/9 = 0.536 >= 0.05
    const LogMagnitude s9 = pt_heavy.s_n(9);
    CHECK(s9.exact == 1);

    const IncrementLaw pt = IncrementLaw::power_tail(2.0, 0.5);
    const double thr = std::pow(std::log(1000.0), 2.0) / 1000.0;
    std::int64_t expected = 1;
    while (pt.tail(expected) > thr) ++expected;
    const LogMagnitude s = pt.s_n(1000);
    REQUIRE(s.has_exact);
    CHECK(s.exact == expected);

    for (const IncrementLaw& law : all_heavy_families()) {
        LogMagnitude prev = law.s_n(8);
        for (std::int64_t n : {std::int64_t(16), std::int64_t(64),
                               std::int64_t(256), std::int64_t(4096)}) {
            const LogMagnitude cur = law.s_n(n);
            CHECK(prev <= cur);
            prev = cur;
        }
    }
}

TEST_CASE("condition (c): degenerate, passing, failing") {
    // NearestNeighbor: tail vanishes past 1, ratio defined as 0 -> passes
    const dpre::ConditionC nn =
        IncrementLaw::nearest_neighbor().condition_c_ratio(3, 0.6);
    CHECK(nn.ratio == 0.0);
    CHECK(nn.passes);

    // loglog tail at n = 1e4, gamma = 0.6 passes; oracle from the closed form
    const IncrementLaw llt = IncrementLaw::log_log_tail(1.0);
    const dpre::ConditionC c = llt.condition_c_ratio(10000, 0.6);
    CHECK(c.passes);
    REQUIRE_FALSE(c.s_n.has_exact);
    {
        const double lnx = c.s_n.lnmag;
        const double shift = std::log(2.0 * 10000.0);
        // T ~ A / log(log x): ratio = 1 - log(lnx)/log(lnx + shift)
        const double expected =
            1.0 - std::log(lnx) / std::log(lnx + shift);
        CHECK(c.ratio == doctest::Approx(expected).epsilon(1e-3));
    }

    // power tail at n = 1e4, gamma = 0.9 fails; ratio ~ s/(s+1) - 1/(2n)
    const IncrementLaw pt = IncrementLaw::power_tail(1.0);
    const dpre::ConditionC f = pt.condition_c_ratio(10000, 0.9);
    CHECK_FALSE(f.passes);
    REQUIRE(f.s_n.has_exact);
    const double sv = static_cast<double>(f.s_n.exact);
    const double expected = sv / (sv + 1.0) - 1.0 / 20000.0;
    CHECK(f.ratio == doctest::Approx(expected).epsilon(1e-9));

    CHECK_THROWS_AS(pt.condition_c_ratio(10000, 0.5), std::invalid_argument);
}

TEST_CASE("construction rejects ill-formed parameters") {
    CHECK_THROWS_AS(IncrementLaw::log_tail(1.5), std::invalid_argument);
    CHECK_THROWS_AS(IncrementLaw::log_tail(0.0), std::invalid_argument);
    CHECK_THROWS_AS(IncrementLaw::log_log_tail(-1.0), std::invalid_argument);
    CHECK_THROWS_AS(IncrementLaw::power_tail(2.0, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(IncrementLaw::critical(-2.0, 2), std::invalid_argument);
    CHECK_THROWS_AS(IncrementLaw::nearest_neighbor(0.2), std::invalid_argument);
    // alpha = 2 needs a larger offset than 3; the default must provide it
    CHECK_THROWS_AS(IncrementLaw::critical(2.0, 3), std::invalid_argument);
    const IncrementLaw ok = IncrementLaw::critical(2.0);
    CHECK(ok.offset() > 3);
    double prev = ok.pmf(1);
    for (std::int64_t m = 2; m <= 1000; ++m) {
        CHECK(ok.pmf(m) <= prev * (1.0 + 1e-12));
        prev = ok.pmf(m);
    }
}

TEST_CASE("log_pmf agrees with log of pmf and extends to ln-scale") {
    for (const IncrementLaw& law : all_heavy_families()) {
        for (std::int64_t m : {std::int64_t(0), std::int64_t(1),
                               std::int64_t(50), std::int64_t(99999)})
            CHECK(law.log_pmf(m) ==
                  doctest::Approx(std::log(law.pmf(m))).epsilon(1e-12));
        if (law.family() == dpre::WalkFamily::NearestNeighbor) continue;
        // ln-scale relaxation matches the integer value at moderate range
        const double lnx = std::log(1e6);
        const double via_int = law.log_pmf(1000000);
        CHECK(law.log_pmf_lnx(lnx) == doctest::Approx(via_int).epsilon(1e-4));
    }
}

TEST_CASE("tail precision near the top of the integer range") {
    // long-double differencing oracle at m = 10^7: the expm1-based pmf must
    // match the naive tail difference well inside 1e-9 relative error.
    const IncrementLaw lt = IncrementLaw::log_tail(1.0);
    const std::int64_t m = 10000000;
    const long double g1 = logl(static_cast<long double>(m) + 3.0L);
    const long double g2 = logl(static_cast<long double>(m) + 4.0L);
    const long double t1 = 0.25L * logl(4.0L) / g1;
    const long double t2 = 0.25L * logl(4.0L) / g2;
    const double naive = static_cast<double>(t1 - t2);
    CHECK(lt.pmf(m) == doctest::Approx(naive).epsilon(1e-9));
}
