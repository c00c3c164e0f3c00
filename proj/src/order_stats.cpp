#include "dpre/order_stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dpre/errors.hpp"
#include "dpre/numerics.hpp"
#include "dpre/rng.hpp"

namespace dpre {

namespace {

// Second max <= max / divisor, decided in log-magnitude space. Exact-integer
// records compare exactly; saturated records fall back to the generating
// uniforms (at that range the magnitude ratio between distinct quantiles
// dwarfs any polynomial divisor).
bool ratio_event(const IncrementLaw& law, double u_max, double u_second,
                 double divisor) {
    const LogMagnitude q1 = law.quantile_logmag(u_max);
    const LogMagnitude q2 = law.quantile_logmag(u_second);
    if (q2.sign == 0) return true;
    if (q1.sign == 0) return false; // 0 < second would contradict ordering
    if (q1.has_exact && q2.has_exact) {
        // divisor is 2m, an exact integer in every caller
        const __int128 lhs = static_cast<__int128>(llround(divisor)) * q2.exact;
        return lhs <= static_cast<__int128>(q1.exact);
    }
    if (q1.is_saturated() && q2.is_saturated()) return u_second < u_max;
    return q2.lnmag + std::log(divisor) <= q1.lnmag;
}

struct EngineResult {
    std::vector<std::int64_t> checkpoints;
    std::vector<std::int64_t> count_b, count_c, count_d;
    // per replica, per checkpoint: growth chain flag
    std::vector<std::vector<char>> growth;
};

EngineResult extremes_engine(const IncrementLaw& law, std::int64_t n_max,
                             double growth_base, std::int64_t replicas,
                             std::uint64_t seed) {
    if (n_max < 4)
        throw std::invalid_argument("run_extremes: n_max must be >= 4");
    if (!(growth_base > 0.0))
        throw std::invalid_argument("run_extremes: growth base must be > 0");
    if (replicas < 1)
        throw std::invalid_argument("run_extremes: need replicas");

    const std::int64_t c_max =
        static_cast<std::int64_t>(std::floor(std::sqrt(static_cast<double>(n_max))));
    EngineResult res;
    for (std::int64_t c = 2; c <= c_max; ++c)
        res.checkpoints.push_back(c * c);
    const std::size_t n_cp = res.checkpoints.size();
    res.count_b.assign(n_cp, 0);
    res.count_c.assign(n_cp, 0);
    res.count_d.assign(n_cp, 0);
    res.growth.assign(static_cast<std::size_t>(replicas),
                      std::vector<char>(n_cp, 0));

    // CDF thresholds for the B and growth events: X > y iff u > F(y).
    const double ln_k = std::log(growth_base);
    std::vector<double> thr_b(n_cp), thr_g(n_cp);
    for (std::size_t ci = 0; ci < n_cp; ++ci) {
        const double m = static_cast<double>(res.checkpoints[ci]);
        const double ln_pow = m * ln_k;
        if (ln_pow <= std::log(1e15)) {
            thr_b[ci] = law.cdf_abs(
                static_cast<std::int64_t>(std::floor(std::exp(ln_pow))));
            const double two_pow = 2.0 * std::exp(ln_pow);
            thr_g[ci] = two_pow <= 1e15
                            ? law.cdf_abs(static_cast<std::int64_t>(
                                  std::floor(two_pow)))
                            : law.cdf_abs_lnx(std::log(2.0) + ln_pow);
        } else {
            thr_b[ci] = law.cdf_abs_lnx(ln_pow);
            thr_g[ci] = law.cdf_abs_lnx(std::log(2.0) + ln_pow);
        }
    }

    const std::int64_t stream_end = (c_max + 1) * (c_max + 1);
    for (std::int64_t r = 0; r < replicas; ++r) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
        Top2 top;
        std::size_t ci = 0;           // next checkpoint to record
        std::size_t window_of = n_cp; // checkpoint whose update-window is open
        std::int64_t updates = 0;
        for (std::int64_t k = 1; k <= stream_end; ++k) {
            const bool at_square =
                (ci < n_cp && k == res.checkpoints[ci]) || k == stream_end;
            if (at_square && window_of < n_cp) {
                // window (m, next) just closed: at most one tau update
                if (updates <= 1) ++res.count_d[window_of];
                window_of = n_cp;
            }
            const bool upd = top.add(rng.next_unit());
            if (window_of < n_cp && k < stream_end) updates += upd;
            if (ci < n_cp && k == res.checkpoints[ci]) {
                const double m = static_cast<double>(res.checkpoints[ci]);
                if (top.u1 > thr_b[ci]) ++res.count_b[ci];
                const bool c_ev = ratio_event(law, top.u1, top.u2, 2.0 * m);
                if (c_ev) ++res.count_c[ci];
                if (top.u1 > thr_g[ci] && c_ev)
                    res.growth[static_cast<std::size_t>(r)][ci] = 1;
                window_of = ci;
                updates = 0;
                ++ci;
            }
        }
    }
    return res;
}

} // namespace

ExtremesResult run_extremes(const IncrementLaw& law, std::int64_t n_max,
                            double growth_base, std::int64_t replicas,
                            std::uint64_t seed) {
    const EngineResult eng =
        extremes_engine(law, n_max, growth_base, replicas, seed);
    ExtremesResult out;
    out.replicas = replicas;
    out.growth_base = growth_base;
    const double rr = static_cast<double>(replicas);
    for (std::size_t ci = 0; ci < eng.checkpoints.size(); ++ci) {
        out.rows.push_back({eng.checkpoints[ci],
                            static_cast<double>(eng.count_b[ci]) / rr,
                            static_cast<double>(eng.count_c[ci]) / rr,
                            static_cast<double>(eng.count_d[ci]) / rr});
    }
    return out;
}

TauIdentityResult uniform_tau_identity(std::int64_t n, std::int64_t replicas,
                                       std::uint64_t seed) {
    if (n < 2)
        throw std::invalid_argument("uniform_tau_identity: n must be >= 2");
    if (replicas < 10000)
        throw std::invalid_argument(
            "uniform_tau_identity: need >= 10^4 replicas");
    const std::int64_t m = n * n;
    std::int64_t hits = 0;
    for (std::int64_t r = 0; r < replicas; ++r) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
        Top2 top;
        for (std::int64_t k = 0; k < m; ++k) top.add(rng.next_unit());
        if (rng.next_unit() > top.u2) ++hits;
    }
    TauIdentityResult res;
    res.replicas = replicas;
    res.freq = static_cast<double>(hits) / static_cast<double>(replicas);
    res.std_error =
        std::sqrt(res.freq * (1.0 - res.freq) / static_cast<double>(replicas));
    res.target = 2.0 / (static_cast<double>(m) + 1.0);
    return res;
}

UnimodalCheckResult unimodal_convolution_check(const IncrementLaw& law,
                                               std::int64_t n_steps,
                                               std::int64_t radius) {
    if (n_steps < 1 || radius < 1)
        throw std::invalid_argument("unimodal_convolution_check: bad sizes");

    // truncated and renormalized pmf on [-R, R], built symmetric by mirroring
    const std::int64_t r = radius;
    std::vector<double> base(static_cast<std::size_t>(2 * r + 1), 0.0);
    KahanSum mass;
    mass.add(law.pmf(0));
    base[static_cast<std::size_t>(r)] = law.pmf(0);
    for (std::int64_t x = 1; x <= r; ++x) {
        const double v = law.pmf(x);
        base[static_cast<std::size_t>(r + x)] = v;
        base[static_cast<std::size_t>(r - x)] = v;
        mass.add(2.0 * v);
    }
    for (double& v : base) v /= mass.value();
    for (std::int64_t x = 0; x < r; ++x)
        if (base[static_cast<std::size_t>(r + x + 1)] >
            base[static_cast<std::size_t>(r + x)] * (1.0 + 1e-12))
            throw ContractViolation(
                "unimodal_convolution_check: truncated pmf not unimodal");

    // exact n-fold convolution; only x >= 0 is computed, the mirror is free
    std::vector<double> cur = base;
    std::int64_t span = r; // support [-span, span]
    for (std::int64_t step = 2; step <= n_steps; ++step) {
        const std::int64_t nspan = span + r;
        std::vector<double> next(static_cast<std::size_t>(2 * nspan + 1), 0.0);
        for (std::int64_t x = 0; x <= nspan; ++x) {
            KahanSum acc;
            const std::int64_t jlo = std::max(-r, x - span);
            const std::int64_t jhi = std::min(r, x + span);
            for (std::int64_t j = jlo; j <= jhi; ++j)
                acc.add(base[static_cast<std::size_t>(j + r)] *
                        cur[static_cast<std::size_t>(x - j + span)]);
            next[static_cast<std::size_t>(nspan + x)] = acc.value();
            next[static_cast<std::size_t>(nspan - x)] = acc.value();
        }
        cur.swap(next);
        span = nspan;
    }

    UnimodalCheckResult res;
    res.radius = radius;
    KahanSum total;
    for (double v : cur) total.add(v);
    res.mass_defect = std::fabs(total.value() - 1.0);

    res.is_unimodal = true;
    for (std::int64_t x = 0; x < span; ++x)
        if (cur[static_cast<std::size_t>(span + x + 1)] >
            cur[static_cast<std::size_t>(span + x)] * (1.0 + 1e-12)) {
            res.is_unimodal = false;
            break;
        }
    double worst = 0.0;
    for (std::int64_t x = 1; x <= span; ++x)
        worst = std::max(worst, cur[static_cast<std::size_t>(span + x)] *
                                    static_cast<double>(x));
    res.max_violation = worst;

    if (!res.is_unimodal)
        throw ContractViolation(
            "unimodal_convolution_check: convolution lost unimodality");
    if (worst > 1.0 + 1e-12)
        throw ContractViolation(
            "unimodal_convolution_check: P[S_n = x] |x| exceeded 1");
    return res;
}

GrowthWitnessResult growth_witness(const IncrementLaw& law, double growth_base,
                                   std::int64_t n_max, std::int64_t replicas,
                                   std::uint64_t seed, std::int64_t n_min) {
    if (n_min <= 0) n_min = n_max / 4;
    const EngineResult eng =
        extremes_engine(law, n_max, growth_base, replicas, seed);

    GrowthWitnessResult res;
    res.n_min = n_min;
    res.replicas = replicas;

    const std::size_t n_cp = eng.checkpoints.size();
    std::size_t first_counted = 0;
    while (first_counted < n_cp && eng.checkpoints[first_counted] < n_min)
        ++first_counted;

    std::int64_t pass = 0;
    std::vector<std::int64_t> onsets;
    for (std::int64_t r = 0; r < replicas; ++r) {
        const auto& flags = eng.growth[static_cast<std::size_t>(r)];
        bool all = true;
        for (std::size_t ci = first_counted; ci < n_cp; ++ci)
            if (!flags[ci]) {
                all = false;
                break;
            }
        if (all) ++pass;
        // onset: first checkpoint from which the chain holds to the end
        std::size_t ci = n_cp;
        while (ci > 0 && flags[ci - 1]) --ci;
        if (ci < n_cp) onsets.push_back(eng.checkpoints[ci]);
    }
    res.fraction = static_cast<double>(pass) / static_cast<double>(replicas);
    if (!onsets.empty()) {
        std::sort(onsets.begin(), onsets.end());
        res.median_onset = onsets[onsets.size() / 2];
    }
    return res;
}

} // namespace dpre
