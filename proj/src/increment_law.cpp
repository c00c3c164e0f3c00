#include "dpre/increment_law.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "dpre/errors.hpp"
#include "dpre/numerics.hpp"

namespace dpre {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt_g(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

// pow with a fast path for small integer exponents (the hot loops run
// millions of shape evaluations).
struct PowSpec {
    double exponent = 0.0;
    bool is_int = false;
    int iexp = 0;

    explicit PowSpec(double e) : exponent(e) {
        double r = std::nearbyint(e);
        if (r == e && std::fabs(e) <= 8.0) {
            is_int = true;
            iexp = static_cast<int>(r);
        }
    }

    double operator()(double x) const {
        if (!is_int) return std::pow(x, exponent);
        int n = iexp < 0 ? -iexp : iexp;
        double p = 1.0;
        double b = x;
        while (n) {
            if (n & 1) p *= b;
            b *= b;
            n >>= 1;
        }
        return iexp < 0 ? 1.0 / p : p;
    }
};

} // namespace

std::string family_name(WalkFamily f) {
    switch (f) {
    case WalkFamily::Critical: return "critical";
    case WalkFamily::LogTail: return "log_tail";
    case WalkFamily::LogLogTail: return "loglog_tail";
    case WalkFamily::PowerTail: return "power_tail";
    case WalkFamily::NearestNeighbor: return "nearest_neighbor";
    }
    return "?";
}

// Suffix sums of the Critical shape up to the summation crossover, with the
// integral continuation appended so tail() telescopes exactly against pmf().
struct IncrementLaw::CriticalTables {
    std::vector<double> suffix; // index m in [1, crossover+1]
    PowSpec alpha_pow;

    explicit CriticalTables(double alpha) : alpha_pow(alpha) {}
};

double IncrementLaw::shape(double m) const {
    const double u = std::log(m + m0_);
    const double llu = std::log(u);
    return tables_->alpha_pow(llu) / ((m + m0_) * u * u);
}

// Integral continuation of sum_{k >= x} shape(k) with midpoint correction:
// integral over [x - 1/2, inf) of the shape, reduced to
// (1/u0) * int_0^inf (log u0 + y)^alpha e^{-y} dy with u0 = log(x-1/2+m0).
double IncrementLaw::tail_integral(double x) const {
    double u0;
    if (x < 1e300) {
        u0 = std::log(x - 0.5 + m0_);
    } else {
        u0 = std::log(x);
    }
    const double w0 = std::log(u0);
    const PowSpec& ap = tables_->alpha_pow;
    auto f = [&](double y) { return ap(w0 + y) * std::exp(-y); };
    const double scale = ap(param_ > 0.0 ? w0 + 40.0 : w0);
    const double q =
        adaptive_simpson(f, 0.0, 60.0, std::max(1e-300, 1e-13 * scale));
    return q / u0;
}

// ---- tail-defined families: base chain helpers -----------------------------
//
// T(m) = tau1 * (b(1)/b(m))^a with b the family base:
//   PowerTail   b(x) = x
//   LogTail     b(x) = log(x + m0)
//   LogLogTail  b(x) = log log(x + m0)
// pmf(m) = T(m) - T(m+1) evaluated through expm1/log1p so no significance is
// lost when the two tails nearly coincide.

namespace {

struct BaseChain {
    double log_base;  // log b(x)
    double inc;       // log(b(x+1)/b(x))
};

BaseChain base_chain(WalkFamily fam, double x, int m0) {
    BaseChain out{};
    if (fam == WalkFamily::PowerTail) {
        out.log_base = std::log(x);
        out.inc = std::log1p(1.0 / x);
        return out;
    }
    const double g = std::log(x + m0);
    const double r0 = std::log1p(1.0 / (x + m0));
    if (fam == WalkFamily::LogTail) {
        out.log_base = std::log(g);
        out.inc = std::log1p(r0 / g);
        return out;
    }
    // LogLogTail
    const double h = std::log(g);
    const double r1 = std::log1p(r0 / g);
    out.log_base = std::log(h);
    out.inc = std::log1p(r1 / h);
    return out;
}

// log b(x) for x = e^L without forming x when it would overflow.
double log_base_lnx(WalkFamily fam, double L, int m0) {
    if (fam == WalkFamily::PowerTail) return L;
    const double g = L + std::log1p(m0 * std::exp(-L)); // log(x + m0)
    if (fam == WalkFamily::LogTail) return std::log(g);
    return std::log(std::log(g));
}

} // namespace

// ---- construction -----------------------------------------------------------

int IncrementLaw::default_offset(WalkFamily f, double param) {
    if (f != WalkFamily::Critical) return 3;
    int m0 = 3;
    // shape decreasing from m = 1 iff alpha <= loglog(1+m0)*(log(1+m0)+2)
    while (param > std::log(std::log(1.0 + m0)) * (std::log(1.0 + m0) + 2.0))
        ++m0;
    return m0;
}

void IncrementLaw::validate_unimodal_head() const {
    if (family_ == WalkFamily::NearestNeighbor) return;
    if (pmf(1) > k0_)
        throw std::invalid_argument(
            "IncrementLaw: K(1) > K(0); atom k0 too small for unimodality");
    double prev = pmf(1);
    for (std::int64_t m = 2; m <= 64; ++m) {
        double cur = pmf(m);
        if (cur > prev * (1.0 + 1e-12))
            throw std::invalid_argument(
                "IncrementLaw: shape not monotone decreasing near the origin");
        prev = cur;
    }
}

IncrementLaw IncrementLaw::critical(double alpha, int m0, double k0) {
    if (!(k0 > 0.0 && k0 < 1.0))
        throw std::invalid_argument("critical: k0 must lie in (0,1)");
    if (m0 == 0) m0 = default_offset(WalkFamily::Critical, alpha);
    if (m0 < 3) throw std::invalid_argument("critical: m0 must be >= 3");
    if (alpha > std::log(std::log(1.0 + m0)) * (std::log(1.0 + m0) + 2.0))
        throw std::invalid_argument(
            "critical: shape not monotone for this (alpha, m0)");

    IncrementLaw law;
    law.family_ = WalkFamily::Critical;
    law.param_ = alpha;
    law.m0_ = m0;
    law.k0_ = k0;
    law.tau1_ = 0.5 * (1.0 - k0);

    auto tables = std::make_shared<CriticalTables>(alpha);
    law.tables_ = tables;

    const std::int64_t xc = summation_crossover;
    tables->suffix.assign(static_cast<std::size_t>(xc) + 2, 0.0);
    tables->suffix[static_cast<std::size_t>(xc) + 1] =
        law.tail_integral(static_cast<double>(xc) + 1.0);
    KahanSum acc;
    acc.add(tables->suffix[static_cast<std::size_t>(xc) + 1]);
    for (std::int64_t m = xc; m >= 1; --m) {
        acc.add(law.shape(static_cast<double>(m)));
        tables->suffix[static_cast<std::size_t>(m)] = acc.value();
    }
    law.norm_const_ = law.tau1_ / tables->suffix[1];
    law.validate_unimodal_head();
    return law;
}

IncrementLaw IncrementLaw::log_tail(double a, int m0, double k0) {
    if (!(a > 0.0 && a <= 1.0))
        throw std::invalid_argument("log_tail: a must lie in (0,1]");
    if (!(k0 > 0.0 && k0 < 1.0))
        throw std::invalid_argument("log_tail: k0 must lie in (0,1)");
    if (m0 < 3) throw std::invalid_argument("log_tail: m0 must be >= 3");
    IncrementLaw law;
    law.family_ = WalkFamily::LogTail;
    law.param_ = a;
    law.m0_ = m0;
    law.k0_ = k0;
    law.tau1_ = 0.5 * (1.0 - k0);
    // A such that T(m) = A * (log(m+m0))^{-a}; tails are evaluated in ratio
    // form so T(1) = tau1 holds exactly.
    law.log_b1_ = base_chain(law.family_, 1.0, m0).log_base;
    law.norm_const_ = law.tau1_ * std::exp(a * law.log_b1_);
    law.validate_unimodal_head();
    return law;
}

IncrementLaw IncrementLaw::log_log_tail(double b, int m0, double k0) {
    if (!(b > 0.0))
        throw std::invalid_argument("log_log_tail: b must be positive");
    if (!(k0 > 0.0 && k0 < 1.0))
        throw std::invalid_argument("log_log_tail: k0 must lie in (0,1)");
    if (m0 < 3) throw std::invalid_argument("log_log_tail: m0 must be >= 3");
    IncrementLaw law;
    law.family_ = WalkFamily::LogLogTail;
    law.param_ = b;
    law.m0_ = m0;
    law.k0_ = k0;
    law.tau1_ = 0.5 * (1.0 - k0);
    law.log_b1_ = base_chain(law.family_, 1.0, m0).log_base;
    law.norm_const_ = law.tau1_ * std::exp(b * law.log_b1_);
    law.validate_unimodal_head();
    return law;
}

IncrementLaw IncrementLaw::power_tail(double a, double k0) {
    if (!(a > 0.0))
        throw std::invalid_argument("power_tail: a must be positive");
    if (!(k0 > 0.0 && k0 < 1.0))
        throw std::invalid_argument("power_tail: k0 must lie in (0,1)");
    IncrementLaw law;
    law.family_ = WalkFamily::PowerTail;
    law.param_ = a;
    law.m0_ = 3; // unused by the PowerTail base
    law.k0_ = k0;
    law.tau1_ = 0.5 * (1.0 - k0);
    law.log_b1_ = 0.0; // b(1) = 1
    law.norm_const_ = law.tau1_;
    law.validate_unimodal_head();
    return law;
}

IncrementLaw IncrementLaw::nearest_neighbor(double k0) {
    // k0 = 0 is the classical baseline (violates K(n) > 0 and unimodality;
    // admitted for free-energy contrast only). A positive atom must keep
    // K(0) >= K(1).
    if (k0 != 0.0 && !(k0 >= 1.0 / 3.0 && k0 < 1.0))
        throw std::invalid_argument(
            "nearest_neighbor: k0 must be 0 or in [1/3, 1)");
    IncrementLaw law;
    law.family_ = WalkFamily::NearestNeighbor;
    law.param_ = 0.0;
    law.m0_ = 0;
    law.k0_ = k0;
    law.tau1_ = 0.5 * (1.0 - k0);
    law.norm_const_ = law.tau1_;
    return law;
}

std::string IncrementLaw::describe() const {
    switch (family_) {
    case WalkFamily::Critical:
        return "critical(alpha=" + fmt_g(param_) + ",m0=" + std::to_string(m0_) +
               ",k0=" + fmt_g(k0_) + ")";
    case WalkFamily::LogTail:
        return "log_tail(a=" + fmt_g(param_) + ",m0=" + std::to_string(m0_) +
               ",k0=" + fmt_g(k0_) + ")";
    case WalkFamily::LogLogTail:
        return "loglog_tail(b=" + fmt_g(param_) + ",m0=" + std::to_string(m0_) +
               ",k0=" + fmt_g(k0_) + ")";
    case WalkFamily::PowerTail:
        return "power_tail(a=" + fmt_g(param_) + ",k0=" + fmt_g(k0_) + ")";
    case WalkFamily::NearestNeighbor:
        return "nearest_neighbor(k0=" + fmt_g(k0_) + ")";
    }
    return "?";
}

// ---- pmf / tail -------------------------------------------------------------

double IncrementLaw::pmf(std::int64_t n) const {
    const std::int64_t m = n < 0 ? -n : n;
    if (m == 0) return k0_;
    switch (family_) {
    case WalkFamily::NearestNeighbor:
        return m == 1 ? tau1_ : 0.0;
    case WalkFamily::Critical:
        return norm_const_ * shape(static_cast<double>(m));
    default: {
        const BaseChain c = base_chain(family_, static_cast<double>(m), m0_);
        const double t_m = tau1_ * std::exp(-param_ * (c.log_base - log_b1_));
        return t_m * (-std::expm1(-param_ * c.inc));
    }
    }
}

double IncrementLaw::log_pmf(std::int64_t n) const {
    const std::int64_t m = n < 0 ? -n : n;
    if (m == 0) return k0_ > 0.0 ? std::log(k0_) : -kInf;
    switch (family_) {
    case WalkFamily::NearestNeighbor:
        return m == 1 ? std::log(tau1_) : -kInf;
    case WalkFamily::Critical: {
        const double u = std::log(static_cast<double>(m) + m0_);
        const double llu = std::log(u);
        return std::log(norm_const_) + param_ * std::log(llu) -
               std::log(static_cast<double>(m) + m0_) - 2.0 * std::log(u);
    }
    default: {
        const BaseChain c = base_chain(family_, static_cast<double>(m), m0_);
        return std::log(tau1_) - param_ * (c.log_base - log_b1_) +
               std::log(-std::expm1(-param_ * c.inc));
    }
    }
}

double IncrementLaw::log_pmf_lnx(double lnx) const {
    switch (family_) {
    case WalkFamily::NearestNeighbor:
        throw std::logic_error("log_pmf_lnx: bounded-support law");
    case WalkFamily::Critical: {
        const double g = lnx + std::log1p(m0_ * std::exp(-lnx)); // log(x+m0)
        return std::log(norm_const_) + param_ * std::log(std::log(g)) - g -
               2.0 * std::log(g);
    }
    default: {
        if (lnx < 690.0) {
            const double x = std::exp(lnx);
            const BaseChain c = base_chain(family_, x, m0_);
            return std::log(tau1_) - param_ * (c.log_base - log_b1_) +
                   std::log(-std::expm1(-param_ * c.inc));
        }
        // x too large to form: log(pmf) ~ log(T(x)) + log(a * d log b / dx)
        const double lb = log_base_lnx(family_, lnx, m0_);
        double log_inc;
        if (family_ == WalkFamily::PowerTail) {
            log_inc = -lnx;
        } else if (family_ == WalkFamily::LogTail) {
            log_inc = -lnx - std::log(lnx);
        } else {
            log_inc = -lnx - std::log(lnx) - std::log(std::log(lnx));
        }
        return std::log(tau1_) - param_ * (lb - log_b1_) + std::log(param_) +
               log_inc;
    }
    }
}

double IncrementLaw::tail(std::int64_t n) const {
    if (n < 1) throw std::invalid_argument("tail: n must be >= 1");
    switch (family_) {
    case WalkFamily::NearestNeighbor:
        return n == 1 ? tau1_ : 0.0;
    case WalkFamily::Critical:
        if (n <= summation_crossover + 1)
            return norm_const_ * tables_->suffix[static_cast<std::size_t>(n)];
        return norm_const_ * tail_integral(static_cast<double>(n));
    default: {
        const BaseChain c = base_chain(family_, static_cast<double>(n), m0_);
        return tau1_ * std::exp(-param_ * (c.log_base - log_b1_));
    }
    }
}

double IncrementLaw::tail_lnx(double lnx) const {
    switch (family_) {
    case WalkFamily::NearestNeighbor:
        return lnx <= 0.0 ? tau1_ : 0.0;
    case WalkFamily::Critical: {
        double x = lnx < 690.0 ? std::exp(lnx) : kInf;
        if (x < 1e300) return norm_const_ * tail_integral(x);
        // u0 = log(x - 1/2 + m0) ~ lnx for huge x
        const double u0 = lnx;
        const double w0 = std::log(u0);
        const PowSpec& ap = tables_->alpha_pow;
        auto f = [&](double y) { return ap(w0 + y) * std::exp(-y); };
        const double scale = ap(param_ > 0.0 ? w0 + 40.0 : w0);
        const double q =
            adaptive_simpson(f, 0.0, 60.0, std::max(1e-300, 1e-13 * scale));
        return norm_const_ * q / u0;
    }
    default: {
        const double lb = log_base_lnx(family_, lnx, m0_);
        return tau1_ * std::exp(-param_ * (lb - log_b1_));
    }
    }
}

double IncrementLaw::cdf_abs(std::int64_t x) const {
    if (x < 0) throw std::invalid_argument("cdf_abs: x must be >= 0");
    return 1.0 - 2.0 * tail(x + 1);
}

double IncrementLaw::cdf_abs_lnx(double lnx) const {
    return 1.0 - 2.0 * tail_lnx(lnx);
}

double IncrementLaw::cdf_signed(std::int64_t x) const {
    if (x >= 0) return 1.0 - tail(x + 1);
    return tail(-x);
}

// ---- entropy ----------------------------------------------------------------

namespace {

// Entropy summand is m -> K(m) log(1/K(m)); once K < 1/e this is decreasing
// whenever K is, so the remainder past the cutoff is bracketed by integrals
// of the continuous summand at the cutoff and cutoff+1.
constexpr std::int64_t kEntropyCutoff = IncrementLaw::summation_crossover;

} // namespace

EntropyResult IncrementLaw::entropy(double tol) const {
    if (!(tol > 0.0)) throw std::invalid_argument("entropy: tol must be > 0");
    EntropyResult res;

    const double atom = k0_ > 0.0 ? k0_ * std::log(1.0 / k0_) : 0.0;

    if (family_ == WalkFamily::NearestNeighbor) {
        res.finite = true;
        res.value = atom + 2.0 * tau1_ * std::log(1.0 / tau1_);
        res.bracket_width = 0.0;
        return res;
    }

    const bool divergent = (family_ == WalkFamily::LogTail) ||
                           (family_ == WalkFamily::LogLogTail) ||
                           (family_ == WalkFamily::Critical && param_ >= -1.0);

    KahanSum partial;
    for (std::int64_t m = 1; m <= kEntropyCutoff; ++m) {
        const double lk = log_pmf(m);
        partial.add(std::exp(lk) * (-lk));
    }

    if (divergent) {
        res.finite = false;
        res.value = atom + 2.0 * partial.value();
        res.bracket_width = kInf;
        return res;
    }

    double r_hi, r_lo;
    if (family_ == WalkFamily::Critical) {
        // int_X^inf A psi(x) (-log(A psi(x))) dx splits into a closed form
        // plus an exponentially convergent piece: with u = log(x+m0),
        // w = log u,
        //   A * [ int w^alpha dw  +
        //         (1/u0) int (w0+y)^alpha (2(w0+y) - alpha log(w0+y) - log A)
        //                e^{-y} dy ]
        const double log_a = std::log(norm_const_);
        const PowSpec& ap = tables_->alpha_pow;
        auto ent_tail = [&](double x) {
            const double u0 = std::log(x + m0_);
            const double w0 = std::log(u0);
            const double j1 = ap(w0) * w0 / (-(param_ + 1.0));
            auto f = [&](double y) {
                const double w = w0 + y;
                return ap(w) * (2.0 * w - param_ * std::log(w) - log_a) *
                       std::exp(-y);
            };
            const double scale = ap(w0) * (2.0 * w0 + std::fabs(log_a) + 2.0);
            const double j2 = adaptive_simpson(f, 0.0, 80.0,
                                               std::max(1e-300, 1e-13 * scale)) /
                              u0;
            return norm_const_ * (j1 + j2);
        };
        r_hi = ent_tail(static_cast<double>(kEntropyCutoff));
        r_lo = ent_tail(static_cast<double>(kEntropyCutoff) + 1.0);
    } else {
        // PowerTail: continuous summand through the same stable chain.
        auto summand = [&](double x) {
            const BaseChain c = base_chain(family_, x, m0_);
            const double lk = std::log(tau1_) - param_ * (c.log_base - log_b1_) +
                              std::log(-std::expm1(-param_ * c.inc));
            return std::exp(lk) * (-lk);
        };
        const double y_max = 60.0 / std::min(1.0, param_) + 60.0;
        const double scale = summand(static_cast<double>(kEntropyCutoff)) *
                             static_cast<double>(kEntropyCutoff);
        r_hi = integral_exp_substitution(summand,
                                         static_cast<double>(kEntropyCutoff),
                                         std::max(1e-300, 1e-13 * scale), y_max);
        r_lo = integral_exp_substitution(
            summand, static_cast<double>(kEntropyCutoff) + 1.0,
            std::max(1e-300, 1e-13 * scale), y_max);
    }

    // Bracket validity: summand decreasing past the cutoff.
    const double k_cut = pmf(kEntropyCutoff);
    const double t_cut = k_cut * (-log_pmf(kEntropyCutoff));
    const double t_next = pmf(kEntropyCutoff + 1) * (-log_pmf(kEntropyCutoff + 1));
    if (!(k_cut < 0.3678794411714423 && t_next <= t_cut * (1.0 + 1e-9)) ||
        !(r_hi >= r_lo))
        throw ContractViolation("entropy: tail bracket could not be established");

    res.finite = true;
    res.value = atom + 2.0 * partial.value() + r_lo + r_hi;
    res.bracket_width = 2.0 * (r_hi - r_lo);
    if (res.bracket_width >= tol)
        throw ContractViolation("entropy: bracket width exceeds tolerance");
    return res;
}

// ---- quantiles / sampling ----------------------------------------------------

LogMagnitude IncrementLaw::quantile_logmag(double u) const {
    if (!(u > 0.0 && u < 1.0))
        throw std::domain_error("quantile_logmag: u outside (0,1)");
    if (u <= k0_) return LogMagnitude::zero();
    const double t = 0.5 * (1.0 - u); // want min x with tail(x+1) <= t

    if (family_ == WalkFamily::NearestNeighbor)
        return LogMagnitude::from_int(1);

    // The integer search runs on the same floating expression the caller's
    // CDF uses, so quantile(cdf_abs(x)) returns x bit-for-bit.
    if (cdf_abs(exact_quantile_limit) >= u) {
        std::int64_t lo = 0, hi = exact_quantile_limit;
        while (lo + 1 < hi) {
            const std::int64_t mid = lo + (hi - lo) / 2;
            if (cdf_abs(mid) >= u)
                hi = mid;
            else
                lo = mid;
        }
        return LogMagnitude::from_int(hi);
    }

    // Real-valued relaxation on ln-scale: solve tail(x) = t.
    double lo = std::log(static_cast<double>(exact_quantile_limit));
    double hi = 2.0 * lo;
    while (tail_lnx(hi) > t) {
        lo = hi;
        hi *= 2.0;
        if (hi >= LogMagnitude::saturation)
            return LogMagnitude::from_lnmag(1, LogMagnitude::saturation);
    }
    while (hi - lo > 1e-7 && hi - lo > 1e-13 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (tail_lnx(mid) > t)
            lo = mid;
        else
            hi = mid;
    }
    return LogMagnitude::from_lnmag(1, 0.5 * (lo + hi));
}

namespace {

// Fold one uniform into (sign, magnitude-level): the magnitude quantile is
// taken at v and the sign comes from which half of (0,1) u fell in. Keeps
// P[X = 0] = K0 and P[X = m] = K(m) per side.
struct Folded {
    int sign;
    double v;
};

Folded fold_uniform(double u) {
    if (u >= 0.5) return {+1, 2.0 * u - 1.0};
    return {-1, 1.0 - 2.0 * u};
}

} // namespace

std::optional<std::int64_t> IncrementLaw::sample_exact(Rng& rng,
                                                       std::int64_t cap) const {
    if (cap < 1) throw std::invalid_argument("sample_exact: cap must be >= 1");
    if (cap > exact_quantile_limit)
        throw std::invalid_argument(
            "sample_exact: cap beyond exact inversion range (10^9)");
    const Folded f = fold_uniform(rng.next_unit());
    if (f.v <= k0_) return 0;
    if (cdf_abs(cap) < f.v) return std::nullopt; // magnitude above cap
    std::int64_t lo = 0, hi = cap;
    while (lo + 1 < hi) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        if (cdf_abs(mid) >= f.v)
            hi = mid;
        else
            lo = mid;
    }
    return f.sign > 0 ? hi : -hi;
}

LogMagnitude IncrementLaw::sample_logmag(Rng& rng) const {
    const Folded f = fold_uniform(rng.next_unit());
    if (f.v <= k0_) return LogMagnitude::zero();
    LogMagnitude mag = quantile_logmag(f.v);
    if (mag.sign == 0) return mag;
    mag.sign = f.sign;
    if (mag.has_exact && f.sign < 0) mag.exact = -mag.exact;
    return mag;
}

LogMagnitude IncrementLaw::s_n(std::int64_t n) const {
    if (n < 3) throw std::invalid_argument("s_n: n must be >= 3");
    const double ln_n = std::log(static_cast<double>(n));
    const double thr = ln_n * ln_n / static_cast<double>(n);
    if (tail(1) <= thr) return LogMagnitude::from_int(1);
    if (tail(exact_quantile_limit) <= thr) {
        std::int64_t lo = 1, hi = exact_quantile_limit;
        while (lo + 1 < hi) {
            const std::int64_t mid = lo + (hi - lo) / 2;
            if (tail(mid) <= thr)
                hi = mid;
            else
                lo = mid;
        }
        return LogMagnitude::from_int(hi);
    }
    double lo = std::log(static_cast<double>(exact_quantile_limit));
    double hi = 2.0 * lo;
    while (tail_lnx(hi) > thr) {
        lo = hi;
        hi *= 2.0;
        if (hi >= LogMagnitude::saturation)
            return LogMagnitude::from_lnmag(1, LogMagnitude::saturation);
    }
    while (hi - lo > 1e-7 && hi - lo > 1e-13 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (tail_lnx(mid) > thr)
            lo = mid;
        else
            hi = mid;
    }
    return LogMagnitude::from_lnmag(1, 0.5 * (lo + hi));
}

ConditionC IncrementLaw::condition_c_ratio(std::int64_t n, double gamma) const {
    if (n < 3) throw std::invalid_argument("condition_c_ratio: n must be >= 3");
    if (!(gamma > 0.5))
        throw std::invalid_argument("condition_c_ratio: gamma must be > 1/2");
    ConditionC out;
    out.s_n = s_n(n);
    out.threshold = std::pow(static_cast<double>(n), -gamma);

    double den, num;
    if (out.s_n.has_exact) {
        const std::int64_t s = out.s_n.exact;
        den = tail(s);
        const double two_n_s =
            2.0 * static_cast<double>(n) * static_cast<double>(s);
        double upper_tail;
        if (two_n_s < 4.0e18) {
            upper_tail = tail(static_cast<std::int64_t>(two_n_s));
        } else {
            upper_tail = tail_lnx(std::log(two_n_s));
        }
        num = tail(s + 1) - upper_tail;
    } else {
        // Lattice +-1 corrections are far below double precision out here.
        const double L = out.s_n.lnmag;
        den = tail_lnx(L);
        num = den - tail_lnx(L + std::log(2.0 * static_cast<double>(n)));
    }
    out.ratio = (den > 0.0 && num > 0.0) ? num / den : 0.0;
    out.passes = out.ratio <= out.threshold;
    return out;
}

} // namespace dpre
