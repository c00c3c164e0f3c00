#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dpre/log_magnitude.hpp"
#include "dpre/rng.hpp"

namespace dpre {

enum class WalkFamily {
    Critical,        // pmf shape (log log m)^alpha / (m (log m)^2)
    LogTail,         // one-sided tail ~ (log m)^(-a), 0 < a <= 1
    LogLogTail,      // one-sided tail ~ (log log m)^(-b), b > 0
    PowerTail,       // one-sided tail ~ m^(-a), a > 0 (comparison family)
    NearestNeighbor, // K(+-1) = (1-K0)/2; comparison baseline
};

std::string family_name(WalkFamily f);

struct EntropyResult {
    bool finite = false;
    // Finite: midpoint of the bracket. Divergent: partial-sum lower bound.
    double value = 0.0;
    double bracket_width = 0.0; // Finite only
};

struct ConditionC {
    double ratio = 0.0;
    bool passes = false;
    LogMagnitude s_n;
    double threshold = 0.0; // n^(-gamma)
};

// Symmetric integer increment law K(n) = K(-n) with an atom K0 at zero and
// a closed-form shape for n != 0. Immutable after construction; cheap to
// copy (heavy tables are shared).
class IncrementLaw {
public:
    static IncrementLaw critical(double alpha, int m0 = 0, double k0 = 0.5);
    static IncrementLaw log_tail(double a, int m0 = 3, double k0 = 0.5);
    static IncrementLaw log_log_tail(double b, int m0 = 3, double k0 = 0.5);
    static IncrementLaw power_tail(double a, double k0 = 0.5);
    static IncrementLaw nearest_neighbor(double k0 = 0.0);

    WalkFamily family() const { return family_; }
    double shape_param() const { return param_; }
    int offset() const { return m0_; }
    double mass_at_zero() const { return k0_; }
    double norm_const() const { return norm_const_; }
    // K(n) > 0 for every n (fails for NearestNeighbor).
    bool strictly_positive() const {
        return family_ != WalkFamily::NearestNeighbor;
    }
    // Canonical parameter string, echoed verbatim into result metadata.
    std::string describe() const;

    // Smallest m0 >= 3 making the pmf shape monotone decreasing on m >= 1.
    static int default_offset(WalkFamily f, double param);

    double pmf(std::int64_t n) const;
    double log_pmf(std::int64_t n) const;
    // log K at |x| = e^lnx, real-valued relaxation for magnitudes beyond
    // integer range.
    double log_pmf_lnx(double lnx) const;

    // One-sided tail P[X >= n], n >= 1.
    double tail(std::int64_t n) const;
    // Continuous tail surrogate at x = e^lnx; agrees with tail() beyond the
    // summation crossover.
    double tail_lnx(double lnx) const;

    double cdf_abs(std::int64_t x) const;    // P[|X| <= x], x >= 0
    double cdf_abs_lnx(double lnx) const;    // continuous surrogate
    double cdf_signed(std::int64_t x) const; // P[X <= x]

    // H(K) = sum K(n) log(1/K(n)) with a rigorous tail bracket. Finite
    // results require bracket width < tol. Critical family diverges iff
    // alpha >= -1; LogTail/LogLogTail always diverge.
    EntropyResult entropy(double tol = 1e-6) const;

    // Generalized inverse of the CDF of |X|. Exact integer up to 10^9,
    // real-valued relaxation on ln-scale beyond (saturating at
    // LogMagnitude::saturation for doubly-logarithmic tails).
    LogMagnitude quantile_logmag(double u) const;

    // Inverse-CDF draw of the signed increment; Overflow (nullopt) when
    // |X| > cap. cap must be <= 10^9 so the integer inversion is exact.
    std::optional<std::int64_t> sample_exact(Rng& rng, std::int64_t cap) const;
    // Full draw: exact integer when |X| <= 10^9, log-magnitude beyond.
    LogMagnitude sample_logmag(Rng& rng) const;

    // min{s >= 1 : P[X >= s] <= (log n)^2 / n}, n >= 3.
    LogMagnitude s_n(std::int64_t n) const;

    // P[X in (s_n, 2n s_n)] / P[X >= s_n] vs n^(-gamma), gamma > 1/2.
    ConditionC condition_c_ratio(std::int64_t n, double gamma) const;

    // Crossover from exact partial summation to the integral tail form.
    static constexpr std::int64_t summation_crossover = 1000000;
    // Largest magnitude returned as an exact integer quantile.
    static constexpr std::int64_t exact_quantile_limit = 1000000000;

private:
    IncrementLaw() = default;
    void validate_unimodal_head() const;

    double shape(double m) const;     // pmf shape at real m >= 1 (Critical)
    double tail_integral(double x) const; // integral tail of the shape

    WalkFamily family_ = WalkFamily::NearestNeighbor;
    double param_ = 0.0; // alpha / a / b
    int m0_ = 3;
    double k0_ = 0.5;
    double tau1_ = 0.25;       // one-sided tail at 1: (1-K0)/2
    double norm_const_ = 1.0;  // A
    double log_b1_ = 0.0;      // log of the tail base at m = 1

    struct CriticalTables;
    std::shared_ptr<const CriticalTables> tables_; // Critical only
};

} // namespace dpre
