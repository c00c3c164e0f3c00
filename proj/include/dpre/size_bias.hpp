#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dpre/partition.hpp"

namespace dpre {

// E[log K(X)] + beta*lambda'(beta) - lambda(beta) = excess - H(K).
// A positive value certifies strong disorder; walks with divergent entropy
// give -infinity for every beta (nullopt).
std::optional<double> h_beta(const IncrementLaw& law, const EnvironmentLaw& env,
                             double beta);

struct SlopeEstimate {
    double slope = 0.0;
    double std_error = 0.0;
    std::int64_t terms = 0;
};

// Empirical mean of i.i.d. terms log K(X_k) + beta*w~_k - lambda(beta),
// X from the walk law (log-magnitude draws beyond integer range), w~ from
// the tilted environment. Matches h_beta within sampling error.
SlopeEstimate lln_slope_check(const IncrementLaw& law, const EnvironmentLaw& env,
                              double beta, std::int64_t n_steps,
                              std::int64_t replicas, std::uint64_t seed,
                              int workers = 1);

struct SizeBiasRun {
    std::vector<std::int64_t> path;   // window positions S_1..S_N
    std::vector<std::int64_t> steps;  // periodic displacements
    std::vector<double> tilted;       // tilted values along the path
    WTrajectory w_hat;                // trajectory under the composite field
    double path_bound_log_w = 0.0;    // sum log K_M(X_k) + beta w~_k - lambda
};

// One draw from the size-biased description: sample a path from the
// truncated walk, tilt the disorder along it, and run the exact DP under
// the composite field. The single-path lower bound
//   log W_N >= sum_k [log K_M(X_k) + beta w~_k - lambda]
// is asserted on every run.
SizeBiasRun size_bias_run(const PolymerConfig& config, std::uint64_t replica);

// W_N samples under the size-biased measure.
std::vector<double> sized_biased_w(const PolymerConfig& config,
                                   std::int64_t replicas, int workers = 1);

struct DetectorRow {
    std::int64_t n;
    double level;     // L
    double fraction;  // fraction of W_N >= L
    double std_error;
};

struct DetectorResult {
    std::vector<DetectorRow> rows;
    std::optional<double> h_beta_value; // nullopt: divergent entropy
    double entropy_value = 0.0;
    bool entropy_finite = false;
    double excess = 0.0;
    // per level: trend z-score (fraction at N_max vs N_min over pooled SE)
    std::vector<double> trend_z;
    std::string classification; // strong-disorder-signature |
                                // weak-disorder-signature | inconclusive
};

// Size-bias dichotomy detector: under the size-biased measure W_N -> inf in
// probability iff W_N -> 0 a.s.; rising fractions of {W_N >= L} along the N
// grid are the strong-disorder signature. Finite-size runs may legitimately
// be inconclusive.
DetectorResult birkner_detector(const PolymerConfig& config,
                                const std::vector<std::int64_t>& n_grid,
                                const std::vector<double>& levels,
                                std::int64_t replicas, int workers = 1);

} // namespace dpre
