#pragma once

#include <cstdint>
#include <vector>

#include "dpre/increment_law.hpp"

namespace dpre {

// Running maximum / second maximum of a uniform stream. The coupling
// |X_i| = F^{-1}(U_i) is monotone, so record tracking happens on the
// uniforms and magnitudes are materialized only at checkpoints.
struct Top2 {
    double u1 = -1.0; // largest
    double u2 = -1.0; // second largest
    std::int64_t count = 0;

    // Returns true when the running second maximum was updated (the tau
    // update times); meaningful once two values have been seen.
    bool add(double u) {
        ++count;
        if (count == 1) {
            u1 = u;
            return false;
        }
        if (count == 2) {
            if (u > u1) {
                u2 = u1;
                u1 = u;
            } else {
                u2 = u;
            }
            return false;
        }
        if (u > u2) {
            if (u > u1) {
                u2 = u1;
                u1 = u;
            } else {
                u2 = u;
            }
            return true;
        }
        return false;
    }
};

struct ExtremeCheckpoint {
    std::int64_t m; // checkpoint time, a perfect square
    double freq_b;  // max > K^m
    double freq_c;  // second max <= max / (2m)
    double freq_d;  // at most one second-max update before the next square
};

struct ExtremesResult {
    std::vector<ExtremeCheckpoint> rows;
    std::int64_t replicas = 0;
    double growth_base = 0.0; // K
};

// Frequencies of the extreme-record events along the n^2 checkpoint skeleton,
// estimated over independent replica streams coupled through shared uniforms.
ExtremesResult run_extremes(const IncrementLaw& law, std::int64_t n_max,
                            double growth_base, std::int64_t replicas,
                            std::uint64_t seed);

struct TauIdentityResult {
    double freq = 0.0;
    double std_error = 0.0;
    double target = 0.0; // 2/(n^2+1)
    std::int64_t replicas = 0;
};

// P[U_{m+1} > second max of U_1..U_m] with m = n^2; equals 2/(m+1) exactly.
TauIdentityResult uniform_tau_identity(std::int64_t n, std::int64_t replicas,
                                       std::uint64_t seed);

struct UnimodalCheckResult {
    bool is_unimodal = false;
    double max_violation = 0.0; // max over x != 0 of P[S_n = x] * |x|
    double mass_defect = 0.0;   // |total mass - 1|
    std::int64_t radius = 0;
};

// Exact n-fold convolution of the pmf truncated to [-R, R]; asserts the
// result stays unimodal and P[S_n = x] <= 1/|x|.
UnimodalCheckResult unimodal_convolution_check(const IncrementLaw& law,
                                               std::int64_t n_steps,
                                               std::int64_t radius);

struct GrowthWitnessResult {
    double fraction = 0.0;        // replicas with the chain at every
                                  // checkpoint >= n_min
    std::int64_t median_onset = -1; // median first checkpoint from which the
                                    // chain holds through the end (-1: none)
    std::int64_t n_min = 0;
    std::int64_t replicas = 0;
};

// Growth witness for |S_n| > K^n: tracks whether max > 2 K^m and
// second max <= max/(2m) jointly hold from some checkpoint onward. The two
// events are sufficient for the record-vs-sum inequality chain, which only
// needs log-scale comparisons.
GrowthWitnessResult growth_witness(const IncrementLaw& law, double growth_base,
                                   std::int64_t n_max, std::int64_t replicas,
                                   std::uint64_t seed, std::int64_t n_min = 0);

} // namespace dpre
