#pragma once

#include <cstdint>
#include <vector>

#include "dpre/increment_law.hpp"
#include "dpre/lattice_field.hpp"

namespace dpre {

// Space-time block of size N x 2N^2; distinct (i,j) blocks are disjoint and
// tile the plane.
struct RectangleSpec {
    std::int64_t n;
    std::int64_t i;
    std::int64_t j;

    bool contains(std::int64_t x, std::int64_t y) const {
        return x >= i * n + 1 && x <= (i + 1) * n &&
               y >= (2 * j - 1) * n * n && y < (2 * j + 1) * n * n;
    }
};

// P[A_N]: the walk stays strictly within distance N^2 of its start for the
// first N-1 steps and returns to the start at step N-1. Computed exactly by
// a disorder-free DP with the untruncated kernel (every transition inside
// the window has |jump| < 2N^2).
double a_n_probability(const IncrementLaw& law, std::int64_t n);

// Restricted normalized partition function of rectangle (i,j): exact DP over
// the window, conditioned on A_N, so the disorder mean is exactly 1.
// p_an must be a_n_probability(law, N) (passed in so batches amortize it).
// Rejects laws whose conditioned path set is empty (parity).
double restricted_w(const LatticeField& field, const IncrementLaw& law,
                    double beta, std::int64_t n, std::int64_t i, std::int64_t j,
                    double p_an);

struct GoodRectangleStats {
    double eta = 0.0;       // 2^(n0-1)
    double p_eta_hat = 0.0; // P[W~ >= eta] estimate
    double std_error = 0.0;
    int n0 = 0;
    std::int64_t samples = 0;
};

struct DyadicSearchResult {
    GoodRectangleStats stats;
    std::vector<double> wtilde;  // pooled sample, for independent re-checks
    double second_moment = 0.0;  // mean of W~^2
    double mean = 0.0;
};

// Dyadic threshold search: the smallest n0 with
//   (3/pi^2) (n0+1)^{-2} <= 2^{n0}  P[2^{n0-1} <= W~]
// estimated from a pooled sample of restricted_w draws. The plug-in chain
//   sum_n 2^n P^[2^{n-1} <= W~] >= mean(W~) - 1/2
// holds exactly per sample and is asserted.
DyadicSearchResult dyadic_eta_search(const IncrementLaw& law,
                                     const EnvironmentLaw& env, double beta,
                                     std::int64_t n, std::int64_t samples,
                                     std::uint64_t seed, int workers = 1);

// C_{L,eps} = inf { x^eps L(x) : x >= K } for L(x) = x K(x), with K the
// onset past which x^eps L(x) stops decreasing; scanned on [2, 10^9] and
// refined locally. k_onset_out receives the onset when non-null.
double slowly_varying_constant(const IncrementLaw& law, double epsilon,
                               double* k_onset_out = nullptr);

// Free-energy lower bound assembled from the coarse-graining ingredients:
//   log(eta)/N + (1/N) log(C / (2N^2)^{1+eps})
//     - ((1+eps)/N) log(1/p_eta + 1) + log(P[A_N])/N.
// Always <= 0 (it lower-bounds a nonpositive gap); violating inputs throw.
double lower_bound_assembly(std::int64_t n, double epsilon, double eta,
                            double p_eta, double p_an, double c_l_eps);

struct CoarseGrainRow {
    std::int64_t n = 0;
    double beta = 0.0;
    double eta = 0.0;
    int n0 = 0;
    double p_eta = 0.0;
    double std_error = 0.0;
    double p_an = 0.0;
    double epsilon = 0.0;
    double c_l_eps = 0.0;
    double bound = 0.0;
};

// Full pipeline for one N: dyadic search, exact P[A_N], C_{L,eps}, assembled
// bound.
CoarseGrainRow coarse_grain_demo(const IncrementLaw& law,
                                 const EnvironmentLaw& env, double beta,
                                 std::int64_t n, double epsilon,
                                 std::int64_t samples, std::uint64_t seed,
                                 int workers = 1);

} // namespace dpre
