#pragma once

#include <cstdint>
#include <vector>

#include "dpre/increment_law.hpp"
#include "dpre/lattice_field.hpp"

namespace dpre {

// Jump kernel truncated to |j| <= 2M and renormalized to total mass one
// (mass_loss records the truncated tail), then folded onto the periodic
// window of 2M+1 positions. The folded kernel is doubly stochastic, which
// keeps E[W_N] = 1 and the martingale identity exact for the truncated
// polymer rather than approximate.
class TruncatedKernel {
public:
    TruncatedKernel(const IncrementLaw& law, std::int64_t m);

    std::int64_t half_width() const { return m_; }
    int size() const { return static_cast<int>(2 * m_ + 1); }
    double mass_loss() const { return mass_loss_; }

    // Renormalized line kernel K_M(j), |j| <= 2M.
    double line(std::int64_t j) const;
    // Folded kernel at a periodic displacement d in [-M, M].
    double wrap(std::int64_t d) const;
    // wrap indexed over [0, 2T) for convolution without modulo.
    const std::vector<double>& wrap2() const { return wrap2_; }

    // Inverse-CDF draw of a line step in [-2M, 2M].
    std::int64_t sample_line_step(Rng& rng) const;

private:
    std::int64_t m_;
    double mass_loss_;
    std::vector<double> line_;   // index j + 2M
    std::vector<double> wrap_;   // index d + M
    std::vector<double> wrap2_;  // doubled, size 2T
    std::vector<double> line_cdf_;
};

struct PolymerConfig {
    double beta;
    std::int64_t n;       // time horizon
    std::int64_t m;       // window half-width; positions live in [-M, M]
    IncrementLaw law;
    EnvironmentLaw env;
    std::uint64_t seed;

    void validate() const;
};

struct WTrajectory {
    std::vector<double> log_w; // n = 1..N
    std::vector<double> w;
    std::vector<double> log_z; // log_w[n] + n*lambda(beta)
    double mass_loss = 0.0;
};

// Exact forward DP for the truncated polymer: one row per time step over the
// periodic window, row-rescaled with the log factor accumulated so any
// (beta, N) stays in range.
WTrajectory exact_w(const PolymerConfig& config, const LatticeField& field);

struct MonteCarloEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    double mass_loss = 0.0;
    std::int64_t replicas = 0;
};

// Mean of W_N over independent disorder replicas (seeds derived from
// config.seed); E[W_N] = 1 holds exactly for the truncated polymer.
MonteCarloEstimate mean_w_mc(const PolymerConfig& config, std::int64_t replicas,
                             int workers = 1);

// Free-energy gap estimator p_hat = mean (1/N) log W_N (equivalently
// (1/N) E log Z_N - lambda); <= 0 in expectation by Jensen.
MonteCarloEstimate free_energy_gap(const PolymerConfig& config,
                                   std::int64_t replicas, int workers = 1);

// Verifies E[W_{n+1} | G_n] = W_n by exact enumeration of the next row's
// disorder (enumerable environments only: at most 3 atoms, M <= 3, N <= 4).
// Returns the max discrepancy over `prefixes` sampled disorder prefixes and
// all n < N.
double martingale_check(const PolymerConfig& config, std::int64_t prefixes);

} // namespace dpre
