#pragma once

#include <string>
#include <utility>
#include <vector>

#include "dpre/rng.hpp"

namespace dpre {

enum class EnvFamily { Gaussian, Bernoulli, DiscreteFinite };

// Scalar disorder law with exact cumulant generating function lambda(beta),
// its derivative, and exponentially tilted sampling. All exponential moments
// exist for every variant; bounded variants expose the essential supremum
// and its mass.
class EnvironmentLaw {
public:
    static EnvironmentLaw gaussian(); // mean 0, variance 1
    static EnvironmentLaw bernoulli(double p); // values {0,1}
    static EnvironmentLaw
    discrete_finite(std::vector<std::pair<double, double>> atoms);

    EnvFamily family() const { return family_; }
    bool bounded() const { return family_ != EnvFamily::Gaussian; }
    double ess_sup() const;      // +inf for Gaussian
    double mass_at_sup() const;  // P[w = ess_sup]; 0 for Gaussian
    double mean() const;
    const std::vector<std::pair<double, double>>& atoms() const {
        return atoms_;
    }

    double lambda(double beta) const;       // log E exp(beta w)
    double lambda_prime(double beta) const; // tilted mean
    double excess(double beta) const;       // beta lambda' - lambda

    // Inverse-transform sampling; the lattice field funnels through the same
    // code path so distributional tests share oracles.
    double sample_from_uniform(double u) const;
    double tilted_from_uniform(double u, double beta) const;
    double sample(Rng& rng) const { return sample_from_uniform(rng.next_unit()); }
    double tilted_sample(double beta, Rng& rng) const {
        return tilted_from_uniform(rng.next_unit(), beta);
    }

    // P under the tilted law of {w < k}; exact for discrete variants.
    double tilted_below(double k, double beta) const;

    // Tilted atom probabilities (discrete variants only).
    std::vector<double> tilted_atom_probs(double beta) const;

    struct A1Row {
        double beta;
        double p_below_k;
        double lambda_prime;
        double excess;
    };
    struct A1Table {
        std::vector<A1Row> rows;
        double s;             // ess sup (inf for Gaussian)
        double neg_log_mass;  // -log P[w = s] (inf for Gaussian)
    };
    // Exponential-moment limit diagnostics on an increasing beta grid;
    // asserts the monotonicity that the limits force. Rejects k >= ess_sup
    // for bounded variants.
    A1Table a1_diagnostics(const std::vector<double>& betas, double k) const;

    std::string describe() const;
    bool operator==(const EnvironmentLaw& o) const;

private:
    EnvironmentLaw() = default;

    EnvFamily family_ = EnvFamily::Gaussian;
    double p_ = 0.5; // Bernoulli parameter
    std::vector<std::pair<double, double>> atoms_; // sorted by value
};

} // namespace dpre
