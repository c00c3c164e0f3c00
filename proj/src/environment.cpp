#include "dpre/environment.hpp"

#include <algorithm>
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

} // namespace

EnvironmentLaw EnvironmentLaw::gaussian() {
    EnvironmentLaw env;
    env.family_ = EnvFamily::Gaussian;
    return env;
}

EnvironmentLaw EnvironmentLaw::bernoulli(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("bernoulli: p must lie in (0,1)");
    EnvironmentLaw env;
    env.family_ = EnvFamily::Bernoulli;
    env.p_ = p;
    env.atoms_ = {{0.0, 1.0 - p}, {1.0, p}};
    return env;
}

EnvironmentLaw EnvironmentLaw::discrete_finite(
    std::vector<std::pair<double, double>> atoms) {
    if (atoms.empty())
        throw std::invalid_argument("discrete_finite: no atoms");
    double total = 0.0;
    for (auto& [v, p] : atoms) {
        if (!(p > 0.0))
            throw std::invalid_argument(
                "discrete_finite: atom probabilities must be positive");
        total += p;
    }
    if (std::fabs(total - 1.0) > 1e-9)
        throw std::invalid_argument(
            "discrete_finite: probabilities must sum to 1");
    for (auto& [v, p] : atoms) p /= total;
    std::sort(atoms.begin(), atoms.end());
    for (std::size_t i = 1; i < atoms.size(); ++i)
        if (atoms[i].first == atoms[i - 1].first)
            throw std::invalid_argument("discrete_finite: duplicate atom value");
    EnvironmentLaw env;
    env.family_ = EnvFamily::DiscreteFinite;
    env.atoms_ = std::move(atoms);
    return env;
}

double EnvironmentLaw::ess_sup() const {
    if (family_ == EnvFamily::Gaussian) return kInf;
    return atoms_.back().first;
}

double EnvironmentLaw::mass_at_sup() const {
    if (family_ == EnvFamily::Gaussian) return 0.0;
    return atoms_.back().second;
}

double EnvironmentLaw::mean() const {
    if (family_ == EnvFamily::Gaussian) return 0.0;
    double m = 0.0;
    for (const auto& [v, p] : atoms_) m += v * p;
    return m;
}

double EnvironmentLaw::lambda(double beta) const {
    switch (family_) {
    case EnvFamily::Gaussian:
        return 0.5 * beta * beta;
    case EnvFamily::Bernoulli:
        // Overflow-safe at beta = 500: shift out the dominant exponent.
        if (beta > 0.0)
            return beta + std::log(p_ + (1.0 - p_) * std::exp(-beta));
        return std::log(1.0 - p_ + p_ * std::exp(beta));
    case EnvFamily::DiscreteFinite: {
        const double vc =
            beta >= 0.0 ? atoms_.back().first : atoms_.front().first;
        double s = 0.0;
        for (const auto& [v, p] : atoms_) s += p * std::exp(beta * (v - vc));
        return beta * vc + std::log(s);
    }
    }
    return 0.0;
}

double EnvironmentLaw::lambda_prime(double beta) const {
    switch (family_) {
    case EnvFamily::Gaussian:
        return beta;
    case EnvFamily::Bernoulli:
        if (beta > 0.0) return p_ / (p_ + (1.0 - p_) * std::exp(-beta));
        return p_ * std::exp(beta) / (1.0 - p_ + p_ * std::exp(beta));
    case EnvFamily::DiscreteFinite: {
        const double vc =
            beta >= 0.0 ? atoms_.back().first : atoms_.front().first;
        double num = 0.0, den = 0.0;
        for (const auto& [v, p] : atoms_) {
            const double w = p * std::exp(beta * (v - vc));
            num += v * w;
            den += w;
        }
        return num / den;
    }
    }
    return 0.0;
}

double EnvironmentLaw::excess(double beta) const {
    if (family_ == EnvFamily::Gaussian) return 0.5 * beta * beta;
    return beta * lambda_prime(beta) - lambda(beta);
}

double EnvironmentLaw::sample_from_uniform(double u) const {
    if (family_ == EnvFamily::Gaussian) return normal_inv_cdf(u);
    double cum = 0.0;
    for (const auto& [v, p] : atoms_) {
        cum += p;
        if (u <= cum) return v;
    }
    return atoms_.back().first;
}

std::vector<double> EnvironmentLaw::tilted_atom_probs(double beta) const {
    if (family_ == EnvFamily::Gaussian)
        throw std::invalid_argument("tilted_atom_probs: continuous variant");
    const double vc = beta >= 0.0 ? atoms_.back().first : atoms_.front().first;
    std::vector<double> q(atoms_.size());
    double z = 0.0;
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        q[i] = atoms_[i].second * std::exp(beta * (atoms_[i].first - vc));
        z += q[i];
    }
    for (double& x : q) x /= z;
    return q;
}

double EnvironmentLaw::tilted_from_uniform(double u, double beta) const {
    // Gaussian tilt is an exact mean shift; discrete variants reweight atoms.
    if (family_ == EnvFamily::Gaussian) return normal_inv_cdf(u) + beta;
    const std::vector<double> q = tilted_atom_probs(beta);
    double cum = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        cum += q[i];
        if (u <= cum) return atoms_[i].first;
    }
    return atoms_.back().first;
}

double EnvironmentLaw::tilted_below(double k, double beta) const {
    if (family_ == EnvFamily::Gaussian) return normal_cdf(k - beta);
    const std::vector<double> q = tilted_atom_probs(beta);
    double s = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i)
        if (atoms_[i].first < k) s += q[i];
    return s;
}

EnvironmentLaw::A1Table
EnvironmentLaw::a1_diagnostics(const std::vector<double>& betas,
                               double k) const {
    if (betas.size() < 2)
        throw std::invalid_argument("a1_diagnostics: need a beta grid");
    for (std::size_t i = 1; i < betas.size(); ++i)
        if (!(betas[i] > betas[i - 1]))
            throw std::invalid_argument(
                "a1_diagnostics: beta grid must be increasing");
    if (bounded() && k >= ess_sup())
        throw std::invalid_argument("a1_diagnostics: k must be below ess sup");

    A1Table t;
    t.s = ess_sup();
    t.neg_log_mass =
        bounded() ? -std::log(mass_at_sup()) : kInf;
    for (double b : betas)
        t.rows.push_back({b, tilted_below(k, b), lambda_prime(b), excess(b)});

    // The tilted mass below k shrinks and both lambda' and the excess grow
    // along the grid; these are exact consequences of convexity.
    for (std::size_t i = 1; i < t.rows.size(); ++i) {
        const auto& a = t.rows[i - 1];
        const auto& b = t.rows[i];
        if (b.p_below_k > a.p_below_k * (1.0 + 1e-12) + 1e-15)
            throw ContractViolation("a1_diagnostics: P[w<k] not decreasing");
        if (b.lambda_prime < a.lambda_prime - 1e-12)
            throw ContractViolation("a1_diagnostics: lambda' not increasing");
        if (b.excess < a.excess - 1e-12)
            throw ContractViolation("a1_diagnostics: excess not increasing");
        if (bounded() && b.excess > t.neg_log_mass + 1e-9)
            throw ContractViolation(
                "a1_diagnostics: excess exceeded -log P[w = s]");
    }
    return t;
}

std::string EnvironmentLaw::describe() const {
    switch (family_) {
    case EnvFamily::Gaussian:
        return "gaussian()";
    case EnvFamily::Bernoulli:
        return "bernoulli(p=" + fmt_g(p_) + ")";
    case EnvFamily::DiscreteFinite: {
        std::string s = "discrete(";
        for (std::size_t i = 0; i < atoms_.size(); ++i) {
            if (i) s += ",";
            s += fmt_g(atoms_[i].first) + ":" + fmt_g(atoms_[i].second);
        }
        return s + ")";
    }
    }
    return "?";
}

bool EnvironmentLaw::operator==(const EnvironmentLaw& o) const {
    return family_ == o.family_ && p_ == o.p_ && atoms_ == o.atoms_;
}

} // namespace dpre
