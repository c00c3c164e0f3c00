// Test-side oracles: brute-force summation, quadrature and enumeration kept
// deliberately independent of the library's evaluation paths.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "dpre/environment.hpp"
#include "dpre/increment_law.hpp"
#include "dpre/lattice_field.hpp"
#include "dpre/partition.hpp"

namespace oracle {

// Raw Critical shape (log log(m+m0))^alpha / ((m+m0) (log(m+m0))^2).
inline double critical_shape(double alpha, int m0, double m) {
    const double u = std::log(m + m0);
    return std::pow(std::log(u), alpha) / ((m + m0) * u * u);
}

// Plain composite-Simpson integral on [a,b] (panels must be even).
inline double simpson(const std::function<double(double)>& f, double a,
                      double b, int panels) {
    const double h = (b - a) / panels;
    double s = f(a) + f(b);
    for (int i = 1; i < panels; ++i)
        s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

// Integral of the Critical shape over [X, inf), via u = log(x+m0) and then
// u = u0 e^y: (1/u0) int_0^inf (log u0 + y)^alpha e^-y dy.
inline double critical_shape_integral(double alpha, int m0, double x) {
    const double u0 = std::log(x + m0);
    const double w0 = std::log(u0);
    auto f = [&](double y) { return std::pow(w0 + y, alpha) * std::exp(-y); };
    return simpson(f, 0.0, 60.0, 4000) / u0;
}

// Brute-force normalization constant: A = (1-k0) / (2 sum shape), with the
// sum taken to `terms` and completed by the integral remainder.
inline double critical_norm_const(double alpha, int m0, double k0,
                                  std::int64_t terms = 10000000) {
    double sum = 0.0;
    for (std::int64_t m = terms; m >= 1; --m)
        sum += critical_shape(alpha, m0, static_cast<double>(m));
    sum += critical_shape_integral(alpha, m0, static_cast<double>(terms) + 0.5);
    return (1.0 - k0) / (2.0 * sum);
}

// Partial-sum tail oracle: sum of pmf over [n, terms] plus a bracket-width
// estimate from the shape integral past the cutoff.
struct TailBracket {
    double lo = 0.0;
    double hi = 0.0;
    double mid() const { return 0.5 * (lo + hi); }
    double width() const { return hi - lo; }
};

inline TailBracket critical_tail_bruteforce(const dpre::IncrementLaw& law,
                                            std::int64_t n,
                                            std::int64_t terms) {
    double sum = 0.0;
    for (std::int64_t m = terms; m >= n; --m)
        sum += law.pmf(m);
    const double rem_hi = law.norm_const() *
                          critical_shape_integral(law.shape_param(), law.offset(),
                                                  static_cast<double>(terms));
    const double rem_lo = law.norm_const() *
                          critical_shape_integral(law.shape_param(), law.offset(),
                                                  static_cast<double>(terms) + 1.0);
    return {sum + rem_lo, sum + rem_hi};
}

// Critical entropy by brute summation plus an independent integral remainder
// computed in w = log log(x + m0) coordinates:
//   int_X^inf K~ log(1/K~) dx
//     = A [ int_{w0}^inf w^alpha dw
//           + int_{w0}^inf w^alpha e^{-w} (2w - alpha log w - log A) dw ],
// the first piece by its antiderivative, the second by plain Simpson.
inline TailBracket entropy_bruteforce(double alpha, int m0, double k0,
                                      std::int64_t terms) {
    const double a = critical_norm_const(alpha, m0, k0);
    double sum = k0 > 0.0 ? k0 * std::log(1.0 / k0) : 0.0;
    double side = 0.0;
    for (std::int64_t m = terms; m >= 1; --m) {
        const double k = a * critical_shape(alpha, m0, static_cast<double>(m));
        side += k * std::log(1.0 / k);
    }
    sum += 2.0 * side;

    auto remainder = [&](double x) {
        const double w0 = std::log(std::log(x + m0));
        const double head = std::pow(w0, alpha + 1.0) / (-(alpha + 1.0));
        auto f = [&](double w) {
            return std::pow(w, alpha) * std::exp(-w) *
                   (2.0 * w - alpha * std::log(w) - std::log(a));
        };
        return a * (head + simpson(f, w0, 60.0, 8000));
    };
    const double r_hi = remainder(static_cast<double>(terms));
    const double r_lo = remainder(static_cast<double>(terms) + 1.0);
    return {sum + 2.0 * r_lo, sum + 2.0 * r_hi};
}

// Exact W via path enumeration over the periodic window: sum over all
// position sequences of prod K_wrap(step) * prod e^{beta w - lambda}.
inline double enumerate_w(const dpre::PolymerConfig& config,
                          const dpre::LatticeField& field) {
    const dpre::TruncatedKernel kernel(config.law, config.m);
    const int t = kernel.size();
    const double lambda = config.env.lambda(config.beta);

    std::vector<std::vector<double>> weight(
        static_cast<std::size_t>(config.n),
        std::vector<double>(static_cast<std::size_t>(t)));
    for (std::int64_t k = 1; k <= config.n; ++k)
        for (int z = 0; z < t; ++z)
            weight[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(z)] =
                std::exp(config.beta * field.value(k, z - config.m) - lambda);

    double total = 0.0;
    std::function<void(std::int64_t, int, double)> rec =
        [&](std::int64_t step, int pos, double acc) {
            if (step == config.n) {
                total += acc;
                return;
            }
            for (int z = 0; z < t; ++z) {
                const double kw = kernel.wrap(z - pos);
                rec(step + 1, z,
                    acc * kw *
                        weight[static_cast<std::size_t>(step)]
                              [static_cast<std::size_t>(z)]);
            }
        };
    rec(0, static_cast<int>(config.m), 1.0);
    return total;
}

// Conditioned-path enumeration for the rectangle-restricted W: paths
// S_0..S_{N-1} with S_0 = S_{N-1} = 0 and |S_k| < N^2, energy at times
// i N + k + 1, sites 2 j N^2 + S_k.
inline double enumerate_restricted_w(const dpre::LatticeField& field,
                                     const dpre::IncrementLaw& law, double beta,
                                     std::int64_t n, std::int64_t i,
                                     std::int64_t j) {
    const std::int64_t half = n * n;
    const double lambda = field.env().lambda(beta);
    const std::int64_t y0 = 2 * j * half;
    double num = 0.0, den = 0.0;
    std::function<void(std::int64_t, std::int64_t, double, double)> rec =
        [&](std::int64_t k, std::int64_t pos, double prob, double energy) {
            if (k == n - 1) {
                if (pos == 0) {
                    num += prob * energy;
                    den += prob;
                }
                return;
            }
            for (std::int64_t z = -(half - 1); z <= half - 1; ++z) {
                const double p = law.pmf(z - pos);
                if (p == 0.0) continue;
                const double w = std::exp(
                    beta * field.value(i * n + k + 2, y0 + z) - lambda);
                rec(k + 1, z, prob * p, energy * w);
            }
        };
    const double w0 =
        std::exp(beta * field.value(i * n + 1, y0) - lambda);
    rec(0, 0, 1.0, w0);
    return num / den;
}

// Kolmogorov-Smirnov statistic of a sample against a continuous CDF.
inline double ks_statistic(std::vector<double> sample,
                           const std::function<double(double)>& cdf) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t idx = 0; idx < sample.size(); ++idx) {
        const double f = cdf(sample[idx]);
        d = std::max(d, std::fabs((idx + 1) / n - f));
        d = std::max(d, std::fabs(f - idx / n));
    }
    return d;
}

// 1% asymptotic KS critical value.
inline double ks_critical_1pct(std::size_t n) {
    return 1.62762 / std::sqrt(static_cast<double>(n));
}

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

inline MeanSe mean_se(const std::vector<double>& xs) {
    double m = 0.0;
    for (double x : xs) m += x;
    m /= static_cast<double>(xs.size());
    double v = 0.0;
    for (double x : xs) v += (x - m) * (x - m);
    v /= static_cast<double>(xs.size() - 1);
    return {m, std::sqrt(v / static_cast<double>(xs.size()))};
}

} // namespace oracle
