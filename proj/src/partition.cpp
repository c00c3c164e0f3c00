#include "dpre/partition.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dpre/errors.hpp"
#include "dpre/numerics.hpp"
#include "dpre/parallel.hpp"

namespace dpre {

TruncatedKernel::TruncatedKernel(const IncrementLaw& law, std::int64_t m)
    : m_(m) {
    if (m < 1) throw std::invalid_argument("TruncatedKernel: M must be >= 1");
    const std::int64_t support = 2 * m;
    line_.assign(static_cast<std::size_t>(2 * support + 1), 0.0);
    KahanSum total;
    for (std::int64_t j = -support; j <= support; ++j) {
        const double v = law.pmf(j);
        line_[static_cast<std::size_t>(j + support)] = v;
        total.add(v);
    }
    mass_loss_ = 1.0 - total.value();
    for (double& v : line_) v /= total.value();

    const int t = size();
    wrap_.assign(static_cast<std::size_t>(t), 0.0);
    for (std::int64_t j = -support; j <= support; ++j) {
        std::int64_t d = (j % t + t) % t; // canonical residue in [0, T)
        if (d > m_) d -= t;               // back to [-M, M]
        wrap_[static_cast<std::size_t>(d + m_)] +=
            line_[static_cast<std::size_t>(j + support)];
    }
    // wrap2_[i] = folded kernel at index-difference (i mod T), doubled so the
    // convolution can index (z - z' + T) without a modulo.
    wrap2_.assign(static_cast<std::size_t>(2 * t), 0.0);
    for (int i = 0; i < 2 * t; ++i)
        wrap2_[static_cast<std::size_t>(i)] =
            wrap_[static_cast<std::size_t>((i % t + static_cast<int>(m_)) % t)];

    line_cdf_.resize(line_.size());
    double cum = 0.0;
    for (std::size_t i = 0; i < line_.size(); ++i) {
        cum += line_[i];
        line_cdf_[i] = cum;
    }
    line_cdf_.back() = 1.0;
}

double TruncatedKernel::line(std::int64_t j) const {
    if (j < -2 * m_ || j > 2 * m_) return 0.0;
    return line_[static_cast<std::size_t>(j + 2 * m_)];
}

double TruncatedKernel::wrap(std::int64_t d) const {
    const int t = size();
    d = (d % t + t) % t;
    return wrap2_[static_cast<std::size_t>(d)];
}

std::int64_t TruncatedKernel::sample_line_step(Rng& rng) const {
    const double u = rng.next_unit();
    const auto it = std::lower_bound(line_cdf_.begin(), line_cdf_.end(), u);
    const std::int64_t idx = it - line_cdf_.begin();
    return idx - 2 * m_;
}

void PolymerConfig::validate() const {
    if (!(beta >= 0.0))
        throw std::invalid_argument("PolymerConfig: beta must be >= 0");
    if (n < 1) throw std::invalid_argument("PolymerConfig: N must be >= 1");
    if (m < 1) throw std::invalid_argument("PolymerConfig: M must be >= 1");
}

WTrajectory exact_w(const PolymerConfig& config, const LatticeField& field) {
    config.validate();
    if (!(field.env() == config.env))
        throw std::invalid_argument("exact_w: field environment differs from config");

    const TruncatedKernel kernel(config.law, config.m);
    const int t = kernel.size();
    const std::int64_t m = config.m;
    const double lambda = config.env.lambda(config.beta);

    std::vector<double> cur(static_cast<std::size_t>(t), 0.0);
    std::vector<double> next(static_cast<std::size_t>(t), 0.0);
    cur[static_cast<std::size_t>(m)] = 1.0; // start at the origin

    WTrajectory traj;
    traj.mass_loss = kernel.mass_loss();
    traj.log_w.reserve(static_cast<std::size_t>(config.n));

    const std::vector<double>& w2 = kernel.wrap2();
    double log_w = 0.0;
    for (std::int64_t step = 1; step <= config.n; ++step) {
        // periodic convolution: next[z] = sum_{z'} wrap(z - z') cur[z']
        std::fill(next.begin(), next.end(), 0.0);
        for (int z = 0; z < t; ++z) {
            const double* row = w2.data() + (z + t);
            double acc = 0.0;
            for (int zp = 0; zp < t; ++zp) acc += row[-zp] * cur[static_cast<std::size_t>(zp)];
            next[static_cast<std::size_t>(z)] = acc;
        }
        // site weights e^{beta w - lambda}
        double row_sum = 0.0;
        for (int z = 0; z < t; ++z) {
            const double omega = field.value(step, z - m);
            next[static_cast<std::size_t>(z)] *=
                std::exp(config.beta * omega - lambda);
            row_sum += next[static_cast<std::size_t>(z)];
        }
        log_w += std::log(row_sum);
        const double inv = 1.0 / row_sum;
        for (double& v : next) v *= inv;
        cur.swap(next);
        traj.log_w.push_back(log_w);
    }

    traj.w.resize(traj.log_w.size());
    traj.log_z.resize(traj.log_w.size());
    for (std::size_t i = 0; i < traj.log_w.size(); ++i) {
        traj.w[i] = std::exp(traj.log_w[i]);
        traj.log_z[i] =
            traj.log_w[i] + static_cast<double>(i + 1) * lambda;
    }
    return traj;
}

namespace {

MonteCarloEstimate reduce_replicas(const PolymerConfig& config,
                                   std::int64_t replicas, int workers,
                                   bool log_scale) {
    if (replicas < 2)
        throw std::invalid_argument("need at least 2 replicas for a std error");
    std::vector<double> vals(static_cast<std::size_t>(replicas));
    double mass_loss = 0.0;
    parallel_for(replicas, workers, [&](std::int64_t r) {
        LatticeField field(derive_seed(config.seed, static_cast<std::uint64_t>(r)),
                           config.env);
        const WTrajectory traj = exact_w(config, field);
        vals[static_cast<std::size_t>(r)] =
            log_scale ? traj.log_w.back() / static_cast<double>(config.n)
                      : traj.w.back();
        if (r == 0) mass_loss = traj.mass_loss;
    });
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= static_cast<double>(replicas);
    double var = 0.0;
    for (double v : vals) var += (v - mean) * (v - mean);
    var /= static_cast<double>(replicas - 1);
    MonteCarloEstimate est;
    est.mean = mean;
    est.std_error = std::sqrt(var / static_cast<double>(replicas));
    est.mass_loss = mass_loss;
    est.replicas = replicas;
    return est;
}

} // namespace

MonteCarloEstimate mean_w_mc(const PolymerConfig& config, std::int64_t replicas,
                             int workers) {
    return reduce_replicas(config, replicas, workers, /*log_scale=*/false);
}

MonteCarloEstimate free_energy_gap(const PolymerConfig& config,
                                   std::int64_t replicas, int workers) {
    return reduce_replicas(config, replicas, workers, /*log_scale=*/true);
}

double martingale_check(const PolymerConfig& config, std::int64_t prefixes) {
    config.validate();
    if (!config.env.bounded() || config.env.atoms().size() > 3)
        throw std::invalid_argument(
            "martingale_check: environment must have at most 3 atoms");
    if (config.m > 3 || config.n > 4)
        throw std::invalid_argument("martingale_check: M <= 3 and N <= 4 required");

    const TruncatedKernel kernel(config.law, config.m);
    const int t = kernel.size();
    const std::int64_t m = config.m;
    const double lambda = config.env.lambda(config.beta);
    const auto& atoms = config.env.atoms();
    const std::vector<double>& w2 = kernel.wrap2();

    double worst = 0.0;
    for (std::int64_t r = 0; r < prefixes; ++r) {
        LatticeField field(derive_seed(config.seed, static_cast<std::uint64_t>(r)),
                           config.env);
        std::vector<double> cur(static_cast<std::size_t>(t), 0.0);
        std::vector<double> conv(static_cast<std::size_t>(t), 0.0);
        cur[static_cast<std::size_t>(m)] = 1.0;
        double w_prev = 1.0; // W_0

        for (std::int64_t step = 1; step <= config.n; ++step) {
            for (int z = 0; z < t; ++z) {
                const double* row = w2.data() + (z + t);
                double acc = 0.0;
                for (int zp = 0; zp < t; ++zp)
                    acc += row[-zp] * cur[static_cast<std::size_t>(zp)];
                conv[static_cast<std::size_t>(z)] = acc;
            }

            // E[W_step | G_{step-1}]: enumerate the next row's disorder
            // (atoms^T combinations) and average the row update.
            double expected = 0.0;
            std::vector<std::size_t> idx(static_cast<std::size_t>(t), 0);
            for (;;) {
                double prob = 1.0;
                double w_next = 0.0;
                for (int z = 0; z < t; ++z) {
                    const auto& [v, p] = atoms[idx[static_cast<std::size_t>(z)]];
                    prob *= p;
                    w_next += conv[static_cast<std::size_t>(z)] *
                              std::exp(config.beta * v - lambda);
                }
                expected += prob * w_next;
                int pos = 0;
                while (pos < t) {
                    if (++idx[static_cast<std::size_t>(pos)] < atoms.size()) break;
                    idx[static_cast<std::size_t>(pos)] = 0;
                    ++pos;
                }
                if (pos == t) break;
            }
            worst = std::max(worst, std::fabs(expected - w_prev));

            // apply the realized disorder row and continue the prefix
            double w_cur = 0.0;
            for (int z = 0; z < t; ++z) {
                const double omega = field.value(step, z - m);
                conv[static_cast<std::size_t>(z)] *=
                    std::exp(config.beta * omega - lambda);
                w_cur += conv[static_cast<std::size_t>(z)];
            }
            cur = conv;
            w_prev = w_cur;
        }
    }
    return worst;
}

} // namespace dpre
