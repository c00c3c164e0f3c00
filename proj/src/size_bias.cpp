#include "dpre/size_bias.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dpre/errors.hpp"
#include "dpre/parallel.hpp"

namespace dpre {

std::optional<double> h_beta(const IncrementLaw& law, const EnvironmentLaw& env,
                             double beta) {
    const EntropyResult h = law.entropy();
    if (!h.finite) return std::nullopt;
    return env.excess(beta) - h.value;
}

SlopeEstimate lln_slope_check(const IncrementLaw& law, const EnvironmentLaw& env,
                              double beta, std::int64_t n_steps,
                              std::int64_t replicas, std::uint64_t seed,
                              int workers) {
    if (n_steps < 1 || replicas < 1)
        throw std::invalid_argument("lln_slope_check: need positive sizes");
    if (!law.entropy().finite)
        throw std::invalid_argument(
            "lln_slope_check: divergent walk entropy (slope is -infinity)");
    const double lambda = env.lambda(beta);

    struct Acc {
        double sum = 0.0, sum_sq = 0.0;
    };
    std::vector<Acc> partials(static_cast<std::size_t>(replicas));
    parallel_for(replicas, workers, [&](std::int64_t r) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
        Acc a;
        for (std::int64_t k = 0; k < n_steps; ++k) {
            const LogMagnitude x = law.sample_logmag(rng);
            double log_k;
            if (x.sign == 0)
                log_k = law.log_pmf(0);
            else if (x.has_exact)
                log_k = law.log_pmf(x.exact);
            else
                log_k = law.log_pmf_lnx(x.lnmag);
            const double tilt = env.tilted_sample(beta, rng);
            const double term = log_k + beta * tilt - lambda;
            a.sum += term;
            a.sum_sq += term * term;
        }
        partials[static_cast<std::size_t>(r)] = a;
    });

    double sum = 0.0, sum_sq = 0.0;
    for (const Acc& a : partials) {
        sum += a.sum;
        sum_sq += a.sum_sq;
    }
    const double total = static_cast<double>(n_steps) * static_cast<double>(replicas);
    SlopeEstimate est;
    est.terms = static_cast<std::int64_t>(total);
    est.slope = sum / total;
    const double var =
        std::max(0.0, (sum_sq - sum * sum / total) / (total - 1.0));
    est.std_error = std::sqrt(var / total);
    return est;
}

SizeBiasRun size_bias_run(const PolymerConfig& config, std::uint64_t replica) {
    config.validate();
    const TruncatedKernel kernel(config.law, config.m);
    const int t = kernel.size();
    const double lambda = config.env.lambda(config.beta);

    // Independent sub-streams: base field, path, tilted values.
    LatticeField base(derive_seed(config.seed, replica, 0), config.env);
    Rng path_rng(derive_seed(config.seed, replica, 1));
    Rng tilt_rng(derive_seed(config.seed, replica, 2));

    SizeBiasRun run;
    run.path.reserve(static_cast<std::size_t>(config.n));
    run.steps.reserve(static_cast<std::size_t>(config.n));
    run.tilted.reserve(static_cast<std::size_t>(config.n));

    std::int64_t pos = 0;
    double bound = 0.0;
    for (std::int64_t k = 1; k <= config.n; ++k) {
        const std::int64_t jump = kernel.sample_line_step(path_rng);
        std::int64_t d = ((pos + jump + config.m) % t + t) % t; // index in [0,T)
        const std::int64_t new_pos = d - config.m;
        std::int64_t disp = new_pos - pos;
        // canonical periodic displacement in [-M, M]
        disp = ((disp % t) + t) % t;
        if (disp > config.m) disp -= t;
        const double tilt = config.env.tilted_sample(config.beta, tilt_rng);
        bound += std::log(kernel.wrap(disp)) + config.beta * tilt - lambda;
        pos = new_pos;
        run.path.push_back(pos);
        run.steps.push_back(disp);
        run.tilted.push_back(tilt);
    }
    run.path_bound_log_w = bound;

    const LatticeField composite = base.with_path_overlay(run.path, run.tilted);
    run.w_hat = exact_w(config, composite);

    const double log_w_n = run.w_hat.log_w.back();
    const double slack = 1e-9 * (std::fabs(bound) + std::fabs(log_w_n) + 1.0);
    if (log_w_n < bound - slack)
        throw ContractViolation(
            "size_bias_run: single-path lower bound violated");
    return run;
}

std::vector<double> sized_biased_w(const PolymerConfig& config,
                                   std::int64_t replicas, int workers) {
    std::vector<double> out(static_cast<std::size_t>(replicas));
    parallel_for(replicas, workers, [&](std::int64_t r) {
        out[static_cast<std::size_t>(r)] =
            size_bias_run(config, static_cast<std::uint64_t>(r)).w_hat.w.back();
    });
    return out;
}

DetectorResult birkner_detector(const PolymerConfig& config,
                                const std::vector<std::int64_t>& n_grid,
                                const std::vector<double>& levels,
                                std::int64_t replicas, int workers) {
    if (n_grid.empty() || levels.empty() || replicas < 2)
        throw std::invalid_argument("birkner_detector: empty grid");
    for (std::size_t i = 1; i < n_grid.size(); ++i)
        if (n_grid[i] <= n_grid[i - 1])
            throw std::invalid_argument("birkner_detector: N grid must increase");
    for (double level : levels)
        if (!(level > 0.0))
            throw std::invalid_argument("birkner_detector: levels must be > 0");

    PolymerConfig run_config = config;
    run_config.n = n_grid.back();

    // One path/field per replica serves every N in the grid: the composite
    // field restricted to rows <= N is exactly the N-step composite field.
    const std::size_t rows_n = n_grid.size();
    std::vector<std::vector<double>> log_w(
        rows_n, std::vector<double>(static_cast<std::size_t>(replicas)));
    parallel_for(replicas, workers, [&](std::int64_t r) {
        const SizeBiasRun run =
            size_bias_run(run_config, static_cast<std::uint64_t>(r));
        for (std::size_t gi = 0; gi < rows_n; ++gi)
            log_w[gi][static_cast<std::size_t>(r)] =
                run.w_hat.log_w[static_cast<std::size_t>(n_grid[gi]) - 1];
    });

    DetectorResult res;
    res.h_beta_value = h_beta(config.law, config.env, config.beta);
    const EntropyResult ent = config.law.entropy();
    res.entropy_finite = ent.finite;
    res.entropy_value = ent.value;
    res.excess = config.env.excess(config.beta);

    const double rr = static_cast<double>(replicas);
    for (double level : levels) {
        const double log_level = std::log(level);
        for (std::size_t gi = 0; gi < rows_n; ++gi) {
            std::int64_t hits = 0;
            for (double lw : log_w[gi])
                if (lw >= log_level) ++hits;
            const double f = static_cast<double>(hits) / rr;
            res.rows.push_back(
                {n_grid[gi], level, f, std::sqrt(f * (1.0 - f) / rr)});
        }
    }

    // Trend per level: fraction at N_max minus fraction at N_min over the
    // pooled standard error.
    bool all_up = true;
    bool all_flat = true;
    double plateau_top = 0.0;
    for (std::size_t li = 0; li < levels.size(); ++li) {
        const DetectorRow& first = res.rows[li * rows_n];
        const DetectorRow& last = res.rows[li * rows_n + rows_n - 1];
        const double pooled = std::sqrt(first.std_error * first.std_error +
                                        last.std_error * last.std_error);
        const double z = pooled > 0.0
                             ? (last.fraction - first.fraction) / pooled
                             : (last.fraction > first.fraction   ? 1e9
                                : last.fraction < first.fraction ? -1e9
                                                                 : 0.0);
        res.trend_z.push_back(z);
        if (z < 3.0) all_up = false;
        if (std::fabs(z) >= 3.0) all_flat = false;
        plateau_top = std::max(plateau_top, last.fraction + 3.0 * last.std_error);
    }
    if (all_up)
        res.classification = "strong-disorder-signature";
    else if (all_flat && plateau_top < 1.0)
        res.classification = "weak-disorder-signature";
    else
        res.classification = "inconclusive";
    return res;
}

} // namespace dpre
