#include "dpre/coarse_grain.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "dpre/errors.hpp"
#include "dpre/numerics.hpp"
#include "dpre/parallel.hpp"

namespace dpre {

namespace {

// Kernel values over all in-window transitions, index j + (W-1) for
// j in (-(W-1), W-1) with W = 2N^2 - 1 window cells.
std::vector<double> window_kernel(const IncrementLaw& law, std::int64_t cells) {
    std::vector<double> k(static_cast<std::size_t>(2 * cells - 1));
    for (std::int64_t j = -(cells - 1); j <= cells - 1; ++j)
        k[static_cast<std::size_t>(j + cells - 1)] = law.pmf(j);
    return k;
}

// One step of the killed-at-boundary convolution: out[z] = sum_d k[d] v[z-d].
void window_step(const std::vector<double>& kernel, std::int64_t cells,
                 const std::vector<double>& v, std::vector<double>& out) {
    std::fill(out.begin(), out.end(), 0.0);
    const std::int64_t kw = cells - 1;
    for (std::int64_t d = -kw; d <= kw; ++d) {
        const double kd = kernel[static_cast<std::size_t>(d + kw)];
        if (kd == 0.0) continue;
        const std::int64_t lo = std::max<std::int64_t>(0, d);
        const std::int64_t hi = std::min(cells, cells + d);
        const double* src = v.data() - d;
        double* dst = out.data();
        for (std::int64_t z = lo; z < hi; ++z) dst[z] += kd * src[z];
    }
}

} // namespace

double a_n_probability(const IncrementLaw& law, std::int64_t n) {
    if (n < 3) throw std::invalid_argument("a_n_probability: N must be >= 3");
    const std::int64_t half = n * n;     // |S_k - S_0| < N^2
    const std::int64_t cells = 2 * half - 1;
    const std::vector<double> kernel = window_kernel(law, cells);

    std::vector<double> v(static_cast<std::size_t>(cells), 0.0);
    std::vector<double> next(static_cast<std::size_t>(cells), 0.0);
    v[static_cast<std::size_t>(half - 1)] = 1.0; // origin
    for (std::int64_t step = 1; step <= n - 1; ++step) {
        window_step(kernel, cells, v, next);
        v.swap(next);
    }
    return v[static_cast<std::size_t>(half - 1)]; // S_{N-1} = S_0
}

double restricted_w(const LatticeField& field, const IncrementLaw& law,
                    double beta, std::int64_t n, std::int64_t i, std::int64_t j,
                    double p_an) {
    if (n < 3) throw std::invalid_argument("restricted_w: N must be >= 3");
    if (!(p_an >= 0.0))
        throw std::invalid_argument("restricted_w: invalid P[A_N]");
    if (p_an == 0.0)
        throw std::invalid_argument(
            "restricted_w: conditioned path set is empty for this law/N");

    const std::int64_t half = n * n;
    const std::int64_t cells = 2 * half - 1;
    const std::vector<double> kernel = window_kernel(law, cells);
    const double lambda = field.env().lambda(beta);
    const std::int64_t y0 = 2 * j * half; // rectangle base height 2jN^2

    std::vector<double> v(static_cast<std::size_t>(cells), 0.0);
    std::vector<double> next(static_cast<std::size_t>(cells), 0.0);

    // energy covers k = 0..N-1 at times iN+k+1; start weight applies at the
    // origin before any step.
    v[static_cast<std::size_t>(half - 1)] =
        std::exp(beta * field.value(i * n + 1, y0) - lambda);
    double log_scale = 0.0;
    for (std::int64_t k = 1; k <= n - 1; ++k) {
        window_step(kernel, cells, v, next);
        double row_max = 0.0;
        for (std::int64_t z = 0; z < cells; ++z) {
            const double omega = field.value(i * n + k + 1, y0 + z - (half - 1));
            next[static_cast<std::size_t>(z)] *=
                std::exp(beta * omega - lambda);
            row_max = std::max(row_max, next[static_cast<std::size_t>(z)]);
        }
        if (row_max > 1e200 || (row_max > 0.0 && row_max < 1e-200)) {
            log_scale += std::log(row_max);
            const double inv = 1.0 / row_max;
            for (double& x : next) x *= inv;
        }
        v.swap(next);
    }
    const double end = v[static_cast<std::size_t>(half - 1)];
    if (log_scale == 0.0) return end / p_an;
    return std::exp(std::log(end) + log_scale) / p_an;
}

DyadicSearchResult dyadic_eta_search(const IncrementLaw& law,
                                     const EnvironmentLaw& env, double beta,
                                     std::int64_t n, std::int64_t samples,
                                     std::uint64_t seed, int workers) {
    if (samples < 200)
        throw std::invalid_argument("dyadic_eta_search: need >= 200 samples");
    const double p_an = a_n_probability(law, n);
    if (p_an == 0.0)
        throw std::invalid_argument(
            "dyadic_eta_search: conditioned path set is empty");

    DyadicSearchResult res;
    res.wtilde.resize(static_cast<std::size_t>(samples));
    parallel_for(samples, workers, [&](std::int64_t s) {
        LatticeField field(derive_seed(seed, static_cast<std::uint64_t>(s)), env);
        res.wtilde[static_cast<std::size_t>(s)] =
            restricted_w(field, law, beta, n, 0, 0, p_an);
    });

    double mean = 0.0, second = 0.0, w_max = 0.0;
    for (double w : res.wtilde) {
        mean += w;
        second += w * w;
        w_max = std::max(w_max, w);
    }
    mean /= static_cast<double>(samples);
    second /= static_cast<double>(samples);
    res.mean = mean;
    res.second_moment = second;

    const double three_over_pi2 = 3.0 / (M_PI * M_PI);
    auto p_at_level = [&](int level) {
        const double thr = std::ldexp(1.0, level - 1); // 2^(level-1)
        std::int64_t hits = 0;
        for (double w : res.wtilde)
            if (w >= thr) ++hits;
        return static_cast<double>(hits) / static_cast<double>(samples);
    };

    // Exact plug-in version of the dyadic chain: per sample,
    // sum_n 2^n 1{2^{n-1} <= w} >= w - 1/2, so the empirical sums obey
    // sum_n 2^n P^[...] >= mean - 1/2.
    double chain = 0.0;
    for (int level = 0; std::ldexp(1.0, level - 1) <= w_max; ++level)
        chain += std::ldexp(1.0, level) * p_at_level(level);
    if (chain < mean - 0.5 - 1e-9)
        throw ContractViolation("dyadic_eta_search: dyadic chain identity failed");

    int n0 = -1;
    for (int level = 0; std::ldexp(1.0, level - 1) <= w_max; ++level) {
        const double p = p_at_level(level);
        if (three_over_pi2 / ((level + 1.0) * (level + 1.0)) <=
            std::ldexp(1.0, level) * p) {
            n0 = level;
            break;
        }
    }
    if (n0 < 0) {
        std::ostringstream msg;
        msg << "dyadic_eta_search: no n0 below the sample maximum (max W~ = "
            << w_max << ", mean = " << mean << ", samples = " << samples << ")";
        throw ContractViolation(msg.str());
    }

    res.stats.n0 = n0;
    res.stats.eta = std::ldexp(1.0, n0 - 1);
    res.stats.p_eta_hat = p_at_level(n0);
    res.stats.std_error = std::sqrt(res.stats.p_eta_hat *
                                    (1.0 - res.stats.p_eta_hat) /
                                    static_cast<double>(samples));
    res.stats.samples = samples;
    return res;
}

double slowly_varying_constant(const IncrementLaw& law, double epsilon,
                               double* k_onset_out) {
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw std::invalid_argument(
            "slowly_varying_constant: epsilon must lie in (0,1)");
    // phi(lnx) = (1+eps) lnx + log K(x); L(x) = x K(x).
    auto log_phi = [&](double lnx) {
        return (1.0 + epsilon) * lnx + law.log_pmf_lnx(lnx);
    };
    const double lo = std::log(2.0), hi = std::log(1e9);
    const int grid_n = 400;
    std::vector<double> lphi(grid_n);
    for (int g = 0; g < grid_n; ++g)
        lphi[static_cast<std::size_t>(g)] =
            log_phi(lo + (hi - lo) * g / (grid_n - 1));

    // onset: start of the longest non-decreasing suffix of the grid values
    int onset = grid_n - 1;
    while (onset > 0 &&
           lphi[static_cast<std::size_t>(onset - 1)] <=
               lphi[static_cast<std::size_t>(onset)])
        --onset;

    // golden-section refinement around the suffix minimum
    double a = lo + (hi - lo) * std::max(0, onset - 1) / (grid_n - 1);
    double b = lo + (hi - lo) * std::min(grid_n - 1, onset + 1) / (grid_n - 1);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = log_phi(x1), f2 = log_phi(x2);
    for (int it = 0; it < 200 && b - a > 1e-10; ++it) {
        if (f1 < f2) {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - gr * (b - a); f1 = log_phi(x1);
        } else {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + gr * (b - a); f2 = log_phi(x2);
        }
    }
    if (k_onset_out)
        *k_onset_out = std::exp(lo + (hi - lo) * onset / (grid_n - 1));
    return std::exp(std::min(f1, f2));
}

double lower_bound_assembly(std::int64_t n, double epsilon, double eta,
                            double p_eta, double p_an, double c_l_eps) {
    if (n < 1 || !(epsilon > 0.0 && epsilon < 1.0) || !(eta > 0.0) ||
        !(p_eta > 0.0 && p_eta <= 1.0) || !(p_an > 0.0 && p_an <= 1.0) ||
        !(c_l_eps > 0.0))
        throw std::invalid_argument("lower_bound_assembly: invalid inputs");
    const double nn = static_cast<double>(n);
    const double bound =
        std::log(eta) / nn +
        (std::log(c_l_eps) - (1.0 + epsilon) * std::log(2.0 * nn * nn)) / nn -
        (1.0 + epsilon) / nn * std::log(1.0 / p_eta + 1.0) +
        std::log(p_an) / nn;
    if (bound > 1e-12)
        throw ContractViolation(
            "lower_bound_assembly: bound must stay non-positive");
    return bound;
}

CoarseGrainRow coarse_grain_demo(const IncrementLaw& law,
                                 const EnvironmentLaw& env, double beta,
                                 std::int64_t n, double epsilon,
                                 std::int64_t samples, std::uint64_t seed,
                                 int workers) {
    const DyadicSearchResult search =
        dyadic_eta_search(law, env, beta, n, samples, seed, workers);
    const double p_an = a_n_probability(law, n);
    CoarseGrainRow row;
    row.n = n;
    row.beta = beta;
    row.eta = search.stats.eta;
    row.n0 = search.stats.n0;
    row.p_eta = search.stats.p_eta_hat;
    row.std_error = search.stats.std_error;
    row.p_an = p_an;
    row.epsilon = epsilon;
    row.c_l_eps = slowly_varying_constant(law, epsilon);
    row.bound = lower_bound_assembly(n, epsilon, row.eta, row.p_eta, p_an,
                                     row.c_l_eps);
    return row;
}

} // namespace dpre
