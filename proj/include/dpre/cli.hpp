#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dpre/environment.hpp"
#include "dpre/increment_law.hpp"

namespace dpre::cli {

// Everything an experiment run needs; populated from flags and/or a flat
// key=value config file, echoed verbatim into result metadata.
struct Options {
    std::string family = "critical";
    double alpha = -2.0;
    double a = 1.0;
    double b = 1.0;
    int m0 = 0; // 0: family default
    double k0 = 0.5;

    std::string env = "gaussian";
    double p = 0.5;
    std::string atoms; // "v:p,v:p" for discrete environments

    double beta = 1.0;
    std::vector<double> beta_grid;
    std::int64_t n = 32;
    std::vector<std::int64_t> n_grid;
    std::int64_t m = 32;
    std::int64_t replicas = 200;
    std::uint64_t seed = 1;
    int workers = 1;

    std::string out;            // output path; empty = stdout
    std::string format = "csv"; // csv | jsonl

    // subcommand-specific
    std::int64_t count = 32;          // sample-walk
    std::int64_t cap = 1000000;       // sample-walk overflow cap
    double tol = 1e-6;                // entropy-check
    std::int64_t prefixes = 16;       // martingale-check
    std::vector<double> levels{2.0, 10.0}; // size-bias-test
    double epsilon = 0.5;             // coarse-grain-demo
    std::int64_t samples = 2000;      // coarse-grain-demo
    std::string mode = "extremes";    // order-stats
    std::int64_t identity_n = 0;      // order-stats (identity mode if > 0)
    std::int64_t n_max = 10000;       // order-stats
    double growth_k = 2.0;            // order-stats
    std::int64_t n_min = 0;           // order-stats (0: n_max/4)
    std::int64_t radius = 2000;       // order-stats unimodal mode
    std::int64_t conv_steps = 10;     // order-stats unimodal mode
    std::vector<double> a1_betas{0.5, 1, 2, 4, 8, 16, 32};
    double a1_k = 0.5;                // lemma-a1 threshold
    std::int64_t cc_n = 10000;        // condition-c
    double gamma = 0.6;               // condition-c
};

IncrementLaw make_law(const Options& o);
EnvironmentLaw make_env(const Options& o);

// Cross-field diagnostics; entries starting with "reject:" are fatal.
// An all-defaults config yields a summary of the defaults in use.
std::vector<std::string> validate(const std::string& subcommand,
                                  const Options& o);

// Entry point: parses argv, validates, runs the experiment, writes rows.
// Exit codes: 0 success, 2 config error, 3 numerical contract violation.
int run(int argc, const char* const* argv);

} // namespace dpre::cli
