#include "dpre/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <variant>

#include "dpre/coarse_grain.hpp"
#include "dpre/errors.hpp"
#include "dpre/order_stats.hpp"
#include "dpre/partition.hpp"
#include "dpre/size_bias.hpp"
#include "dpre/version.hpp"

namespace dpre::cli {

namespace {

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

using Cell = std::variant<std::int64_t, double, std::string, bool>;
using Row = std::vector<std::pair<std::string, Cell>>;

std::string cell_to_csv(const Cell& c) {
    if (std::holds_alternative<std::int64_t>(c))
        return std::to_string(std::get<std::int64_t>(c));
    if (std::holds_alternative<double>(c)) return fmt17(std::get<double>(c));
    if (std::holds_alternative<bool>(c))
        return std::get<bool>(c) ? "true" : "false";
    const std::string& s = std::get<std::string>(c);
    if (s.find(',') != std::string::npos || s.find('"') != std::string::npos) {
        std::string q = "\"";
        for (char ch : s) {
            if (ch == '"') q += '"';
            q += ch;
        }
        q += '"';
        return q;
    }
    return s;
}

class RowSink {
public:
    RowSink(std::ostream& os, bool jsonl) : os_(os), jsonl_(jsonl) {}

    void write(const Row& row) {
        if (jsonl_) {
            nlohmann::ordered_json obj;
            for (const auto& [k, c] : row) {
                if (std::holds_alternative<std::int64_t>(c))
                    obj[k] = std::get<std::int64_t>(c);
                else if (std::holds_alternative<double>(c))
                    obj[k] = std::get<double>(c);
                else if (std::holds_alternative<bool>(c))
                    obj[k] = std::get<bool>(c);
                else
                    obj[k] = std::get<std::string>(c);
            }
            os_ << obj.dump() << '\n';
            return;
        }
        if (!header_done_) {
            bool first = true;
            for (const auto& [k, c] : row) {
                if (!first) os_ << ',';
                os_ << k;
                first = false;
            }
            os_ << '\n';
            header_done_ = true;
        }
        bool first = true;
        for (const auto& [k, c] : row) {
            if (!first) os_ << ',';
            os_ << cell_to_csv(c);
            first = false;
        }
        os_ << '\n';
    }

private:
    std::ostream& os_;
    bool jsonl_;
    bool header_done_ = false;
};

std::vector<std::pair<double, double>> parse_atoms(const std::string& spec) {
    std::vector<std::pair<double, double>> atoms;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos)
            throw std::invalid_argument("atoms: expected v:p,v:p,...");
        atoms.emplace_back(std::stod(item.substr(0, colon)),
                           std::stod(item.substr(colon + 1)));
    }
    return atoms;
}

} // namespace

IncrementLaw make_law(const Options& o) {
    if (o.family == "critical") return IncrementLaw::critical(o.alpha, o.m0, o.k0);
    if (o.family == "log_tail")
        return IncrementLaw::log_tail(o.a, o.m0 == 0 ? 3 : o.m0, o.k0);
    if (o.family == "loglog_tail")
        return IncrementLaw::log_log_tail(o.b, o.m0 == 0 ? 3 : o.m0, o.k0);
    if (o.family == "power_tail") return IncrementLaw::power_tail(o.a, o.k0);
    if (o.family == "nearest_neighbor")
        return IncrementLaw::nearest_neighbor(o.k0 == 0.5 ? 0.0 : o.k0);
    throw std::invalid_argument("unknown walk family: " + o.family);
}

EnvironmentLaw make_env(const Options& o) {
    if (o.env == "gaussian") return EnvironmentLaw::gaussian();
    if (o.env == "bernoulli") return EnvironmentLaw::bernoulli(o.p);
    if (o.env == "discrete") return EnvironmentLaw::discrete_finite(parse_atoms(o.atoms));
    throw std::invalid_argument("unknown environment: " + o.env);
}

namespace {

std::string canonical_string(const std::string& sub, const Options& o) {
    std::ostringstream s;
    s << "sub=" << sub << ";family=" << o.family << ";alpha=" << fmt17(o.alpha)
      << ";a=" << fmt17(o.a) << ";b=" << fmt17(o.b) << ";m0=" << o.m0
      << ";k0=" << fmt17(o.k0) << ";env=" << o.env << ";p=" << fmt17(o.p)
      << ";atoms=" << o.atoms << ";beta=" << fmt17(o.beta) << ";beta_grid=";
    for (double v : o.beta_grid) s << fmt17(v) << "|";
    s << ";N=" << o.n << ";n_grid=";
    for (auto v : o.n_grid) s << v << "|";
    s << ";M=" << o.m << ";replicas=" << o.replicas << ";seed=" << o.seed
      << ";count=" << o.count << ";cap=" << o.cap << ";tol=" << fmt17(o.tol)
      << ";prefixes=" << o.prefixes << ";levels=";
    for (double v : o.levels) s << fmt17(v) << "|";
    s << ";epsilon=" << fmt17(o.epsilon) << ";samples=" << o.samples
      << ";mode=" << o.mode << ";identity_n=" << o.identity_n
      << ";n_max=" << o.n_max << ";growth_k=" << fmt17(o.growth_k)
      << ";n_min=" << o.n_min << ";radius=" << o.radius
      << ";conv_steps=" << o.conv_steps << ";a1_k=" << fmt17(o.a1_k)
      << ";a1_betas=";
    for (double v : o.a1_betas) s << fmt17(v) << "|";
    s << ";cc_n=" << o.cc_n << ";gamma=" << fmt17(o.gamma);
    return s.str();
}

} // namespace

std::vector<std::string> validate(const std::string& sub, const Options& o) {
    std::vector<std::string> diags;
    diags.push_back("config: " + canonical_string(sub, o));

    if (o.m < 1) diags.push_back("reject: M must be >= 1");
    if (o.n < 1) diags.push_back("reject: N must be >= 1");
    if (o.beta < 0.0) diags.push_back("reject: beta must be >= 0");
    if (o.format != "csv" && o.format != "jsonl")
        diags.push_back("reject: format must be csv or jsonl");
    if (o.workers < 1) diags.push_back("reject: workers must be >= 1");

    if (o.family == "log_tail" && !(o.a > 0.0 && o.a <= 1.0))
        diags.push_back("reject: log_tail needs a in (0,1]");
    if (o.family == "loglog_tail" && !(o.b > 0.0))
        diags.push_back("reject: loglog_tail needs b > 0");
    if (o.family == "power_tail" && !(o.a > 0.0))
        diags.push_back("reject: power_tail needs a > 0");

    const bool statistical = sub == "free-energy" || sub == "mean-w" ||
                             sub == "size-bias-test";
    if (statistical && o.replicas < 2)
        diags.push_back("reject: need at least 2 replicas");

    if (sub == "coarse-grain-demo" && o.family == "nearest_neighbor")
        diags.push_back(
            "reject: nearest_neighbor has zero-mass jumps and is incompatible "
            "with coarse-grain-demo");
    if (sub == "condition-c") {
        if (!(o.gamma > 0.5)) diags.push_back("reject: gamma must exceed 1/2");
        if (o.cc_n < 3) diags.push_back("reject: condition-c needs n >= 3");
    }
    if (sub == "martingale-check") {
        if (o.env == "gaussian")
            diags.push_back("reject: martingale-check needs an enumerable "
                            "(discrete) environment");
        if (o.m > 3 || o.n > 4)
            diags.push_back("reject: martingale-check requires M <= 3, N <= 4");
    }
    if (sub == "order-stats" && (o.mode == "identity" || o.identity_n > 0)) {
        if (o.identity_n < 2)
            diags.push_back("reject: identity mode needs identity-n >= 2");
        if (o.replicas < 10000)
            diags.push_back("reject: identity mode needs >= 10^4 replicas");
    }
    return diags;
}

namespace {

struct RunContext {
    Options o;
    std::string sub;
    std::string digest;
    std::unique_ptr<std::ofstream> file;
    std::ostream* os = nullptr;

    void meta(Row& row) const {
        row.emplace_back("seed", static_cast<std::int64_t>(o.seed));
        row.emplace_back("config_digest", digest);
        row.emplace_back("version", std::string(kVersion));
    }
};

std::vector<double> betas_of(const Options& o) {
    return o.beta_grid.empty() ? std::vector<double>{o.beta} : o.beta_grid;
}

std::vector<std::int64_t> n_grid_of(const Options& o,
                                    std::vector<std::int64_t> fallback) {
    if (!o.n_grid.empty()) return o.n_grid;
    return fallback;
}

void run_sample_walk(RunContext& ctx, RowSink& sink) {
    const IncrementLaw law = make_law(ctx.o);
    Rng rng(ctx.o.seed);
    for (std::int64_t i = 0; i < ctx.o.count; ++i) {
        const LogMagnitude x = law.sample_logmag(rng);
        Row row;
        row.emplace_back("i", i);
        row.emplace_back("law", law.describe());
        if (x.has_exact &&
            (x.exact < 0 ? -x.exact : x.exact) <= ctx.o.cap) {
            row.emplace_back("kind", std::string("int"));
            row.emplace_back("value", x.exact);
            row.emplace_back("lnmag", x.sign == 0 ? 0.0 : x.lnmag);
        } else {
            // beyond the cap: recorded as a log-magnitude
            row.emplace_back("kind", std::string("logmag"));
            row.emplace_back("value", static_cast<std::int64_t>(0));
            row.emplace_back("lnmag", x.lnmag);
        }
        row.emplace_back("sign", static_cast<std::int64_t>(x.sign));
        ctx.meta(row);
        sink.write(row);
    }
}

void run_entropy_check(RunContext& ctx, RowSink& sink) {
    const IncrementLaw law = make_law(ctx.o);
    const EntropyResult r = law.entropy(ctx.o.tol);
    Row row;
    row.emplace_back("law", law.describe());
    row.emplace_back("status", std::string(r.finite ? "finite" : "divergent"));
    row.emplace_back("value", r.value);
    row.emplace_back("bracket_width", r.bracket_width);
    ctx.meta(row);
    sink.write(row);
}

void run_free_energy(RunContext& ctx, RowSink& sink, bool mean_w) {
    const IncrementLaw law = make_law(ctx.o);
    const EnvironmentLaw env = make_env(ctx.o);
    for (double beta : betas_of(ctx.o)) {
        PolymerConfig config{beta, ctx.o.n, ctx.o.m, law, env, ctx.o.seed};
        const MonteCarloEstimate est =
            mean_w ? mean_w_mc(config, ctx.o.replicas, ctx.o.workers)
                   : free_energy_gap(config, ctx.o.replicas, ctx.o.workers);
        Row row;
        row.emplace_back("beta", beta);
        row.emplace_back("N", ctx.o.n);
        row.emplace_back("M", ctx.o.m);
        row.emplace_back("family", law.describe());
        row.emplace_back("env", env.describe());
        row.emplace_back("replicas", est.replicas);
        row.emplace_back("estimate", est.mean);
        row.emplace_back("stderr", est.std_error);
        row.emplace_back("mass_loss", est.mass_loss);
        ctx.meta(row);
        sink.write(row);
    }
}

void run_martingale_check(RunContext& ctx, RowSink& sink) {
    const IncrementLaw law = make_law(ctx.o);
    const EnvironmentLaw env = make_env(ctx.o);
    PolymerConfig config{ctx.o.beta, ctx.o.n, ctx.o.m, law, env, ctx.o.seed};
    const double disc = martingale_check(config, ctx.o.prefixes);
    Row row;
    row.emplace_back("beta", ctx.o.beta);
    row.emplace_back("N", ctx.o.n);
    row.emplace_back("M", ctx.o.m);
    row.emplace_back("family", law.describe());
    row.emplace_back("env", env.describe());
    row.emplace_back("prefixes", ctx.o.prefixes);
    row.emplace_back("max_discrepancy", disc);
    ctx.meta(row);
    sink.write(row);
    if (disc > 1e-10)
        throw ContractViolation("martingale discrepancy above 1e-10");
}

void run_size_bias_test(RunContext& ctx, RowSink& sink) {
    const IncrementLaw law = make_law(ctx.o);
    const EnvironmentLaw env = make_env(ctx.o);
    PolymerConfig config{ctx.o.beta, ctx.o.n, ctx.o.m, law, env, ctx.o.seed};
    const auto grid = n_grid_of(ctx.o, {8, 16, 32, 64});
    const DetectorResult det =
        birkner_detector(config, grid, ctx.o.levels, ctx.o.replicas,
                         ctx.o.workers);
    const EntropyResult ent = law.entropy();
    for (const DetectorRow& r : det.rows) {
        Row row;
        row.emplace_back("N", r.n);
        row.emplace_back("L", r.level);
        row.emplace_back("fraction", r.fraction);
        row.emplace_back("stderr", r.std_error);
        row.emplace_back("h_beta",
                         det.h_beta_value ? *det.h_beta_value
                                          : -std::numeric_limits<double>::infinity());
        row.emplace_back("entropy", ent.finite
                                        ? ent.value
                                        : std::numeric_limits<double>::infinity());
        row.emplace_back("excess", det.excess);
        ctx.meta(row);
        sink.write(row);
    }
    std::cerr << "# size-bias-test classification: " << det.classification
              << " (trend z per level:";
    for (double z : det.trend_z) std::cerr << ' ' << fmt17(z);
    std::cerr << ")\n";
}

void run_coarse_grain_demo(RunContext& ctx, RowSink& sink) {
    const IncrementLaw law = make_law(ctx.o);
    const EnvironmentLaw env = make_env(ctx.o);
    for (std::int64_t n : n_grid_of(ctx.o, {6, 10, 14})) {
        const CoarseGrainRow r =
            coarse_grain_demo(law, env, ctx.o.beta, n, ctx.o.epsilon,
                              ctx.o.samples, ctx.o.seed, ctx.o.workers);
        Row row;
        row.emplace_back("N", r.n);
        row.emplace_back("beta", r.beta);
        row.emplace_back("eta", r.eta);
        row.emplace_back("n0", static_cast<std::int64_t>(r.n0));
        row.emplace_back("p_eta", r.p_eta);
        row.emplace_back("stderr", r.std_error);
        row.emplace_back("PAN", r.p_an);
        row.emplace_back("epsilon", r.epsilon);
        row.emplace_back("C_L_eps", r.c_l_eps);
        row.emplace_back("bound", r.bound);
        ctx.meta(row);
        sink.write(row);
    }
}

void run_order_stats(RunContext& ctx, RowSink& sink) {
    if (ctx.o.mode == "identity" || ctx.o.identity_n > 0) {
        const TauIdentityResult r = uniform_tau_identity(
            ctx.o.identity_n, ctx.o.replicas, ctx.o.seed);
        Row row;
        row.emplace_back("n", ctx.o.identity_n);
        row.emplace_back("replicas", r.replicas);
        row.emplace_back("freq", r.freq);
        row.emplace_back("stderr", r.std_error);
        row.emplace_back("target", r.target);
        ctx.meta(row);
        sink.write(row);
        return;
    }
    if (ctx.o.mode == "unimodal") {
        const IncrementLaw law = make_law(ctx.o);
        const UnimodalCheckResult r =
            unimodal_convolution_check(law, ctx.o.conv_steps, ctx.o.radius);
        Row row;
        row.emplace_back("law", law.describe());
        row.emplace_back("steps", ctx.o.conv_steps);
        row.emplace_back("radius", r.radius);
        row.emplace_back("is_unimodal", r.is_unimodal);
        row.emplace_back("max_violation", r.max_violation);
        row.emplace_back("mass_defect", r.mass_defect);
        ctx.meta(row);
        sink.write(row);
        return;
    }
    const IncrementLaw law = make_law(ctx.o);
    const ExtremesResult ext = run_extremes(law, ctx.o.n_max, ctx.o.growth_k,
                                            ctx.o.replicas, ctx.o.seed);
    const GrowthWitnessResult gw =
        growth_witness(law, ctx.o.growth_k, ctx.o.n_max, ctx.o.replicas,
                       ctx.o.seed, ctx.o.n_min);
    for (const ExtremeCheckpoint& cp : ext.rows) {
        Row row;
        row.emplace_back("n", cp.m);
        row.emplace_back("freq_B", cp.freq_b);
        row.emplace_back("freq_C", cp.freq_c);
        row.emplace_back("freq_D", cp.freq_d);
        row.emplace_back("onset_median", gw.median_onset);
        ctx.meta(row);
        sink.write(row);
    }
    std::cerr << "# growth witness: fraction " << fmt17(gw.fraction)
              << " of replicas hold the chain at every checkpoint >= "
              << gw.n_min << "\n";
}

void run_lemma_a1(RunContext& ctx, RowSink& sink) {
    const EnvironmentLaw env = make_env(ctx.o);
    const EnvironmentLaw::A1Table t =
        env.a1_diagnostics(ctx.o.a1_betas, ctx.o.a1_k);
    for (const auto& r : t.rows) {
        Row row;
        row.emplace_back("env", env.describe());
        row.emplace_back("beta", r.beta);
        row.emplace_back("p_below_k", r.p_below_k);
        row.emplace_back("lambda_prime", r.lambda_prime);
        row.emplace_back("excess", r.excess);
        row.emplace_back("s", t.s);
        row.emplace_back("neg_log_mass", t.neg_log_mass);
        ctx.meta(row);
        sink.write(row);
    }
}

void run_condition_c(RunContext& ctx, RowSink& sink) {
    const IncrementLaw law = make_law(ctx.o);
    const ConditionC r = law.condition_c_ratio(ctx.o.cc_n, ctx.o.gamma);
    Row row;
    row.emplace_back("law", law.describe());
    row.emplace_back("n", ctx.o.cc_n);
    row.emplace_back("gamma", ctx.o.gamma);
    row.emplace_back("s_n", r.s_n.has_exact ? r.s_n.exact
                                            : static_cast<std::int64_t>(-1));
    row.emplace_back("s_n_lnmag", r.s_n.sign == 0 ? 0.0 : r.s_n.lnmag);
    row.emplace_back("ratio", r.ratio);
    row.emplace_back("threshold", r.threshold);
    row.emplace_back("passes", r.passes);
    ctx.meta(row);
    sink.write(row);
}

} // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"polymerlab: numerical laboratory for directed polymers on "
                 "heavy-tailed random walks"};
    app.set_config("--config", "", "flat key=value config file");

    Options o;
    app.add_option("--family", o.family,
                   "walk family: critical|log_tail|loglog_tail|power_tail|"
                   "nearest_neighbor");
    app.add_option("--alpha", o.alpha, "critical family exponent");
    app.add_option("--a", o.a, "log_tail / power_tail exponent");
    app.add_option("--b", o.b, "loglog_tail exponent");
    app.add_option("--m0", o.m0, "shape offset (0 = family default)");
    app.add_option("--k0", o.k0, "atom at zero");
    app.add_option("--env", o.env, "environment: gaussian|bernoulli|discrete");
    app.add_option("--p", o.p, "bernoulli parameter");
    app.add_option("--atoms", o.atoms, "discrete atoms v:p,v:p,...");
    app.add_option("--beta", o.beta, "inverse temperature");
    app.add_option("--beta-grid", o.beta_grid, "comma-separated beta grid")
        ->delimiter(',');
    app.add_option("--N", o.n, "time horizon");
    app.add_option("--n-grid", o.n_grid, "comma-separated N grid")
        ->delimiter(',');
    app.add_option("--M", o.m, "window half-width");
    app.add_option("--replicas", o.replicas, "Monte Carlo replicas");
    app.add_option("--seed", o.seed, "master seed");
    app.add_option("--workers", o.workers, "replica-parallel worker count");
    app.add_option("--out", o.out, "output path (default stdout)");
    app.add_option("--format", o.format, "csv | jsonl");
    app.add_option("--count", o.count, "sample-walk draw count");
    app.add_option("--cap", o.cap, "sample-walk overflow cap");
    app.add_option("--tol", o.tol, "entropy bracket tolerance");
    app.add_option("--prefixes", o.prefixes, "martingale-check prefixes");
    app.add_option("--levels", o.levels, "size-bias L levels")->delimiter(',');
    app.add_option("--epsilon", o.epsilon, "coarse-grain epsilon");
    app.add_option("--samples", o.samples, "coarse-grain rectangle samples");
    app.add_option("--mode", o.mode, "order-stats mode: extremes|identity|unimodal");
    app.add_option("--identity-n", o.identity_n,
                   "order-stats identity n (selects identity mode)");
    app.add_option("--n-max", o.n_max, "order-stats stream length");
    app.add_option("--growth-k", o.growth_k, "order-stats growth base K");
    app.add_option("--n-min", o.n_min, "growth witness onset floor (0 = n_max/4)");
    app.add_option("--radius", o.radius, "unimodal-mode truncation radius");
    app.add_option("--conv-steps", o.conv_steps, "unimodal-mode convolution steps");
    app.add_option("--a1-betas", o.a1_betas, "lemma-a1 beta grid")->delimiter(',');
    app.add_option("--a1-k", o.a1_k, "lemma-a1 threshold K");
    app.add_option("--n", o.cc_n, "condition-c n");
    app.add_option("--gamma", o.gamma, "condition-c gamma");

    static const char* kSubcommands[] = {
        "sample-walk",    "entropy-check",     "free-energy",
        "mean-w",         "martingale-check",  "size-bias-test",
        "coarse-grain-demo", "order-stats",    "lemma-a1",
        "condition-c"};
    for (const char* name : kSubcommands) {
        CLI::App* sub = app.add_subcommand(name);
        sub->fallthrough();
    }
    app.require_subcommand(0, 1);

    try {
        app.parse(argc, const_cast<char**>(argv));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    const auto subs = app.get_subcommands();
    if (subs.empty()) {
        std::cerr << app.help() << '\n';
        return 2;
    }
    const std::string sub = subs[0]->get_name();

    const std::vector<std::string> diags = validate(sub, o);
    bool rejected = false;
    for (const std::string& d : diags) {
        std::cerr << "# " << d << '\n';
        if (d.rfind("reject:", 0) == 0) rejected = true;
    }
    if (rejected) return 2;

    RunContext ctx;
    ctx.o = o;
    ctx.sub = sub;
    ctx.digest = config_digest(canonical_string(sub, o));
    std::ostream* os = &std::cout;
    if (!o.out.empty()) {
        ctx.file = std::make_unique<std::ofstream>(o.out);
        if (!*ctx.file) {
            std::cerr << "# reject: cannot open output path " << o.out << '\n';
            return 2;
        }
        os = ctx.file.get();
    }
    RowSink sink(*os, o.format == "jsonl");

    try {
        if (sub == "sample-walk") run_sample_walk(ctx, sink);
        else if (sub == "entropy-check") run_entropy_check(ctx, sink);
        else if (sub == "free-energy") run_free_energy(ctx, sink, false);
        else if (sub == "mean-w") run_free_energy(ctx, sink, true);
        else if (sub == "martingale-check") run_martingale_check(ctx, sink);
        else if (sub == "size-bias-test") run_size_bias_test(ctx, sink);
        else if (sub == "coarse-grain-demo") run_coarse_grain_demo(ctx, sink);
        else if (sub == "order-stats") run_order_stats(ctx, sink);
        else if (sub == "lemma-a1") run_lemma_a1(ctx, sink);
        else if (sub == "condition-c") run_condition_c(ctx, sink);
    } catch (const ContractViolation& e) {
        std::cerr << "# contract violation: " << e.what() << '\n';
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "# config error: " << e.what() << '\n';
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "# config error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}

} // namespace dpre::cli
