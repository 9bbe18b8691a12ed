#include "pivlp/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"
#include "pivlp/error.hpp"
#include "pivlp/experiments.hpp"
#include "pivlp/inference.hpp"
#include "pivlp/pivotal_dist.hpp"
#include "pivlp/process_models.hpp"
#include "pivlp/timeseries.hpp"

namespace pivlp::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct LoadedTable {
    WQuantileTable table;
    std::string provenance;
};

LoadedTable resolve_table(const std::string& path) {
    if (!path.empty()) return {load(path), "file:" + path};
    if (const char* env = std::getenv(kTableEnvVar); env != nullptr && *env != '\0') {
        return {load(env), std::string("env:") + kTableEnvVar + "=" + env};
    }
    auto t = build_table();
    const std::string prov = "built:replicates=" + std::to_string(t.replicates) +
                             ",bm_steps=" + std::to_string(t.bm_steps) + ",seed=" + std::to_string(t.seed);
    return {std::move(t), prov};
}

std::string join(const std::vector<std::string>& args) {
    std::string s;
    for (const auto& a : args) s += (s.empty() ? "" : " ") + a;
    return s;
}

void write_manifest(const fs::path& out, experiments::RunManifest m) {
    m.outputs.push_back({out, experiments::sha256_file(out)});
    std::ofstream f(out.string() + ".manifest.json", std::ios::binary);
    if (!f) throw Error(ErrorCode::IoError, "cannot write manifest for " + out.string());
    f << m.to_json();
}

struct WTableArgs {
    std::vector<double> alphas = default_alphas();
    std::size_t replicates = kDefaultReplicates;
    std::size_t bm_steps = kDefaultBmSteps;
    std::uint64_t seed = kDefaultTableSeed;
    std::string out;
};

struct SimulateArgs {
    std::string spec;
    std::size_t n = 1000;
    std::uint64_t seed = 1;
    std::string out;
};

struct InferArgs {
    std::string input;
    std::string measure = "s";
    std::size_t p = 1;
    double alpha = 0.05;
    std::string mode = "ci";
    std::optional<double> delta;
    double nu = 0.6;
    std::size_t pmax = 0;
    std::size_t p0 = 1;
    std::string table;
    std::size_t grid_size = LambdaGrid::kDefaultSteps;
    bool centered = false;
};

struct ReproduceArgs {
    std::string experiment;
    std::size_t replicates = 1000;
    std::vector<std::size_t> sizes = {100, 200, 500, 1000};
    std::uint64_t seed = 20250828;
    std::string out_dir = ".";
    std::string table;
    bool serial = false;
};

struct TruthArgs {
    std::string spec;
    std::size_t max_lag = 7;
};

json cmd_w_table(const WTableArgs& a, const std::string& command) {
    const auto start = std::chrono::steady_clock::now();
    const auto table = build_table(a.alphas, a.replicates, a.bm_steps, a.seed);
    store(table, a.out);
    experiments::RunManifest m;
    m.command = command;
    m.seed = a.seed;
    m.table_provenance = "this file";
    m.table_digest = experiments::table_digest(table);
    m.replicates = a.replicates;
    m.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_manifest(a.out, m);
    return {{"out", a.out},
            {"sha256", experiments::sha256_file(a.out)},
            {"replicates", table.replicates},
            {"bm_steps", table.bm_steps},
            {"seed", table.seed},
            {"resampled", table.resampled_count}};
}

json cmd_simulate(const SimulateArgs& a, const std::string& command) {
    const auto start = std::chrono::steady_clock::now();
    const ProcessSpec spec = resolve_spec(a.spec);
    const MultiSeries x = simulate_multivariate(spec, a.n, a.seed);
    std::vector<std::string> header;
    if (spec.dimension == 1) {
        header.push_back("x");
    } else {
        for (std::size_t j = 1; j <= spec.dimension; ++j) header.push_back("x" + std::to_string(j));
    }
    write_csv(a.out, x.values(), header);
    experiments::RunManifest m;
    m.command = command;
    m.seed = a.seed;
    m.specs.push_back(spec_to_json(spec));
    m.sizes = {a.n};
    m.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_manifest(a.out, m);
    return {{"out", a.out}, {"spec", spec.name}, {"n", a.n}, {"dimension", spec.dimension}};
}

json ci_json(const ConfidenceInterval& c) { return {{"lower", c.lower}, {"upper", c.upper}, {"level", c.level}}; }

json decision_json(const TestOutcome& t) {
    return {{"reject", t.reject}, {"statistic", t.statistic}, {"threshold", t.threshold}};
}

json cmd_infer(const InferArgs& a, const std::string& command) {
    const Measure measure = parse_measure(a.measure);
    InferenceOptions opts;
    opts.grid = LambdaGrid::uniform(a.grid_size);
    opts.centering = a.centered ? Centering::Centered : Centering::Raw;

    const MultiSeries data = read_multiseries_csv(a.input);
    const bool multivariate = data.dimension() > 1 || measure == Measure::MvS;
    const auto table = resolve_table(a.table);

    json j;
    j["measure"] = std::string(to_string(measure));
    j["mode"] = a.mode;
    j["alpha"] = a.alpha;
    j["n"] = data.size();
    j["dimension"] = data.dimension();

    auto stat_for = [&](std::size_t p) {
        return multivariate ? measure_statistic(data, measure, p, opts)
                            : measure_statistic(data.channel(0), measure, p, opts);
    };
    auto put_stat = [&](const MeasureStatistic& s) {
        j["p"] = s.p;
        j["estimate"] = s.estimate;
        j["normalizer"] = s.normalizer.value;
        j["normalizer_kind"] = s.normalizer.kind == NormalizerKind::Plain ? "plain" : "weighted";
    };
    auto univariate = [&]() {
        require(data.dimension() == 1, ErrorCode::InvalidArgument,
                "mode '" + a.mode + "' needs univariate input");
        return data.channel(0);
    };

    if (a.mode == "ci") {
        const auto s = stat_for(a.p);
        put_stat(s);
        j["critical"] = quantile(table.table, 1.0 - a.alpha / 2.0);
        j["interval"] = ci_json(ci_from_statistic(s, a.alpha, table.table));
    } else if (a.mode == "test") {
        require(a.delta.has_value(), ErrorCode::InvalidArgument, "mode 'test' needs --delta");
        const auto s = stat_for(a.p);
        put_stat(s);
        const auto t = threshold_decision(s, *a.delta, a.alpha, table.table);
        j["critical"] = t.critical;
        j["decision"] = decision_json(t);
    } else if (a.mode == "delta-hat") {
        const auto s = stat_for(a.p);
        put_stat(s);
        j["critical"] = quantile(table.table, a.alpha);
        j["delta_hat"] = delta_hat_alpha(s, a.alpha, table.table);
    } else if (a.mode == "order") {
        const auto x = univariate();
        const std::size_t pmax = a.pmax != 0 ? a.pmax : default_p_max(x.size());
        const auto est = estimate_order(x, measure, a.nu, a.alpha, pmax, table.table, opts);
        j["critical"] = quantile(table.table, a.alpha);
        j["nu"] = a.nu;
        j["p_hat"] = est.p_hat ? json(*est.p_hat) : json(nullptr);
        j["p_max"] = est.p_max;
        json steps = json::array();
        for (const auto& st : est.steps) {
            steps.push_back({{"p", st.p}, {"estimate", st.estimate}, {"normalizer", st.normalizer},
                             {"accepted", st.accepted}});
        }
        j["steps"] = steps;
        if (!est.steps.empty()) {
            j["p"] = est.steps.back().p;
            j["estimate"] = est.steps.back().estimate;
            j["normalizer"] = est.steps.back().normalizer;
        }
    } else if (a.mode == "pstar-leq" || a.mode == "pstar-gt") {
        const auto x = univariate();
        TestOutcome t;
        if (a.mode == "pstar-leq") {
            const std::size_t pmax = a.pmax != 0 ? a.pmax : default_p_max(x.size());
            t = test_pstar_leq(x, measure, a.p0, a.nu, a.alpha, pmax, table.table, opts);
            j["p_max"] = pmax;
        } else {
            put_stat(measure_statistic(x, measure, a.p0, opts));
            t = test_pstar_gt(x, measure, a.p0, a.nu, a.alpha, table.table, opts);
        }
        j["p0"] = a.p0;
        j["nu"] = a.nu;
        j["critical"] = t.critical;
        json d = decision_json(t);
        if (std::isinf(t.statistic)) d["statistic"] = nullptr;
        j["decision"] = d;
    } else {
        throw Error(ErrorCode::InvalidArgument, "unknown mode '" + a.mode + "'");
    }

    j["manifest"] = {{"command", command},
                     {"input", a.input},
                     {"input_sha256", experiments::sha256_file(a.input)},
                     {"table_provenance", table.provenance},
                     {"table_sha256", experiments::table_digest(table.table)},
                     {"grid_size", a.grid_size},
                     {"centering", a.centered ? "centered" : "raw"}};
    return j;
}

json cmd_reproduce(const ReproduceArgs& a, const std::string& command) {
    experiments::ReproduceOptions o;
    o.experiment = experiments::parse_experiment(a.experiment);
    o.replicates = a.replicates;
    o.sizes = a.sizes;
    o.seed = a.seed;
    o.out_dir = a.out_dir;
    o.exec = a.serial ? Exec::Serial : Exec::Parallel;
    LoadedTable table;
    if (o.experiment == experiments::Experiment::Table1 && a.table.empty()) {
        // population values only; the table is recorded but never consulted
        table = {WQuantileTable{}, "unused"};
    } else {
        table = resolve_table(a.table);
    }
    const auto m = experiments::reproduce(o, table.table, table.provenance, command);
    json outs = json::array();
    for (const auto& f : m.outputs) outs.push_back({{"path", f.path.string()}, {"sha256", f.sha256}});
    return {{"experiment", a.experiment}, {"outputs", outs}, {"wall_clock_seconds", m.wall_clock_seconds}};
}

json cmd_truth(const TruthArgs& a) {
    const ProcessSpec spec = resolve_spec(a.spec);
    const auto t = true_autocov(spec, a.max_lag);
    json j;
    j["spec"] = spec.name;
    j["dimension"] = spec.dimension;
    j["m"] = t.m;
    j["s"] = t.s;
    if (t.univariate) {
        std::vector<double> kappa;
        std::vector<double> q;
        for (std::size_t p = 1; p <= a.max_lag; ++p) {
            kappa.push_back(t.univariate->partial_autocorrelation(p));
            q.push_back(t.univariate->q(p));
        }
        j["kappa"] = kappa;
        j["q"] = q;
    }
    return j;
}

json error_json(std::string_view code, const std::string& message) {
    return {{"error", {{"code", std::string(code)}, {"message", message}}}};
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Pivotal inference for prediction-error measures of stationary time series", "pivlp"};
    app.require_subcommand(1);

    WTableArgs wt;
    auto* w_cmd = app.add_subcommand("w-table", "Simulate the pivot W and store its quantile table");
    w_cmd->add_option("--alphas", wt.alphas, "Quantile levels")->delimiter(',');
    w_cmd->add_option("--replicates", wt.replicates, "Monte Carlo draws of W");
    w_cmd->add_option("--bm-steps", wt.bm_steps, "Brownian grid steps per draw");
    w_cmd->add_option("--seed", wt.seed, "Master seed");
    w_cmd->add_option("--out", wt.out, "Output JSON path")->required();

    SimulateArgs sim;
    auto* s_cmd = app.add_subcommand("simulate", "Simulate a process to CSV");
    s_cmd->add_option("--spec", sim.spec, "Builtin spec name or JSON spec file")->required();
    s_cmd->add_option("--n", sim.n, "Sample size");
    s_cmd->add_option("--seed", sim.seed, "Seed");
    s_cmd->add_option("--out", sim.out, "Output CSV path")->required();

    InferArgs inf;
    auto* i_cmd = app.add_subcommand("infer", "Confidence intervals, tests and order selection");
    i_cmd->add_option("--input", inf.input, "CSV with one column per channel")->required();
    i_cmd->add_option("--measure", inf.measure, "m, s, r2, q, kappa, kappa2 or mv-s");
    i_cmd->add_option("--p", inf.p, "Predictor order");
    i_cmd->add_option("--alpha", inf.alpha, "Nominal level");
    i_cmd->add_option("--mode", inf.mode, "ci, test, delta-hat, order, pstar-leq or pstar-gt");
    i_cmd->add_option("--delta", inf.delta, "Threshold for mode test");
    i_cmd->add_option("--nu", inf.nu, "Order-selection level");
    i_cmd->add_option("--pmax", inf.pmax, "Largest order searched (default min(20, N/4))");
    i_cmd->add_option("--p0", inf.p0, "Order under test for pstar modes");
    i_cmd->add_option("--table", inf.table, "W quantile table (default: $PIVLP_W_TABLE or built in memory)");
    i_cmd->add_option("--grid-size", inf.grid_size, "Riemann grid points for the self-normalizer");
    i_cmd->add_flag("--centered", inf.centered, "Subtract the sample mean first");

    ReproduceArgs rep;
    auto* r_cmd = app.add_subcommand("reproduce", "Rerun a simulation study and write CSV + manifest");
    r_cmd->add_option("experiment", rep.experiment, "fig1, table1, fig2, table2-piv or fig3")->required();
    r_cmd->add_option("--replicates", rep.replicates, "Simulation runs per configuration");
    r_cmd->add_option("--n", rep.sizes, "Sample sizes")->delimiter(',');
    r_cmd->add_option("--seed", rep.seed, "Master seed");
    r_cmd->add_option("--out-dir", rep.out_dir, "Output directory");
    r_cmd->add_option("--table", rep.table, "W quantile table (default: $PIVLP_W_TABLE or built in memory)");
    r_cmd->add_flag("--serial", rep.serial, "Run replicates on one thread");

    TruthArgs tr;
    auto* t_cmd = app.add_subcommand("truth", "Population autocovariances and prediction-error measures");
    t_cmd->add_option("--spec", tr.spec, "Builtin spec name or JSON spec file")->required();
    t_cmd->add_option("--max-lag", tr.max_lag, "Largest order");

    std::vector<const char*> argv;
    argv.push_back("pivlp");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e, out, err);
        err << error_json("Usage", e.what()).dump() << "\n";
        return 2;
    }

    const std::string command = "pivlp " + join(args);
    try {
        json result;
        if (w_cmd->parsed()) result = cmd_w_table(wt, command);
        if (s_cmd->parsed()) result = cmd_simulate(sim, command);
        if (i_cmd->parsed()) result = cmd_infer(inf, command);
        if (r_cmd->parsed()) result = cmd_reproduce(rep, command);
        if (t_cmd->parsed()) result = cmd_truth(tr);
        out << result.dump(2) << "\n";
        return 0;
    } catch (const Error& e) {
        err << error_json(to_string(e.code()), e.what()).dump() << "\n";
    } catch (const std::exception& e) {
        err << error_json("Internal", e.what()).dump() << "\n";
    }
    return 1;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    return run(std::vector<std::string>(argv + 1, argv + argc), out, err);
}

}  // namespace pivlp::cli
