#include <cstdlib>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "pivlp/cli.hpp"
#include "pivlp/experiments.hpp"
#include "pivlp/inference.hpp"
#include "pivlp/process_models.hpp"
#include "support.hpp"

using namespace pivlp;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(const std::vector<std::string>& args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

// One small table file shared by the CLI cases.
const fs::path& table_file() {
    static const fs::path p = [] {
        const auto dir = testing_support::scratch_dir("cli_table");
        store(testing_support::small_table(), dir / "w.json");
        return dir / "w.json";
    }();
    return p;
}

}  // namespace

TEST_CASE("w-table writes a reloadable, reproducible file") {
    const auto dir = testing_support::scratch_dir("cli_wtable");
    const std::vector<std::string> base = {"w-table", "--replicates", "10000", "--bm-steps", "100", "--seed", "3"};
    auto a = base;
    a.insert(a.end(), {"--out", (dir / "a.json").string()});
    auto b = base;
    b.insert(b.end(), {"--out", (dir / "b.json").string()});
    REQUIRE(run(a).code == 0);
    REQUIRE(run(b).code == 0);
    CHECK(slurp(dir / "a.json") == slurp(dir / "b.json"));
    CHECK(load(dir / "a.json") == build_table(default_alphas(), 10000, 100, 3));
    CHECK(fs::exists(dir / "a.json.manifest.json"));

    auto bad = base;
    bad[2] = "5000";
    bad.insert(bad.end(), {"--out", (dir / "c.json").string()});
    const auto r = run(bad);
    CHECK(r.code == 1);
    CHECK(json::parse(r.err)["error"]["code"] == "InsufficientReplicates");
}

TEST_CASE("usage errors exit with 2") {
    CHECK(run({}).code == 2);
    CHECK(run({"infer"}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("infer ci reproduces the library call exactly") {
    const auto dir = testing_support::scratch_dir("cli_infer");
    const auto csv = (dir / "ar2.csv").string();
    REQUIRE(run({"simulate", "--spec", "ar2-sec43", "--n", "1000", "--seed", "5", "--out", csv}).code == 0);
    const auto r = run({"infer", "--input", csv, "--measure", "kappa", "--p", "2", "--alpha", "0.1", "--table",
                        table_file().string()});
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    const auto x = read_timeseries_csv(csv);
    CHECK(x.values().size() == 1000);
    const auto c = ci(x, Measure::Kappa, 2, 0.1, testing_support::small_table());
    CHECK(j["interval"]["lower"].get<double>() == c.lower);
    CHECK(j["interval"]["upper"].get<double>() == c.upper);
    CHECK(j["estimate"].get<double>() == measure_statistic(x, Measure::Kappa, 2).estimate);
    CHECK(j["manifest"]["table_provenance"] == "file:" + table_file().string());
    const auto sim = simulate_univariate(builtin_spec("ar2-sec43"), 1000, 5);
    for (std::size_t i = 0; i < 1000; ++i) CHECK(sim[i] == x[i]);
}

TEST_CASE("statistical decisions never change the exit code") {
    const auto dir = testing_support::scratch_dir("cli_decide");
    const auto csv = (dir / "ar5.csv").string();
    REQUIRE(run({"simulate", "--spec", "ar5", "--n", "1000", "--seed", "2", "--out", csv}).code == 0);
    bool saw_reject = false;
    bool saw_accept = false;
    for (const char* delta : {"0.1", "0.9"}) {
        const auto r = run({"infer", "--input", csv, "--measure", "s", "--p", "3", "--mode", "test", "--delta",
                            delta, "--table", table_file().string()});
        CHECK(r.code == 0);
        const bool rej = json::parse(r.out)["decision"]["reject"].get<bool>();
        saw_reject = saw_reject || rej;
        saw_accept = saw_accept || !rej;
    }
    CHECK(saw_reject);
    CHECK(saw_accept);

    const auto r = run({"infer", "--input", csv, "--measure", "s", "--p", "3", "--alpha", "0.3", "--table",
                        table_file().string()});
    CHECK(r.code == 1);
    CHECK(json::parse(r.err)["error"]["code"] == "AlphaNotTabulated");
    const auto missing = run({"infer", "--input", (dir / "nope.csv").string(), "--table", table_file().string()});
    CHECK(missing.code == 1);
    CHECK(json::parse(missing.err).contains("error"));
}

TEST_CASE("order and p* modes on an AR(5) sample") {
    const auto dir = testing_support::scratch_dir("cli_order");
    const auto csv = (dir / "ar5.csv").string();
    REQUIRE(run({"simulate", "--spec", "ar5", "--n", "1000", "--seed", "8", "--out", csv}).code == 0);
    const auto r = run({"infer", "--input", csv, "--measure", "s", "--mode", "order", "--nu", "0.6", "--alpha",
                        "0.1", "--table", table_file().string()});
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(j["p_max"] == 20);
    const auto x = read_timeseries_csv(csv);
    const auto est = estimate_order(x, Measure::S, 0.6, 0.1, 20, testing_support::small_table());
    if (est.p_hat) {
        CHECK(j["p_hat"].get<std::size_t>() == *est.p_hat);
    } else {
        CHECK(j["p_hat"].is_null());
    }
    for (const char* mode : {"pstar-leq", "pstar-gt"}) {
        const auto t = run({"infer", "--input", csv, "--mode", mode, "--p0", "3", "--nu", "0.6", "--alpha", "0.1",
                            "--table", table_file().string()});
        CHECK(t.code == 0);
        CHECK(json::parse(t.out)["decision"].contains("reject"));
    }
}

TEST_CASE("order estimator finds p* = 3 for most AR(5) samples") {
    experiments::OrderConfig cfg;
    cfg.spec = builtin_spec("ar5");
    cfg.replicates = 60;
    cfg.seed = 4;
    const auto res = experiments::order_counts(cfg, testing_support::small_table());
    REQUIRE(res.mode().has_value());
    CHECK(*res.mode() == 3);
    CHECK(res.counts.at(3) > 30);
}

TEST_CASE("multivariate input with mv-s test") {
    const auto dir = testing_support::scratch_dir("cli_mv");
    const auto csv = (dir / "var.csv").string();
    REQUIRE(run({"simulate", "--spec", "var3-sec5", "--n", "500", "--seed", "1", "--out", csv}).code == 0);
    const auto r = run({"infer", "--input", csv, "--measure", "mv-s", "--p", "1", "--mode", "test", "--delta",
                        "0.25", "--alpha", "0.1", "--table", table_file().string()});
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(j["dimension"] == 5);
    const auto x = read_multiseries_csv(csv);
    const auto t = test_threshold(x, Measure::MvS, 1, 0.25, 0.1, testing_support::small_table());
    CHECK(j["decision"]["reject"].get<bool>() == t.reject);
    const auto bad = run({"infer", "--input", csv, "--mode", "order", "--table", table_file().string()});
    CHECK(bad.code == 1);
}

TEST_CASE("default table comes from the environment variable") {
    const auto dir = testing_support::scratch_dir("cli_env");
    const auto csv = (dir / "ar5.csv").string();
    REQUIRE(run({"simulate", "--spec", "ar5", "--n", "300", "--seed", "1", "--out", csv}).code == 0);
    ::setenv(cli::kTableEnvVar, table_file().c_str(), 1);
    const auto r = run({"infer", "--input", csv, "--p", "2"});
    ::unsetenv(cli::kTableEnvVar);
    REQUIRE(r.code == 0);
    CHECK(json::parse(r.out)["manifest"]["table_provenance"].get<std::string>().rfind("env:", 0) == 0);
}

TEST_CASE("reproduce table1 gives the population values") {
    const auto dir = testing_support::scratch_dir("cli_table1");
    REQUIRE(run({"reproduce", "table1", "--out-dir", dir.string()}).code == 0);
    std::istringstream in(slurp(dir / "table1.csv"));
    std::string line;
    std::getline(in, line);
    CHECK(line.rfind("spec,p,s,", 0) == 0);
    const std::vector<double> printed = {0.679, 0.613, 0.366, 0.325, 0.305, 0.305, 0.305};
    for (double want : printed) {
        REQUIRE(std::getline(in, line));
        std::stringstream ss(line);
        std::string spec, p, s;
        std::getline(ss, spec, ',');
        std::getline(ss, p, ',');
        std::getline(ss, s, ',');
        CHECK(spec == "ar5");
        CHECK(std::fabs(std::stod(s) - want) <= 0.0005);
    }
    const auto m = json::parse(slurp(dir / "table1.manifest.json"));
    CHECK(m["outputs"][0]["sha256"] == experiments::sha256_file(dir / "table1.csv"));
}

TEST_CASE("reproductions are byte-identical across runs and carry spec and table digests") {
    const auto a = testing_support::scratch_dir("cli_rep_a");
    const auto b = testing_support::scratch_dir("cli_rep_b");
    for (const auto& d : {a, b}) {
        REQUIRE(run({"reproduce", "fig3", "--replicates", "20", "--n", "150", "--seed", "9", "--out-dir",
                     d.string(), "--table", table_file().string()})
                    .code == 0);
    }
    CHECK(slurp(a / "fig3.csv") == slurp(b / "fig3.csv"));
    const std::string body = slurp(a / "fig3.csv");
    CHECK(body.find("var3-sec5") != std::string::npos);
    CHECK(body.find(experiments::table_digest(testing_support::small_table())) != std::string::npos);
    const auto m = json::parse(slurp(a / "fig3.manifest.json"));
    CHECK(m["details"]["true_mv_s1"]["var3-sec5"].get<double>() ==
          true_autocov(builtin_spec("var3-sec5"), 1).s[1]);
    // serial and parallel replicate fan-out agree
    const auto c = testing_support::scratch_dir("cli_rep_c");
    REQUIRE(run({"reproduce", "fig3", "--replicates", "20", "--n", "150", "--seed", "9", "--out-dir", c.string(),
                 "--table", table_file().string(), "--serial"})
                .code == 0);
    CHECK(slurp(c / "fig3.csv") == body);
    CHECK(run({"reproduce", "fig9", "--out-dir", c.string()}).code == 1);
}

TEST_CASE("fig1 at desk scale: boundary rejection rate near alpha") {
    experiments::RejectionConfig cfg;
    cfg.spec = builtin_spec("ma-poly");
    cfg.p = 2;
    cfg.deltas = {0.404};
    cfg.alpha = 0.05;
    cfg.n = 1000;
    cfg.replicates = 500;
    cfg.seed = 31;
    const auto res = experiments::rejection_rates(cfg, testing_support::small_table());
    CHECK(res.rate(0) >= 0.02);
    CHECK(res.rate(0) <= 0.09);
}

TEST_CASE("table2-piv scenario (i), p = 2, N = 1000") {
    experiments::CoverageConfig cfg;
    cfg.spec = builtin_spec("ar2-sec43");
    cfg.p = 2;
    cfg.truth = -0.3;
    cfg.n = 1000;
    cfg.replicates = 1000;
    cfg.seed = 12;
    const auto res = experiments::kappa_coverage(cfg, testing_support::small_table());
    CHECK(std::fabs(res.coverage() - 0.903) <= 0.03);
    CHECK(std::fabs(res.mean_length - 0.129) <= 0.02);
}

TEST_CASE("delta grids stay inside (0,1)") {
    const auto g = experiments::delta_grid(0.1);
    CHECK(g.front() > 0.0);
    CHECK(g.size() == 12);
    CHECK(experiments::delta_grid(0.5).size() == 17);
}
