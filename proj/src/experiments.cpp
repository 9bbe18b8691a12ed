#include "pivlp/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

#include <openssl/evp.h>

#include "json.hpp"
#include "pivlp/error.hpp"
#include "pivlp/rng.hpp"

namespace pivlp::experiments {

namespace {

using nlohmann::json;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Rethrows a replicate failure with the configuration attached.
template <class Fn>
auto with_context(const std::string& where, Fn&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        throw Error(e.code(), where + ": " + e.what());
    }
}

std::string where(const ProcessSpec& spec, std::size_t n, std::size_t p, std::size_t r) {
    return "spec " + spec.name + ", N=" + std::to_string(n) + ", p=" + std::to_string(p) + ", replicate " +
           std::to_string(r);
}

}  // namespace

std::uint64_t replicate_seed(std::uint64_t seed, std::size_t r) {
    return derive_seed(seed, Stream::Replicate, static_cast<std::uint64_t>(r));
}

double RejectionResult::rate(std::size_t i) const {
    return replicates == 0 ? 0.0 : static_cast<double>(rejections.at(i)) / static_cast<double>(replicates);
}

RejectionResult rejection_rates(const RejectionConfig& cfg, const WQuantileTable& table) {
    require(cfg.replicates >= 1, ErrorCode::InvalidArgument, "need at least one replicate");
    require(!cfg.deltas.empty(), ErrorCode::InvalidArgument, "need at least one threshold");
    cfg.spec.validate();
    RejectionResult out;
    out.measure = cfg.spec.dimension == 1 ? Measure::S : Measure::MvS;
    out.deltas = cfg.deltas;
    out.replicates = cfg.replicates;
    const auto decisions = kernels::replicate_map(
        cfg.replicates,
        [&](std::size_t r) {
            return with_context(where(cfg.spec, cfg.n, cfg.p, r), [&] {
                const auto x = simulate(cfg.spec, cfg.n, replicate_seed(cfg.seed, r));
                const MeasureStatistic stat =
                    std::holds_alternative<TimeSeries>(x)
                        ? measure_statistic(std::get<TimeSeries>(x), out.measure, cfg.p)
                        : measure_statistic(std::get<MultiSeries>(x), out.measure, cfg.p);
                std::vector<char> rej(cfg.deltas.size());
                for (std::size_t i = 0; i < cfg.deltas.size(); ++i) {
                    rej[i] = threshold_decision(stat, cfg.deltas[i], cfg.alpha, table).reject ? 1 : 0;
                }
                return rej;
            });
        },
        cfg.exec);
    out.rejections.assign(cfg.deltas.size(), 0);
    for (const auto& rej : decisions) {
        for (std::size_t i = 0; i < rej.size(); ++i) out.rejections[i] += static_cast<std::size_t>(rej[i]);
    }
    return out;
}

double CoverageResult::coverage() const {
    return replicates == 0 ? 0.0 : static_cast<double>(covered) / static_cast<double>(replicates);
}

CoverageResult kappa_coverage(const CoverageConfig& cfg, const WQuantileTable& table) {
    require(cfg.replicates >= 1, ErrorCode::InvalidArgument, "need at least one replicate");
    require(cfg.spec.dimension == 1, ErrorCode::InvalidArgument, "kappa coverage needs a univariate spec");
    const auto intervals = kernels::replicate_map(
        cfg.replicates,
        [&](std::size_t r) {
            return with_context(where(cfg.spec, cfg.n, cfg.p, r), [&] {
                const auto x = simulate_univariate(cfg.spec, cfg.n, replicate_seed(cfg.seed, r));
                return ci(x, Measure::Kappa, cfg.p, cfg.alpha, table);
            });
        },
        cfg.exec);
    CoverageResult out;
    out.replicates = cfg.replicates;
    double length = 0.0;
    for (const auto& c : intervals) {
        if (c.contains(cfg.truth)) ++out.covered;
        length += c.width();
    }
    out.mean_length = length / static_cast<double>(cfg.replicates);
    return out;
}

double OrderCounts::share_above(std::size_t p) const {
    std::size_t k = not_found;
    for (const auto& [ph, c] : counts) {
        if (ph > p) k += c;
    }
    return replicates == 0 ? 0.0 : static_cast<double>(k) / static_cast<double>(replicates);
}

double OrderCounts::share_below(std::size_t p) const {
    std::size_t k = 0;
    for (const auto& [ph, c] : counts) {
        if (ph < p) k += c;
    }
    return replicates == 0 ? 0.0 : static_cast<double>(k) / static_cast<double>(replicates);
}

std::optional<std::size_t> OrderCounts::mode() const {
    std::optional<std::size_t> best;
    std::size_t best_count = 0;
    for (const auto& [ph, c] : counts) {
        if (c > best_count) {
            best = ph;
            best_count = c;
        }
    }
    if (not_found > best_count) return std::nullopt;
    return best;
}

OrderCounts order_counts(const OrderConfig& cfg, const WQuantileTable& table) {
    require(cfg.replicates >= 1, ErrorCode::InvalidArgument, "need at least one replicate");
    OrderCounts out;
    out.replicates = cfg.replicates;
    out.p_max = cfg.p_max != 0 ? cfg.p_max : default_p_max(cfg.n);
    const auto p_hats = kernels::replicate_map(
        cfg.replicates,
        [&](std::size_t r) {
            return with_context(where(cfg.spec, cfg.n, out.p_max, r), [&] {
                const auto x = simulate_univariate(cfg.spec, cfg.n, replicate_seed(cfg.seed, r));
                return estimate_order(x, Measure::S, cfg.nu, cfg.alpha, out.p_max, table).p_hat;
            });
        },
        cfg.exec);
    for (const auto& ph : p_hats) {
        if (ph) {
            ++out.counts[*ph];
        } else {
            ++out.not_found;
        }
    }
    return out;
}

std::vector<double> delta_grid(double center, double step, int half) {
    std::vector<double> out;
    for (int k = -half; k <= half; ++k) {
        const double d = center + k * step;
        if (d > 0.0 && d < 1.0) out.push_back(d);
    }
    return out;
}

std::string experiment_name(Experiment e) {
    switch (e) {
        case Experiment::Fig1: return "fig1";
        case Experiment::Table1: return "table1";
        case Experiment::Fig2: return "fig2";
        case Experiment::Table2Piv: return "table2-piv";
        case Experiment::Fig3: return "fig3";
    }
    return "?";
}

Experiment parse_experiment(const std::string& name) {
    for (Experiment e : {Experiment::Fig1, Experiment::Table1, Experiment::Fig2, Experiment::Table2Piv,
                         Experiment::Fig3}) {
        if (experiment_name(e) == name) return e;
    }
    throw Error(ErrorCode::InvalidArgument, "unknown experiment '" + name + "'");
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
        throw Error(ErrorCode::IoError, "SHA-256 digest failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[md[i] >> 4]);
        out.push_back(hex[md[i] & 0xf]);
    }
    return out;
}

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
    return sha256_hex(std::string(std::istreambuf_iterator<char>(in), {}));
}

std::string table_digest(const WQuantileTable& table) { return sha256_hex(pivlp::to_json(table)); }

std::string RunManifest::to_json() const {
    json j;
    j["command"] = command;
    j["seed"] = seed;
    j["table"] = {{"provenance", table_provenance}, {"sha256", table_digest}};
    json s = json::array();
    for (const auto& t : specs) s.push_back(json::parse(t));
    j["specs"] = s;
    j["replicates"] = replicates;
    j["sizes"] = sizes;
    j["details"] = details.empty() ? json::object() : json::parse(details);
    j["wall_clock_seconds"] = wall_clock_seconds;
    json outs = json::array();
    for (const auto& o : outputs) outs.push_back({{"path", o.path.string()}, {"sha256", o.sha256}});
    j["outputs"] = outs;
    return j.dump(2) + "\n";
}

namespace {

struct Csv {
    std::ostringstream body;

    explicit Csv(const std::vector<std::string>& header) { row(header); }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) body << (i ? "," : "") << cells[i];
        body << "\n";
    }
};

struct Output {
    std::string csv;
    json details = json::object();
    std::vector<const ProcessSpec*> specs;
};

Output run_fig1(const ReproduceOptions& o, const WQuantileTable& table, const std::string& digest) {
    Output out;
    Csv csv({"spec", "p", "n", "delta", "true_s", "alpha", "replicates", "rejections", "rate", "table_sha256"});
    const double alpha = 0.05;
    for (const char* name : {"ma-poly", "ma-geom"}) {
        const ProcessSpec& spec = builtin_spec(name);
        out.specs.push_back(&spec);
        const auto truth = true_autocov(spec, 6);
        for (std::size_t p : {2, 4, 6}) {
            const auto deltas = delta_grid(truth.s[p]);
            out.details["delta_grids"][std::string(name) + "/p" + std::to_string(p)] = deltas;
            out.details["true_s"][std::string(name) + "/p" + std::to_string(p)] = truth.s[p];
            for (std::size_t n : o.sizes) {
                const auto res =
                    rejection_rates({spec, p, deltas, alpha, n, o.replicates, o.seed, o.exec}, table);
                for (std::size_t i = 0; i < deltas.size(); ++i) {
                    csv.row({name, std::to_string(p), std::to_string(n), num(deltas[i]), num(truth.s[p]),
                             num(alpha), std::to_string(o.replicates), std::to_string(res.rejections[i]),
                             num(res.rate(i)), digest});
                }
            }
        }
    }
    out.csv = csv.body.str();
    return out;
}

Output run_fig3(const ReproduceOptions& o, const WQuantileTable& table, const std::string& digest) {
    Output out;
    Csv csv({"spec", "p", "n", "delta", "true_mv_s", "alpha", "replicates", "rejections", "rate", "table_sha256"});
    const double alpha = 0.10;
    const std::size_t p = 1;
    for (const char* name : {"var3-sec5", "vma-sec5"}) {
        const ProcessSpec& spec = builtin_spec(name);
        out.specs.push_back(&spec);
        const double s1 = true_autocov(spec, p).s[p];
        const auto deltas = delta_grid(s1);
        out.details["delta_grids"][name] = deltas;
        out.details["true_mv_s1"][name] = s1;
        for (std::size_t n : o.sizes) {
            const auto res = rejection_rates({spec, p, deltas, alpha, n, o.replicates, o.seed, o.exec}, table);
            for (std::size_t i = 0; i < deltas.size(); ++i) {
                csv.row({name, std::to_string(p), std::to_string(n), num(deltas[i]), num(s1), num(alpha),
                         std::to_string(o.replicates), std::to_string(res.rejections[i]), num(res.rate(i)),
                         digest});
            }
        }
    }
    out.csv = csv.body.str();
    return out;
}

Output run_table1(const std::string& digest) {
    Output out;
    Csv csv({"spec", "p", "s", "r2", "q", "kappa", "table_sha256"});
    const ProcessSpec& spec = builtin_spec("ar5");
    out.specs.push_back(&spec);
    const auto truth = true_autocov(spec, 7);
    for (std::size_t p = 1; p <= 7; ++p) {
        csv.row({spec.name, std::to_string(p), num(truth.univariate->s(p)), num(1.0 - truth.univariate->s(p)),
                 num(truth.univariate->q(p)), num(truth.univariate->partial_autocorrelation(p)), digest});
    }
    out.csv = csv.body.str();
    return out;
}

Output run_fig2(const ReproduceOptions& o, const WQuantileTable& table, const std::string& digest) {
    Output out;
    Csv csv({"spec", "n", "nu", "alpha", "p_max", "p_hat", "count", "share", "replicates", "table_sha256"});
    const ProcessSpec& spec = builtin_spec("ar5");
    out.specs.push_back(&spec);
    const double nu = 0.6;
    const double alpha = 0.10;
    out.details["nu"] = nu;
    out.details["alpha"] = alpha;
    for (std::size_t n : o.sizes) {
        OrderConfig cfg;
        cfg.spec = spec;
        cfg.nu = nu;
        cfg.alpha = alpha;
        cfg.n = n;
        cfg.replicates = o.replicates;
        cfg.seed = o.seed;
        cfg.exec = o.exec;
        const auto res = order_counts(cfg, table);
        auto emit = [&](const std::string& label, std::size_t count) {
            csv.row({spec.name, std::to_string(n), num(nu), num(alpha), std::to_string(res.p_max), label,
                     std::to_string(count), num(static_cast<double>(count) / static_cast<double>(o.replicates)),
                     std::to_string(o.replicates), digest});
        };
        for (std::size_t p = 1; p <= res.p_max; ++p) {
            const auto it = res.counts.find(p);
            emit(std::to_string(p), it == res.counts.end() ? 0 : it->second);
        }
        emit("none", res.not_found);
    }
    out.csv = csv.body.str();
    return out;
}

Output run_table2(const ReproduceOptions& o, const WQuantileTable& table, const std::string& digest) {
    Output out;
    Csv csv({"scenario", "spec", "p", "n", "true_kappa", "level", "replicates", "coverage", "mean_length",
             "table_sha256"});
    struct Row {
        const char* scenario;
        const char* spec;
        std::size_t p;
    };
    const double alpha = 0.10;
    for (const Row& r : {Row{"i", "ar2-sec43", 2}, Row{"i", "ar4-sec43", 4}, Row{"ii", "ar6-sec43", 2},
                         Row{"ii", "ar6-sec43", 4}}) {
        const ProcessSpec& spec = builtin_spec(r.spec);
        if (std::find(out.specs.begin(), out.specs.end(), &spec) == out.specs.end()) out.specs.push_back(&spec);
        const double kappa = true_autocov(spec, r.p).univariate->partial_autocorrelation(r.p);
        out.details["true_kappa"][std::string(r.spec) + "/p" + std::to_string(r.p)] = kappa;
        for (std::size_t n : o.sizes) {
            CoverageConfig cfg;
            cfg.spec = spec;
            cfg.p = r.p;
            cfg.truth = kappa;
            cfg.alpha = alpha;
            cfg.n = n;
            cfg.replicates = o.replicates;
            cfg.seed = o.seed;
            cfg.exec = o.exec;
            const auto res = kappa_coverage(cfg, table);
            csv.row({r.scenario, r.spec, std::to_string(r.p), std::to_string(n), num(kappa), num(1.0 - alpha),
                     std::to_string(o.replicates), num(res.coverage()), num(res.mean_length), digest});
        }
    }
    out.csv = csv.body.str();
    return out;
}

}  // namespace

RunManifest reproduce(const ReproduceOptions& opts, const WQuantileTable& table,
                      const std::string& table_provenance, const std::string& command) {
    require(opts.replicates >= 1, ErrorCode::InvalidArgument, "need at least one replicate");
    require(!opts.sizes.empty(), ErrorCode::InvalidArgument, "need at least one sample size");
    const auto start = std::chrono::steady_clock::now();
    const std::string digest = table_digest(table);

    Output res;
    switch (opts.experiment) {
        case Experiment::Fig1: res = run_fig1(opts, table, digest); break;
        case Experiment::Table1: res = run_table1(digest); break;
        case Experiment::Fig2: res = run_fig2(opts, table, digest); break;
        case Experiment::Table2Piv: res = run_table2(opts, table, digest); break;
        case Experiment::Fig3: res = run_fig3(opts, table, digest); break;
    }

    std::error_code ec;
    std::filesystem::create_directories(opts.out_dir, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create " + opts.out_dir.string() + ": " + ec.message());
    const std::string stem = experiment_name(opts.experiment);
    const auto csv_path = opts.out_dir / (stem + ".csv");
    {
        std::ofstream f(csv_path, std::ios::binary);
        if (!f) throw Error(ErrorCode::IoError, "cannot write " + csv_path.string());
        f << res.csv;
    }

    RunManifest m;
    m.command = command;
    m.seed = opts.seed;
    m.table_provenance = table_provenance;
    m.table_digest = digest;
    for (const ProcessSpec* s : res.specs) m.specs.push_back(spec_to_json(*s));
    m.replicates = opts.experiment == Experiment::Table1 ? 0 : opts.replicates;
    m.sizes = opts.experiment == Experiment::Table1 ? std::vector<std::size_t>{} : opts.sizes;
    m.details = res.details.dump();
    m.outputs.push_back({csv_path, sha256_hex(res.csv)});
    m.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const auto manifest_path = opts.out_dir / (stem + ".manifest.json");
    std::ofstream f(manifest_path, std::ios::binary);
    if (!f) throw Error(ErrorCode::IoError, "cannot write " + manifest_path.string());
    f << m.to_json();
    return m;
}

}  // namespace pivlp::experiments
