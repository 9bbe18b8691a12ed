#include "pivlp/pivotal_dist.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "pivlp/error.hpp"

namespace pivlp {

const std::vector<double>& default_alphas() {
    static const std::vector<double> alphas{0.01, 0.025, 0.05, 0.1, 0.5, 0.9, 0.95, 0.975, 0.99};
    return alphas;
}

double sample_w(Rng& rng, std::size_t bm_steps, std::uint64_t* resampled) {
    require(bm_steps >= 2, ErrorCode::InvalidArgument, "bm_steps must be at least 2");
    thread_local std::vector<double> path;
    path.resize(bm_steps);
    const double sd = 1.0 / std::sqrt(static_cast<double>(bm_steps));
    const double step = 1.0 / static_cast<double>(bm_steps);
    for (;;) {
        double b = 0.0;
        for (std::size_t k = 0; k < bm_steps; ++k) {
            b += sd * rng.normal();
            path[k] = b;
        }
        const double end = b;
        double den = 0.0;
        for (std::size_t k = 0; k < bm_steps; ++k) {
            den += std::abs(path[k] - static_cast<double>(k + 1) * step * end);
        }
        den *= step;
        if (den > 0.0) return end / den;
        if (resampled) ++*resampled;
    }
}

WDraws draw_w(std::size_t replicates, std::size_t bm_steps, std::uint64_t seed, Exec exec) {
    struct One {
        double value = 0.0;
        std::uint64_t resampled = 0;
    };
    auto one = kernels::replicate_map(
        replicates,
        [&](std::size_t r) {
            Rng rng(derive_seed(seed, Stream::PivotDraws, r));
            One o;
            o.value = sample_w(rng, bm_steps, &o.resampled);
            return o;
        },
        exec);
    WDraws out;
    out.values.reserve(replicates);
    for (const auto& o : one) {
        out.values.push_back(o.value);
        out.resampled += o.resampled;
    }
    return out;
}

std::vector<double> empirical_quantiles(const std::vector<double>& sorted, const std::vector<double>& alphas) {
    require(!sorted.empty(), ErrorCode::InvalidArgument, "empty sample");
    std::vector<double> out;
    out.reserve(alphas.size());
    const double n = static_cast<double>(sorted.size());
    for (double a : alphas) {
        const double h = (n - 1.0) * a;
        const auto lo = static_cast<std::size_t>(std::floor(h));
        const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
        out.push_back(sorted[lo] + (h - std::floor(h)) * (sorted[hi] - sorted[lo]));
    }
    return out;
}

std::vector<double> quantile_std_errors(const std::vector<double>& sorted, const std::vector<double>& alphas) {
    const double n = static_cast<double>(sorted.size());
    const double bw = std::min(0.01, 2.0 / std::sqrt(n));
    std::vector<double> out;
    for (double a : alphas) {
        const double lo = std::max(a - bw, 0.5 / n);
        const double hi = std::min(a + bw, 1.0 - 0.5 / n);
        const auto q = empirical_quantiles(sorted, {lo, hi});
        const double density = (hi - lo) / std::max(q[1] - q[0], 1e-300);
        out.push_back(std::sqrt(a * (1.0 - a) / n) / density);
    }
    return out;
}

namespace {

void check_alphas(const std::vector<double>& alphas) {
    require(!alphas.empty(), ErrorCode::InvalidArgument, "no alphas requested");
    for (double a : alphas) require(a > 0.0 && a < 1.0, ErrorCode::InvalidArgument, "alphas must lie in (0,1)");
    for (std::size_t i = 1; i < alphas.size(); ++i) {
        require(alphas[i] > alphas[i - 1], ErrorCode::InvalidArgument, "alphas must be strictly increasing");
    }
}

}  // namespace

WQuantileTable table_from_draws(WDraws draws, const std::vector<double>& alphas, std::size_t bm_steps,
                                std::uint64_t seed) {
    check_alphas(alphas);
    std::sort(draws.values.begin(), draws.values.end());
    WQuantileTable t;
    t.alphas = alphas;
    t.quantiles = empirical_quantiles(draws.values, alphas);
    t.replicates = draws.values.size();
    t.bm_steps = bm_steps;
    t.seed = seed;
    t.resampled_count = draws.resampled;
    return t;
}

WQuantileTable build_table(const std::vector<double>& alphas, std::size_t replicates, std::size_t bm_steps,
                           std::uint64_t seed, Exec exec) {
    check_alphas(alphas);
    if (replicates < kMinReplicates) {
        throw Error(ErrorCode::InsufficientReplicates,
                    "replicates = " + std::to_string(replicates) + " is below the minimum of " +
                        std::to_string(kMinReplicates));
    }
    return table_from_draws(draw_w(replicates, bm_steps, seed, exec), alphas, bm_steps, seed);
}

bool has_alpha(const WQuantileTable& table, double alpha) {
    return std::any_of(table.alphas.begin(), table.alphas.end(),
                       [alpha](double a) { return std::abs(a - alpha) <= 1e-12; });
}

double quantile(const WQuantileTable& table, double alpha) {
    for (std::size_t i = 0; i < table.alphas.size(); ++i) {
        if (std::abs(table.alphas[i] - alpha) <= 1e-12) return table.quantiles[i];
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", alpha);
    throw Error(ErrorCode::AlphaNotTabulated, std::string("alpha ") + buf + " is not tabulated");
}

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string list(const std::vector<double>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + num(v[i]);
    return s + "]";
}

}  // namespace

std::string to_json(const WQuantileTable& t) {
    std::ostringstream out;
    out << "{\n"
        << "  \"schema_version\": " << t.schema_version << ",\n"
        << "  \"alphas\": " << list(t.alphas) << ",\n"
        << "  \"quantiles\": " << list(t.quantiles) << ",\n"
        << "  \"replicates\": " << t.replicates << ",\n"
        << "  \"bm_steps\": " << t.bm_steps << ",\n"
        << "  \"seed\": " << t.seed << ",\n"
        << "  \"resampled_count\": " << t.resampled_count << "\n"
        << "}\n";
    return out.str();
}

WQuantileTable table_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::SchemaMismatch, std::string("W table is not valid JSON: ") + e.what());
    }
    if (!j.contains("schema_version") || j["schema_version"] != kWTableSchemaVersion) {
        throw Error(ErrorCode::SchemaMismatch, "unsupported W table schema version");
    }
    try {
        WQuantileTable t;
        t.schema_version = j.at("schema_version").get<int>();
        t.alphas = j.at("alphas").get<std::vector<double>>();
        t.quantiles = j.at("quantiles").get<std::vector<double>>();
        t.replicates = j.at("replicates").get<std::uint64_t>();
        t.bm_steps = j.at("bm_steps").get<std::uint64_t>();
        t.seed = j.at("seed").get<std::uint64_t>();
        t.resampled_count = j.at("resampled_count").get<std::uint64_t>();
        require(t.alphas.size() == t.quantiles.size(), ErrorCode::SchemaMismatch,
                "alphas and quantiles differ in length");
        return t;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::SchemaMismatch, std::string("malformed W table: ") + e.what());
    }
}

void store(const WQuantileTable& table, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out << to_json(table);
}

WQuantileTable load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return table_from_json(ss.str());
}

}  // namespace pivlp
