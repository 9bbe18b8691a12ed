#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pivlp/kernels.hpp"
#include "pivlp/rng.hpp"

namespace pivlp {

inline constexpr int kWTableSchemaVersion = 1;
inline constexpr std::size_t kDefaultBmSteps = 2000;
inline constexpr std::size_t kDefaultReplicates = 200000;
inline constexpr std::size_t kMinReplicates = 10000;
inline constexpr std::uint64_t kDefaultTableSeed = 20250828;

const std::vector<double>& default_alphas();

// Monte Carlo quantiles of W = B(1) / ∫|B(λ) − λB(1)|dλ with provenance.
struct WQuantileTable {
    std::vector<double> alphas;
    std::vector<double> quantiles;
    std::uint64_t replicates = 0;
    std::uint64_t bm_steps = 0;
    std::uint64_t seed = 0;
    int schema_version = kWTableSchemaVersion;
    std::uint64_t resampled_count = 0;

    bool operator==(const WQuantileTable&) const = default;
};

// One draw of W from a Brownian path on {k/bm_steps}. A denominator that
// underflows to zero is redrawn and counted in *resampled.
double sample_w(Rng& rng, std::size_t bm_steps, std::uint64_t* resampled = nullptr);

struct WDraws {
    std::vector<double> values;
    std::uint64_t resampled = 0;
};

// Replicate r uses Rng(derive_seed(seed, PivotDraws, r)).
WDraws draw_w(std::size_t replicates, std::size_t bm_steps, std::uint64_t seed,
              Exec exec = Exec::Parallel);

// Type-7 quantiles of an ascending sample.
std::vector<double> empirical_quantiles(const std::vector<double>& sorted, const std::vector<double>& alphas);

// Order-statistic standard errors sqrt(α(1−α)/n)/f̂(q_α) with a difference-quotient density.
std::vector<double> quantile_std_errors(const std::vector<double>& sorted, const std::vector<double>& alphas);

WQuantileTable table_from_draws(WDraws draws, const std::vector<double>& alphas, std::size_t bm_steps,
                                std::uint64_t seed);

WQuantileTable build_table(const std::vector<double>& alphas = default_alphas(),
                           std::size_t replicates = kDefaultReplicates,
                           std::size_t bm_steps = kDefaultBmSteps, std::uint64_t seed = kDefaultTableSeed,
                           Exec exec = Exec::Parallel);

// Exact lookup; AlphaNotTabulated if absent.
double quantile(const WQuantileTable& table, double alpha);
bool has_alpha(const WQuantileTable& table, double alpha);

std::string to_json(const WQuantileTable& table);
WQuantileTable table_from_json(const std::string& text);
void store(const WQuantileTable& table, const std::filesystem::path& path);
WQuantileTable load(const std::filesystem::path& path);

}  // namespace pivlp
