#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pivlp/inference.hpp"
#include "pivlp/kernels.hpp"
#include "pivlp/pivotal_dist.hpp"
#include "pivlp/process_models.hpp"

namespace pivlp::experiments {

// Replicate r of a Monte Carlo study simulates from derive_seed(seed, Replicate, r),
// so every configuration of one run sees the same innovation streams.
std::uint64_t replicate_seed(std::uint64_t seed, std::size_t r);

struct RejectionConfig {
    ProcessSpec spec;
    std::size_t p = 1;
    std::vector<double> deltas;
    double alpha = 0.05;
    std::size_t n = 1000;
    std::size_t replicates = 1000;
    std::uint64_t seed = 0;
    Exec exec = Exec::Parallel;
};

struct RejectionResult {
    Measure measure = Measure::S;  // S for d = 1, mv-s otherwise
    std::vector<double> deltas;
    std::vector<std::size_t> rejections;
    std::size_t replicates = 0;

    double rate(std::size_t i) const;
};

// One sample per replicate, tested against every Δ of the grid.
RejectionResult rejection_rates(const RejectionConfig& cfg, const WQuantileTable& table);

struct CoverageConfig {
    ProcessSpec spec;
    std::size_t p = 2;
    double truth = 0.0;  // κ_p of the generating process
    double alpha = 0.10;
    std::size_t n = 1000;
    std::size_t replicates = 1000;
    std::uint64_t seed = 0;
    Exec exec = Exec::Parallel;
};

struct CoverageResult {
    std::size_t covered = 0;
    std::size_t replicates = 0;
    double mean_length = 0.0;

    double coverage() const;
};

// Pivotal κ_p intervals: empirical coverage and mean length.
CoverageResult kappa_coverage(const CoverageConfig& cfg, const WQuantileTable& table);

struct OrderConfig {
    ProcessSpec spec;
    double nu = 0.6;
    double alpha = 0.10;
    std::size_t n = 1000;
    std::size_t p_max = 0;  // 0: default_p_max(n)
    std::size_t replicates = 1000;
    std::uint64_t seed = 0;
    Exec exec = Exec::Parallel;
};

struct OrderCounts {
    std::map<std::size_t, std::size_t> counts;  // p̂ → replicates
    std::size_t not_found = 0;
    std::size_t replicates = 0;
    std::size_t p_max = 0;

    double share_above(std::size_t p) const;
    double share_below(std::size_t p) const;
    std::optional<std::size_t> mode() const;
};

OrderCounts order_counts(const OrderConfig& cfg, const WQuantileTable& table);

// Δ = center + k·step for k = −half..half, restricted to (0,1).
std::vector<double> delta_grid(double center, double step = 0.025, int half = 8);

enum class Experiment { Fig1, Table1, Fig2, Table2Piv, Fig3 };
std::string experiment_name(Experiment e);
Experiment parse_experiment(const std::string& name);

struct ReproduceOptions {
    Experiment experiment = Experiment::Table1;
    std::size_t replicates = 1000;
    std::vector<std::size_t> sizes = {100, 200, 500, 1000};
    std::uint64_t seed = 20250828;
    std::filesystem::path out_dir = ".";
    Exec exec = Exec::Parallel;
};

struct OutputFile {
    std::filesystem::path path;
    std::string sha256;
};

struct RunManifest {
    std::string command;
    std::uint64_t seed = 0;
    std::string table_provenance;
    std::string table_digest;
    std::vector<std::string> specs;  // JSON of every spec used
    std::size_t replicates = 0;
    std::vector<std::size_t> sizes;
    std::string details;  // experiment-specific JSON (Δ grids, truths)
    double wall_clock_seconds = 0.0;
    std::vector<OutputFile> outputs;

    std::string to_json() const;
};

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);
// SHA-256 of the canonical JSON serialization of the table.
std::string table_digest(const WQuantileTable& table);

// Writes <experiment>.csv and <experiment>.manifest.json under out_dir.
RunManifest reproduce(const ReproduceOptions& opts, const WQuantileTable& table,
                      const std::string& table_provenance, const std::string& command);

}  // namespace pivlp::experiments
