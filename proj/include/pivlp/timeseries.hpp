#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace pivlp {

// Observed univariate sample X_1..X_N.
class TimeSeries {
public:
    TimeSeries() = default;
    explicit TimeSeries(std::vector<double> values);

    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    std::span<const double> values() const noexcept { return values_; }

    double mean() const;
    TimeSeries centered() const;
    TimeSeries scaled(double c) const;

private:
    std::vector<double> values_;
};

// Observed d-variate sample; row k holds X_{k+1}.
class MultiSeries {
public:
    MultiSeries() = default;
    explicit MultiSeries(Eigen::MatrixXd values);

    std::size_t size() const noexcept { return static_cast<std::size_t>(values_.rows()); }
    std::size_t dimension() const noexcept { return static_cast<std::size_t>(values_.cols()); }
    const Eigen::MatrixXd& values() const noexcept { return values_; }

    TimeSeries channel(std::size_t j) const;
    static MultiSeries from(const TimeSeries& x);

private:
    Eigen::MatrixXd values_;
};

enum class Centering { Raw, Centered };

// Strictly increasing fractions in (0,1] ending at exactly 1.
class LambdaGrid {
public:
    static constexpr std::size_t kDefaultSteps = 20;

    // Points k/steps for k = 1..steps.
    static LambdaGrid uniform(std::size_t steps = kDefaultSteps);
    static LambdaGrid from_points(std::vector<double> points);

    std::size_t size() const noexcept { return points_.size(); }
    double operator[](std::size_t i) const { return points_[i]; }
    const std::vector<double>& points() const noexcept { return points_; }
    bool is_uniform() const noexcept { return steps_ != 0; }
    std::size_t steps() const noexcept { return steps_; }

    // Right-endpoint Riemann weight λ_i − λ_{i−1} with λ_{−1} = 0.
    double weight(std::size_t i) const;

    // ⌊λ_i · n⌋, in integer arithmetic on uniform grids.
    std::size_t floor_count(std::size_t i, std::size_t n) const;

    bool operator==(const LambdaGrid&) const = default;

private:
    LambdaGrid() = default;
    std::vector<double> points_;
    std::size_t steps_ = 0;
};

// ⌊λ·n⌋ for an arbitrary λ ∈ [0,1] with a 1e-12 relative upward nudge.
std::size_t floor_count(double lambda, std::size_t n);

// A λ-indexed statistic on a grid plus its λ = 0 convention.
struct SequentialPath {
    LambdaGrid grid;
    std::vector<double> values;
    double value_at_zero = 0.0;

    double final_value() const { return values.back(); }
};

double autocov_seq(const TimeSeries& x, long h, double lambda);
double autocov_centered(const TimeSeries& x, long h);
double autocov_centered_seq(const TimeSeries& x, long h, double lambda);
SequentialPath autocov_path(const TimeSeries& x, long h, const LambdaGrid& grid,
                            Centering centering = Centering::Raw);

// Row g, column h: γ̂_h(λ_g) for h = 0..max_lag.
Eigen::MatrixXd sequential_autocov(const TimeSeries& x, std::size_t max_lag,
                                   const LambdaGrid& grid, Centering centering = Centering::Raw);

// Γ̂_h(λ) = N⁻¹ Σ_{i ≤ ⌊λ(N−h)⌋} X_i X_{i+h}ᵀ; negative h gives the transpose.
Eigen::MatrixXd crosscov_seq(const MultiSeries& x, long h, double lambda);

// Element [g][h] holds Γ̂_h(λ_g) for h = 0..max_lag.
std::vector<std::vector<Eigen::MatrixXd>> sequential_crosscov(const MultiSeries& x,
                                                              std::size_t max_lag,
                                                              const LambdaGrid& grid);

Eigen::VectorXd vech(const Eigen::MatrixXd& m, double tolerance = 1e-10);
Eigen::MatrixXd unvech(const Eigen::VectorXd& v);

// CSV with one column per channel and an optional single header row.
struct CsvTable {
    std::vector<std::string> header;
    Eigen::MatrixXd values;
};

CsvTable read_csv(std::istream& in);
CsvTable read_csv(const std::filesystem::path& path);
TimeSeries read_timeseries_csv(const std::filesystem::path& path);
MultiSeries read_multiseries_csv(const std::filesystem::path& path);
void write_csv(const std::filesystem::path& path, const Eigen::MatrixXd& values,
               const std::vector<std::string>& header);

}  // namespace pivlp
