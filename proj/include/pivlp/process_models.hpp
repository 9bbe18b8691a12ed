#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "pivlp/prediction_error.hpp"
#include "pivlp/timeseries.hpp"

namespace pivlp {

enum class ProcessKind { MaInf, Ar, Var };
enum class InnovationDist { Normal, Uniform };

// Coefficient rule of an MA(∞) process.
struct MaRule {
    enum class Kind { Explicit, PolyTail, GeomTail, MatrixPower };
    Kind kind = Kind::Explicit;
    std::vector<double> coefficients;  // Explicit: θ_0, θ_1, ...
    double head_value = 1.0;           // PolyTail/GeomTail: θ_j for j ≤ head_last
    std::size_t head_last = 0;
    double offset = 0.0;  // PolyTail: (j − offset)^(−power)
    double power = 0.0;
    double ratio = 0.0;     // GeomTail: ratio^j
    Eigen::MatrixXd base;   // MatrixPower: Θ_j = (scale·base)^j
    double scale = 1.0;
};

struct ProcessSpec {
    std::string name;
    ProcessKind kind = ProcessKind::Ar;
    std::size_t dimension = 1;

    MaRule ma;
    std::size_t truncation = 0;        // MA lags kept when simulating
    std::size_t gamma_truncation = 0;  // MA lags kept for population autocovariances

    std::vector<Eigen::MatrixXd> phi;  // AR/VAR lag matrices Φ_1..Φ_P (1×1 for AR)

    InnovationDist innovation = InnovationDist::Normal;
    Eigen::MatrixXd innovation_cov;  // d×d; empty means identity
    std::size_t burn_in = 0;         // 0: max(1000, 50·order)

    std::size_t order() const;
    std::size_t effective_burn_in() const;
    Eigen::MatrixXd innovation_covariance() const;

    // Throws NonStationarySpec / InvalidArgument.
    void validate() const;
};

// Spectral radius of the companion matrix of an AR/VAR spec.
double companion_spectral_radius(const ProcessSpec& spec);

// θ_0..θ_J (d = 1) and Θ_0..Θ_J.
std::vector<double> ma_coefficients(const ProcessSpec& spec, std::size_t last);
std::vector<Eigen::MatrixXd> ma_matrix_coefficients(const ProcessSpec& spec, std::size_t last);

TimeSeries simulate_univariate(const ProcessSpec& spec, std::size_t n, std::uint64_t seed);
MultiSeries simulate_multivariate(const ProcessSpec& spec, std::size_t n, std::uint64_t seed);
std::variant<TimeSeries, MultiSeries> simulate(const ProcessSpec& spec, std::size_t n, std::uint64_t seed);

struct PopulationTruth {
    BlockAutocov autocov;           // Γ_0..Γ_L with Γ_h = E(X_0 X_hᵀ); 1×1 blocks when d = 1
    std::vector<double> m;          // M_p or 𝓜_p, p = 0..L
    std::vector<double> s;          // S_p or 𝓢_p
    std::optional<DurbinLevinsonResult> univariate;  // κ_p, Q_p when d = 1

    AutocovVector scalar_autocov() const;
};

PopulationTruth true_autocov(const ProcessSpec& spec, std::size_t max_lag);

// Γ(h) = E(X_{t+h}X_tᵀ) of a VAR via the companion-form Lyapunov equation.
// Also returns the max-norm residual of the Lyapunov fixed point.
struct VarAutocov {
    std::vector<Eigen::MatrixXd> forward;  // Γ(0)..Γ(L)
    double lyapunov_residual = 0.0;
};
VarAutocov var_autocov(const ProcessSpec& spec, std::size_t max_lag);

const std::vector<ProcessSpec>& builtin_specs();
const ProcessSpec& builtin_spec(const std::string& name);

std::string spec_to_json(const ProcessSpec& spec);
ProcessSpec spec_from_json(const std::string& text);
// Builtin name or path to a JSON spec file.
ProcessSpec resolve_spec(const std::string& name_or_path);

}  // namespace pivlp
