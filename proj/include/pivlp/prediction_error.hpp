#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "pivlp/timeseries.hpp"

namespace pivlp {

inline constexpr double kSingularRelTol = 1e-12;

// (γ_0, …, γ_p) with γ_0 > 0.
class AutocovVector {
public:
    explicit AutocovVector(std::vector<double> gamma);

    std::size_t order() const noexcept { return gamma_.size() - 1; }
    double operator[](std::size_t h) const { return gamma_[h]; }
    const std::vector<double>& values() const noexcept { return gamma_; }

    // Toeplitz G_k = (γ_{j−i}), (k+1)×(k+1), k ≤ order().
    Eigen::MatrixXd toeplitz(std::size_t k) const;
    AutocovVector truncated(std::size_t p) const;

private:
    std::vector<double> gamma_;
};

// Output of the Durbin–Levinson recursion up to order p.
struct DurbinLevinsonResult {
    std::vector<double> m;                // M_0..M_p
    std::vector<double> kappa;            // kappa[k-1] = κ_k
    std::vector<std::vector<double>> phi; // phi[k] = (φ_{k,1}, …, φ_{k,k})

    std::size_t order() const noexcept { return m.size() - 1; }
    double s(std::size_t p) const { return m[p] / m[0]; }
    double q(std::size_t p) const { return m[p] / m[p - 1]; }
    double partial_autocorrelation(std::size_t p) const { return kappa[p - 1]; }
};

// Throws SingularToeplitz(k) when M_k ≤ rel_tol·γ_0 for some k < p.
DurbinLevinsonResult durbin_levinson(const AutocovVector& g, double rel_tol = kSingularRelTol);

// det(G_p)/det(G_{p−1}) by LU determinants; reference for durbin_levinson.
double mp_det_ratio(const AutocovVector& g);

// Γ_0..Γ_p (d×d each) with Γ_{−h} = Γ_hᵀ.
class BlockAutocov {
public:
    explicit BlockAutocov(std::vector<Eigen::MatrixXd> gammas);

    std::size_t order() const noexcept { return gammas_.size() - 1; }
    std::size_t dimension() const noexcept { return static_cast<std::size_t>(gammas_[0].rows()); }
    Eigen::MatrixXd at(long h) const;
    const std::vector<Eigen::MatrixXd>& values() const noexcept { return gammas_; }
    BlockAutocov truncated(std::size_t p) const;

    // Gram matrix of (X_{p−1}, …, X_0): block (i,k) = Γ_{i−k}, dk×dk.
    Eigen::MatrixXd block_toeplitz(std::size_t blocks) const;
    // Stacked (Γ_1; …; Γ_p), dp×d.
    Eigen::MatrixXd stacked_lags(std::size_t p) const;

private:
    std::vector<Eigen::MatrixXd> gammas_;
};

// tr(Γ_0) − tr(Bᵀ 𝓖_{p−1}⁻¹ B) via Cholesky.
double mv_m_schur(const BlockAutocov& b, double rel_tol = kSingularRelTol);
// Σ_j det(𝓖_{p−1,j})/det(𝓖_{p−1}) by explicit bordered determinants.
double mv_m_det_ratio(const BlockAutocov& b);

DurbinLevinsonResult population_stats(const AutocovVector& g);

struct MultivariateStats {
    std::vector<double> m;  // 𝓜_0..𝓜_p
    std::vector<double> s;  // 𝓢_0..𝓢_p
};
MultivariateStats population_stats(const BlockAutocov& b);

// Durbin–Levinson output at every grid point of the sequential autocovariances.
struct SequentialFit {
    LambdaGrid grid;
    std::vector<DurbinLevinsonResult> fits;
};

SequentialFit sequential_fit(const TimeSeries& x, std::size_t p, const LambdaGrid& grid,
                             Centering centering = Centering::Raw);

SequentialPath m_path(const SequentialFit& fit, std::size_t p);
SequentialPath s_path(const SequentialFit& fit, std::size_t p);
SequentialPath q_path(const SequentialFit& fit, std::size_t p);
SequentialPath kappa_path(const SequentialFit& fit, std::size_t p);

SequentialPath m_path(const TimeSeries& x, std::size_t p, const LambdaGrid& grid,
                      Centering centering = Centering::Raw);
SequentialPath s_path(const TimeSeries& x, std::size_t p, const LambdaGrid& grid,
                      Centering centering = Centering::Raw);
SequentialPath q_path(const TimeSeries& x, std::size_t p, const LambdaGrid& grid,
                      Centering centering = Centering::Raw);
SequentialPath kappa_path(const TimeSeries& x, std::size_t p, const LambdaGrid& grid,
                          Centering centering = Centering::Raw);

double mv_m_hat(const MultiSeries& x, std::size_t p, double lambda);
SequentialPath mv_m_path(const MultiSeries& x, std::size_t p, const LambdaGrid& grid);
SequentialPath mv_s_path(const MultiSeries& x, std::size_t p, const LambdaGrid& grid);

}  // namespace pivlp
