#include "pivlp/prediction_error.hpp"

#include <cmath>
#include <string>

#include "pivlp/error.hpp"

namespace pivlp {

AutocovVector::AutocovVector(std::vector<double> gamma) : gamma_(std::move(gamma)) {
    require(!gamma_.empty(), ErrorCode::InvalidArgument, "autocovariance vector is empty");
    for (double v : gamma_) require(std::isfinite(v), ErrorCode::InvalidArgument, "autocovariances must be finite");
    require(gamma_[0] > 0.0, ErrorCode::InvalidArgument, "gamma_0 must be positive");
}

Eigen::MatrixXd AutocovVector::toeplitz(std::size_t k) const {
    require(k <= order(), ErrorCode::InvalidArgument, "Toeplitz order exceeds available lags");
    const auto n = static_cast<Eigen::Index>(k + 1);
    Eigen::MatrixXd g(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) g(i, j) = gamma_[static_cast<std::size_t>(std::abs(j - i))];
    }
    return g;
}

AutocovVector AutocovVector::truncated(std::size_t p) const {
    require(p <= order(), ErrorCode::InvalidArgument, "truncation order exceeds available lags");
    return AutocovVector(std::vector<double>(gamma_.begin(), gamma_.begin() + static_cast<long>(p + 1)));
}

DurbinLevinsonResult durbin_levinson(const AutocovVector& g, double rel_tol) {
    const std::size_t p = g.order();
    const double gamma0 = g[0];
    DurbinLevinsonResult res;
    res.m.reserve(p + 1);
    res.kappa.reserve(p);
    res.phi.reserve(p + 1);
    res.m.push_back(gamma0);
    res.phi.emplace_back();
    for (std::size_t k = 1; k <= p; ++k) {
        const double m_prev = res.m.back();
        if (!(m_prev > rel_tol * gamma0)) {
            throw SingularToeplitz(k - 1, "Toeplitz matrix of order " + std::to_string(k - 1) +
                                              " is numerically singular");
        }
        const auto& prev = res.phi.back();
        double acc = g[k];
        for (std::size_t j = 1; j < k; ++j) acc -= prev[j - 1] * g[k - j];
        const double kk = acc / m_prev;
        std::vector<double> cur(k);
        for (std::size_t j = 1; j < k; ++j) cur[j - 1] = prev[j - 1] - kk * prev[k - j - 1];
        cur[k - 1] = kk;
        res.kappa.push_back(kk);
        res.m.push_back(m_prev * (1.0 - kk * kk));
        res.phi.push_back(std::move(cur));
    }
    return res;
}

double mp_det_ratio(const AutocovVector& g) {
    const std::size_t p = g.order();
    if (p == 0) return g[0];
    const double det_prev = g.toeplitz(p - 1).partialPivLu().determinant();
    if (!(std::abs(det_prev) > kSingularRelTol * std::pow(g[0], static_cast<double>(p)))) {
        throw SingularToeplitz(p - 1, "det(G_{p-1}) is numerically zero");
    }
    return g.toeplitz(p).partialPivLu().determinant() / det_prev;
}

BlockAutocov::BlockAutocov(std::vector<Eigen::MatrixXd> gammas) : gammas_(std::move(gammas)) {
    require(!gammas_.empty(), ErrorCode::InvalidArgument, "block autocovariance is empty");
    const auto d = gammas_[0].rows();
    require(d >= 1, ErrorCode::InvalidArgument, "dimension must be positive");
    for (const auto& m : gammas_) {
        require(m.rows() == d && m.cols() == d, ErrorCode::InvalidArgument, "all blocks must be d x d");
        require(m.allFinite(), ErrorCode::InvalidArgument, "autocovariances must be finite");
    }
    const auto& g0 = gammas_[0];
    require((g0 - g0.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * std::max(1.0, g0.cwiseAbs().maxCoeff()),
            ErrorCode::NotSymmetric, "Gamma_0 must be symmetric");
}

Eigen::MatrixXd BlockAutocov::at(long h) const {
    const auto a = static_cast<std::size_t>(h < 0 ? -h : h);
    require(a <= order(), ErrorCode::LagOutOfRange, "lag exceeds block autocovariance order");
    return h < 0 ? Eigen::MatrixXd(gammas_[a].transpose()) : gammas_[a];
}

BlockAutocov BlockAutocov::truncated(std::size_t p) const {
    require(p <= order(), ErrorCode::InvalidArgument, "truncation order exceeds available lags");
    return BlockAutocov(std::vector<Eigen::MatrixXd>(gammas_.begin(), gammas_.begin() + static_cast<long>(p + 1)));
}

Eigen::MatrixXd BlockAutocov::block_toeplitz(std::size_t blocks) const {
    const auto d = static_cast<Eigen::Index>(dimension());
    const auto k = static_cast<Eigen::Index>(blocks);
    Eigen::MatrixXd c(d * k, d * k);
    for (Eigen::Index i = 0; i < k; ++i) {
        for (Eigen::Index j = 0; j < k; ++j) c.block(i * d, j * d, d, d) = at(static_cast<long>(i - j));
    }
    return c;
}

Eigen::MatrixXd BlockAutocov::stacked_lags(std::size_t p) const {
    const auto d = static_cast<Eigen::Index>(dimension());
    Eigen::MatrixXd b(d * static_cast<Eigen::Index>(p), d);
    for (std::size_t i = 0; i < p; ++i) b.block(static_cast<Eigen::Index>(i) * d, 0, d, d) = at(static_cast<long>(i + 1));
    return b;
}

double mv_m_schur(const BlockAutocov& b, double rel_tol) {
    const std::size_t p = b.order();
    const double trace0 = b.at(0).trace();
    require(trace0 > 0.0, ErrorCode::InvalidArgument, "tr(Gamma_0) must be positive");
    if (p == 0) return trace0;
    const Eigen::MatrixXd c = b.block_toeplitz(p);
    Eigen::LLT<Eigen::MatrixXd> llt(c);
    const double floor = rel_tol * trace0 / static_cast<double>(b.dimension());
    if (llt.info() != Eigen::Success ||
        llt.matrixL().toDenseMatrix().diagonal().array().square().minCoeff() <= floor) {
        throw SingularToeplitz(p - 1, "block Toeplitz matrix of order " + std::to_string(p - 1) +
                                          " is not numerically positive definite");
    }
    const Eigen::MatrixXd w = llt.matrixL().solve(b.stacked_lags(p));
    return trace0 - w.squaredNorm();
}

double mv_m_det_ratio(const BlockAutocov& b) {
    const std::size_t p = b.order();
    if (p == 0) return b.at(0).trace();
    const Eigen::MatrixXd c = b.block_toeplitz(p);
    const Eigen::MatrixXd lags = b.stacked_lags(p);
    const double det_c = c.partialPivLu().determinant();
    if (det_c == 0.0) throw SingularToeplitz(p - 1, "det of block Toeplitz matrix is zero");
    const auto n = c.rows();
    const Eigen::MatrixXd g0 = b.at(0);
    double total = 0.0;
    Eigen::MatrixXd bordered(n + 1, n + 1);
    bordered.bottomRightCorner(n, n) = c;
    for (Eigen::Index j = 0; j < g0.rows(); ++j) {
        bordered(0, 0) = g0(j, j);
        bordered.block(1, 0, n, 1) = lags.col(j);
        bordered.block(0, 1, 1, n) = lags.col(j).transpose();
        total += bordered.partialPivLu().determinant() / det_c;
    }
    return total;
}

DurbinLevinsonResult population_stats(const AutocovVector& g) { return durbin_levinson(g); }

MultivariateStats population_stats(const BlockAutocov& b) {
    MultivariateStats out;
    for (std::size_t p = 0; p <= b.order(); ++p) out.m.push_back(mv_m_schur(b.truncated(p)));
    for (double m : out.m) out.s.push_back(m / out.m[0]);
    return out;
}

namespace {

[[noreturn]] void throw_path_singular(double lambda, const std::string& why) {
    throw PathSingular(lambda, "sequential estimator singular at lambda = " + std::to_string(lambda) +
                                   " (" + why + ")");
}

void check_order(std::size_t p, std::size_t n) {
    if (p >= n) {
        throw Error(ErrorCode::InvalidArgument,
                    "order p = " + std::to_string(p) + " requires N > p (N = " + std::to_string(n) + ")");
    }
}

}  // namespace

SequentialFit sequential_fit(const TimeSeries& x, std::size_t p, const LambdaGrid& grid, Centering centering) {
    check_order(p, x.size());
    const Eigen::MatrixXd gam = sequential_autocov(x, p, grid, centering);
    SequentialFit out{grid, {}};
    out.fits.reserve(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const auto row = gam.row(static_cast<Eigen::Index>(g));
        if (!(row(0) > 0.0)) throw_path_singular(grid[g], "gamma_0(lambda) <= 0");
        std::vector<double> gamma(p + 1);
        for (std::size_t h = 0; h <= p; ++h) gamma[h] = row(static_cast<Eigen::Index>(h));
        try {
            out.fits.push_back(durbin_levinson(AutocovVector(std::move(gamma))));
        } catch (const SingularToeplitz& e) {
            throw_path_singular(grid[g], e.what());
        }
    }
    return out;
}

namespace {

template <class F>
SequentialPath extract(const SequentialFit& fit, double at_zero, F&& f) {
    SequentialPath path{fit.grid, std::vector<double>(fit.fits.size()), at_zero};
    for (std::size_t g = 0; g < fit.fits.size(); ++g) path.values[g] = f(fit.fits[g]);
    return path;
}

}  // namespace

SequentialPath m_path(const SequentialFit& fit, std::size_t p) {
    return extract(fit, 0.0, [p](const DurbinLevinsonResult& r) { return r.m[p]; });
}

SequentialPath s_path(const SequentialFit& fit, std::size_t p) {
    return extract(fit, 1.0, [p](const DurbinLevinsonResult& r) { return r.s(p); });
}

SequentialPath q_path(const SequentialFit& fit, std::size_t p) {
    require(p >= 1, ErrorCode::InvalidArgument, "Q_p needs p >= 1");
    return extract(fit, 1.0, [p](const DurbinLevinsonResult& r) { return r.q(p); });
}

SequentialPath kappa_path(const SequentialFit& fit, std::size_t p) {
    require(p >= 1, ErrorCode::InvalidArgument, "kappa_p needs p >= 1");
    return extract(fit, 0.0, [p](const DurbinLevinsonResult& r) { return r.partial_autocorrelation(p); });
}

SequentialPath m_path(const TimeSeries& x, std::size_t p, const LambdaGrid& grid, Centering c) {
    return m_path(sequential_fit(x, p, grid, c), p);
}

SequentialPath s_path(const TimeSeries& x, std::size_t p, const LambdaGrid& grid, Centering c) {
    return s_path(sequential_fit(x, p, grid, c), p);
}

SequentialPath q_path(const TimeSeries& x, std::size_t p, const LambdaGrid& grid, Centering c) {
    require(p >= 1, ErrorCode::InvalidArgument, "Q_p needs p >= 1");
    return q_path(sequential_fit(x, p, grid, c), p);
}

SequentialPath kappa_path(const TimeSeries& x, std::size_t p, const LambdaGrid& grid, Centering c) {
    require(p >= 1, ErrorCode::InvalidArgument, "kappa_p needs p >= 1");
    return kappa_path(sequential_fit(x, p, grid, c), p);
}

namespace {

double mv_m_from_blocks(std::vector<Eigen::MatrixXd> gammas, double lambda) {
    if (!(gammas[0].trace() > 0.0)) throw_path_singular(lambda, "tr(Gamma_0(lambda)) <= 0");
    try {
        return mv_m_schur(BlockAutocov(std::move(gammas)));
    } catch (const SingularToeplitz& e) {
        throw_path_singular(lambda, e.what());
    }
}

}  // namespace

double mv_m_hat(const MultiSeries& x, std::size_t p, double lambda) {
    check_order(p, x.size());
    std::vector<Eigen::MatrixXd> gammas;
    for (std::size_t h = 0; h <= p; ++h) gammas.push_back(crosscov_seq(x, static_cast<long>(h), lambda));
    return mv_m_from_blocks(std::move(gammas), lambda);
}

SequentialPath mv_m_path(const MultiSeries& x, std::size_t p, const LambdaGrid& grid) {
    check_order(p, x.size());
    auto all = sequential_crosscov(x, p, grid);
    SequentialPath path{grid, std::vector<double>(grid.size()), 0.0};
    for (std::size_t g = 0; g < grid.size(); ++g) path.values[g] = mv_m_from_blocks(std::move(all[g]), grid[g]);
    return path;
}

SequentialPath mv_s_path(const MultiSeries& x, std::size_t p, const LambdaGrid& grid) {
    check_order(p, x.size());
    auto all = sequential_crosscov(x, p, grid);
    SequentialPath path{grid, std::vector<double>(grid.size()), 1.0};
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const double trace0 = all[g][0].trace();
        path.values[g] = mv_m_from_blocks(std::move(all[g]), grid[g]) / trace0;
    }
    return path;
}

}  // namespace pivlp
