#include "pivlp/kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pivlp::kernels {

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

namespace {

void partial_sums_for_lag(std::span<const double> x, std::size_t h, const LambdaGrid& grid,
                          std::size_t stride, double* out) {
    const std::size_t n = x.size();
    const std::size_t len = h < n ? n - h : 0;
    double acc = 0.0;
    std::size_t i = 0;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const std::size_t upto = grid.floor_count(g, len);
        for (; i < upto; ++i) acc += x[i] * x[i + h];
        out[g * stride + h] = acc;
    }
}

void partial_outer_for_lag(const Eigen::MatrixXd& x, std::size_t h, const LambdaGrid& grid,
                           std::size_t stride, std::vector<Eigen::MatrixXd>& out) {
    const auto n = static_cast<std::size_t>(x.rows());
    const auto d = x.cols();
    const std::size_t len = h < n ? n - h : 0;
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(d, d);
    std::size_t i = 0;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const std::size_t upto = grid.floor_count(g, len);
        for (; i < upto; ++i) {
            acc.noalias() += x.row(static_cast<Eigen::Index>(i)).transpose() *
                             x.row(static_cast<Eigen::Index>(i + h));
        }
        out[g * stride + h] = acc;
    }
}

}  // namespace

std::vector<double> lagged_partial_sums(std::span<const double> x, std::size_t max_lag,
                                        const LambdaGrid& grid, Exec exec) {
    const std::size_t stride = max_lag + 1;
    std::vector<double> out(grid.size() * stride, 0.0);
    if (exec == Exec::Serial) {
        for (std::size_t h = 0; h <= max_lag; ++h) partial_sums_for_lag(x, h, grid, stride, out.data());
        return out;
    }
    const auto lags = static_cast<long long>(stride);
#pragma omp parallel for schedule(static)
    for (long long h = 0; h < lags; ++h) {
        partial_sums_for_lag(x, static_cast<std::size_t>(h), grid, stride, out.data());
    }
    return out;
}

std::vector<Eigen::MatrixXd> lagged_partial_outer(const Eigen::MatrixXd& x, std::size_t max_lag,
                                                  const LambdaGrid& grid, Exec exec) {
    const std::size_t stride = max_lag + 1;
    std::vector<Eigen::MatrixXd> out(grid.size() * stride);
    if (exec == Exec::Serial) {
        for (std::size_t h = 0; h <= max_lag; ++h) partial_outer_for_lag(x, h, grid, stride, out);
        return out;
    }
    const auto lags = static_cast<long long>(stride);
#pragma omp parallel for schedule(static)
    for (long long h = 0; h < lags; ++h) {
        partial_outer_for_lag(x, static_cast<std::size_t>(h), grid, stride, out);
    }
    return out;
}

std::vector<double> ma_convolve(std::span<const double> theta, std::span<const double> e,
                                std::size_t n, Exec exec) {
    const std::size_t taps = theta.size();
    std::vector<double> out(n, 0.0);
    auto one = [&](std::size_t k) {
        // e index k + J − j for j = 0..J, J = taps − 1
        const double* base = e.data() + k;
        double acc = 0.0;
        for (std::size_t j = 0; j < taps; ++j) acc += theta[j] * base[taps - 1 - j];
        out[k] = acc;
    };
    if (exec == Exec::Serial) {
        for (std::size_t k = 0; k < n; ++k) one(k);
        return out;
    }
    const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(static)
    for (long long k = 0; k < count; ++k) one(static_cast<std::size_t>(k));
    return out;
}

Eigen::MatrixXd ma_convolve(const std::vector<Eigen::MatrixXd>& theta, const Eigen::MatrixXd& e,
                            std::size_t n, Exec exec) {
    const std::size_t taps = theta.size();
    const auto d = e.cols();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), d);
    auto one = [&](std::size_t k) {
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(d);
        for (std::size_t j = 0; j < taps; ++j) {
            acc.noalias() += theta[j] * e.row(static_cast<Eigen::Index>(k + taps - 1 - j)).transpose();
        }
        out.row(static_cast<Eigen::Index>(k)) = acc.transpose();
    };
    if (exec == Exec::Serial) {
        for (std::size_t k = 0; k < n; ++k) one(k);
        return out;
    }
    const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(static)
    for (long long k = 0; k < count; ++k) one(static_cast<std::size_t>(k));
    return out;
}

}  // namespace pivlp::kernels
