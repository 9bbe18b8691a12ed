#pragma once

// Data-parallel inner loops. Every kernel has a serial reference path that
// produces bit-identical output; the OpenMP path only changes who computes
// each independent output element.

#include <cstddef>
#include <exception>
#include <span>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>

#include "pivlp/timeseries.hpp"

namespace pivlp {

enum class Exec { Serial, Parallel };

namespace kernels {

int max_threads();

// Row-major (grid.size() × (max_lag+1)): entry (g,h) = Σ_{i < ⌊λ_g(n−h)⌋} x_i x_{i+h}.
std::vector<double> lagged_partial_sums(std::span<const double> x, std::size_t max_lag,
                                        const LambdaGrid& grid, Exec exec = Exec::Parallel);

// Same for outer products of the rows of x (N × d); result[g*(max_lag+1)+h] is d×d.
std::vector<Eigen::MatrixXd> lagged_partial_outer(const Eigen::MatrixXd& x, std::size_t max_lag,
                                                  const LambdaGrid& grid,
                                                  Exec exec = Exec::Parallel);

// out_k = Σ_{j=0}^{J} θ_j e_{k+J−j}, k = 0..n−1, where e has n+J entries.
std::vector<double> ma_convolve(std::span<const double> theta, std::span<const double> e,
                                std::size_t n, Exec exec = Exec::Parallel);

// Rows: out_k = Σ_j Θ_j e_{k+J−j} for d-vectors; e is (n+J) × d.
Eigen::MatrixXd ma_convolve(const std::vector<Eigen::MatrixXd>& theta, const Eigen::MatrixXd& e,
                            std::size_t n, Exec exec = Exec::Parallel);

// out[r] = fn(r) for r in [0, n). Results depend only on r, never on the
// schedule. The first exception thrown by any replicate is rethrown.
template <class Fn>
auto replicate_map(std::size_t n, Fn&& fn, Exec exec = Exec::Parallel)
    -> std::vector<std::invoke_result_t<Fn&, std::size_t>> {
    using R = std::invoke_result_t<Fn&, std::size_t>;
    std::vector<R> out(n);
    if (exec == Exec::Serial) {
        for (std::size_t r = 0; r < n; ++r) out[r] = fn(r);
        return out;
    }
    std::exception_ptr failure;
    std::size_t failed_at = n;
    const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 8)
    for (long long r = 0; r < count; ++r) {
        try {
            out[static_cast<std::size_t>(r)] = fn(static_cast<std::size_t>(r));
        } catch (...) {
#pragma omp critical(pivlp_replicate_map)
            {
                // keep the lowest failing index so the error is schedule-independent
                if (static_cast<std::size_t>(r) < failed_at) {
                    failed_at = static_cast<std::size_t>(r);
                    failure = std::current_exception();
                }
            }
        }
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

}  // namespace kernels
}  // namespace pivlp
