#include <random>
#include <stdexcept>

#include "doctest.h"
#include "pivlp/kernels.hpp"
#include "pivlp/pivotal_dist.hpp"

using namespace pivlp;

namespace {

std::vector<double> noise(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> nd;
    std::vector<double> x(n);
    for (auto& v : x) v = nd(gen);
    return x;
}

}  // namespace

TEST_CASE("parallel lagged partial sums are bit-identical to the serial reference") {
    const auto x = noise(2000, 1);
    const auto grid = LambdaGrid::uniform(20);
    CHECK(kernels::lagged_partial_sums(x, 12, grid, Exec::Serial) ==
          kernels::lagged_partial_sums(x, 12, grid, Exec::Parallel));
}

TEST_CASE("parallel outer-product sums match serial") {
    const auto raw = noise(3 * 500, 2);
    const Eigen::MatrixXd x = Eigen::Map<const Eigen::MatrixXd>(raw.data(), 500, 3);
    const auto grid = LambdaGrid::uniform(10);
    const auto a = kernels::lagged_partial_outer(x, 3, grid, Exec::Serial);
    const auto b = kernels::lagged_partial_outer(x, 3, grid, Exec::Parallel);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("MA convolution: serial equals parallel and matches the definition") {
    const auto e = noise(300 + 40, 3);
    const auto theta = noise(41, 4);
    const auto s = kernels::ma_convolve(theta, e, 300, Exec::Serial);
    CHECK(s == kernels::ma_convolve(theta, e, 300, Exec::Parallel));
    double want = 0.0;
    for (std::size_t j = 0; j <= 40; ++j) want += theta[j] * e[17 + 40 - j];
    CHECK(s[17] == doctest::Approx(want).epsilon(1e-14));

    const auto raw = noise(2 * 340, 5);
    const Eigen::MatrixXd em = Eigen::Map<const Eigen::MatrixXd>(raw.data(), 340, 2);
    std::vector<Eigen::MatrixXd> th;
    for (std::size_t j = 0; j <= 40; ++j) th.push_back(Eigen::MatrixXd::Constant(2, 2, theta[j]));
    CHECK(kernels::ma_convolve(th, em, 300, Exec::Serial) == kernels::ma_convolve(th, em, 300, Exec::Parallel));
}

TEST_CASE("replicate_map is schedule independent and rethrows the lowest failure") {
    auto f = [](std::size_t r) { return static_cast<double>(r * r); };
    CHECK(kernels::replicate_map(1000, f, Exec::Serial) == kernels::replicate_map(1000, f, Exec::Parallel));
    auto bad = [](std::size_t r) -> int {
        if (r == 37 || r == 512) throw std::runtime_error("fail " + std::to_string(r));
        return 0;
    };
    try {
        kernels::replicate_map(1000, bad, Exec::Parallel);
        FAIL("expected an exception");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()) == "fail 37");
    }
}

TEST_CASE("W draws do not depend on the execution mode") {
    const auto a = draw_w(3000, 200, 99, Exec::Serial);
    const auto b = draw_w(3000, 200, 99, Exec::Parallel);
    CHECK(a.values == b.values);
    CHECK(a.resampled == b.resampled);
}
