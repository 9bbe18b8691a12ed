#include <random>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "pivlp/error.hpp"
#include "pivlp/timeseries.hpp"
#include "support.hpp"

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

TEST_CASE("uniform grid points, weights and floors") {
    const auto g = LambdaGrid::uniform(20);
    CHECK(g.size() == 20);
    CHECK(g[0] == doctest::Approx(0.05));
    CHECK(g[19] == 1.0);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(g.weight(i) == doctest::Approx(0.05));
    // 3/10 · 10 must give 3, not 2 from 0.30000000000000004 rounding the wrong way
    const auto g10 = LambdaGrid::uniform(10);
    CHECK(g10.floor_count(2, 10) == 3);
    CHECK(floor_count(0.3, 10) == 3);
    CHECK(floor_count(0.7, 10) == 7);
    CHECK(floor_count(1.0, 997) == 997);
    CHECK(g10.floor_count(9, 997) == 997);
}

TEST_CASE("custom grids are validated") {
    CHECK_THROWS_AS(LambdaGrid::from_points({0.5, 0.4, 1.0}), Error);
    CHECK_THROWS_AS(LambdaGrid::from_points({0.5, 0.9}), Error);
    CHECK_THROWS_AS(LambdaGrid::from_points({0.0, 1.0}), Error);
    CHECK_THROWS_AS(LambdaGrid::uniform(0), Error);
    const auto g = LambdaGrid::from_points({0.25, 0.5, 1.0});
    CHECK_FALSE(g.is_uniform());
    CHECK(g.weight(2) == doctest::Approx(0.5));
}

TEST_CASE("sequential autocovariances match the defining sum") {
    for (std::size_t n : {7u, 50u, 333u}) {
        const auto v = noise(n, n);
        const TimeSeries x(v);
        const auto grid = LambdaGrid::uniform(20);
        const std::size_t lags = std::min<std::size_t>(6, n - 1);
        const auto table = sequential_autocov(x, lags, grid);
        for (std::size_t g = 0; g < grid.size(); ++g) {
            for (std::size_t h = 0; h <= lags; ++h) {
                const double want = oracle::autocov_at(v, h, g + 1, 20);
                CHECK(table(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(h)) ==
                      doctest::Approx(want).epsilon(1e-13).scale(1.0));
                CHECK(autocov_seq(x, static_cast<long>(h), grid[g]) ==
                      doctest::Approx(want).epsilon(1e-13).scale(1.0));
            }
        }
    }
}

TEST_CASE("autocovariance is even in the lag and zero beyond the sample") {
    const TimeSeries x(noise(40, 3));
    CHECK(autocov_seq(x, -3, 0.6) == autocov_seq(x, 3, 0.6));
    CHECK(autocov_seq(x, 2, 0.0) == 0.0);
    CHECK_THROWS_AS(autocov_seq(x, 40, 1.0), Error);
}

TEST_CASE("centered autocovariance subtracts the full-sample mean") {
    auto v = noise(200, 9);
    for (auto& e : v) e += 5.0;
    const TimeSeries x(v);
    double mean = 0.0;
    for (double e : v) mean += e;
    mean /= 200.0;
    std::vector<double> c(v);
    for (auto& e : c) e -= mean;
    CHECK(autocov_centered(x, 2) == doctest::Approx(oracle::autocov_at(c, 2, 1, 1)).epsilon(1e-12));
    CHECK(autocov_centered_seq(x, 1, 0.5) == doctest::Approx(oracle::autocov_at(c, 1, 1, 2)).epsilon(1e-12));
    const auto grid = LambdaGrid::uniform(4);
    const auto path = autocov_path(x, 1, grid, Centering::Centered);
    CHECK(path.value_at_zero == 0.0);
    CHECK(path.final_value() == doctest::Approx(oracle::autocov_at(c, 1, 1, 1)).epsilon(1e-12));
}

TEST_CASE("cross-covariances: definition, transpose symmetry, agreement with d = 1") {
    const std::size_t n = 120;
    Eigen::MatrixXd v(n, 3);
    auto raw = noise(3 * n, 11);
    for (std::size_t i = 0; i < 3 * n; ++i) v.data()[i] = raw[i];
    const MultiSeries x(v);
    const Eigen::MatrixXd g2 = crosscov_seq(x, 2, 0.5);
    Eigen::MatrixXd want = Eigen::MatrixXd::Zero(3, 3);
    for (std::size_t i = 0; i < (n - 2) / 2; ++i) {
        want += v.row(static_cast<Eigen::Index>(i)).transpose() * v.row(static_cast<Eigen::Index>(i + 2));
    }
    want /= static_cast<double>(n);
    CHECK((g2 - want).cwiseAbs().maxCoeff() < 1e-13);
    CHECK((crosscov_seq(x, -2, 0.5) - g2.transpose()).cwiseAbs().maxCoeff() == 0.0);

    const auto seq = sequential_crosscov(x, 3, LambdaGrid::uniform(5));
    CHECK((seq[2][2] - crosscov_seq(x, 2, 0.6)).cwiseAbs().maxCoeff() < 1e-13);

    const TimeSeries c0 = x.channel(0);
    CHECK(crosscov_seq(MultiSeries::from(c0), 3, 0.75)(0, 0) == doctest::Approx(autocov_seq(c0, 3, 0.75)));
}

TEST_CASE("vech round trip and symmetry check") {
    Eigen::MatrixXd m(3, 3);
    m << 4, 1, 2, 1, 5, 3, 2, 3, 6;
    const Eigen::VectorXd v = vech(m);
    CHECK(v.size() == 6);
    CHECK(v(0) == 4);
    CHECK(v(1) == 1);
    CHECK(v(2) == 2);
    CHECK(v(3) == 5);
    CHECK(unvech(v) == m);
    Eigen::MatrixXd bad = m;
    bad(0, 1) = 7;
    CHECK_THROWS_AS(vech(bad), Error);
    CHECK_THROWS_AS(unvech(Eigen::VectorXd::Zero(4)), Error);
}

TEST_CASE("CSV reader: header, columns and line-numbered errors") {
    {
        std::istringstream in("a,b\n1,2\n3,4.5\n");
        const auto t = read_csv(in);
        CHECK(t.header == std::vector<std::string>{"a", "b"});
        CHECK(t.values.rows() == 2);
        CHECK(t.values(1, 1) == 4.5);
    }
    {
        std::istringstream in("1\n2\nabc\n");
        try {
            read_csv(in);
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(e.line() == 3);
        }
    }
    {
        std::istringstream in("1,2\n3\n");
        try {
            read_csv(in);
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(e.line() == 2);
        }
    }
    {
        std::istringstream in("");
        CHECK_THROWS_AS(read_csv(in), ParseError);
    }
}

TEST_CASE("CSV write/read round trip is exact") {
    const auto dir = testing_support::scratch_dir("csv");
    Eigen::MatrixXd m(4, 2);
    m << 0.1, -1e-300, 3.0 / 7.0, 2.5e10, -0.0, 1.0 / 3.0, 7, 8;
    write_csv(dir / "m.csv", m, {"x1", "x2"});
    const auto back = read_multiseries_csv(dir / "m.csv");
    CHECK(back.values() == m);
    CHECK_THROWS_AS(read_timeseries_csv(dir / "m.csv"), Error);
    CHECK_THROWS_AS(read_csv(dir / "missing.csv"), Error);
}
