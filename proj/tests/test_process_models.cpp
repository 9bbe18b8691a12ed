#include <cmath>
#include <fstream>

#include "doctest.h"
#include "oracles.hpp"
#include "pivlp/error.hpp"
#include "pivlp/process_models.hpp"
#include "support.hpp"

using namespace pivlp;

namespace {

std::vector<double> phis(const ProcessSpec& s) {
    std::vector<double> out;
    for (const auto& m : s.phi) out.push_back(m(0, 0));
    return out;
}

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("Yule-Walker autocovariances agree with causal-weight sums") {
    for (const char* name : {"ar5", "ar2-sec43", "ar4-sec43", "ar6-sec43"}) {
        const auto& spec = builtin_spec(name);
        const auto truth = true_autocov(spec, 10);
        const auto want = oracle::ar_autocov_psi(phis(spec), 10);
        for (std::size_t h = 0; h <= 10; ++h) {
            CHECK(truth.autocov.values()[h](0, 0) == doctest::Approx(want[h]).epsilon(1e-11));
        }
    }
}

TEST_CASE("companion Lyapunov solution agrees with causal-weight sums") {
    const auto& spec = builtin_spec("var3-sec5");
    CHECK(companion_spectral_radius(spec) == doctest::Approx(0.929).epsilon(1e-3));
    const auto v = var_autocov(spec, 6);
    CHECK(v.lyapunov_residual < 1e-10);
    const auto want = oracle::var_forward_psi(spec.phi, Eigen::MatrixXd::Identity(5, 5), 6);
    for (std::size_t h = 0; h <= 6; ++h) CHECK(max_abs(v.forward[h] - want[h]) < 1e-9);

    // Γ_h = E(X_0 X_hᵀ) is the transposed forward autocovariance
    const auto truth = true_autocov(spec, 3);
    CHECK(max_abs(truth.autocov.values()[2] - want[2].transpose()) < 1e-9);

    const auto ar = var_autocov(builtin_spec("ar5"), 8);
    const auto yw = true_autocov(builtin_spec("ar5"), 8);
    for (std::size_t h = 0; h <= 8; ++h) {
        CHECK(ar.forward[h](0, 0) == doctest::Approx(yw.autocov.values()[h](0, 0)).epsilon(1e-11));
    }
}

TEST_CASE("matrix-power MA equals the VAR(1) it represents") {
    const auto& vma = builtin_spec("vma-sec5");
    const Eigen::MatrixXd a = vma.ma.scale * vma.ma.base;
    const auto truth = true_autocov(vma, 4);
    const auto want = oracle::var_forward_psi({a}, Eigen::MatrixXd::Identity(5, 5), 4);
    for (std::size_t h = 0; h <= 4; ++h) CHECK(max_abs(truth.autocov.values()[h] - want[h].transpose()) < 1e-9);
}

TEST_CASE("MA coefficient rules") {
    const auto poly = ma_coefficients(builtin_spec("ma-poly"), 6);
    CHECK(poly[0] == 1.0);
    CHECK(poly[3] == 1.0);
    CHECK(poly[4] == doctest::Approx(1.0 / 16.0));
    CHECK(poly[6] == doctest::Approx(1.0 / 256.0));
    const auto geom = ma_coefficients(builtin_spec("ma-geom"), 5);
    CHECK(geom[0] == doctest::Approx(2.0 / 3.0));
    CHECK(geom[3] == doctest::Approx(2.0 / 3.0));
    CHECK(geom[4] == doctest::Approx(std::pow(0.85, 4)));
    const auto mats = ma_matrix_coefficients(builtin_spec("vma-sec5"), 2);
    const Eigen::MatrixXd a = 0.6 * builtin_spec("vma-sec5").ma.base;
    CHECK(max_abs(mats[2] - a * a) < 1e-14);
}

TEST_CASE("MA autocovariances are lagged coefficient products") {
    const auto& spec = builtin_spec("ma-geom");
    const auto theta = ma_coefficients(spec, 400);
    double g2 = 0.0;
    for (std::size_t j = 0; j + 2 <= 400; ++j) g2 += theta[j] * theta[j + 2];
    CHECK(true_autocov(spec, 2).autocov.values()[2](0, 0) == doctest::Approx(g2).epsilon(1e-14));
    const auto wn = true_autocov(builtin_spec("white-noise"), 3);
    CHECK(wn.m == std::vector<double>{1.0, 1.0, 1.0, 1.0});
}

TEST_CASE("non-stationary or badly truncated specs are rejected") {
    ProcessSpec s;
    s.kind = ProcessKind::Ar;
    s.phi = {Eigen::MatrixXd::Constant(1, 1, 1.01)};
    try {
        s.validate();
        FAIL("expected NonStationarySpec");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonStationarySpec);
    }
    ProcessSpec g = builtin_spec("ma-geom");
    g.ma.ratio = 1.2;
    CHECK_THROWS_AS(g.validate(), Error);
    ProcessSpec t = builtin_spec("ma-poly");
    t.truncation = 50;
    try {
        t.validate();
        FAIL("expected truncation error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidArgument);
    }
    ProcessSpec v = builtin_spec("var3-sec5");
    v.phi[0] *= 2.0;
    CHECK_THROWS_AS(v.validate(), Error);
    ProcessSpec c = builtin_spec("ar5");
    c.innovation_cov = Eigen::MatrixXd::Constant(1, 1, -1.0);
    CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("simulation is deterministic per seed") {
    for (const auto& spec : builtin_specs()) {
        const auto a = simulate_multivariate(spec, 50, 3);
        const auto b = simulate_multivariate(spec, 50, 3);
        const auto c = simulate_multivariate(spec, 50, 4);
        CHECK(a.values() == b.values());
        CHECK_FALSE(a.values() == c.values());
        CHECK(a.dimension() == spec.dimension);
    }
    const auto u = simulate_univariate(builtin_spec("ar5"), 50, 3);
    const auto m = simulate_multivariate(builtin_spec("ar5"), 50, 3);
    for (std::size_t i = 0; i < 50; ++i) CHECK(u[i] == m.values()(static_cast<Eigen::Index>(i), 0));
    CHECK(std::holds_alternative<MultiSeries>(simulate(builtin_spec("var3-sec5"), 10, 1)));
    CHECK_THROWS_AS(simulate_univariate(builtin_spec("var3-sec5"), 10, 1), Error);
    CHECK(builtin_spec("ar5").effective_burn_in() == 1000);
}

TEST_CASE("long simulations reproduce the population autocovariances") {
    const std::size_t n = 200000;
    for (const char* name : {"ar5", "ma-poly", "ma-geom"}) {
        const auto x = simulate_univariate(builtin_spec(name), n, 17);
        const auto truth = true_autocov(builtin_spec(name), 3);
        for (long h = 0; h <= 3; ++h) {
            const double want = truth.autocov.values()[static_cast<std::size_t>(h)](0, 0);
            CHECK(std::fabs(autocov_seq(x, h, 1.0) - want) < 0.05 * truth.autocov.values()[0](0, 0));
        }
    }
    const auto v = simulate_multivariate(builtin_spec("var3-sec5"), 100000, 18);
    const auto truth = true_autocov(builtin_spec("var3-sec5"), 1);
    CHECK(max_abs(crosscov_seq(v, 1, 1.0) - truth.autocov.values()[1]) < 0.1 * truth.autocov.values()[0].trace() / 5);
}

TEST_CASE("uniform innovations have unit variance") {
    ProcessSpec s = builtin_spec("white-noise");
    s.innovation = InnovationDist::Uniform;
    const auto x = simulate_univariate(s, 100000, 5);
    CHECK(autocov_seq(x, 0, 1.0) == doctest::Approx(1.0).epsilon(0.02));
    for (double v : x.values()) CHECK(std::fabs(v) <= std::sqrt(3.0));
}

TEST_CASE("spec JSON round trip preserves truths and simulations") {
    for (const auto& spec : builtin_specs()) {
        const auto back = spec_from_json(spec_to_json(spec));
        CHECK(back.name == spec.name);
        CHECK(true_autocov(back, 3).s == true_autocov(spec, 3).s);
        CHECK(simulate_multivariate(back, 30, 2).values() == simulate_multivariate(spec, 30, 2).values());
    }
    CHECK_THROWS_AS(spec_from_json("{\"kind\": \"arma\", \"coefficients\": [0.1]}"), Error);
    CHECK_THROWS_AS(spec_from_json("not json"), Error);
}

TEST_CASE("specs resolve by builtin name or file path") {
    const auto dir = testing_support::scratch_dir("specs");
    std::ofstream(dir / "ar1.json")
        << R"({"kind": "ar", "coefficients": [0.5], "innovation": {"dist": "normal", "sd": 2.0}})";
    const auto s = resolve_spec((dir / "ar1.json").string());
    CHECK(true_autocov(s, 0).autocov.values()[0](0, 0) == doctest::Approx(4.0 / 0.75));
    CHECK(resolve_spec("ar5").phi.size() == 5);
    CHECK_THROWS_AS(resolve_spec("no-such-spec"), Error);
    CHECK_THROWS_AS(builtin_spec("no-such-spec"), Error);
}
