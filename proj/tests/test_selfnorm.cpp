#include <cmath>
#include <random>

#include "doctest.h"
#include "pivlp/error.hpp"
#include "pivlp/prediction_error.hpp"
#include "pivlp/selfnorm.hpp"

using namespace pivlp;

namespace {

SequentialPath path_of(std::vector<double> values, double at_zero = 0.0) {
    SequentialPath p{LambdaGrid::uniform(values.size()), std::move(values), at_zero};
    return p;
}

}  // namespace

TEST_CASE("plain normalizer is the right-endpoint sum of |path - lambda*path(1)|") {
    const auto p = path_of({1.0, 3.0, 2.0, 4.0});
    // λ = .25,.5,.75,1 ; |1−1| + |3−2| + |2−3| + |4−4| = 2, times 1/4
    CHECK(v_plain(p).value == doctest::Approx(0.5));
    CHECK(v_plain(p).kind == NormalizerKind::Plain);
}

TEST_CASE("weighted normalizer is the right-endpoint sum of lambda*|path - path(1)|") {
    const auto p = path_of({1.0, 3.0, 2.0, 4.0});
    // (.25·3 + .5·1 + .75·2 + 0)/4
    CHECK(v_weighted(p).value == doctest::Approx((0.75 + 0.5 + 1.5) / 4.0));
    CHECK(v_weighted(p).kind == NormalizerKind::Weighted);
}

TEST_CASE("non-uniform grids use their own weights") {
    SequentialPath p{LambdaGrid::from_points({0.2, 0.5, 1.0}), {1.0, 2.0, 3.0}, 0.0};
    CHECK(v_plain(p).value == doctest::Approx(0.2 * std::fabs(1.0 - 0.6) + 0.3 * std::fabs(2.0 - 1.5)));
    CHECK(v_weighted(p).value == doctest::Approx(0.2 * 0.2 * 2.0 + 0.3 * 0.5 * 1.0));
}

TEST_CASE("studentize and degenerate normalizers") {
    Normalizer v;
    v.value = 0.5;
    CHECK(studentize(2.0, 1.0, v) == doctest::Approx(2.0));
    v.value = 0.0;
    try {
        studentize(2.0, 1.0, v);
        FAIL("expected DegenerateNormalizer");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DegenerateNormalizer);
    }
    CHECK(v_weighted(path_of({0.3, 0.3, 0.3})).value == 0.0);
}

TEST_CASE("studentized M statistic is invariant to rescaling the data") {
    std::mt19937_64 gen(1);
    std::normal_distribution<double> nd;
    std::vector<double> x(500);
    for (auto& e : x) e = nd(gen);
    std::vector<double> y(x);
    for (auto& e : y) e *= 4.0;
    const auto grid = LambdaGrid::uniform();
    const auto a = m_path(TimeSeries(x), 2, grid);
    const auto b = m_path(TimeSeries(y), 2, grid);
    const double ta = studentize(a.final_value(), 0.9, v_plain(a));
    const double tb = studentize(b.final_value(), 16.0 * 0.9, v_plain(b));
    CHECK(ta == doctest::Approx(tb).epsilon(1e-10));
}
