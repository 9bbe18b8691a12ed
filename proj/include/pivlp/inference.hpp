#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pivlp/pivotal_dist.hpp"
#include "pivlp/prediction_error.hpp"
#include "pivlp/selfnorm.hpp"
#include "pivlp/timeseries.hpp"

namespace pivlp {

enum class Measure { M, S, R2, Q, Kappa, KappaSq, MvS };

std::string_view to_string(Measure m);
Measure parse_measure(std::string_view name);

struct InferenceOptions {
    LambdaGrid grid = LambdaGrid::uniform();
    Centering centering = Centering::Raw;
};

// Point estimate of a measure together with its self-normalizer.
struct MeasureStatistic {
    Measure measure = Measure::S;
    std::size_t p = 0;
    double estimate = 0.0;
    Normalizer normalizer;
};

MeasureStatistic measure_statistic(const TimeSeries& x, Measure measure, std::size_t p,
                                   const InferenceOptions& opts = {});
MeasureStatistic measure_statistic(const MultiSeries& x, Measure measure, std::size_t p,
                                   const InferenceOptions& opts = {});

struct ConfidenceInterval {
    double lower = 0.0;
    double upper = 0.0;
    double level = 0.0;
    Measure measure = Measure::S;
    std::size_t p = 0;

    double width() const { return upper - lower; }
    bool contains(double v) const { return lower <= v && v <= upper; }
};

struct TestOutcome {
    bool reject = false;
    double statistic = 0.0;  // studentized estimate, or p̂ for the p* ≤ p0 test
    double critical = 0.0;   // q_α(W)
    double threshold = 0.0;  // Δ, or ν for the order-based tests
    double alpha = 0.0;
};

struct OrderStep {
    std::size_t p = 0;
    double estimate = 0.0;
    double normalizer = 0.0;
    bool accepted = false;
};

struct OrderEstimate {
    std::optional<std::size_t> p_hat;  // nullopt: no order up to p_max qualifies
    std::size_t p_max = 0;
    std::vector<OrderStep> steps;
};

std::size_t default_p_max(std::size_t n);

ConfidenceInterval ci_from_statistic(const MeasureStatistic& stat, double alpha, const WQuantileTable& table);
ConfidenceInterval ci(const TimeSeries& x, Measure measure, std::size_t p, double alpha,
                      const WQuantileTable& table, const InferenceOptions& opts = {});
ConfidenceInterval ci(const MultiSeries& x, Measure measure, std::size_t p, double alpha,
                      const WQuantileTable& table, const InferenceOptions& opts = {});

// H0: measure > Δ vs H1: measure ≤ Δ; reject ⇔ estimate ≤ Δ + q_α(W)·V̂.
TestOutcome threshold_decision(const MeasureStatistic& stat, double delta, double alpha,
                               const WQuantileTable& table);
TestOutcome test_threshold(const TimeSeries& x, Measure measure, std::size_t p, double delta, double alpha,
                           const WQuantileTable& table, const InferenceOptions& opts = {});
TestOutcome test_threshold(const MultiSeries& x, Measure measure, std::size_t p, double delta, double alpha,
                           const WQuantileTable& table, const InferenceOptions& opts = {});

// max{0, estimate − q_α(W)·V̂}.
double delta_hat_alpha(const MeasureStatistic& stat, double alpha, const WQuantileTable& table);
double delta_hat_alpha(const TimeSeries& x, Measure measure, std::size_t p, double alpha,
                       const WQuantileTable& table, const InferenceOptions& opts = {});

// Smallest p ≤ p_max with estimate_p < 1 − ν − q_α(W)·V̂_p.
OrderEstimate estimate_order(const TimeSeries& x, Measure measure, double nu, double alpha, std::size_t p_max,
                             const WQuantileTable& table, const InferenceOptions& opts = {});

// H0: p* ≤ p0 vs H1: p* > p0; rejects when p̂ > p0 or no order qualifies.
TestOutcome test_pstar_leq(const TimeSeries& x, Measure measure, std::size_t p0, double nu, double alpha,
                           std::size_t p_max, const WQuantileTable& table, const InferenceOptions& opts = {});

// H0: p* > p0 vs H1: p* ≤ p0; the threshold test at Δ = 1 − ν and order p0.
TestOutcome test_pstar_gt(const TimeSeries& x, Measure measure, std::size_t p0, double nu, double alpha,
                          const WQuantileTable& table, const InferenceOptions& opts = {});

}  // namespace pivlp
