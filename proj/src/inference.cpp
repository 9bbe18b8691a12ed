#include "pivlp/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pivlp/error.hpp"

namespace pivlp {

std::string_view to_string(Measure m) {
    switch (m) {
        case Measure::M: return "m";
        case Measure::S: return "s";
        case Measure::R2: return "r2";
        case Measure::Q: return "q";
        case Measure::Kappa: return "kappa";
        case Measure::KappaSq: return "kappa2";
        case Measure::MvS: return "mv-s";
    }
    return "?";
}

Measure parse_measure(std::string_view name) {
    for (Measure m : {Measure::M, Measure::S, Measure::R2, Measure::Q, Measure::Kappa, Measure::KappaSq,
                      Measure::MvS}) {
        if (to_string(m) == name) return m;
    }
    throw Error(ErrorCode::InvalidArgument, "unknown measure '" + std::string(name) + "'");
}

namespace {

// Path whose final value the interval is reflected around for R2 and kappa².
struct Prepared {
    MeasureStatistic stat;
    double base = 0.0;
};

Prepared prepare(const TimeSeries& x, Measure measure, std::size_t p, const InferenceOptions& opts) {
    Prepared out;
    out.stat.measure = measure;
    out.stat.p = p;
    switch (measure) {
        case Measure::M: {
            const auto path = m_path(x, p, opts.grid, opts.centering);
            out.stat.estimate = out.base = path.final_value();
            out.stat.normalizer = v_plain(path);
            break;
        }
        case Measure::S:
        case Measure::R2: {
            const auto path = s_path(x, p, opts.grid, opts.centering);
            out.base = path.final_value();
            out.stat.estimate = measure == Measure::S ? out.base : 1.0 - out.base;
            out.stat.normalizer = v_weighted(path);
            break;
        }
        case Measure::Q:
        case Measure::KappaSq: {
            const auto path = q_path(x, p, opts.grid, opts.centering);
            out.base = path.final_value();
            out.stat.estimate = measure == Measure::Q ? out.base : 1.0 - out.base;
            out.stat.normalizer = v_weighted(path);
            break;
        }
        case Measure::Kappa: {
            const auto path = kappa_path(x, p, opts.grid, opts.centering);
            out.stat.estimate = out.base = path.final_value();
            out.stat.normalizer = v_weighted(path);
            break;
        }
        case Measure::MvS: {
            const auto path = mv_s_path(MultiSeries::from(opts.centering == Centering::Centered ? x.centered() : x),
                                        p, opts.grid);
            out.stat.estimate = out.base = path.final_value();
            out.stat.normalizer = v_weighted(path);
            break;
        }
    }
    return out;
}

Prepared prepare(const MultiSeries& x, Measure measure, std::size_t p, const InferenceOptions& opts) {
    if (measure != Measure::MvS) {
        require(x.dimension() == 1, ErrorCode::InvalidArgument,
                "measure '" + std::string(to_string(measure)) + "' needs univariate input");
        return prepare(x.channel(0), measure, p, opts);
    }
    Eigen::MatrixXd v = x.values();
    if (opts.centering == Centering::Centered) v.rowwise() -= v.colwise().mean();
    const auto path = mv_s_path(MultiSeries(std::move(v)), p, opts.grid);
    Prepared out;
    out.stat.measure = measure;
    out.stat.p = p;
    out.stat.estimate = out.base = path.final_value();
    out.stat.normalizer = v_weighted(path);
    return out;
}

void check_alpha(double alpha) {
    require(alpha > 0.0 && alpha < 1.0, ErrorCode::InvalidArgument, "alpha must lie in (0,1)");
}

void check_positive(const Normalizer& v) {
    if (!(v.value > 0.0)) {
        throw Error(ErrorCode::DegenerateNormalizer, "self-normalizer is zero; the sample path is degenerate");
    }
}

ConfidenceInterval interval(const Prepared& prep, double alpha, const WQuantileTable& table) {
    check_alpha(alpha);
    const double q = quantile(table, 1.0 - alpha / 2.0);
    check_positive(prep.stat.normalizer);
    const double half = q * prep.stat.normalizer.value;
    ConfidenceInterval out;
    out.level = 1.0 - alpha;
    out.measure = prep.stat.measure;
    out.p = prep.stat.p;
    if (prep.stat.measure == Measure::R2 || prep.stat.measure == Measure::KappaSq) {
        out.lower = 1.0 - (prep.base + half);
        out.upper = 1.0 - (prep.base - half);
    } else {
        out.lower = prep.stat.estimate - half;
        out.upper = prep.stat.estimate + half;
    }
    return out;
}

void check_test_measure(Measure m) {
    require(m == Measure::S || m == Measure::Q || m == Measure::MvS, ErrorCode::InvalidArgument,
            "threshold tests are defined for measures s, q and mv-s");
}

void check_order_measure(Measure m) {
    require(m == Measure::S || m == Measure::Q, ErrorCode::InvalidArgument,
            "order selection is defined for measures s and q");
}

void check_nu(double nu) { require(nu > 0.0 && nu < 1.0, ErrorCode::InvalidArgument, "nu must lie in (0,1)"); }

}  // namespace

MeasureStatistic measure_statistic(const TimeSeries& x, Measure measure, std::size_t p,
                                   const InferenceOptions& opts) {
    return prepare(x, measure, p, opts).stat;
}

MeasureStatistic measure_statistic(const MultiSeries& x, Measure measure, std::size_t p,
                                   const InferenceOptions& opts) {
    return prepare(x, measure, p, opts).stat;
}

std::size_t default_p_max(std::size_t n) { return std::max<std::size_t>(1, std::min<std::size_t>(20, n / 4)); }

ConfidenceInterval ci_from_statistic(const MeasureStatistic& stat, double alpha, const WQuantileTable& table) {
    Prepared prep{stat, stat.estimate};
    if (stat.measure == Measure::R2 || stat.measure == Measure::KappaSq) prep.base = 1.0 - stat.estimate;
    return interval(prep, alpha, table);
}

ConfidenceInterval ci(const TimeSeries& x, Measure measure, std::size_t p, double alpha,
                      const WQuantileTable& table, const InferenceOptions& opts) {
    check_alpha(alpha);
    return interval(prepare(x, measure, p, opts), alpha, table);
}

ConfidenceInterval ci(const MultiSeries& x, Measure measure, std::size_t p, double alpha,
                      const WQuantileTable& table, const InferenceOptions& opts) {
    check_alpha(alpha);
    return interval(prepare(x, measure, p, opts), alpha, table);
}

TestOutcome threshold_decision(const MeasureStatistic& stat, double delta, double alpha,
                               const WQuantileTable& table) {
    check_test_measure(stat.measure);
    check_alpha(alpha);
    require(delta > 0.0 && delta < 1.0, ErrorCode::InvalidArgument, "delta must lie in (0,1)");
    TestOutcome out;
    out.alpha = alpha;
    out.threshold = delta;
    out.critical = quantile(table, alpha);
    out.statistic = studentize(stat.estimate, delta, stat.normalizer);
    out.reject = stat.estimate - out.critical * stat.normalizer.value <= delta;
    return out;
}

TestOutcome test_threshold(const TimeSeries& x, Measure measure, std::size_t p, double delta, double alpha,
                           const WQuantileTable& table, const InferenceOptions& opts) {
    check_test_measure(measure);
    return threshold_decision(measure_statistic(x, measure, p, opts), delta, alpha, table);
}

TestOutcome test_threshold(const MultiSeries& x, Measure measure, std::size_t p, double delta, double alpha,
                           const WQuantileTable& table, const InferenceOptions& opts) {
    check_test_measure(measure);
    return threshold_decision(measure_statistic(x, measure, p, opts), delta, alpha, table);
}

double delta_hat_alpha(const MeasureStatistic& stat, double alpha, const WQuantileTable& table) {
    check_test_measure(stat.measure);
    check_alpha(alpha);
    check_positive(stat.normalizer);
    return std::max(0.0, stat.estimate - quantile(table, alpha) * stat.normalizer.value);
}

double delta_hat_alpha(const TimeSeries& x, Measure measure, std::size_t p, double alpha,
                       const WQuantileTable& table, const InferenceOptions& opts) {
    check_test_measure(measure);
    return delta_hat_alpha(measure_statistic(x, measure, p, opts), alpha, table);
}

OrderEstimate estimate_order(const TimeSeries& x, Measure measure, double nu, double alpha, std::size_t p_max,
                             const WQuantileTable& table, const InferenceOptions& opts) {
    check_order_measure(measure);
    check_nu(nu);
    check_alpha(alpha);
    require(p_max >= 1, ErrorCode::InvalidArgument, "p_max must be at least 1");
    const double q = quantile(table, alpha);
    OrderEstimate out;
    out.p_max = p_max;
    for (std::size_t p = 1; p <= p_max; ++p) {
        MeasureStatistic stat;
        try {
            stat = measure_statistic(x, measure, p, opts);
        } catch (const PathSingular& e) {
            throw PathSingular(e.lambda(), "order " + std::to_string(p) + ": " + e.what());
        }
        OrderStep step{p, stat.estimate, stat.normalizer.value, false};
        step.accepted = stat.estimate + q * stat.normalizer.value < 1.0 - nu;
        out.steps.push_back(step);
        if (step.accepted) {
            out.p_hat = p;
            break;
        }
    }
    return out;
}

TestOutcome test_pstar_leq(const TimeSeries& x, Measure measure, std::size_t p0, double nu, double alpha,
                           std::size_t p_max, const WQuantileTable& table, const InferenceOptions& opts) {
    require(p0 >= 1, ErrorCode::InvalidArgument, "p0 must be at least 1");
    const auto est = estimate_order(x, measure, nu, alpha, p_max, table, opts);
    TestOutcome out;
    out.alpha = alpha;
    out.threshold = nu;
    out.critical = quantile(table, alpha);
    out.statistic = est.p_hat ? static_cast<double>(*est.p_hat) : std::numeric_limits<double>::infinity();
    out.reject = !est.p_hat || *est.p_hat > p0;
    return out;
}

TestOutcome test_pstar_gt(const TimeSeries& x, Measure measure, std::size_t p0, double nu, double alpha,
                          const WQuantileTable& table, const InferenceOptions& opts) {
    require(p0 >= 1, ErrorCode::InvalidArgument, "p0 must be at least 1");
    check_order_measure(measure);
    check_nu(nu);
    auto out = threshold_decision(measure_statistic(x, measure, p0, opts), 1.0 - nu, alpha, table);
    out.threshold = nu;
    return out;
}

}  // namespace pivlp
