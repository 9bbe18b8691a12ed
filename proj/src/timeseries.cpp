#include "pivlp/timeseries.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "pivlp/error.hpp"
#include "pivlp/kernels.hpp"

namespace pivlp {

TimeSeries::TimeSeries(std::vector<double> values) : values_(std::move(values)) {
    require(!values_.empty(), ErrorCode::InvalidArgument, "time series must contain at least one value");
    for (double v : values_) {
        require(std::isfinite(v), ErrorCode::InvalidArgument, "time series values must be finite");
    }
}

double TimeSeries::mean() const {
    double s = 0.0;
    for (double v : values_) s += v;
    return s / static_cast<double>(values_.size());
}

TimeSeries TimeSeries::centered() const {
    const double m = mean();
    std::vector<double> out(values_);
    for (double& v : out) v -= m;
    return TimeSeries(std::move(out));
}

TimeSeries TimeSeries::scaled(double c) const {
    std::vector<double> out(values_);
    for (double& v : out) v *= c;
    return TimeSeries(std::move(out));
}

MultiSeries::MultiSeries(Eigen::MatrixXd values) : values_(std::move(values)) {
    require(values_.rows() >= 1 && values_.cols() >= 1, ErrorCode::InvalidArgument,
            "multivariate series needs N >= 1 and d >= 1");
    require(values_.allFinite(), ErrorCode::InvalidArgument, "multivariate series values must be finite");
}

TimeSeries MultiSeries::channel(std::size_t j) const {
    const auto col = values_.col(static_cast<Eigen::Index>(j));
    return TimeSeries(std::vector<double>(col.data(), col.data() + col.size()));
}

MultiSeries MultiSeries::from(const TimeSeries& x) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(x.size()), 1);
    for (std::size_t i = 0; i < x.size(); ++i) m(static_cast<Eigen::Index>(i), 0) = x[i];
    return MultiSeries(std::move(m));
}

LambdaGrid LambdaGrid::uniform(std::size_t steps) {
    require(steps >= 1, ErrorCode::InvalidArgument, "grid needs at least one point");
    LambdaGrid g;
    g.steps_ = steps;
    g.points_.resize(steps);
    for (std::size_t k = 1; k <= steps; ++k) {
        g.points_[k - 1] = static_cast<double>(k) / static_cast<double>(steps);
    }
    return g;
}

LambdaGrid LambdaGrid::from_points(std::vector<double> points) {
    require(!points.empty(), ErrorCode::InvalidArgument, "grid needs at least one point");
    require(points.back() == 1.0, ErrorCode::InvalidArgument, "last grid point must equal 1");
    double prev = 0.0;
    for (double p : points) {
        require(p > prev && p <= 1.0, ErrorCode::InvalidArgument,
                "grid points must be strictly increasing in (0,1]");
        prev = p;
    }
    LambdaGrid g;
    g.points_ = std::move(points);
    return g;
}

double LambdaGrid::weight(std::size_t i) const {
    return i == 0 ? points_[0] : points_[i] - points_[i - 1];
}

std::size_t LambdaGrid::floor_count(std::size_t i, std::size_t n) const {
    if (steps_ != 0) return ((i + 1) * n) / steps_;
    return pivlp::floor_count(points_[i], n);
}

std::size_t floor_count(double lambda, std::size_t n) {
    const double x = lambda * static_cast<double>(n);
    const double f = std::floor(x + 1e-12 * std::max(1.0, x));
    if (f <= 0.0) return 0;
    return std::min(n, static_cast<std::size_t>(f));
}

namespace {

std::size_t checked_lag(long h, std::size_t n) {
    const auto a = static_cast<std::size_t>(h < 0 ? -h : h);
    if (a >= n) {
        throw Error(ErrorCode::LagOutOfRange,
                    "lag " + std::to_string(h) + " out of range for N = " + std::to_string(n));
    }
    return a;
}

void check_lambda(double lambda) {
    require(lambda >= 0.0 && lambda <= 1.0, ErrorCode::InvalidArgument, "lambda must lie in [0,1]");
}

double truncated_sum(std::span<const double> x, std::size_t h, double lambda, double shift) {
    const std::size_t upto = floor_count(lambda, x.size() - h);
    double acc = 0.0;
    for (std::size_t i = 0; i < upto; ++i) acc += (x[i] - shift) * (x[i + h] - shift);
    return acc;
}

}  // namespace

double autocov_seq(const TimeSeries& x, long h, double lambda) {
    const std::size_t lag = checked_lag(h, x.size());
    check_lambda(lambda);
    return truncated_sum(x.values(), lag, lambda, 0.0) / static_cast<double>(x.size());
}

double autocov_centered(const TimeSeries& x, long h) { return autocov_centered_seq(x, h, 1.0); }

double autocov_centered_seq(const TimeSeries& x, long h, double lambda) {
    const std::size_t lag = checked_lag(h, x.size());
    check_lambda(lambda);
    return truncated_sum(x.values(), lag, lambda, x.mean()) / static_cast<double>(x.size());
}

Eigen::MatrixXd sequential_autocov(const TimeSeries& x, std::size_t max_lag, const LambdaGrid& grid,
                                   Centering centering) {
    checked_lag(static_cast<long>(max_lag), x.size());
    const TimeSeries src = centering == Centering::Centered ? x.centered() : x;
    const auto sums = kernels::lagged_partial_sums(src.values(), max_lag, grid);
    const auto rows = static_cast<Eigen::Index>(grid.size());
    const auto cols = static_cast<Eigen::Index>(max_lag + 1);
    Eigen::MatrixXd out(rows, cols);
    const double inv_n = 1.0 / static_cast<double>(x.size());
    for (Eigen::Index g = 0; g < rows; ++g) {
        for (Eigen::Index h = 0; h < cols; ++h) out(g, h) = sums[static_cast<std::size_t>(g * cols + h)] * inv_n;
    }
    return out;
}

SequentialPath autocov_path(const TimeSeries& x, long h, const LambdaGrid& grid, Centering centering) {
    const std::size_t lag = checked_lag(h, x.size());
    const Eigen::MatrixXd all = sequential_autocov(x, lag, grid, centering);
    SequentialPath path{grid, std::vector<double>(grid.size()), 0.0};
    for (std::size_t g = 0; g < grid.size(); ++g) {
        path.values[g] = all(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(lag));
    }
    return path;
}

Eigen::MatrixXd crosscov_seq(const MultiSeries& x, long h, double lambda) {
    const std::size_t lag = checked_lag(h, x.size());
    check_lambda(lambda);
    const auto& v = x.values();
    const auto d = v.cols();
    const std::size_t upto = floor_count(lambda, x.size() - lag);
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(d, d);
    for (std::size_t i = 0; i < upto; ++i) {
        acc.noalias() += v.row(static_cast<Eigen::Index>(i)).transpose() *
                         v.row(static_cast<Eigen::Index>(i + lag));
    }
    acc /= static_cast<double>(x.size());
    if (h < 0) return acc.transpose();
    return acc;
}

std::vector<std::vector<Eigen::MatrixXd>> sequential_crosscov(const MultiSeries& x, std::size_t max_lag,
                                                              const LambdaGrid& grid) {
    checked_lag(static_cast<long>(max_lag), x.size());
    auto flat = kernels::lagged_partial_outer(x.values(), max_lag, grid);
    const double inv_n = 1.0 / static_cast<double>(x.size());
    std::vector<std::vector<Eigen::MatrixXd>> out(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g) {
        out[g].reserve(max_lag + 1);
        for (std::size_t h = 0; h <= max_lag; ++h) out[g].push_back(flat[g * (max_lag + 1) + h] * inv_n);
    }
    return out;
}

Eigen::VectorXd vech(const Eigen::MatrixXd& m, double tolerance) {
    require(m.rows() == m.cols(), ErrorCode::NotSymmetric, "vech needs a square matrix");
    const auto d = m.rows();
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    require((m - m.transpose()).cwiseAbs().maxCoeff() <= tolerance * scale, ErrorCode::NotSymmetric,
            "vech input is not symmetric");
    Eigen::VectorXd out(d * (d + 1) / 2);
    Eigen::Index k = 0;
    for (Eigen::Index c = 0; c < d; ++c) {
        for (Eigen::Index r = c; r < d; ++r) out(k++) = m(r, c);
    }
    return out;
}

Eigen::MatrixXd unvech(const Eigen::VectorXd& v) {
    const auto len = v.size();
    Eigen::Index d = 0;
    while (d * (d + 1) / 2 < len) ++d;
    require(d * (d + 1) / 2 == len, ErrorCode::InvalidArgument, "length is not triangular");
    Eigen::MatrixXd m(d, d);
    Eigen::Index k = 0;
    for (Eigen::Index c = 0; c < d; ++c) {
        for (Eigen::Index r = c; r < d; ++r) {
            m(r, c) = v(k);
            m(c, r) = v(k);
            ++k;
        }
    }
    return m;
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(trim(field));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

bool parse_number(const std::string& s, double& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size() && std::isfinite(out);
}

}  // namespace

CsvTable read_csv(std::istream& in) {
    CsvTable table;
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto fields = split(line);
        std::vector<double> row(fields.size());
        bool numeric = true;
        for (std::size_t i = 0; i < fields.size(); ++i) numeric = numeric && parse_number(fields[i], row[i]);
        if (!numeric) {
            if (rows.empty() && table.header.empty() && lineno == 1) {
                table.header = fields;
                width = fields.size();
                continue;
            }
            throw ParseError(lineno, "non-numeric entry on line " + std::to_string(lineno));
        }
        if (width == 0) width = fields.size();
        if (fields.size() != width) {
            throw ParseError(lineno, "expected " + std::to_string(width) + " columns on line " +
                                         std::to_string(lineno));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError(lineno, "no numeric rows in CSV input");
    table.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < width; ++c) {
            table.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
        }
    }
    return table;
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    return read_csv(in);
}

TimeSeries read_timeseries_csv(const std::filesystem::path& path) {
    const auto t = read_csv(path);
    require(t.values.cols() == 1, ErrorCode::InvalidArgument,
            "univariate input must have exactly one column");
    return MultiSeries(t.values).channel(0);
}

MultiSeries read_multiseries_csv(const std::filesystem::path& path) {
    return MultiSeries(read_csv(path).values);
}

void write_csv(const std::filesystem::path& path, const Eigen::MatrixXd& values,
               const std::vector<std::string>& header) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
    if (!header.empty()) out << '\n';
    char buf[32];
    for (Eigen::Index r = 0; r < values.rows(); ++r) {
        for (Eigen::Index c = 0; c < values.cols(); ++c) {
            std::snprintf(buf, sizeof buf, "%.17g", values(r, c));
            out << (c ? "," : "") << buf;
        }
        out << '\n';
    }
}

}  // namespace pivlp
