#include "pivlp/process_models.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "json.hpp"
#include "pivlp/error.hpp"
#include "pivlp/kernels.hpp"
#include "pivlp/rng.hpp"

namespace pivlp {

namespace {

constexpr double kTailRelTol = 1e-10;

double spectral_norm(const Eigen::MatrixXd& m) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    return svd.singularValues()(0);
}

double ma_scalar(const MaRule& r, std::size_t j) {
    switch (r.kind) {
        case MaRule::Kind::Explicit: return j < r.coefficients.size() ? r.coefficients[j] : 0.0;
        case MaRule::Kind::PolyTail:
            return j <= r.head_last ? r.head_value : std::pow(static_cast<double>(j) - r.offset, -r.power);
        case MaRule::Kind::GeomTail:
            return j <= r.head_last ? r.head_value : std::pow(r.ratio, static_cast<double>(j));
        case MaRule::Kind::MatrixPower: break;
    }
    throw Error(ErrorCode::InvalidArgument, "matrix-power rule has no scalar coefficients");
}

// Upper bound on Σ_{j>last} |θ_j| (or ‖Θ_j‖).
double ma_tail_bound(const ProcessSpec& spec, std::size_t last) {
    const MaRule& r = spec.ma;
    switch (r.kind) {
        case MaRule::Kind::Explicit: {
            double t = 0.0;
            for (std::size_t j = last + 1; j < r.coefficients.size(); ++j) t += std::abs(r.coefficients[j]);
            return t;
        }
        case MaRule::Kind::PolyTail: {
            const double start = static_cast<double>(std::max(last, r.head_last)) - r.offset;
            require(r.power > 1.0 && start > 0.0, ErrorCode::NonStationarySpec,
                    "polynomial MA tail must be summable (power > 1)");
            return std::pow(start, 1.0 - r.power) / (r.power - 1.0);
        }
        case MaRule::Kind::GeomTail: {
            const double a = std::abs(r.ratio);
            require(a < 1.0, ErrorCode::NonStationarySpec, "geometric MA ratio must be below 1 in magnitude");
            return std::pow(a, static_cast<double>(std::max(last, r.head_last) + 1)) / (1.0 - a);
        }
        case MaRule::Kind::MatrixPower: {
            const double rho = spectral_norm(r.scale * r.base);
            require(rho < 1.0, ErrorCode::NonStationarySpec, "matrix-power MA needs ||scale*base|| < 1");
            return std::pow(rho, static_cast<double>(last + 1)) / (1.0 - rho);
        }
    }
    return 0.0;
}

}  // namespace

std::size_t ProcessSpec::order() const { return kind == ProcessKind::MaInf ? truncation : phi.size(); }

std::size_t ProcessSpec::effective_burn_in() const {
    return burn_in != 0 ? burn_in : std::max<std::size_t>(1000, 50 * order());
}

Eigen::MatrixXd ProcessSpec::innovation_covariance() const {
    if (innovation_cov.size() == 0) {
        return Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(dimension), static_cast<Eigen::Index>(dimension));
    }
    return innovation_cov;
}

double companion_spectral_radius(const ProcessSpec& spec) {
    const auto d = static_cast<Eigen::Index>(spec.dimension);
    const auto lags = static_cast<Eigen::Index>(spec.phi.size());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(d * lags, d * lags);
    for (Eigen::Index i = 0; i < lags; ++i) a.block(0, i * d, d, d) = spec.phi[static_cast<std::size_t>(i)];
    if (lags > 1) a.block(d, 0, d * (lags - 1), d * (lags - 1)).setIdentity();
    Eigen::EigenSolver<Eigen::MatrixXd> es(a, false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

void ProcessSpec::validate() const {
    require(dimension >= 1, ErrorCode::InvalidArgument, "dimension must be positive");
    const auto d = static_cast<Eigen::Index>(dimension);
    if (innovation_cov.size() != 0) {
        require(innovation_cov.rows() == d && innovation_cov.cols() == d, ErrorCode::InvalidArgument,
                "innovation covariance must be d x d");
        require(innovation_cov.llt().info() == Eigen::Success, ErrorCode::InvalidArgument,
                "innovation covariance must be positive definite");
    }
    if (kind == ProcessKind::MaInf) {
        if (ma.kind == MaRule::Kind::MatrixPower) {
            require(ma.base.rows() == d && ma.base.cols() == d, ErrorCode::InvalidArgument,
                    "matrix-power base must be d x d");
        } else {
            require(dimension == 1, ErrorCode::InvalidArgument, "scalar MA rules need dimension 1");
        }
        if (ma.kind == MaRule::Kind::Explicit) {
            require(!ma.coefficients.empty(), ErrorCode::InvalidArgument, "explicit MA needs coefficients");
        }
        double total = 0.0;
        if (ma.kind == MaRule::Kind::MatrixPower) {
            total = 1.0;
        } else {
            const std::size_t upto = std::max(truncation, gamma_truncation);
            for (std::size_t j = 0; j <= upto && j < 10000; ++j) total += std::abs(ma_scalar(ma, j));
        }
        for (std::size_t j : {truncation, gamma_truncation}) {
            if (j == 0 && ma.kind == MaRule::Kind::Explicit) continue;
            require(ma_tail_bound(*this, j) < kTailRelTol * total, ErrorCode::InvalidArgument,
                    "MA truncation " + std::to_string(j) + " leaves a tail above 1e-10 of the coefficient mass");
        }
        return;
    }
    require(!phi.empty(), ErrorCode::InvalidArgument, "AR/VAR spec needs coefficients");
    for (const auto& m : phi) {
        require(m.rows() == d && m.cols() == d, ErrorCode::InvalidArgument, "coefficient matrices must be d x d");
    }
    if (kind == ProcessKind::Ar) require(dimension == 1, ErrorCode::InvalidArgument, "AR spec must be univariate");
    const double rho = companion_spectral_radius(*this);
    if (!(rho < 1.0)) {
        throw Error(ErrorCode::NonStationarySpec,
                    "companion spectral radius " + std::to_string(rho) + " is not below 1");
    }
}

std::vector<double> ma_coefficients(const ProcessSpec& spec, std::size_t last) {
    require(spec.dimension == 1 && spec.ma.kind != MaRule::Kind::MatrixPower, ErrorCode::InvalidArgument,
            "scalar MA coefficients need a univariate scalar rule");
    std::vector<double> out(last + 1);
    for (std::size_t j = 0; j <= last; ++j) out[j] = ma_scalar(spec.ma, j);
    return out;
}

std::vector<Eigen::MatrixXd> ma_matrix_coefficients(const ProcessSpec& spec, std::size_t last) {
    std::vector<Eigen::MatrixXd> out;
    out.reserve(last + 1);
    if (spec.ma.kind == MaRule::Kind::MatrixPower) {
        const Eigen::MatrixXd step = spec.ma.scale * spec.ma.base;
        Eigen::MatrixXd cur = Eigen::MatrixXd::Identity(step.rows(), step.cols());
        for (std::size_t j = 0; j <= last; ++j) {
            out.push_back(cur);
            cur = cur * step;
        }
        return out;
    }
    for (double t : ma_coefficients(spec, last)) out.push_back(Eigen::MatrixXd::Constant(1, 1, t));
    return out;
}

namespace {

Eigen::MatrixXd draw_innovations(const ProcessSpec& spec, std::size_t rows, std::uint64_t seed) {
    Rng rng(derive_seed(seed, Stream::Simulation, 0));
    const auto d = static_cast<Eigen::Index>(spec.dimension);
    const Eigen::MatrixXd chol = spec.innovation_covariance().llt().matrixL();
    const bool is_identity = spec.innovation_cov.size() == 0;
    Eigen::MatrixXd e(static_cast<Eigen::Index>(rows), d);
    Eigen::VectorXd z(d);
    for (Eigen::Index t = 0; t < e.rows(); ++t) {
        for (Eigen::Index k = 0; k < d; ++k) {
            z(k) = spec.innovation == InnovationDist::Normal ? rng.normal()
                                                             : std::sqrt(3.0) * (2.0 * rng.uniform() - 1.0);
        }
        if (is_identity) {
            e.row(t) = z.transpose();
        } else {
            e.row(t) = (chol * z).transpose();
        }
    }
    return e;
}

}  // namespace

MultiSeries simulate_multivariate(const ProcessSpec& spec, std::size_t n, std::uint64_t seed) {
    spec.validate();
    require(n >= 1, ErrorCode::InvalidArgument, "sample size must be positive");
    const auto d = static_cast<Eigen::Index>(spec.dimension);
    if (spec.kind == ProcessKind::MaInf) {
        const std::size_t taps = spec.truncation;
        const Eigen::MatrixXd e = draw_innovations(spec, n + taps, seed);
        if (spec.dimension == 1 && spec.ma.kind != MaRule::Kind::MatrixPower) {
            const auto theta = ma_coefficients(spec, taps);
            std::vector<double> ev(e.data(), e.data() + e.rows());
            const auto x = kernels::ma_convolve(theta, ev, n);
            return MultiSeries(Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(n)));
        }
        return MultiSeries(kernels::ma_convolve(ma_matrix_coefficients(spec, taps), e, n));
    }
    const std::size_t burn = spec.effective_burn_in();
    const std::size_t lags = spec.phi.size();
    const Eigen::MatrixXd e = draw_innovations(spec, burn + n, seed);
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(burn + n), d);
    for (std::size_t t = 0; t < burn + n; ++t) {
        Eigen::VectorXd v = e.row(static_cast<Eigen::Index>(t)).transpose();
        for (std::size_t i = 1; i <= lags && i <= t; ++i) {
            v.noalias() += spec.phi[i - 1] * x.row(static_cast<Eigen::Index>(t - i)).transpose();
        }
        x.row(static_cast<Eigen::Index>(t)) = v.transpose();
    }
    return MultiSeries(x.bottomRows(static_cast<Eigen::Index>(n)));
}

TimeSeries simulate_univariate(const ProcessSpec& spec, std::size_t n, std::uint64_t seed) {
    require(spec.dimension == 1, ErrorCode::InvalidArgument, "spec '" + spec.name + "' is multivariate");
    return simulate_multivariate(spec, n, seed).channel(0);
}

std::variant<TimeSeries, MultiSeries> simulate(const ProcessSpec& spec, std::size_t n, std::uint64_t seed) {
    if (spec.dimension == 1) return simulate_univariate(spec, n, seed);
    return simulate_multivariate(spec, n, seed);
}

VarAutocov var_autocov(const ProcessSpec& spec, std::size_t max_lag) {
    spec.validate();
    require(spec.kind != ProcessKind::MaInf, ErrorCode::InvalidArgument, "var_autocov needs an AR/VAR spec");
    const auto d = static_cast<Eigen::Index>(spec.dimension);
    const auto lags = static_cast<Eigen::Index>(spec.phi.size());
    const Eigen::Index n = d * lags;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < lags; ++i) a.block(0, i * d, d, d) = spec.phi[static_cast<std::size_t>(i)];
    if (lags > 1) a.block(d, 0, d * (lags - 1), d * (lags - 1)).setIdentity();
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
    q.topLeftCorner(d, d) = spec.innovation_covariance();

    // vec(Σ) = (I − A⊗A)⁻¹ vec(Q), column-major vec
    Eigen::MatrixXd k = Eigen::MatrixXd::Identity(n * n, n * n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (a(i, j) == 0.0) continue;
            k.block(i * n, j * n, n, n) -= a(i, j) * a;
        }
    }
    const Eigen::VectorXd vec_q = Eigen::Map<const Eigen::VectorXd>(q.data(), n * n);
    const Eigen::VectorXd vec_s = k.partialPivLu().solve(vec_q);
    Eigen::MatrixXd sigma = Eigen::Map<const Eigen::MatrixXd>(vec_s.data(), n, n);
    sigma = 0.5 * (sigma + sigma.transpose());

    VarAutocov out;
    out.lyapunov_residual = (sigma - a * sigma * a.transpose() - q).cwiseAbs().maxCoeff();
    for (std::size_t h = 0; h <= max_lag; ++h) {
        if (static_cast<Eigen::Index>(h) < lags) {
            out.forward.push_back(sigma.block(0, static_cast<Eigen::Index>(h) * d, d, d));
            continue;
        }
        Eigen::MatrixXd g = Eigen::MatrixXd::Zero(d, d);
        for (std::size_t i = 1; i <= spec.phi.size(); ++i) g += spec.phi[i - 1] * out.forward[h - i];
        out.forward.push_back(g);
    }
    return out;
}

AutocovVector PopulationTruth::scalar_autocov() const {
    require(autocov.dimension() == 1, ErrorCode::InvalidArgument, "population is multivariate");
    std::vector<double> g;
    for (const auto& m : autocov.values()) g.push_back(m(0, 0));
    return AutocovVector(std::move(g));
}

namespace {

std::vector<Eigen::MatrixXd> ar_autocov(const ProcessSpec& spec, std::size_t max_lag) {
    const std::size_t lags = spec.phi.size();
    const auto n = static_cast<Eigen::Index>(lags + 1);
    std::vector<double> phi(lags);
    for (std::size_t i = 0; i < lags; ++i) phi[i] = spec.phi[i](0, 0);
    // γ_h − Σ_i φ_i γ_{|h−i|} = σ² δ_{h0}, h = 0..P
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
    for (Eigen::Index h = 0; h < n; ++h) {
        for (std::size_t i = 1; i <= lags; ++i) a(h, std::abs(h - static_cast<Eigen::Index>(i))) -= phi[i - 1];
    }
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    rhs(0) = spec.innovation_covariance()(0, 0);
    const Eigen::VectorXd sol = a.partialPivLu().solve(rhs);
    std::vector<double> gamma(sol.data(), sol.data() + n);
    for (std::size_t h = gamma.size(); h <= max_lag; ++h) {
        double g = 0.0;
        for (std::size_t i = 1; i <= lags; ++i) g += phi[i - 1] * gamma[h - i];
        gamma.push_back(g);
    }
    std::vector<Eigen::MatrixXd> out;
    for (std::size_t h = 0; h <= max_lag; ++h) out.push_back(Eigen::MatrixXd::Constant(1, 1, gamma[h]));
    return out;
}

std::vector<Eigen::MatrixXd> ma_autocov(const ProcessSpec& spec, std::size_t max_lag) {
    const std::size_t last = spec.gamma_truncation != 0 ? spec.gamma_truncation : spec.truncation;
    const Eigen::MatrixXd cov = spec.innovation_covariance();
    std::vector<Eigen::MatrixXd> out;
    if (spec.dimension == 1 && spec.ma.kind != MaRule::Kind::MatrixPower) {
        const auto theta = ma_coefficients(spec, last);
        for (std::size_t h = 0; h <= max_lag; ++h) {
            double g = 0.0;
            for (std::size_t j = 0; j + h <= last; ++j) g += theta[j] * theta[j + h];
            out.push_back(Eigen::MatrixXd::Constant(1, 1, g * cov(0, 0)));
        }
        return out;
    }
    const auto theta = ma_matrix_coefficients(spec, last);
    for (std::size_t h = 0; h <= max_lag; ++h) {
        Eigen::MatrixXd g = Eigen::MatrixXd::Zero(cov.rows(), cov.cols());
        for (std::size_t j = 0; j + h <= last; ++j) g.noalias() += theta[j] * cov * theta[j + h].transpose();
        out.push_back(g);
    }
    return out;
}

}  // namespace

PopulationTruth true_autocov(const ProcessSpec& spec, std::size_t max_lag) {
    spec.validate();
    std::vector<Eigen::MatrixXd> blocks;
    switch (spec.kind) {
        case ProcessKind::MaInf: blocks = ma_autocov(spec, max_lag); break;
        case ProcessKind::Ar: blocks = ar_autocov(spec, max_lag); break;
        case ProcessKind::Var: {
            // Γ_h = E(X_0 X_hᵀ) is the transpose of the forward autocovariance
            for (auto& g : var_autocov(spec, max_lag).forward) blocks.push_back(g.transpose());
            break;
        }
    }
    blocks[0] = 0.5 * (blocks[0] + blocks[0].transpose());
    PopulationTruth truth{BlockAutocov(std::move(blocks)), {}, {}, std::nullopt};
    if (spec.dimension == 1) {
        truth.univariate = population_stats(truth.scalar_autocov());
        truth.m = truth.univariate->m;
        for (std::size_t p = 0; p < truth.m.size(); ++p) truth.s.push_back(truth.univariate->s(p));
    } else {
        auto stats = population_stats(truth.autocov);
        truth.m = std::move(stats.m);
        truth.s = std::move(stats.s);
    }
    return truth;
}

namespace {

ProcessSpec ar_spec(std::string name, std::vector<double> phi) {
    ProcessSpec s;
    s.name = std::move(name);
    s.kind = ProcessKind::Ar;
    for (double v : phi) s.phi.push_back(Eigen::MatrixXd::Constant(1, 1, v));
    return s;
}

Eigen::MatrixXd rows5(std::initializer_list<std::initializer_list<double>> rows, double scale) {
    Eigen::MatrixXd m(5, 5);
    Eigen::Index r = 0;
    for (const auto& row : rows) {
        Eigen::Index c = 0;
        for (double v : row) m(r, c++) = scale * v;
        ++r;
    }
    return m;
}

Eigen::MatrixXd var3_phi1() {
    return rows5({{7, 2, 1, 0, 0}, {2, 5, 2, 1, 0}, {1, 2, 5, 2, 1}, {0, 1, 2, 5, 2}, {0, 0, 1, 2, 5}}, 0.16);
}

std::vector<ProcessSpec> make_builtins() {
    std::vector<ProcessSpec> out;

    ProcessSpec poly;
    poly.name = "ma-poly";
    poly.kind = ProcessKind::MaInf;
    poly.ma.kind = MaRule::Kind::PolyTail;
    poly.ma.head_value = 1.0;
    poly.ma.head_last = 3;
    poly.ma.offset = 2.0;
    poly.ma.power = 4.0;
    poly.truncation = 10000;
    poly.gamma_truncation = 1000000;
    out.push_back(poly);

    ProcessSpec geom;
    geom.name = "ma-geom";
    geom.kind = ProcessKind::MaInf;
    geom.ma.kind = MaRule::Kind::GeomTail;
    geom.ma.head_value = 2.0 / 3.0;
    geom.ma.head_last = 3;
    geom.ma.ratio = 0.85;
    geom.truncation = 400;
    geom.gamma_truncation = 400;
    out.push_back(geom);

    out.push_back(ar_spec("ar5", {-0.25, 0.1, 0.4, -0.25, 0.25}));
    out.push_back(ar_spec("ar2-sec43", {-0.2, -0.3}));
    out.push_back(ar_spec("ar4-sec43", {-0.2, -0.3, 0.3, 0.2}));
    out.push_back(ar_spec("ar6-sec43", {-0.2, -0.3, 0.3, 0.2, 0.1, 0.1}));

    ProcessSpec var3;
    var3.name = "var3-sec5";
    var3.kind = ProcessKind::Var;
    var3.dimension = 5;
    var3.phi.push_back(var3_phi1());
    var3.phi.push_back(
        rows5({{3, 2, 0, 0, 0}, {2, 3, 2, 0, 0}, {0, 2, 3, 2, 0}, {0, 0, 2, 3, 2}, {0, 0, 0, 2, 3}}, -0.1));
    var3.phi.push_back(
        rows5({{2, 1, 0, 0, 0}, {1, 1, 1, 0, 0}, {0, 1, 1, 1, 0}, {0, 0, 1, 1, 1}, {0, 0, 0, 1, 1}}, -0.05));
    out.push_back(var3);

    ProcessSpec vma;
    vma.name = "vma-sec5";
    vma.kind = ProcessKind::MaInf;
    vma.dimension = 5;
    vma.ma.kind = MaRule::Kind::MatrixPower;
    vma.ma.base = var3_phi1();
    vma.ma.scale = 0.6;
    vma.truncation = 1000;
    vma.gamma_truncation = 1000;
    out.push_back(vma);

    ProcessSpec wn;
    wn.name = "white-noise";
    wn.kind = ProcessKind::MaInf;
    wn.ma.kind = MaRule::Kind::Explicit;
    wn.ma.coefficients = {1.0};
    out.push_back(wn);

    for (const auto& s : out) s.validate();
    return out;
}

}  // namespace

const std::vector<ProcessSpec>& builtin_specs() {
    static const std::vector<ProcessSpec> specs = make_builtins();
    return specs;
}

const ProcessSpec& builtin_spec(const std::string& name) {
    for (const auto& s : builtin_specs()) {
        if (s.name == name) return s;
    }
    throw Error(ErrorCode::InvalidArgument, "unknown builtin spec '" + name + "'");
}

namespace {

using nlohmann::json;

json matrix_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(row);
    }
    return rows;
}

Eigen::MatrixXd matrix_from(const json& j) {
    const auto rows = static_cast<Eigen::Index>(j.size());
    require(rows > 0, ErrorCode::InvalidArgument, "matrix must have rows");
    const auto cols = static_cast<Eigen::Index>(j[0].size());
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        require(static_cast<Eigen::Index>(j[static_cast<std::size_t>(r)].size()) == cols,
                ErrorCode::InvalidArgument, "ragged matrix");
        for (Eigen::Index c = 0; c < cols; ++c) {
            m(r, c) = j[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get<double>();
        }
    }
    return m;
}

std::string kind_name(ProcessKind k) {
    switch (k) {
        case ProcessKind::MaInf: return "ma-inf";
        case ProcessKind::Ar: return "ar";
        case ProcessKind::Var: return "var";
    }
    return "?";
}

}  // namespace

std::string spec_to_json(const ProcessSpec& spec) {
    json j;
    j["name"] = spec.name;
    j["kind"] = kind_name(spec.kind);
    j["dimension"] = spec.dimension;
    if (spec.kind == ProcessKind::MaInf) {
        const MaRule& r = spec.ma;
        switch (r.kind) {
            case MaRule::Kind::Explicit: j["coefficients"] = r.coefficients; break;
            case MaRule::Kind::PolyTail:
                j["coefficients"] = {{"rule", "poly-tail"}, {"head_value", r.head_value}, {"head_last", r.head_last},
                                     {"offset", r.offset}, {"power", r.power}};
                break;
            case MaRule::Kind::GeomTail:
                j["coefficients"] = {{"rule", "geom-tail"}, {"head_value", r.head_value},
                                     {"head_last", r.head_last}, {"ratio", r.ratio}};
                break;
            case MaRule::Kind::MatrixPower:
                j["coefficients"] = {{"rule", "matrix-power"}, {"base", matrix_json(r.base)}, {"scale", r.scale}};
                break;
        }
        j["truncation"] = spec.truncation;
        j["gamma_truncation"] = spec.gamma_truncation;
    } else if (spec.kind == ProcessKind::Ar) {
        std::vector<double> phi;
        for (const auto& m : spec.phi) phi.push_back(m(0, 0));
        j["coefficients"] = phi;
    } else {
        j["coefficients"] = json::array();
        for (const auto& m : spec.phi) j["coefficients"].push_back(matrix_json(m));
    }
    json inn;
    inn["dist"] = spec.innovation == InnovationDist::Normal ? "normal" : "uniform";
    if (spec.innovation_cov.size() != 0) inn["cov"] = matrix_json(spec.innovation_cov);
    j["innovation"] = inn;
    j["burn_in"] = spec.burn_in;
    return j.dump(2);
}

ProcessSpec spec_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("process spec is not valid JSON: ") + e.what());
    }
    try {
        ProcessSpec s;
        s.name = j.value("name", std::string("custom"));
        const std::string kind = j.at("kind").get<std::string>();
        s.dimension = j.value("dimension", std::size_t{1});
        const json& coef = j.at("coefficients");
        if (kind == "ma-inf") {
            s.kind = ProcessKind::MaInf;
            if (coef.is_array()) {
                s.ma.kind = MaRule::Kind::Explicit;
                s.ma.coefficients = coef.get<std::vector<double>>();
                s.truncation = s.ma.coefficients.size() - 1;
            } else {
                const std::string rule = coef.at("rule").get<std::string>();
                if (rule == "poly-tail") {
                    s.ma.kind = MaRule::Kind::PolyTail;
                    s.ma.offset = coef.at("offset").get<double>();
                    s.ma.power = coef.at("power").get<double>();
                } else if (rule == "geom-tail") {
                    s.ma.kind = MaRule::Kind::GeomTail;
                    s.ma.ratio = coef.at("ratio").get<double>();
                } else if (rule == "matrix-power") {
                    s.ma.kind = MaRule::Kind::MatrixPower;
                    s.ma.base = matrix_from(coef.at("base"));
                    s.ma.scale = coef.value("scale", 1.0);
                } else {
                    throw Error(ErrorCode::InvalidArgument, "unknown MA rule '" + rule + "'");
                }
                s.ma.head_value = coef.value("head_value", 1.0);
                s.ma.head_last = coef.value("head_last", std::size_t{0});
            }
            s.truncation = j.value("truncation", s.truncation);
            s.gamma_truncation = j.value("gamma_truncation", s.truncation);
        } else if (kind == "ar") {
            s.kind = ProcessKind::Ar;
            for (double v : coef.get<std::vector<double>>()) s.phi.push_back(Eigen::MatrixXd::Constant(1, 1, v));
        } else if (kind == "var") {
            s.kind = ProcessKind::Var;
            for (const auto& m : coef) s.phi.push_back(matrix_from(m));
        } else {
            throw Error(ErrorCode::InvalidArgument, "unknown process kind '" + kind + "'");
        }
        if (j.contains("innovation")) {
            const json& inn = j["innovation"];
            const std::string dist = inn.value("dist", std::string("normal"));
            require(dist == "normal" || dist == "uniform", ErrorCode::InvalidArgument,
                    "innovation dist must be normal or uniform");
            s.innovation = dist == "normal" ? InnovationDist::Normal : InnovationDist::Uniform;
            if (inn.contains("cov")) {
                s.innovation_cov = matrix_from(inn["cov"]);
            } else if (inn.contains("sd")) {
                const double sd = inn["sd"].get<double>();
                s.innovation_cov = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(s.dimension),
                                                             static_cast<Eigen::Index>(s.dimension)) *
                                   (sd * sd);
            }
        }
        s.burn_in = j.value("burn_in", std::size_t{0});
        s.validate();
        return s;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("malformed process spec: ") + e.what());
    }
}

ProcessSpec resolve_spec(const std::string& name_or_path) {
    for (const auto& s : builtin_specs()) {
        if (s.name == name_or_path) return s;
    }
    std::ifstream in(name_or_path);
    if (!in) throw Error(ErrorCode::InvalidArgument, "'" + name_or_path + "' is neither a builtin spec nor a file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return spec_from_json(ss.str());
}

}  // namespace pivlp
