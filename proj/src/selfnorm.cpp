#include "pivlp/selfnorm.hpp"

#include <cmath>

#include "pivlp/error.hpp"

namespace pivlp {

Normalizer v_plain(const SequentialPath& path) {
    require(!path.values.empty() && path.values.size() == path.grid.size(), ErrorCode::InvalidArgument,
            "path must have one value per grid point");
    const double end = path.final_value();
    double acc = 0.0;
    for (std::size_t i = 0; i < path.values.size(); ++i) {
        acc += path.grid.weight(i) * std::abs(path.values[i] - path.grid[i] * end);
    }
    return {acc, path.grid, NormalizerKind::Plain};
}

Normalizer v_weighted(const SequentialPath& path) {
    require(!path.values.empty() && path.values.size() == path.grid.size(), ErrorCode::InvalidArgument,
            "path must have one value per grid point");
    const double end = path.final_value();
    double acc = 0.0;
    for (std::size_t i = 0; i < path.values.size(); ++i) {
        acc += path.grid.weight(i) * path.grid[i] * std::abs(path.values[i] - end);
    }
    return {acc, path.grid, NormalizerKind::Weighted};
}

double studentize(double estimate, double target, const Normalizer& v) {
    if (!(v.value > 0.0)) {
        throw Error(ErrorCode::DegenerateNormalizer, "self-normalizer is zero; the sample path is degenerate");
    }
    return (estimate - target) / v.value;
}

}  // namespace pivlp
