#pragma once

#include "pivlp/timeseries.hpp"

namespace pivlp {

enum class NormalizerKind { Plain, Weighted };

struct Normalizer {
    double value = 0.0;
    LambdaGrid grid = LambdaGrid::uniform();
    NormalizerKind kind = NormalizerKind::Plain;
};

// Σ_i w_i |path(λ_i) − λ_i·path(1)|, the Riemann sum of ∫|M̂(λ) − λM̂|dλ.
Normalizer v_plain(const SequentialPath& path);

// Σ_i w_i λ_i |path(λ_i) − path(1)|; used for S, Q, κ and the multivariate S.
Normalizer v_weighted(const SequentialPath& path);

// (estimate − target) / v; throws DegenerateNormalizer when v is zero.
double studentize(double estimate, double target, const Normalizer& v);

}  // namespace pivlp
