#include "deanon/model.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace deanon {

WeightMatrix WeightMatrix::from_matrix(const Matrix& m) {
    require_dims(m.rows() == m.cols(), "weight matrix must be square");
    if (!m.allFinite() || (m.array() < 0.0).any()) throw ParameterError("weights must be finite and nonnegative");
    if (m != m.transpose()) throw ParameterError("weight matrix must be symmetric");
    WeightMatrix w;
    w.entries_ = m;
    return w;
}

double weight_of(double p, double s1, double s2) {
    if (!(p > 0.0 && p <= 1.0)) throw ParameterError("edge probability must lie in (0, 1]: " + std::to_string(p));
    if (!(s1 > 0.0 && s1 < 1.0) || !(s2 > 0.0 && s2 < 1.0)) {
        throw ParameterError("sampling probabilities must lie in (0, 1) for weighting");
    }
    if (p == 1.0) return 0.0;
    const double observed_any = s1 + s2 - s1 * s2;
    const double w = std::log((1.0 - p * observed_any) / (p * (1.0 - s1) * (1.0 - s2)));
    // The ratio is >= 1 analytically; rounding may push it a hair below near p = 1.
    return w > 0.0 ? w : 0.0;
}

WeightMatrix build_weight_matrix(const CommunityMatrix& m, double a, double s1, double s2, bool allow_clamp) {
    const Index n = m.n();
    const Index q = m.communities();
    std::vector<double> by_shared(q + 1);
    for (Index x = 0; x <= q; ++x) {
        double p = edge_probability(static_cast<int>(x), a);
        if (p < kMinEdgeProbability) {
            if (!allow_clamp) {
                throw ParameterError("edge probability " + std::to_string(p) + " below the admissible minimum");
            }
            p = kMinEdgeProbability;
        }
        by_shared[x] = std::sqrt(weight_of(p, s1, s2));
    }
    Matrix w = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = i + 1; j < n; ++j) {
            w(i, j) = w(j, i) = by_shared[m.shared(i, j)];
        }
    }
    return WeightMatrix::from_matrix(w);
}

WeightMatrix unweighted_matrix(Index n) {
    Matrix w = Matrix::Ones(n, n);
    w.diagonal().setZero();
    return WeightMatrix::from_matrix(w);
}

double default_mu(const WeightMatrix& w) {
    if (w.n() == 0) return 0.0;
    return 2.0 * w.matrix().squaredNorm() / static_cast<double>(w.n());
}

ProblemInstance make_instance(AdjacencyMatrix a, AdjacencyMatrix b, CommunityMatrix m, WeightMatrix w, double s1,
                              double s2, std::optional<double> mu) {
    const Index n = a.n();
    require_dims(b.n() == n && m.n() == n && w.n() == n, "instance components differ in size");
    if (mu && !(*mu >= 0.0 && std::isfinite(*mu))) throw ParameterError("mu must be finite and nonnegative");
    ProblemInstance inst;
    inst.mu = mu ? *mu : default_mu(w);
    inst.published = std::move(a);
    inst.auxiliary = std::move(b);
    inst.communities = std::move(m);
    inst.weights = std::move(w);
    inst.s1 = s1;
    inst.s2 = s2;
    return inst;
}

}  // namespace deanon
