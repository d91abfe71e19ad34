#pragma once

#include <optional>

#include "deanon/graph_core.hpp"

namespace deanon {

// Smallest edge probability admitted before the weight's log diverges.
inline constexpr double kMinEdgeProbability = 1e-9;

/// Symmetric nonnegative matrix holding sqrt(w_ij); zero diagonal.
class WeightMatrix {
public:
    WeightMatrix() = default;
    static WeightMatrix from_matrix(const Matrix& m);

    Index n() const { return entries_.rows(); }
    const Matrix& matrix() const { return entries_; }
    double operator()(Index i, Index j) const { return entries_(i, j); }

private:
    Matrix entries_;
};

/// Pair weight from the edge-existence likelihood ratio:
///   w = log((1 - p (s1 + s2 - s1 s2)) / (p (1 - s1)(1 - s2)))
/// Requires p in (0, 1] and s1, s2 in (0, 1). Exactly 0 at p = 1.
double weight_of(double p, double s1, double s2);

// entries(i, j) = sqrt(weight_of(edge_probability(C_i, C_j, a), s1, s2)), zero diagonal.
// Pair probabilities under kMinEdgeProbability are rejected unless allow_clamp.
WeightMatrix build_weight_matrix(const CommunityMatrix& m, double a, double s1, double s2, bool allow_clamp = false);

// All-ones off the diagonal: the plain edge-mismatch cost.
WeightMatrix unweighted_matrix(Index n);

/// One de-anonymization task. The hidden mapping is kept outside.
struct ProblemInstance {
    AdjacencyMatrix published;  // A
    AdjacencyMatrix auxiliary;  // B
    CommunityMatrix communities;
    WeightMatrix weights;
    double s1 = 0.5;
    double s2 = 0.5;
    double mu = 0.0;

    Index n() const { return published.n(); }
};

// Penalty coefficient that puts the community term on the graph term's scale: 2 ||W||_F^2 / n.
double default_mu(const WeightMatrix& w);

// Checks shared dimensions; mu defaults to default_mu(w).
ProblemInstance make_instance(AdjacencyMatrix a, AdjacencyMatrix b, CommunityMatrix m, WeightMatrix w, double s1,
                              double s2, std::optional<double> mu = std::nullopt);

}  // namespace deanon
