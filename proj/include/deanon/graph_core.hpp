#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "deanon/error.hpp"

namespace deanon {

using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Symmetric 0/1 adjacency matrix of an undirected simple graph.
/// Node indices are 0-based.
class AdjacencyMatrix {
public:
    AdjacencyMatrix() = default;
    explicit AdjacencyMatrix(Index n) : entries_(Matrix::Zero(n, n)) {}

    // Validates symmetry, binary entries and an empty diagonal.
    static AdjacencyMatrix from_matrix(const Matrix& m);

    Index n() const { return entries_.rows(); }
    const Matrix& matrix() const { return entries_; }

    bool has_edge(Index i, Index j) const { return entries_(i, j) != 0.0; }
    void add_edge(Index i, Index j);
    void remove_edge(Index i, Index j);
    std::size_t edge_count() const;

    friend bool operator==(const AdjacencyMatrix& a, const AdjacencyMatrix& b) {
        return a.entries_.rows() == b.entries_.rows() && a.entries_ == b.entries_;
    }

private:
    Matrix entries_;
};

/// n x Q binary matrix; row i is the community representation of node i.
class CommunityMatrix {
public:
    CommunityMatrix() = default;
    CommunityMatrix(Index n, Index q) : entries_(Matrix::Zero(n, q)) {}

    static CommunityMatrix from_matrix(const Matrix& m);

    Index n() const { return entries_.rows(); }
    Index communities() const { return entries_.cols(); }
    const Matrix& matrix() const { return entries_; }

    bool member(Index i, Index q) const { return entries_(i, q) != 0.0; }
    void set(Index i, Index q, bool v) { entries_(i, q) = v ? 1.0 : 0.0; }
    int shared(Index i, Index j) const;
    bool same_row(Index i, Index j) const { return entries_.row(i) == entries_.row(j); }
    Index row_size(Index i) const;

    friend bool operator==(const CommunityMatrix& a, const CommunityMatrix& b) {
        return a.entries_.rows() == b.entries_.rows() && a.entries_.cols() == b.entries_.cols() &&
               a.entries_ == b.entries_;
    }

private:
    Matrix entries_;
};

/// Bijection on {0..n-1}; mapping[i] = pi(i). As a matrix, P(i, pi(i)) = 1.
class Permutation {
public:
    Permutation() = default;
    explicit Permutation(std::vector<int> mapping);  // validates bijectivity

    static Permutation identity(std::size_t n);
    static Permutation from_matrix(const Matrix& m);  // requires an exact 0/1 permutation matrix

    std::size_t size() const { return mapping_.size(); }
    int operator[](std::size_t i) const { return mapping_[i]; }
    const std::vector<int>& mapping() const { return mapping_; }

    Permutation inverse() const;
    // (this * other) as matrices: i -> other[this[i]].
    Permutation then(const Permutation& other) const;
    Matrix to_matrix() const;
    bool is_identity() const;

    friend bool operator==(const Permutation& a, const Permutation& b) { return a.mapping_ == b.mapping_; }

private:
    std::vector<int> mapping_;
};

// Edge probability model p = 1 / (1 + a * exp(-x)), x = shared communities.
struct OsbmEdgeModel {
    double a = 3.0;
};

double edge_probability(int shared, double a);
double edge_probability(const Eigen::RowVectorXd& ci, const Eigen::RowVectorXd& cj, double a);

struct OsbmSample {
    AdjacencyMatrix underlying;
    CommunityMatrix communities;
};

// Draws i.i.d. Bernoulli(membership_prob) community rows (all-zero rows are
// redrawn, up to kMaxRowDraws attempts) and then every pair i<j independently.
inline constexpr int kMaxRowDraws = 100;
OsbmSample osbm_generate(Index n, Index q, double membership_prob, const OsbmEdgeModel& model,
                         std::uint64_t seed);

// Edge stage alone, for callers that build or reshape the community matrix first.
AdjacencyMatrix osbm_edges(const CommunityMatrix& m, const OsbmEdgeModel& model, std::uint64_t seed);

// Keeps each edge with probability s, then relabels: out(i, j) = kept(pi(i), pi(j)).
AdjacencyMatrix sample_network(const AdjacencyMatrix& underlying, double s,
                               const std::optional<Permutation>& relabel, std::uint64_t seed);

Matrix apply_permutation(const Permutation& p, const Matrix& x);  // P X
Matrix conjugate(const Permutation& p, const Matrix& x);          // P X P^T
AdjacencyMatrix conjugate(const Permutation& p, const AdjacencyMatrix& a);

// Uniformly random permutation that only exchanges nodes with identical community rows.
Permutation community_preserving_permutation(const CommunityMatrix& m, std::uint64_t seed);

/// Underlying graph, its two observations and the hidden correspondence.
/// published = sample(U, s1); auxiliary = true_perm . sample(U, s2) . true_perm^T.
struct GraphTriple {
    AdjacencyMatrix underlying;
    AdjacencyMatrix published;
    AdjacencyMatrix auxiliary;
    CommunityMatrix communities;
    Permutation true_perm;
    double s1 = 1.0;
    double s2 = 1.0;
};

GraphTriple observe(const AdjacencyMatrix& underlying, const CommunityMatrix& communities, double s1,
                    double s2, std::uint64_t seed);

}  // namespace deanon
