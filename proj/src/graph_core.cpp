#include "deanon/graph_core.hpp"

#include <cmath>
#include <map>
#include <string>

#include "deanon/rng.hpp"

namespace deanon {

namespace {

bool is_binary(const Matrix& m) {
    return ((m.array() == 0.0) || (m.array() == 1.0)).all();
}

void check_probability(double p, const char* name, bool allow_zero, bool allow_one) {
    const bool ok = std::isfinite(p) && (allow_zero ? p >= 0.0 : p > 0.0) && (allow_one ? p <= 1.0 : p < 1.0);
    if (!ok) throw ParameterError(std::string(name) + " out of range: " + std::to_string(p));
}

}  // namespace

AdjacencyMatrix draw_edges(const CommunityMatrix& m, const OsbmEdgeModel& model, Rng& rng);

AdjacencyMatrix AdjacencyMatrix::from_matrix(const Matrix& m) {
    require_dims(m.rows() == m.cols(), "adjacency matrix must be square");
    if (!is_binary(m)) throw ParameterError("adjacency matrix must be 0/1");
    if (m != m.transpose()) throw ParameterError("adjacency matrix must be symmetric");
    if (m.diagonal().any()) throw ParameterError("adjacency matrix must have an empty diagonal");
    AdjacencyMatrix a;
    a.entries_ = m;
    return a;
}

void AdjacencyMatrix::add_edge(Index i, Index j) {
    if (i == j) throw ParameterError("self-loops are not allowed");
    entries_(i, j) = 1.0;
    entries_(j, i) = 1.0;
}

void AdjacencyMatrix::remove_edge(Index i, Index j) {
    entries_(i, j) = 0.0;
    entries_(j, i) = 0.0;
}

std::size_t AdjacencyMatrix::edge_count() const {
    return static_cast<std::size_t>(entries_.sum() / 2.0);
}

CommunityMatrix CommunityMatrix::from_matrix(const Matrix& m) {
    if (m.cols() < 1) throw ParameterError("community matrix needs at least one community");
    if (!is_binary(m)) throw ParameterError("community matrix must be 0/1");
    CommunityMatrix c;
    c.entries_ = m;
    return c;
}

int CommunityMatrix::shared(Index i, Index j) const {
    return static_cast<int>(entries_.row(i).dot(entries_.row(j)));
}

Index CommunityMatrix::row_size(Index i) const {
    return static_cast<Index>(entries_.row(i).sum());
}

Permutation::Permutation(std::vector<int> mapping) : mapping_(std::move(mapping)) {
    std::vector<char> seen(mapping_.size(), 0);
    for (int v : mapping_) {
        if (v < 0 || static_cast<std::size_t>(v) >= mapping_.size() || seen[v]) {
            throw ParameterError("mapping is not a bijection");
        }
        seen[v] = 1;
    }
}

Permutation Permutation::identity(std::size_t n) {
    std::vector<int> m(n);
    for (std::size_t i = 0; i < n; ++i) m[i] = static_cast<int>(i);
    Permutation p;
    p.mapping_ = std::move(m);
    return p;
}

Permutation Permutation::from_matrix(const Matrix& m) {
    require_dims(m.rows() == m.cols(), "permutation matrix must be square");
    if (!is_binary(m)) throw ParameterError("permutation matrix must be 0/1");
    std::vector<int> mapping(m.rows(), -1);
    for (Index i = 0; i < m.rows(); ++i) {
        if (m.row(i).sum() != 1.0) throw ParameterError("permutation matrix row must hold exactly one 1");
        Index j;
        m.row(i).maxCoeff(&j);
        mapping[i] = static_cast<int>(j);
    }
    return Permutation(std::move(mapping));
}

Permutation Permutation::inverse() const {
    std::vector<int> inv(mapping_.size());
    for (std::size_t i = 0; i < mapping_.size(); ++i) inv[mapping_[i]] = static_cast<int>(i);
    Permutation p;
    p.mapping_ = std::move(inv);
    return p;
}

Permutation Permutation::then(const Permutation& other) const {
    require_dims(other.size() == size(), "permutation sizes differ");
    std::vector<int> out(mapping_.size());
    for (std::size_t i = 0; i < mapping_.size(); ++i) out[i] = other.mapping_[mapping_[i]];
    Permutation p;
    p.mapping_ = std::move(out);
    return p;
}

Matrix Permutation::to_matrix() const {
    const auto n = static_cast<Index>(mapping_.size());
    Matrix m = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i) m(i, mapping_[i]) = 1.0;
    return m;
}

bool Permutation::is_identity() const {
    for (std::size_t i = 0; i < mapping_.size(); ++i) {
        if (mapping_[i] != static_cast<int>(i)) return false;
    }
    return true;
}

double edge_probability(int shared, double a) {
    if (!(a > 0.0) || !std::isfinite(a)) throw ParameterError("edge model parameter a must be positive");
    if (shared < 0) throw ParameterError("shared community count must be nonnegative");
    return 1.0 / (1.0 + a * std::exp(-static_cast<double>(shared)));
}

double edge_probability(const Eigen::RowVectorXd& ci, const Eigen::RowVectorXd& cj, double a) {
    require_dims(ci.size() == cj.size(), "community vectors differ in length");
    return edge_probability(static_cast<int>(ci.dot(cj)), a);
}

OsbmSample osbm_generate(Index n, Index q, double membership_prob, const OsbmEdgeModel& model,
                         std::uint64_t seed) {
    if (n < 2) throw ParameterError("osbm_generate needs n >= 2");
    if (q < 1) throw ParameterError("osbm_generate needs Q >= 1");
    check_probability(membership_prob, "membership_prob", false, true);
    if (!(model.a > 0.0)) throw ParameterError("edge model parameter a must be positive");

    Rng rng(seed);
    CommunityMatrix m(n, q);
    for (Index i = 0; i < n; ++i) {
        int draws = 0;
        do {
            if (++draws > kMaxRowDraws) {
                throw ParameterError("could not draw a nonempty community row in " +
                                     std::to_string(kMaxRowDraws) + " attempts");
            }
            for (Index c = 0; c < q; ++c) m.set(i, c, rng.bernoulli(membership_prob));
        } while (m.row_size(i) == 0);
    }

    AdjacencyMatrix u = draw_edges(m, model, rng);
    return {std::move(u), std::move(m)};
}

AdjacencyMatrix osbm_edges(const CommunityMatrix& m, const OsbmEdgeModel& model, std::uint64_t seed) {
    if (!(model.a > 0.0)) throw ParameterError("edge model parameter a must be positive");
    Rng rng(seed);
    return draw_edges(m, model, rng);
}

AdjacencyMatrix draw_edges(const CommunityMatrix& m, const OsbmEdgeModel& model, Rng& rng) {
    const Index n = m.n();
    const Index q = m.communities();
    // One probability per shared-count value; x never exceeds Q.
    std::vector<double> p_by_shared(q + 1);
    for (Index x = 0; x <= q; ++x) p_by_shared[x] = edge_probability(static_cast<int>(x), model.a);

    AdjacencyMatrix u(n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = i + 1; j < n; ++j) {
            if (rng.bernoulli(p_by_shared[m.shared(i, j)])) u.add_edge(i, j);
        }
    }
    return u;
}

AdjacencyMatrix sample_network(const AdjacencyMatrix& underlying, double s,
                               const std::optional<Permutation>& relabel, std::uint64_t seed) {
    check_probability(s, "sampling probability", true, true);
    const Index n = underlying.n();
    if (relabel) require_dims(static_cast<Index>(relabel->size()) == n, "relabel size differs from graph");

    Rng rng(seed);
    AdjacencyMatrix kept(n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = i + 1; j < n; ++j) {
            if (underlying.has_edge(i, j) && rng.bernoulli(s)) kept.add_edge(i, j);
        }
    }
    if (!relabel) return kept;
    return conjugate(*relabel, kept);
}

Matrix apply_permutation(const Permutation& p, const Matrix& x) {
    require_dims(static_cast<Index>(p.size()) == x.rows(), "permutation size differs from matrix rows");
    Matrix out(x.rows(), x.cols());
    for (Index i = 0; i < x.rows(); ++i) out.row(i) = x.row(p[i]);
    return out;
}

Matrix conjugate(const Permutation& p, const Matrix& x) {
    require_dims(x.rows() == x.cols(), "conjugation needs a square matrix");
    require_dims(static_cast<Index>(p.size()) == x.rows(), "permutation size differs from matrix");
    const Index n = x.rows();
    Matrix out(n, n);
    for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i < n; ++i) out(i, j) = x(p[i], p[j]);
    }
    return out;
}

AdjacencyMatrix conjugate(const Permutation& p, const AdjacencyMatrix& a) {
    return AdjacencyMatrix::from_matrix(conjugate(p, a.matrix()));
}

Permutation community_preserving_permutation(const CommunityMatrix& m, std::uint64_t seed) {
    // Group nodes by identical rows, in order of first appearance.
    std::map<std::vector<char>, std::vector<int>> classes;
    std::vector<const std::vector<int>*> order;
    for (Index i = 0; i < m.n(); ++i) {
        std::vector<char> key(m.communities());
        for (Index c = 0; c < m.communities(); ++c) key[c] = m.member(i, c) ? 1 : 0;
        auto [it, inserted] = classes.try_emplace(std::move(key));
        if (inserted) order.push_back(&it->second);
        it->second.push_back(static_cast<int>(i));
    }
    Rng rng(seed);
    std::vector<int> mapping(m.n());
    for (const auto* members : order) {
        std::vector<int> targets = *members;
        rng.shuffle(targets);
        for (std::size_t k = 0; k < members->size(); ++k) mapping[(*members)[k]] = targets[k];
    }
    return Permutation(std::move(mapping));
}

GraphTriple observe(const AdjacencyMatrix& underlying, const CommunityMatrix& communities, double s1,
                    double s2, std::uint64_t seed) {
    require_dims(underlying.n() == communities.n(), "graph and community matrix sizes differ");
    GraphTriple t;
    t.underlying = underlying;
    t.communities = communities;
    t.s1 = s1;
    t.s2 = s2;
    t.true_perm = community_preserving_permutation(communities, Rng::derive(seed, 0));
    t.published = sample_network(underlying, s1, std::nullopt, Rng::derive(seed, 1));
    t.auxiliary = sample_network(underlying, s2, t.true_perm, Rng::derive(seed, 2));
    return t;
}

}  // namespace deanon
