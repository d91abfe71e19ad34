#pragma once

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

#include "deanon/harness.hpp"
#include "deanon/rng.hpp"

namespace testing {

using namespace deanon;

inline InstanceBundle small_instance(Index n, std::uint64_t seed, Index q = 3, double a = 3.0, double s = 0.7,
                                     double membership = 0.4, bool weighted = true) {
    SyntheticSpec spec;
    spec.n = n;
    spec.q = q;
    spec.a = a;
    spec.s1 = spec.s2 = s;
    spec.membership_prob = membership;
    spec.weighted = weighted;
    spec.seed = seed;
    return make_synthetic(spec);
}

inline Permutation random_perm(std::size_t n, Rng& rng) {
    std::vector<int> m(n);
    std::iota(m.begin(), m.end(), 0);
    rng.shuffle(m);
    return Permutation(std::move(m));
}

// Convex combination of k random permutation matrices: doubly stochastic by construction.
inline Matrix random_doubly_stochastic(Index n, Rng& rng, int k = 4) {
    Matrix p = Matrix::Zero(n, n);
    std::vector<double> w(k);
    double total = 0.0;
    for (auto& x : w) total += (x = 0.1 + rng.uniform01());
    for (int t = 0; t < k; ++t) p += (w[t] / total) * random_perm(n, rng).to_matrix();
    return p;
}

inline Matrix random_matrix(Index r, Index c, Rng& rng, double lo = -1.0, double hi = 1.0) {
    Matrix m(r, c);
    for (Index j = 0; j < c; ++j)
        for (Index i = 0; i < r; ++i) m(i, j) = lo + (hi - lo) * rng.uniform01();
    return m;
}

// Independent oracle for assignment: try every mapping.
inline double brute_assignment(const Matrix& cost) {
    std::vector<int> m(cost.rows());
    std::iota(m.begin(), m.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double c = 0.0;
        for (Index i = 0; i < cost.rows(); ++i) c += cost(i, m[i]);
        best = std::min(best, c);
    } while (std::next_permutation(m.begin(), m.end()));
    return best;
}

// Literal dense evaluation of the penalized objective, kept apart from the library code.
inline double dense_f0(const Matrix& p, const ProblemInstance& inst) {
    const Matrix& a = inst.published.matrix();
    const Matrix& b = inst.auxiliary.matrix();
    const Matrix& w = inst.weights.matrix();
    const Matrix& m = inst.communities.matrix();
    double g = 0.0;
    const Matrix pap = p * a * p.transpose();
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j) {
            const double r = w(i, j) * (pap(i, j) - b(i, j));
            g += r * r;
        }
    const Matrix pen = p * m - m;
    return g + inst.mu * pen.squaredNorm();
}

}  // namespace testing
