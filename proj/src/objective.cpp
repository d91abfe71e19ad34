#include "deanon/objective.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace deanon {

namespace {

void check_square(const Matrix& p, const ProblemInstance& inst) {
    require_dims(p.rows() == inst.n() && p.cols() == inst.n(), "iterate size differs from instance");
}

void check_perm(const Permutation& p, const ProblemInstance& inst) {
    require_dims(static_cast<Index>(p.size()) == inst.n(), "permutation size differs from instance");
}

}  // namespace

double stochastic_violation(const Matrix& p) {
    if (p.size() == 0) return 0.0;
    const double rows = (p.rowwise().sum().array() - 1.0).abs().maxCoeff();
    const double cols = (p.colwise().sum().array() - 1.0).abs().maxCoeff();
    return std::max(rows, cols);
}

bool is_doubly_stochastic(const Matrix& p, double tol) {
    if (p.rows() != p.cols()) return false;
    if ((p.array() < -tol).any() || (p.array() > 1.0 + tol).any()) return false;
    return stochastic_violation(p) <= tol;
}

Matrix residual(const Matrix& p, const ProblemInstance& inst) {
    check_square(p, inst);
    const Matrix& a = inst.published.matrix();
    Matrix s = p * a * p.transpose();
    s -= inst.auxiliary.matrix();
    return inst.weights.matrix().cwiseProduct(s);
}

double f0(const Matrix& p, const ProblemInstance& inst) {
    double value = residual(p, inst).squaredNorm();
    if (inst.mu != 0.0) {
        const Matrix& m = inst.communities.matrix();
        value += inst.mu * (p * m - m).squaredNorm();
    }
    return value;
}

double f_xi(const Matrix& p, const ProblemInstance& inst, double xi) {
    return f0(p, inst) + xi * (static_cast<double>(inst.n()) - p.squaredNorm());
}

Matrix grad_f_xi(const Matrix& p, const ProblemInstance& inst, double xi) {
    check_square(p, inst);
    const Matrix& a = inst.published.matrix();
    const Matrix& w = inst.weights.matrix();
    const Matrix pa = p * a;
    Matrix s = pa * p.transpose();
    s -= inst.auxiliary.matrix();
    const Matrix ds = w.cwiseProduct(w).cwiseProduct(s);
    Matrix g = 4.0 * ds * pa;
    if (inst.mu != 0.0) {
        const Matrix& m = inst.communities.matrix();
        g.noalias() += 2.0 * inst.mu * (p * m - m) * m.transpose();
    }
    if (xi != 0.0) g -= 2.0 * xi * p;
    return g;
}

double graph_term(const Permutation& p, const ProblemInstance& inst) {
    check_perm(p, inst);
    const Index n = inst.n();
    const Matrix& a = inst.published.matrix();
    const Matrix& b = inst.auxiliary.matrix();
    const Matrix& w = inst.weights.matrix();
    double value = 0.0;
    for (Index j = 0; j < n; ++j) {
        const Index pj = p[j];
        for (Index i = 0; i < n; ++i) {
            const double d = w(i, j) * (a(p[i], pj) - b(i, j));
            value += d * d;
        }
    }
    return value;
}

double f0(const Permutation& p, const ProblemInstance& inst) {
    double value = graph_term(p, inst);
    if (inst.mu != 0.0) {
        const Matrix& m = inst.communities.matrix();
        double penalty = 0.0;
        for (Index c = 0; c < m.cols(); ++c) {
            for (Index i = 0; i < m.rows(); ++i) {
                const double d = m(p[i], c) - m(i, c);
                penalty += d * d;
            }
        }
        value += inst.mu * penalty;
    }
    return value;
}

double mmse_objective(const Permutation& p, const ProblemInstance& inst) {
    check_perm(p, inst);
    if (p.size() > kOracleMaxN) throw CapacityError("mmse_objective is exhaustive; n is limited to 8");
    std::vector<int> candidate(p.size());
    std::iota(candidate.begin(), candidate.end(), 0);
    double total = 0.0;
    do {
        const Permutation p0(candidate);
        const auto distance = 2.0 * static_cast<double>(nme(p, p0));
        if (distance != 0.0) total += distance * graph_term(p0, inst);
    } while (std::next_permutation(candidate.begin(), candidate.end()));
    return total;
}

std::size_t nme(const Permutation& p, const Permutation& p0) {
    require_dims(p.size() == p0.size(), "permutation sizes differ");
    std::size_t count = 0;
    for (std::size_t i = 0; i < p.size(); ++i) count += p[i] != p0[i];
    return count;
}

double accuracy(const Permutation& p, const Permutation& p0) {
    if (p.size() == 0) return 1.0;
    return 1.0 - static_cast<double>(nme(p, p0)) / static_cast<double>(p.size());
}

double relative_nme(const Permutation& p, const Permutation& p0) {
    if (p.size() == 0) return 0.0;
    return static_cast<double>(nme(p, p0)) / static_cast<double>(p.size());
}

}  // namespace deanon
