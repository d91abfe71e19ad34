#pragma once

#include <cstddef>

#include "deanon/model.hpp"

namespace deanon {

// Relaxed iterates are plain dense matrices; this checks row/column sums and [0,1] entries.
inline constexpr double kDoublyStochasticTol = 1e-9;
bool is_doubly_stochastic(const Matrix& p, double tol = kDoublyStochasticTol);
// Largest |row sum - 1| or |column sum - 1|.
double stochastic_violation(const Matrix& p);

// W o (P A P^T - B), evaluated literally for any (relaxed) P.
Matrix residual(const Matrix& p, const ProblemInstance& inst);

// ||W o (P A P^T - B)||_F^2 + mu ||P M - M||_F^2
double f0(const Matrix& p, const ProblemInstance& inst);
// f0 + xi (n - ||P||_F^2)
double f_xi(const Matrix& p, const ProblemInstance& inst, double xi);
// 4 (W o W o S) P A + 2 mu (P M - M) M^T - 2 xi P, with S = P A P^T - B.
Matrix grad_f_xi(const Matrix& p, const ProblemInstance& inst, double xi);

// Same quantities on a permutation, in O(n^2 + nQ) by indexing.
double graph_term(const Permutation& p, const ProblemInstance& inst);
double f0(const Permutation& p, const ProblemInstance& inst);

// Largest n accepted by the exhaustive MMSE objective.
inline constexpr std::size_t kOracleMaxN = 8;

/// g(P) = sum over all permutations P0 of ||P - P0||_F^2 * ||W o (P0 A P0^T - B)||_F^2.
/// Exhaustive over n! terms; refuses n > kOracleMaxN.
double mmse_objective(const Permutation& p, const ProblemInstance& inst);

// Number of nodes mapped differently (= 0.5 ||P - P0||_F^2).
std::size_t nme(const Permutation& p, const Permutation& p0);
double accuracy(const Permutation& p, const Permutation& p0);
// Mismatch fraction nme / n.
double relative_nme(const Permutation& p, const Permutation& p0);

}  // namespace deanon
