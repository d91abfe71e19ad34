#pragma once

#include "deanon/graph_core.hpp"

namespace deanon {

struct Assignment {
    Permutation perm;  // row i -> column perm[i]
    double cost = 0.0;
};

/// Exact minimum-cost perfect assignment on a square cost matrix.
///
/// Shortest augmenting paths with dual potentials, O(n^3) worst case. Rows are
/// inserted in index order and columns scanned in ascending order with strict
/// comparisons, so among tied optima the lowest column index wins and the
/// result is reproducible.
Assignment solve_lap(const Matrix& cost);

// Permutation X maximizing <P, X>; returns P itself when P is a permutation.
Permutation nearest_permutation(const Matrix& p);

// sum_i cost(i, perm[i]) in row order.
double assignment_cost(const Matrix& cost, const Permutation& perm);

}  // namespace deanon
