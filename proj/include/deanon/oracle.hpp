#pragma once

#include <cstddef>

#include "deanon/objective.hpp"

namespace deanon {

// Exhaustive ground truth for small instances. Permutations are visited in
// lexicographic order of the mapping array; the first optimum found wins.

inline constexpr std::size_t kWempOracleMaxN = 8;
inline constexpr std::size_t kMmseOracleMaxN = 7;

struct OracleResult {
    Permutation perm;
    double value = 0.0;
};

// argmin of f0 (graph term plus community penalty) over all permutations.
OracleResult brute_wemp(const ProblemInstance& inst);

// argmax of the MMSE objective g over all permutations. The n! residual norms
// are computed once and reused; ||P - P0||_F^2 comes from the mapping arrays.
OracleResult brute_mmse(const ProblemInstance& inst);

struct RatioReport {
    double ratio = 1.0;
    OracleResult wemp;
    OracleResult mmse;
    double g_wemp = 0.0;  // g at the WEMP minimizer
};

// g(WEMP minimizer) / g(MMSE maximizer); 1 when g vanishes identically.
RatioReport approx_ratio_report(const ProblemInstance& inst);
double approx_ratio(const ProblemInstance& inst);

}  // namespace deanon
