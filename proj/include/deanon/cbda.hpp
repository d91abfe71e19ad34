#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "deanon/objective.hpp"

namespace deanon {

enum class InitStrategy { Barycenter };

/// Solver knobs. Unset optionals are resolved from the instance at solve time:
///   delta    = 1e-6 * f0(barycenter)
///   xi_max   = 2 * ||grad f0(barycenter)||_F
///   delta_xi = xi_max / (20 n)
struct CbdaConfig {
    std::optional<double> delta;
    std::optional<double> delta_xi;
    std::optional<double> xi_max;
    int max_inner_iters = 300;
    std::optional<double> mu;  // overrides the instance's penalty coefficient
    InitStrategy init = InitStrategy::Barycenter;
    // Extra solves from seeded random interior starts; the best f0 wins. 0 = plain algorithm.
    int restarts = 0;
    // Hard cap on inner iterations across all outer steps; 0 = unlimited.
    std::size_t max_total_iters = 0;
};

struct ResolvedCbdaParams {
    double delta = 0.0;
    double delta_xi = 0.0;
    double xi_max = 0.0;
    double mu = 0.0;
    int max_inner_iters = 0;
    std::size_t max_total_iters = 0;
};

enum class CbdaStatus { ConvergedInOmega0, RoundedAtXiMax, IterationCap };
const char* to_string(CbdaStatus s);

struct OuterStep {
    double xi = 0.0;
    int inner_iterations = 0;
    double objective = 0.0;  // f_xi at the end of the inner loop
    double frob_sq = 0.0;    // ||P||_F^2 at the end of the inner loop
    std::vector<double> step_sizes;
    std::vector<double> objectives;  // f_xi before the first step, then after every step
    double max_stochastic_violation = 0.0;
    bool hit_inner_cap = false;
    double wall_ms = 0.0;
};

struct CbdaTrace {
    ResolvedCbdaParams params;
    std::vector<OuterStep> steps;
    CbdaStatus status = CbdaStatus::RoundedAtXiMax;
    double f0_final = 0.0;
    std::size_t total_inner_iterations = 0;
    int restart_index = 0;  // which start produced the result
    double wall_ms = 0.0;

    // One JSON object per outer step, then a summary object.
    std::string to_json_lines() const;
};

// Equality of everything except wall-clock fields.
bool same_path(const CbdaTrace& a, const CbdaTrace& b);

struct CbdaResult {
    Permutation perm;
    CbdaTrace trace;
};

class CbdaNumericError : public Error {
public:
    CbdaNumericError(const std::string& what, CbdaTrace trace) : Error(what), trace_(std::move(trace)) {}
    const CbdaTrace& trace() const { return trace_; }

private:
    CbdaTrace trace_;
};

ResolvedCbdaParams resolve_params(const ProblemInstance& inst, const CbdaConfig& cfg);

/// Convex-concave path following over the Birkhoff polytope.
///
/// Starting from the barycenter with xi = 0, each outer step runs
/// conditional-gradient iterations on f_xi (linear assignment for the vertex,
/// exact line search for the step) and then raises xi by delta_xi, until the
/// iterate is a permutation matrix or xi reaches xi_max. An interior final
/// iterate is rounded with nearest_permutation.
CbdaResult cbda_solve(const ProblemInstance& inst, const CbdaConfig& cfg = {}, std::uint64_t seed = 0);

// Exact minimizer over [0, 1] of phi(g) = f_xi(P + g D). phi is a quartic; it is
// recovered from five samples and minimized over {0, 1} and its stationary points.
double line_search(const Matrix& p, const Matrix& d, const ProblemInstance& inst, double xi);

// Membership in the permutation vertices up to 1e-6.
bool is_near_permutation(const Matrix& p, double tol = 1e-6);

}  // namespace deanon
