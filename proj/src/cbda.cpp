#include "deanon/cbda.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <numbers>

#include <nlohmann/json.hpp>

#include "deanon/lap.hpp"
#include "deanon/rng.hpp"

namespace deanon {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// Real roots of c3 x^3 + c2 x^2 + c1 x + c0, Newton-polished.
std::vector<double> real_cubic_roots(double c3, double c2, double c1, double c0) {
    const double scale = std::max({std::abs(c3), std::abs(c2), std::abs(c1), std::abs(c0)});
    std::vector<double> roots;
    if (scale == 0.0) return roots;
    c3 /= scale;
    c2 /= scale;
    c1 /= scale;
    c0 /= scale;
    constexpr double tiny = 1e-12;
    if (std::abs(c3) < tiny) {
        if (std::abs(c2) < tiny) {
            if (std::abs(c1) >= tiny) roots.push_back(-c0 / c1);
        } else {
            const double disc = c1 * c1 - 4.0 * c2 * c0;
            if (disc >= 0.0) {
                const double sq = std::sqrt(disc);
                const double q = -0.5 * (c1 + std::copysign(sq, c1));
                if (q != 0.0) roots.push_back(q / c2);
                if (q != 0.0) roots.push_back(c0 / q);
                else roots.push_back(0.0);
            }
        }
    } else {
        const double b = c2 / c3, c = c1 / c3, d = c0 / c3;
        const double shift = b / 3.0;
        const double p = c - b * b / 3.0;
        const double q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
        const double disc = q * q / 4.0 + p * p * p / 27.0;
        if (disc > 0.0) {
            const double sq = std::sqrt(disc);
            roots.push_back(std::cbrt(-q / 2.0 + sq) + std::cbrt(-q / 2.0 - sq) - shift);
        } else if (p == 0.0) {
            roots.push_back(-shift);
        } else {
            const double r = 2.0 * std::sqrt(-p / 3.0);
            const double arg = std::clamp(3.0 * q / (p * r), -1.0, 1.0);
            const double theta = std::acos(arg) / 3.0;
            for (int k = 0; k < 3; ++k) roots.push_back(r * std::cos(theta - 2.0 * std::numbers::pi * k / 3.0) - shift);
        }
    }
    for (double& x : roots) {
        for (int it = 0; it < 3; ++it) {
            const double f = ((c3 * x + c2) * x + c1) * x + c0;
            const double df = (3.0 * c3 * x + 2.0 * c2) * x + c1;
            if (df == 0.0) break;
            x -= f / df;
        }
    }
    return roots;
}

// The restriction of f_xi to P + g D, for g in [0, 1], from precomputed products:
//   (P + gD) A (P + gD)^T = X0 + g X1 + g^2 X2,   (P + gD) M = PM + g DM.
struct Segment {
    const ProblemInstance& inst;
    const Matrix& wsq;
    double xi;
    double mu;
    const Matrix& p;
    const Matrix& d;
    const Matrix& x0;
    const Matrix& x1;
    const Matrix& x2;
    const Matrix& pm;
    const Matrix& dm;
};

// Shared by the line search and the state update so both see identical bits.
void blend_quadratic(const Matrix& x0, const Matrix& x1, const Matrix& x2, double g, Matrix& out) {
    out = x0 + g * (x1 + g * x2);
}

void blend_linear(const Matrix& x0, const Matrix& x1, double g, Matrix& out) { out = x0 + g * x1; }

double graph_value(const Matrix& papt, const Matrix& b, const Matrix& wsq) {
    return ((papt - b).array().square() * wsq.array()).sum();
}

double penalty_value(const Matrix& pm, const Matrix& m, double mu) {
    return mu == 0.0 ? 0.0 : mu * (pm - m).squaredNorm();
}

double regularizer_value(const Matrix& p, double xi) {
    return xi == 0.0 ? 0.0 : xi * (static_cast<double>(p.rows()) - p.squaredNorm());
}

struct Scratch {
    Matrix papt, pm, p;
};

double evaluate(const Segment& s, double g, Scratch& scratch) {
    blend_quadratic(s.x0, s.x1, s.x2, g, scratch.papt);
    blend_linear(s.pm, s.dm, g, scratch.pm);
    blend_linear(s.p, s.d, g, scratch.p);
    return graph_value(scratch.papt, s.inst.auxiliary.matrix(), s.wsq) +
           penalty_value(scratch.pm, s.inst.communities.matrix(), s.mu) + regularizer_value(scratch.p, s.xi);
}

struct StepChoice {
    double gamma = 0.0;
    double value = 0.0;
    double value_at_zero = 0.0;
};

StepChoice minimize_segment(const Segment& s) {
    Scratch scratch;
    constexpr std::array<double, 5> nodes{0.0, 0.25, 0.5, 0.75, 1.0};
    Eigen::Matrix<double, 5, 5> vander;
    Eigen::Matrix<double, 5, 1> samples;
    for (int k = 0; k < 5; ++k) {
        double pw = 1.0;
        for (int e = 0; e < 5; ++e) {
            vander(k, e) = pw;
            pw *= nodes[k];
        }
        samples(k) = evaluate(s, nodes[k], scratch);
    }
    StepChoice best{0.0, samples(0), samples(0)};
    if (!samples.allFinite()) {
        best.value = std::numeric_limits<double>::quiet_NaN();
        return best;
    }
    const Eigen::Matrix<double, 5, 1> coef = vander.partialPivLu().solve(samples);
    auto poly = [&](double g) { return (((coef(4) * g + coef(3)) * g + coef(2)) * g + coef(1)) * g + coef(0); };

    std::vector<double> candidates{1.0};
    for (double r : real_cubic_roots(4.0 * coef(4), 3.0 * coef(3), 2.0 * coef(2), coef(1))) {
        if (r > 0.0 && r < 1.0) candidates.push_back(r);
    }
    // Safeguard against ill-conditioned root formulas: coarse grid minimum of the polynomial.
    double grid_best = 0.0, grid_value = poly(0.0);
    for (int k = 1; k <= 64; ++k) {
        const double g = k / 64.0;
        if (const double v = poly(g); v < grid_value) {
            grid_value = v;
            grid_best = g;
        }
    }
    if (grid_best > 0.0) candidates.push_back(grid_best);

    for (double g : candidates) {
        const double v = g == 1.0 ? samples(4) : evaluate(s, g, scratch);
        if (v < best.value) {
            best.gamma = g;
            best.value = v;
        }
    }
    return best;
}

// Mutable solver state for one start.
struct State {
    Matrix p, pa, papt, pm;
};

void refresh(State& st, const ProblemInstance& inst) {
    st.pa = st.p * inst.published.matrix();
    st.papt = st.pa * st.p.transpose();
    st.pm = st.p * inst.communities.matrix();
}

double state_value(const State& st, const ProblemInstance& inst, const Matrix& wsq, double mu, double xi) {
    return graph_value(st.papt, inst.auxiliary.matrix(), wsq) + penalty_value(st.pm, inst.communities.matrix(), mu) +
           regularizer_value(st.p, xi);
}

Matrix gradient(const State& st, const ProblemInstance& inst, const Matrix& wsq, double mu, double xi) {
    const Matrix ds = wsq.cwiseProduct(st.papt - inst.auxiliary.matrix());
    Matrix g = 4.0 * ds * st.pa;
    if (mu != 0.0) {
        const Matrix& m = inst.communities.matrix();
        g.noalias() += (2.0 * mu) * (st.pm - m) * m.transpose();
    }
    if (xi != 0.0) g -= (2.0 * xi) * st.p;
    return g;
}

bool near_permutation(const Matrix& p, double tol) {
    const double off = p.array().abs().min((1.0 - p.array()).abs()).maxCoeff();
    return off < tol && stochastic_violation(p) < tol;
}

struct RunOutcome {
    Matrix p;
    CbdaTrace trace;
};

RunOutcome run_path(const ProblemInstance& inst, const ResolvedCbdaParams& params, Matrix start) {
    const auto t_start = Clock::now();
    const Index n = inst.n();
    const Matrix& a = inst.published.matrix();
    const Matrix& m = inst.communities.matrix();
    const Matrix wsq = inst.weights.matrix().cwiseProduct(inst.weights.matrix());
    const double mu = params.mu;

    CbdaTrace trace;
    trace.params = params;
    State st;
    st.p = std::move(start);

    Matrix xa(n, n), y(n, n), x1(n, n), x2(n, n), xm(m.rows(), m.cols()), d(n, n), dm;
    bool capped = false;
    double xi = 0.0;

    auto fail = [&](const char* what) { throw CbdaNumericError(what, trace); };

    while (xi < params.xi_max && !near_permutation(st.p, 1e-6) && !capped) {
        const auto t_outer = Clock::now();
        refresh(st, inst);
        OuterStep rec;
        rec.xi = xi;
        double current = state_value(st, inst, wsq, mu, xi);
        if (!std::isfinite(current)) fail("non-finite objective");
        rec.objectives.push_back(current);
        rec.max_stochastic_violation = stochastic_violation(st.p);

        for (;;) {
            const Matrix grad = gradient(st, inst, wsq, mu, xi);
            if (!grad.allFinite()) fail("non-finite gradient");
            const Permutation x = solve_lap(grad).perm;
            const double gap = assignment_cost(grad, x) - grad.cwiseProduct(st.p).sum();
            if (gap >= -params.delta) break;

            // D = X - P. All products with X are row/column selections.
            for (Index i = 0; i < n; ++i) xa.row(i) = a.row(x[i]);
            for (Index j = 0; j < n; ++j) {
                for (Index i = 0; i < n; ++i) y(i, j) = st.pa(j, x[i]);  // X A P^T
            }
            for (Index j = 0; j < n; ++j) {
                for (Index i = 0; i < n; ++i) x2(i, j) = a(x[i], x[j]);  // X A X^T
            }
            for (Index i = 0; i < m.rows(); ++i) xm.row(i) = m.row(x[i]);
            d = -st.p;
            for (Index i = 0; i < n; ++i) d(i, x[i]) += 1.0;
            // D A P^T = Y - PAP^T;  X1 = DAP^T + (DAP^T)^T;  X2 = XAX^T - Y - Y^T + PAP^T
            x1 = y - st.papt;
            x1 += x1.transpose().eval();
            x2 -= y;
            x2 -= y.transpose();
            x2 += st.papt;
            dm = xm - st.pm;

            const Segment seg{inst, wsq, xi, mu, st.p, d, st.papt, x1, x2, st.pm, dm};
            const StepChoice choice = minimize_segment(seg);
            if (!std::isfinite(choice.value)) fail("non-finite objective in line search");

            const double g = choice.gamma;
            if (g > 0.0) {
                Matrix tmp;
                blend_quadratic(st.papt, x1, x2, g, tmp);
                st.papt.swap(tmp);
                blend_linear(st.pm, dm, g, tmp);
                st.pm.swap(tmp);
                blend_linear(st.p, d, g, tmp);
                st.p.swap(tmp);
                st.pa += g * (xa - st.pa);
            }
            const double next = choice.value;
            rec.step_sizes.push_back(g);
            rec.objectives.push_back(next);
            rec.max_stochastic_violation = std::max(rec.max_stochastic_violation, stochastic_violation(st.p));
            ++rec.inner_iterations;
            ++trace.total_inner_iterations;

            const bool settled = std::abs(next - current) < params.delta;
            current = next;
            if (params.max_total_iters != 0 && trace.total_inner_iterations >= params.max_total_iters) {
                capped = true;
                break;
            }
            if (settled || g == 0.0) break;
            if (rec.inner_iterations >= params.max_inner_iters) {
                rec.hit_inner_cap = true;
                break;
            }
        }
        rec.objective = current;
        rec.frob_sq = st.p.squaredNorm();
        rec.wall_ms = ms_since(t_outer);
        trace.steps.push_back(std::move(rec));
        xi += params.delta_xi;
    }

    if (capped) {
        trace.status = CbdaStatus::IterationCap;
    } else if (near_permutation(st.p, 1e-6)) {
        trace.status = CbdaStatus::ConvergedInOmega0;
    } else {
        trace.status = CbdaStatus::RoundedAtXiMax;
    }
    trace.wall_ms = ms_since(t_start);
    return {std::move(st.p), std::move(trace)};
}

Matrix barycenter(Index n) { return Matrix::Constant(n, n, 1.0 / static_cast<double>(n)); }

// Midpoint of the barycenter and a seeded random vertex.
Matrix random_interior(Index n, std::uint64_t seed) {
    std::vector<int> mapping(n);
    for (Index i = 0; i < n; ++i) mapping[i] = static_cast<int>(i);
    Rng rng(seed);
    rng.shuffle(mapping);
    return 0.5 * (barycenter(n) + Permutation(std::move(mapping)).to_matrix());
}

}  // namespace

const char* to_string(CbdaStatus s) {
    switch (s) {
        case CbdaStatus::ConvergedInOmega0: return "converged_in_omega0";
        case CbdaStatus::RoundedAtXiMax: return "rounded_at_xi_max";
        case CbdaStatus::IterationCap: return "iteration_cap";
    }
    return "unknown";
}

std::string CbdaTrace::to_json_lines() const {
    std::string out;
    for (std::size_t k = 0; k < steps.size(); ++k) {
        const OuterStep& s = steps[k];
        nlohmann::json j = {{"type", "outer_step"},
                            {"index", k},
                            {"xi", s.xi},
                            {"inner_iterations", s.inner_iterations},
                            {"objective", s.objective},
                            {"frob_sq", s.frob_sq},
                            {"step_sizes", s.step_sizes},
                            {"max_stochastic_violation", s.max_stochastic_violation},
                            {"hit_inner_cap", s.hit_inner_cap},
                            {"wall_ms", s.wall_ms}};
        out += j.dump();
        out += '\n';
    }
    nlohmann::json summary = {{"type", "summary"},
                              {"status", to_string(status)},
                              {"f0_final", f0_final},
                              {"outer_steps", steps.size()},
                              {"total_inner_iterations", total_inner_iterations},
                              {"restart_index", restart_index},
                              {"delta", params.delta},
                              {"delta_xi", params.delta_xi},
                              {"xi_max", params.xi_max},
                              {"mu", params.mu},
                              {"max_inner_iters", params.max_inner_iters},
                              {"max_total_iters", params.max_total_iters},
                              {"wall_ms", wall_ms}};
    out += summary.dump();
    out += '\n';
    return out;
}

bool same_path(const CbdaTrace& a, const CbdaTrace& b) {
    auto same_params = [](const ResolvedCbdaParams& x, const ResolvedCbdaParams& y) {
        return x.delta == y.delta && x.delta_xi == y.delta_xi && x.xi_max == y.xi_max && x.mu == y.mu &&
               x.max_inner_iters == y.max_inner_iters && x.max_total_iters == y.max_total_iters;
    };
    if (!same_params(a.params, b.params) || a.status != b.status || a.f0_final != b.f0_final ||
        a.total_inner_iterations != b.total_inner_iterations || a.restart_index != b.restart_index ||
        a.steps.size() != b.steps.size()) {
        return false;
    }
    for (std::size_t k = 0; k < a.steps.size(); ++k) {
        const OuterStep& x = a.steps[k];
        const OuterStep& y = b.steps[k];
        if (x.xi != y.xi || x.inner_iterations != y.inner_iterations || x.objective != y.objective ||
            x.frob_sq != y.frob_sq || x.step_sizes != y.step_sizes || x.objectives != y.objectives ||
            x.hit_inner_cap != y.hit_inner_cap) {
            return false;
        }
    }
    return true;
}

ResolvedCbdaParams resolve_params(const ProblemInstance& inst, const CbdaConfig& cfg) {
    const Index n = inst.n();
    if (n < 1) throw ParameterError("empty instance");
    if (cfg.max_inner_iters < 1) throw ParameterError("max_inner_iters must be at least 1");
    if (cfg.restarts < 0) throw ParameterError("restarts must be nonnegative");
    if (cfg.delta && !(*cfg.delta > 0.0)) throw ParameterError("delta must be positive");
    if (cfg.delta_xi && !(*cfg.delta_xi > 0.0)) throw ParameterError("delta_xi must be positive");
    if (cfg.xi_max && !(*cfg.xi_max > 0.0)) throw ParameterError("xi_max must be positive");
    if (cfg.mu && !(*cfg.mu >= 0.0)) throw ParameterError("mu must be nonnegative");

    ResolvedCbdaParams r;
    r.mu = cfg.mu.value_or(inst.mu);
    r.max_inner_iters = cfg.max_inner_iters;
    r.max_total_iters = cfg.max_total_iters;

    ProblemInstance scaled = inst;
    scaled.mu = r.mu;
    const Matrix start = barycenter(n);
    if (cfg.delta) {
        r.delta = *cfg.delta;
    } else {
        // A flat objective would give delta = 0; keep a floor so the stopping test stays meaningful.
        r.delta = std::max(1e-6 * f0(start, scaled), 1e-12);
    }
    if (cfg.xi_max) {
        r.xi_max = *cfg.xi_max;
    } else {
        const double g = grad_f_xi(start, scaled, 0.0).norm();
        r.xi_max = g > 0.0 ? 2.0 * g : 1.0;
    }
    r.delta_xi = cfg.delta_xi.value_or(r.xi_max / (20.0 * static_cast<double>(n)));
    return r;
}

CbdaResult cbda_solve(const ProblemInstance& inst, const CbdaConfig& cfg, std::uint64_t seed) {
    const ResolvedCbdaParams params = resolve_params(inst, cfg);
    ProblemInstance scaled = inst;
    scaled.mu = params.mu;

    std::optional<CbdaResult> best;
    for (int r = 0; r <= cfg.restarts; ++r) {
        Matrix start = r == 0 ? barycenter(inst.n()) : random_interior(inst.n(), Rng::derive(seed, r));
        RunOutcome run = run_path(scaled, params, std::move(start));
        Permutation perm = nearest_permutation(run.p);
        run.trace.f0_final = f0(perm, scaled);
        run.trace.restart_index = r;
        if (!best || run.trace.f0_final < best->trace.f0_final) {
            best = CbdaResult{std::move(perm), std::move(run.trace)};
        }
    }
    return std::move(*best);
}

double line_search(const Matrix& p, const Matrix& d, const ProblemInstance& inst, double xi) {
    const Index n = inst.n();
    require_dims(p.rows() == n && p.cols() == n && d.rows() == n && d.cols() == n, "line search dimensions");
    if (d.isZero(0.0)) return 0.0;
    const Matrix& a = inst.published.matrix();
    const Matrix& m = inst.communities.matrix();
    const Matrix wsq = inst.weights.matrix().cwiseProduct(inst.weights.matrix());
    const Matrix pa = p * a;
    const Matrix da = d * a;
    const Matrix x0 = pa * p.transpose();
    const Matrix dapt = da * p.transpose();
    const Matrix x1 = dapt + dapt.transpose();
    const Matrix x2 = da * d.transpose();
    const Matrix pm = p * m;
    const Matrix dm = d * m;
    const Segment seg{inst, wsq, xi, inst.mu, p, d, x0, x1, x2, pm, dm};
    return minimize_segment(seg).gamma;
}

bool is_near_permutation(const Matrix& p, double tol) { return near_permutation(p, tol); }

}  // namespace deanon
