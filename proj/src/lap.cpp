#include "deanon/lap.hpp"

#include <limits>
#include <vector>

namespace deanon {

double assignment_cost(const Matrix& cost, const Permutation& perm) {
    require_dims(static_cast<Index>(perm.size()) == cost.rows(), "assignment size differs from cost matrix");
    double total = 0.0;
    for (Index i = 0; i < cost.rows(); ++i) total += cost(i, perm[i]);
    return total;
}

Assignment solve_lap(const Matrix& cost) {
    require_dims(cost.rows() == cost.cols(), "cost matrix must be square");
    if (!cost.allFinite()) throw ParameterError("cost matrix has non-finite entries");
    const Index n = cost.rows();
    if (n == 0) return {Permutation::identity(0), 0.0};

    using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    const RowMajor c = cost;
    constexpr double inf = std::numeric_limits<double>::infinity();

    // 1-based with a virtual column 0 holding the row being inserted.
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), min_slack(n + 1);
    std::vector<Index> row_of(n + 1, 0), way(n + 1, 0);
    std::vector<char> used(n + 1);

    for (Index i = 1; i <= n; ++i) {
        row_of[0] = i;
        Index j0 = 0;
        std::fill(min_slack.begin(), min_slack.end(), inf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[j0] = 1;
            const Index i0 = row_of[j0];
            const double* crow = c.data() + (i0 - 1) * n;
            const double ui0 = u[i0];
            double delta = inf;
            Index j1 = 0;
            for (Index j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double slack = crow[j - 1] - ui0 - v[j];
                if (slack < min_slack[j]) {
                    min_slack[j] = slack;
                    way[j] = j0;
                }
                if (min_slack[j] < delta) {
                    delta = min_slack[j];
                    j1 = j;
                }
            }
            for (Index j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    min_slack[j] -= delta;
                }
            }
            j0 = j1;
        } while (row_of[j0] != 0);
        do {
            const Index j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    std::vector<int> mapping(n);
    for (Index j = 1; j <= n; ++j) mapping[row_of[j] - 1] = static_cast<int>(j - 1);
    Permutation perm(std::move(mapping));
    const double total = assignment_cost(cost, perm);
    return {std::move(perm), total};
}

Permutation nearest_permutation(const Matrix& p) {
    require_dims(p.rows() == p.cols(), "matrix must be square");
    return solve_lap(-p).perm;
}

}  // namespace deanon
