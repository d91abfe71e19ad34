#include "deanon/oracle.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace deanon {

namespace {

std::vector<int> first_mapping(std::size_t n) {
    std::vector<int> m(n);
    std::iota(m.begin(), m.end(), 0);
    return m;
}

}  // namespace

OracleResult brute_wemp(const ProblemInstance& inst) {
    const auto n = static_cast<std::size_t>(inst.n());
    if (n > kWempOracleMaxN) throw CapacityError("brute_wemp is limited to n <= 8");
    auto mapping = first_mapping(n);
    OracleResult best{Permutation::identity(n), f0(Permutation::identity(n), inst)};
    while (std::next_permutation(mapping.begin(), mapping.end())) {
        Permutation p(mapping);
        const double v = f0(p, inst);
        if (v < best.value) best = {std::move(p), v};
    }
    return best;
}

OracleResult brute_mmse(const ProblemInstance& inst) {
    const auto n = static_cast<std::size_t>(inst.n());
    if (n > kMmseOracleMaxN) throw CapacityError("brute_mmse is limited to n <= 7");

    std::vector<std::vector<int>> perms;
    std::vector<double> norms;
    auto mapping = first_mapping(n);
    do {
        perms.push_back(mapping);
        norms.push_back(graph_term(Permutation(mapping), inst));
    } while (std::next_permutation(mapping.begin(), mapping.end()));

    std::size_t best_index = 0;
    double best_value = -1.0;
    for (std::size_t k = 0; k < perms.size(); ++k) {
        const auto& p = perms[k];
        double total = 0.0;
        for (std::size_t l = 0; l < perms.size(); ++l) {
            const auto& q = perms[l];
            std::size_t differ = 0;
            for (std::size_t i = 0; i < n; ++i) differ += p[i] != q[i];
            total += 2.0 * static_cast<double>(differ) * norms[l];
        }
        if (total > best_value) {
            best_value = total;
            best_index = k;
        }
    }
    return {Permutation(perms[best_index]), best_value};
}

RatioReport approx_ratio_report(const ProblemInstance& inst) {
    if (static_cast<std::size_t>(inst.n()) > kMmseOracleMaxN) throw CapacityError("approx_ratio is limited to n <= 7");
    RatioReport r;
    r.wemp = brute_wemp(inst);
    r.mmse = brute_mmse(inst);
    r.g_wemp = mmse_objective(r.wemp.perm, inst);
    r.ratio = r.mmse.value > 0.0 ? r.g_wemp / r.mmse.value : 1.0;
    return r;
}

double approx_ratio(const ProblemInstance& inst) { return approx_ratio_report(inst).ratio; }

}  // namespace deanon
