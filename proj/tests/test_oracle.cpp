#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "deanon/oracle.hpp"
#include "support.hpp"

using namespace deanon;

namespace {

std::vector<Permutation> all_perms(std::size_t n) {
    std::vector<int> m(n);
    std::iota(m.begin(), m.end(), 0);
    std::vector<Permutation> out;
    do out.emplace_back(m);
    while (std::next_permutation(m.begin(), m.end()));
    return out;
}

ProblemInstance empty_instance(Index n) {
    AdjacencyMatrix e(n);
    return make_instance(e, e, CommunityMatrix::from_matrix(Matrix::Ones(n, 1)), unweighted_matrix(n), 0.5, 0.5,
                         0.0);
}

}  // namespace

TEST_CASE("wemp oracle on a relabeled lossless pair") {
    Rng rng(4);
    for (int t = 0; t < 5; ++t) {
        const Index n = 6;
        const auto m = CommunityMatrix::from_matrix(Matrix::Ones(n, 1));
        const AdjacencyMatrix u = osbm_edges(m, OsbmEdgeModel{1.0}, rng.next_u64());
        const Permutation p0 = testing::random_perm(n, rng);
        const auto inst = make_instance(u, conjugate(p0, u), m, unweighted_matrix(n), 0.5, 0.5, 0.0);
        const OracleResult o = brute_wemp(inst);
        CHECK(o.value == 0.0);
        CHECK(conjugate(o.perm, u) == conjugate(p0, u));
    }
}

TEST_CASE("wemp oracle matches an independent dense enumeration") {
    Matrix a = Matrix::Zero(3, 3);
    a(0, 1) = a(1, 0) = 1.0;
    Matrix b = Matrix::Zero(3, 3);
    b(1, 2) = b(2, 1) = 1.0;
    const auto inst = make_instance(AdjacencyMatrix::from_matrix(a), AdjacencyMatrix::from_matrix(b),
                                    CommunityMatrix::from_matrix(Matrix::Ones(3, 1)), unweighted_matrix(3), 0.5, 0.5,
                                    0.0);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : all_perms(3)) best = std::min(best, testing::dense_f0(p.to_matrix(), inst));
    CHECK(brute_wemp(inst).value == best);
    CHECK(best == 0.0);

    Rng rng(12);
    for (int t = 0; t < 10; ++t) {
        const auto bundle = testing::small_instance(5, rng.next_u64());
        double dense = std::numeric_limits<double>::infinity();
        for (const auto& p : all_perms(5)) dense = std::min(dense, testing::dense_f0(p.to_matrix(), bundle.instance));
        CHECK(brute_wemp(bundle.instance).value == doctest::Approx(dense).epsilon(1e-12));
    }
}

TEST_CASE("flat instances resolve ties to the identity") {
    const auto inst = empty_instance(4);
    const OracleResult w = brute_wemp(inst);
    CHECK(w.value == 0.0);
    CHECK(w.perm.is_identity());
    const OracleResult m = brute_mmse(inst);
    CHECK(m.perm.is_identity());
    CHECK(m.value == 0.0);
    CHECK(approx_ratio(inst) == 1.0);
}

TEST_CASE("mmse oracle on two nodes") {
    // A has the edge, B does not: every P0 leaves residual weight^2 * 2 entries.
    Matrix a = Matrix::Zero(2, 2);
    a(0, 1) = a(1, 0) = 1.0;
    const auto inst = make_instance(AdjacencyMatrix::from_matrix(a), AdjacencyMatrix(2),
                                    CommunityMatrix::from_matrix(Matrix::Identity(2, 2)), unweighted_matrix(2), 0.5,
                                    0.5, 0.0);
    // g(I) = ||I - I||^2 * 2 + ||I - S||^2 * 2 = 8; g(S) symmetric = 8.
    const Permutation id = Permutation::identity(2), sw({1, 0});
    CHECK(mmse_objective(id, inst) == 8.0);
    CHECK(mmse_objective(sw, inst) == 8.0);
    const OracleResult r = brute_mmse(inst);
    CHECK(r.value == 8.0);
    CHECK(r.perm.is_identity());
}

TEST_CASE("mmse oracle agrees with per-permutation evaluation") {
    Rng rng(8);
    for (int t = 0; t < 4; ++t) {
        const auto b = testing::small_instance(5, rng.next_u64());
        double best = -1.0;
        for (const auto& p : all_perms(5)) best = std::max(best, mmse_objective(p, b.instance));
        const OracleResult r = brute_mmse(b.instance);
        CHECK(r.value == doctest::Approx(best).epsilon(1e-12));
        CHECK(mmse_objective(r.perm, b.instance) == doctest::Approx(r.value).epsilon(1e-12));
    }
}

TEST_CASE("approximation ratio report") {
    Rng rng(15);
    for (int t = 0; t < 5; ++t) {
        const auto b = testing::small_instance(5, rng.next_u64());
        const RatioReport r = approx_ratio_report(b.instance);
        CHECK(r.ratio > 0.0);
        CHECK(r.ratio <= 1.0 + 1e-12);
        CHECK(r.g_wemp == doctest::Approx(mmse_objective(r.wemp.perm, b.instance)));
        if (r.wemp.perm == r.mmse.perm) CHECK(r.ratio == 1.0);
    }
}

TEST_CASE("oracle capacity limits") {
    const auto b9 = testing::small_instance(9, 1);
    const auto b8 = testing::small_instance(8, 1);
    CHECK_THROWS_AS(brute_wemp(b9.instance), CapacityError);
    CHECK_THROWS_AS(brute_mmse(b8.instance), CapacityError);
    CHECK_THROWS_AS(approx_ratio(b8.instance), CapacityError);
}
