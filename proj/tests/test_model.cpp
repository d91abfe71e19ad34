#include <doctest.h>

#include <cmath>

#include "deanon/model.hpp"
#include "support.hpp"

using namespace deanon;

TEST_CASE("weight reference values") {
    CHECK(weight_of(0.25, 0.5, 0.5) == doctest::Approx(std::log(13.0)).epsilon(1e-14));
    CHECK(weight_of(0.5, 0.5, 0.5) == doctest::Approx(std::log(5.0)).epsilon(1e-14));
    CHECK(weight_of(1.0, 0.3, 0.8) == 0.0);
    CHECK(weight_of(1.0 - 1e-15, 0.5, 0.5) >= 0.0);
}

TEST_CASE("weight domain errors") {
    CHECK_THROWS_AS(weight_of(0.0, 0.5, 0.5), ParameterError);
    CHECK_THROWS_AS(weight_of(1.2, 0.5, 0.5), ParameterError);
    CHECK_THROWS_AS(weight_of(0.5, 0.0, 0.5), ParameterError);
    CHECK_THROWS_AS(weight_of(0.5, 0.5, 1.0), ParameterError);
}

TEST_CASE("weights decrease with edge probability") {
    double prev = weight_of(1e-6, 0.6, 0.6);
    for (double p = 1e-3; p < 1.0; p += 0.05) {
        const double w = weight_of(p, 0.6, 0.6);
        CHECK(w < prev);
        prev = w;
    }
}

TEST_CASE("identical community rows give a constant off-diagonal weight matrix") {
    CommunityMatrix m(6, 2);
    for (Index i = 0; i < 6; ++i) m.set(i, 1, true);
    const auto w = build_weight_matrix(m, 3.0, 0.5, 0.5);
    const double c = w(0, 1);
    CHECK(c == doctest::Approx(std::sqrt(weight_of(edge_probability(1, 3.0), 0.5, 0.5))));
    for (Index i = 0; i < 6; ++i)
        for (Index j = 0; j < 6; ++j) CHECK(w(i, j) == (i == j ? 0.0 : c));
}

TEST_CASE("swapping two nodes with equal community rows leaves the weights unchanged") {
    Matrix rows(5, 3);
    rows << 1, 0, 1,  //
        0, 1, 0,      //
        1, 1, 0,      //
        1, 0, 1,      //
        0, 0, 1;
    const auto m = CommunityMatrix::from_matrix(rows);
    const auto w = build_weight_matrix(m, 2.0, 0.4, 0.7);
    const Permutation swap03({3, 1, 2, 0, 4});
    CHECK(conjugate(swap03, w.matrix()) == w.matrix());
    const Permutation swap01({1, 0, 2, 3, 4});
    CHECK(conjugate(swap01, w.matrix()) != w.matrix());
}

TEST_CASE("weights are invariant under any community-preserving permutation") {
    Rng rng(77);
    for (int t = 0; t < 10; ++t) {
        const auto s = osbm_generate(60, 3, 0.3, OsbmEdgeModel{3.0}, rng.next_u64());
        const auto w = build_weight_matrix(s.communities, 3.0, 0.6, 0.6);
        const Permutation p = community_preserving_permutation(s.communities, rng.next_u64());
        CHECK(conjugate(p, w.matrix()) == w.matrix());
    }
}

TEST_CASE("tiny edge probabilities need explicit clamping") {
    CommunityMatrix m(3, 1);
    m.set(0, 0, true);
    // x = 0 with a = 1e10 gives p ~ 1e-10 < 1e-9.
    CHECK_THROWS_AS(build_weight_matrix(m, 1e10, 0.5, 0.5), ParameterError);
    const auto w = build_weight_matrix(m, 1e10, 0.5, 0.5, true);
    CHECK(w(1, 2) == doctest::Approx(std::sqrt(weight_of(kMinEdgeProbability, 0.5, 0.5))));
}

TEST_CASE("unweighted matrix and default penalty") {
    const auto w = unweighted_matrix(4);
    CHECK(w.matrix().sum() == 12.0);
    CHECK(w.matrix().diagonal().isZero());
    CHECK(default_mu(w) == doctest::Approx(2.0 * 12.0 / 4.0));
}

TEST_CASE("instance assembly checks sizes and penalty") {
    AdjacencyMatrix a(4), b(4), c(3);
    CommunityMatrix m(4, 2);
    const auto w = unweighted_matrix(4);
    CHECK(make_instance(a, b, m, w, 0.5, 0.5).mu == doctest::Approx(6.0));
    CHECK(make_instance(a, b, m, w, 0.5, 0.5, 1.5).mu == 1.5);
    CHECK_THROWS_AS(make_instance(a, c, m, w, 0.5, 0.5), DimensionError);
    CHECK_THROWS_AS(make_instance(a, b, m, w, 0.5, 0.5, -1.0), ParameterError);
    CHECK_THROWS_AS(WeightMatrix::from_matrix(-Matrix::Ones(2, 2)), ParameterError);
}
