import itertools
import math

import numpy as np
import pytest

import deanon


def test_reference_values():
    assert deanon.edge_probability(0, 3.0) == pytest.approx(0.25)
    assert deanon.weight_of(0.25, 0.5, 0.5) == pytest.approx(math.log(13.0))
    mapping, cost = deanon.solve_lap(np.array([[4.0, 1, 3], [2, 0, 5], [3, 2, 2]]))
    assert mapping == [1, 0, 2]
    assert cost == 5.0
    assert deanon.nme([1, 2, 3, 4, 0], [0, 1, 2, 3, 4]) == 5


def test_generate_is_reproducible():
    a, truth_a = deanon.generate(30, seed=4)
    b, truth_b = deanon.generate(30, seed=4)
    assert truth_a == truth_b
    assert np.array_equal(a.published, b.published)
    assert a.communities.shape == (30, 3)
    assert np.allclose(a.weights, a.weights.T)


def test_cbda_against_oracle():
    inst, truth = deanon.generate(6, q=3, a=3.0, s1=0.7, s2=0.7, membership_prob=0.4, seed=11)
    mapping, trace = deanon.cbda_solve(inst)
    best_mapping, best = deanon.brute_wemp(inst)
    assert sorted(mapping) == list(range(6))
    assert trace["f0_final"] >= best - 1e-9
    assert deanon.f0_perm(mapping, inst) == pytest.approx(trace["f0_final"])
    for objectives in trace["objectives"]:
        assert all(b <= a + 1e-12 for a, b in zip(objectives, objectives[1:]))
    assert 0.0 < deanon.approx_ratio(inst) <= 1.0 + 1e-12
    assert 0.0 <= deanon.accuracy(mapping, truth) <= 1.0


def test_gradient_finite_difference():
    inst, _ = deanon.generate(5, q=2, seed=3)
    rng = np.random.default_rng(0)
    p = sum(w * np.eye(5)[rng.permutation(5)] for w in (0.25, 0.25, 0.5))
    g = deanon.grad_f_xi(p, inst, 1.0)
    h = 1e-5
    for i, j in itertools.product(range(5), repeat=2):
        e = np.zeros((5, 5))
        e[i, j] = h
        fd = (deanon.f_xi(p + e, inst, 1.0) - deanon.f_xi(p - e, inst, 1.0)) / (2 * h)
        assert abs(fd - g[i, j]) <= 1e-5 * max(1.0, abs(fd))


def test_ga_history_non_increasing():
    inst, _ = deanon.generate(10, seed=2)
    mapping, best, history = deanon.ga_solve(inst, population_size=20, generations=30, seed=1)
    assert len(history) == 31
    assert all(b <= a for a, b in zip(history, history[1:]))
    assert history[-1] == best


def test_make_instance_and_errors():
    a = np.zeros((3, 3))
    a[0, 1] = a[1, 0] = 1.0
    inst = deanon.make_instance(a, a, np.eye(3), s1=0.5, s2=0.5)
    assert deanon.f0(np.eye(3), inst) == 0.0
    with pytest.raises(ValueError):
        deanon.make_instance(a, np.zeros((4, 4)), np.eye(3))
    with pytest.raises(ValueError):
        deanon.weight_of(0.0, 0.5, 0.5)
