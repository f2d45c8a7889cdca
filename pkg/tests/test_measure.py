import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from subshift.core import GroupSpec, Pattern
from subshift.errors import Reducible
from subshift.measure import (
    MarkovMeasure,
    bernoulli_measure,
    cylinder_probability,
    is_irreducible,
    measure_entropy,
    parry_measure,
    sample_point,
    smb_check,
)
from subshift.sft import SftSpec, entropy_exact_1d, transfer_matrix_1d

PHI = (1 + math.sqrt(5)) / 2


@pytest.fixture(scope="module")
def golden_mu(golden):
    return parry_measure(transfer_matrix_1d(golden))


def test_parry_golden_closed_form(golden_mu):
    # P = [[1/phi, 1/phi^2], [1, 0]], pi = (phi^2, 1) / (1 + phi^2)
    assert golden_mu.P == pytest.approx(np.array([[1 / PHI, 1 / PHI ** 2], [1.0, 0.0]]), abs=1e-12)
    assert golden_mu.pi == pytest.approx(np.array([PHI ** 2, 1.0]) / (1 + PHI ** 2), abs=1e-12)
    assert golden_mu.pi @ golden_mu.P == pytest.approx(golden_mu.pi, abs=1e-12)


def test_variational_principle(golden, even):
    for spec in (golden, even):
        mu = parry_measure(transfer_matrix_1d(spec))
        assert abs(measure_entropy(mu) - entropy_exact_1d(spec)) < 1e-9
        assert mu.support_ok(transfer_matrix_1d(spec))


def test_bernoulli_entropy():
    assert measure_entropy(bernoulli_measure(("0", "1", "2"))) == pytest.approx(math.log2(3))
    assert measure_entropy(bernoulli_measure(("0", "1"), [1.0, 0.0])) == 0.0


def test_markov_measure_validation():
    with pytest.raises(ValueError):
        MarkovMeasure(("0", "1"), ((0,), (1,)), np.array([[0.5, 0.6], [1.0, 0.0]]), np.array([0.5, 0.5]))


def test_reducible_rejected():
    ab = ("0", "1")
    # forbid 10: once a 1 appears it stays, two classes
    spec = SftSpec(ab, GroupSpec("N", 1), (Pattern.word(ab, [1, 0]),))
    tm = transfer_matrix_1d(spec)
    assert not is_irreducible(tm.m)
    with pytest.raises(Reducible):
        parry_measure(tm)


def test_cylinders_sum_to_one(golden_mu, even):
    for length in range(1, 8):
        total = sum(2.0 ** cylinder_probability(golden_mu, w)
                    for w in itertools.product((0, 1), repeat=length))
        assert total == pytest.approx(1.0, abs=1e-12)
    mu = parry_measure(transfer_matrix_1d(even))
    total = sum(2.0 ** cylinder_probability(mu, w) for w in itertools.product((0, 1, 2), repeat=5))
    assert total == pytest.approx(1.0, abs=1e-12)


def test_cylinder_probability_values(golden_mu):
    assert cylinder_probability(golden_mu, [1, 1]) == -math.inf
    assert cylinder_probability(golden_mu, []) == 0.0
    # mu[0 1 0] = pi_0 * P_01 * P_10
    expected = math.log2(golden_mu.pi[0] * golden_mu.P[0, 1] * golden_mu.P[1, 0])
    assert cylinder_probability(golden_mu, Pattern.word(("0", "1"), [0, 1, 0])) == pytest.approx(expected)


def test_sample_point_seeded(golden_mu):
    a = sample_point(golden_mu, 42, 10_000)
    assert a == sample_point(golden_mu, 42, 10_000)
    assert a != sample_point(golden_mu, 43, 10_000)
    vals = a.values_in(a.sorted_points())
    assert len(vals) == 10_000
    assert not any(x == y == 1 for x, y in zip(vals, vals[1:]))
    # frequency of 1 under the stationary law is 1 / (1 + phi^2) = 0.2764
    assert abs(sum(vals) / len(vals) - 1 / (1 + PHI ** 2)) < 0.02


def test_smb_golden(golden_mu):
    rep = smb_check(golden_mu, range(100), 10_000)
    assert rep.support_violations == 0
    assert abs(rep.mean - math.log2(PHI)) < 0.01
    assert rep.max_deviation < 0.05
    assert [s.seed for s in rep.samples] == list(range(100))


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(0.05, 1.0), min_size=2, max_size=4), st.integers(0, 2 ** 64 - 1))
def test_bernoulli_smb_is_cross_entropy(weights, seed):
    probs = np.array(weights) / sum(weights)
    mu = bernoulli_measure(tuple(str(i) for i in range(len(probs))), probs)
    x = sample_point(mu, seed, 50)
    vals = x.values_in(x.sorted_points())
    assert cylinder_probability(mu, x) == pytest.approx(sum(math.log2(probs[v]) for v in vals))
