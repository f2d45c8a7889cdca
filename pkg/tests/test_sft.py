import itertools
import math

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from conftest import brute_count, fibonacci
from subshift.core import GroupSpec, Pattern, rectangle_points
from subshift.errors import EmptySubshiftSuspected, NotOneDimensional, StripTooNarrow, ZeroMatrix
from subshift.sft import (
    SftSpec,
    count_patterns,
    count_rectangle,
    entropy_exact_1d,
    entropy_series,
    enumerate_domain,
    enumerate_patterns,
    is_locally_admissible,
    log2_rate,
    power_iteration,
    random_admissible_pattern,
    spectral_radius,
    strip_entropy_bracket_2d,
    strip_transfer_matrix,
    transfer_matrix_1d,
)
from subshift.specfile import bundled_spec

PHI = (1 + math.sqrt(5)) / 2


def full_shift(q, variant, d):
    return SftSpec(tuple(str(i) for i in range(q)), GroupSpec(variant, d), ())


# --- counting -------------------------------------------------------------


@pytest.mark.parametrize("n", range(19))
def test_golden_mean_counts_are_fibonacci(golden, n):
    # binary words of length L without "11": F(L + 2)
    assert count_patterns(golden, n).count == fibonacci(n + 3)


def test_golden_margin_and_workers_agree(golden):
    a = count_patterns(golden, 18, margin=2)
    b = count_patterns(golden, 18, margin=2, workers=4)
    assert a == b
    assert a.count == 10946


@pytest.mark.parametrize("q,variant,d,n_max", [(2, "N", 1, 8), (3, "Z", 1, 4), (4, "N", 2, 2), (3, "Z", 2, 1)])
def test_full_shift_rate_is_exact(q, variant, d, n_max):
    series = entropy_series(full_shift(q, variant, d), n_max)
    for r in series.records:
        assert r.count == q ** r.box_size
        assert r.rate == math.log2(q)
    assert series.violations == []


def test_hard_squares_small_windows(hard):
    assert count_rectangle(hard, (2, 2)) == brute_count(hard, rectangle_points((2, 2))) == 7
    assert count_rectangle(hard, (3, 3)) == brute_count(hard, rectangle_points((3, 3))) == 63
    assert count_patterns(hard, 1).count == 63


def test_hard_squares_margin_keeps_count(hard):
    # every locally admissible hard-squares pattern extends (pad with zeros)
    assert count_patterns(hard, 1, margin=2).count == count_patterns(hard, 1).count


def test_hard_squares_parallel(hard):
    assert count_patterns(hard, 2, workers=3) == count_patterns(hard, 2)
    assert count_patterns(hard, 2).count == 55447


def test_margin_removes_dead_ends():
    # forbid 00 and 01: a 0 can never be followed, so over N every point is all 1s
    ab = ("0", "1")
    spec = SftSpec(ab, GroupSpec("N", 1), (Pattern.word(ab, [0, 0]), Pattern.word(ab, [0, 1])))
    assert count_patterns(spec, 3).count == 2  # 1111 and 1110
    assert count_patterns(spec, 3, margin=1).count == 1


def test_empty_subshift(tmp_path):
    spec = bundled_spec("empty")
    with pytest.raises(EmptySubshiftSuspected):
        count_patterns(spec, 0)


def test_enumerate_matches_count(golden, hard):
    pats = list(enumerate_patterns(golden, 5))
    assert len(pats) == fibonacci(8)
    assert len(set(pats)) == len(pats)
    assert all(is_locally_admissible(golden, p) for p in pats)
    keys = [p.values_in(p.sorted_points()) for p in pats]
    assert keys == sorted(keys)
    assert sum(1 for _ in enumerate_domain(hard, rectangle_points((2, 3)))) == brute_count(
        hard, rectangle_points((2, 3)))


def test_is_locally_admissible(golden):
    ab = golden.alphabet
    assert is_locally_admissible(golden, Pattern.word(ab, [1, 0, 1, 0]))
    assert not is_locally_admissible(golden, Pattern.word(ab, [0, 1, 1, 0]))
    # a forbidden translate that does not fit inside the domain is not a violation
    assert is_locally_admissible(golden, Pattern(ab, {(0,): 1, (2,): 1}))


def test_random_admissible_pattern_is_seeded(hard):
    pts = rectangle_points((4, 4))
    a = random_admissible_pattern(hard, pts, 5)
    assert a == random_admissible_pattern(hard, pts, 5)
    assert is_locally_admissible(hard, a)


def test_submultiplicativity_recorded(golden):
    series = entropy_series(golden, 8)
    assert series.diagnostics
    for c in series.diagnostics:
        assert c.holds == (series[c.n * c.k].count <= series[c.n].count ** c.k)
    assert series.violations == []


def test_log2_rate_exact_for_powers():
    assert log2_rate(3 ** 25, 25) == math.log2(3)
    assert log2_rate(1, 7) == 0.0
    with pytest.raises(ValueError):
        log2_rate(0, 1)


words = st.lists(st.integers(0, 2), min_size=1, max_size=3)


@settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(q=st.integers(2, 3), forbidden=st.lists(words, max_size=3), n=st.integers(0, 6), margin=st.integers(0, 2))
def test_random_1d_counts_match_brute_force(q, forbidden, n, margin):
    ab = tuple(str(i) for i in range(q))
    spec = SftSpec(ab, GroupSpec("N", 1), tuple(Pattern.word(ab, [s % q for s in w]) for w in forbidden))
    forbidden_text = ["".join(str(s % q) for s in w) for w in forbidden]
    # admissible words of length n + 1 + margin, cut down to their first n + 1 symbols
    prefixes = set()
    for values in itertools.product("".join(ab), repeat=n + 1 + margin):
        text = "".join(values)
        if not any(f in text for f in forbidden_text):
            prefixes.add(text[: n + 1])
    expected = len(prefixes)
    if expected == 0:
        with pytest.raises(EmptySubshiftSuspected):
            count_patterns(spec, n, margin)
    else:
        assert count_patterns(spec, n, margin).count == expected


# --- transfer matrices and exact 1-D entropy --------------------------------


def test_golden_transfer_matrix(golden):
    tm = transfer_matrix_1d(golden)
    assert tm.states == ((0,), (1,))
    assert tm.m.tolist() == [[1, 1], [1, 0]]
    for length in range(1, 12):
        assert tm.word_count(length) == fibonacci(length + 2)


def test_word_count_matches_brute_force(even):
    tm = transfer_matrix_1d(even)
    for length in range(tm.block, 8):
        assert tm.word_count(length) == brute_count(even, [(i,) for i in range(length)])


def test_entropy_exact_golden(golden):
    assert entropy_exact_1d(golden) == pytest.approx(math.log2(PHI), abs=1e-9)
    assert abs(entropy_exact_1d(golden) - 0.694241913631) < 1e-9


def test_entropy_exact_even_shift(even):
    # the even shift has the same entropy as the golden mean shift
    assert entropy_exact_1d(even) == pytest.approx(math.log2(PHI), abs=1e-9)


def test_entropy_exact_full_and_errors(full2, hard):
    assert entropy_exact_1d(full2) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(NotOneDimensional):
        entropy_exact_1d(hard)
    with pytest.raises((ZeroMatrix, EmptySubshiftSuspected)):
        entropy_exact_1d(bundled_spec("empty"))


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 6).flatmap(
    lambda k: st.lists(st.lists(st.integers(0, 1), min_size=k, max_size=k), min_size=k, max_size=k)))
def test_spectral_radius_matches_eigvals(rows):
    m = np.array(rows)
    oracle = max(abs(np.linalg.eigvals(m.astype(float)))) if m.any() else 0.0
    assert spectral_radius(m) == pytest.approx(oracle, abs=1e-7)


def test_power_iteration_vector():
    lam, v = power_iteration(np.array([[1, 1], [1, 0]]), vector_tol=1e-13)
    assert lam == pytest.approx(PHI, abs=1e-12)
    assert v == pytest.approx(np.array([PHI, 1]) / (PHI + 1), abs=1e-9)


# --- 2-D strips -------------------------------------------------------------


def test_strip_matrix_width_one_is_golden(hard):
    # a height-1 strip of hard squares is the golden mean shift
    tm = strip_transfer_matrix(hard, 1)
    assert tm.m.tolist() == [[1, 1], [1, 0]]


def test_strip_brackets_nested(hard):
    br = strip_entropy_bracket_2d(hard, range(1, 9))
    uppers = [b.upper for b in br]
    assert all(b <= a + 1e-12 for a, b in zip(uppers, uppers[1:]))
    assert all(b.lower <= b.upper + 1e-12 for b in br)
    assert br[0].upper == pytest.approx(math.log2(PHI), abs=1e-9)
    assert br[-1].upper - br[-1].lower <= 0.1
    assert br[-1].lower <= 0.5879 <= br[-1].upper


def test_strip_too_narrow():
    ab = ("0", "1")
    vertical_only = SftSpec(ab, GroupSpec("Z", 2), (Pattern(ab, {(0, 0): 1, (1, 0): 1}),))
    with pytest.raises(StripTooNarrow):
        strip_transfer_matrix(vertical_only, 1)
    assert strip_entropy_bracket_2d(vertical_only, [2])[0].lower is None
    with pytest.raises(StripTooNarrow):
        strip_transfer_matrix(bundled_spec("hard_squares"), 0)
