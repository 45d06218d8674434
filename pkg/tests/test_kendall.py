import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from depdist.errors import UndefinedCorrelationError
from depdist.stats.kendall import (
    _counts,
    exact_null_distribution,
    exact_p_value,
    inversion_counts,
    kendall_tau_b,
    normal_p_value,
)


def pair_count_tau(x, y) -> float:
    """tau-b straight from the definition, O(n^2)."""
    x, y = [float(v) for v in x], [float(v) for v in y]
    n = len(x)
    s = tx = ty = 0
    for i, j in itertools.combinations(range(n), 2):
        dx = (x[i] > x[j]) - (x[i] < x[j])
        dy = (y[i] > y[j]) - (y[i] < y[j])
        s += dx * dy
        tx += dx == 0
        ty += dy == 0
    n0 = n * (n - 1) // 2
    return max(-1.0, min(1.0, s / math.sqrt((n0 - tx) * (n0 - ty))))


def test_perfect_concordance():
    r = kendall_tau_b([1, 2, 3, 4, 5], [1, 2, 3, 4, 5])
    assert r.tau == 1.0 and r.n == 5
    assert r.p_two_sided == pytest.approx(2 / 120)


def test_perfect_discordance():
    r = kendall_tau_b([1, 2, 3, 4, 5], [5, 4, 3, 2, 1])
    assert r.tau == -1.0


def test_constant_sample():
    with pytest.raises(UndefinedCorrelationError):
        kendall_tau_b([1, 1, 1], [1, 2, 3])


def test_length_checks():
    with pytest.raises(ValueError):
        kendall_tau_b([1, 2], [1, 2])
    with pytest.raises(ValueError):
        kendall_tau_b([1, 2, 3], [1, 2])


def test_matches_pair_counting_random_8():
    rng = np.random.default_rng(1)
    for _ in range(200):
        x, y = rng.normal(size=8), rng.normal(size=8)
        assert kendall_tau_b(x, y).tau == pair_count_tau(x, y)


def test_matches_scipy():
    rng = np.random.default_rng(2)
    for n in (5, 12, 17, 30):
        for ties in (False, True):
            if ties:
                x, y = rng.integers(0, 4, n), rng.integers(0, 5, n)
            else:
                x, y = rng.normal(size=n), rng.normal(size=n)
            ours = kendall_tau_b(x, y)
            ref = stats.kendalltau(x, y)
            assert ours.tau == pytest.approx(ref.statistic, abs=1e-12)
            if not ties and n <= 20:
                assert ours.p_two_sided == pytest.approx(stats.kendalltau(x, y, method="exact").pvalue, abs=1e-12)


def test_inversion_counts_small():
    assert inversion_counts(1) == (1,)
    assert inversion_counts(3) == (1, 2, 2, 1)
    assert inversion_counts(4) == (1, 3, 5, 6, 5, 3, 1)
    # brute force for n = 6
    counts = [0] * 16
    for p in itertools.permutations(range(6)):
        counts[sum(a > b for a, b in itertools.combinations(p, 2))] += 1
    assert inversion_counts(6) == tuple(counts)


@pytest.mark.parametrize("n", range(2, 13))
def test_null_distribution_sums_to_one_and_symmetric(n):
    dist = exact_null_distribution(n)
    assert sum(dist.values()) == 1
    for s, p in dist.items():
        assert dist[-s] == p


def test_exact_p_value_by_enumeration():
    n = 6
    for s in range(-15, 16, 2):
        extreme = sum(
            1
            for p in itertools.permutations(range(n))
            if abs(15 - 2 * sum(a > b for a, b in itertools.combinations(p, 2))) >= abs(s)
        )
        assert exact_p_value(s, n) == pytest.approx(min(1.0, extreme / math.factorial(n)), abs=1e-15)


def test_normal_approximation_close_to_exact_n17():
    rng = np.random.default_rng(17)
    worst = 0.0
    for _ in range(200):
        x, y = rng.normal(size=17), rng.normal(size=17)
        c = _counts(list(x), list(y))
        worst = max(worst, abs(exact_p_value(c.s, 17) - normal_p_value(c)))
    assert worst <= 0.01


def test_method_selection():
    x = list(range(17))
    y = [3, 1, 2, 5, 4, 7, 6, 9, 8, 11, 10, 13, 12, 15, 14, 0, 16]
    assert kendall_tau_b(x, y).method == "exact"
    assert kendall_tau_b(x, y, exact_max_n=10).method == "normal"
    y_tied = y[:-1] + [15]
    assert kendall_tau_b(x, y_tied).method == "normal"


@settings(max_examples=150, deadline=None)
@given(
    st.lists(st.tuples(st.integers(-5, 5), st.integers(-5, 5)), min_size=3, max_size=15),
)
def test_tau_matches_oracle_with_ties(pairs):
    x = [p[0] for p in pairs]
    y = [p[1] for p in pairs]
    if len(set(x)) == 1 or len(set(y)) == 1:
        return
    assert kendall_tau_b(x, y).tau == pair_count_tau(x, y)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.integers(-50, 50), st.integers(-50, 50)), min_size=3, max_size=15))
def test_antisymmetry_and_monotone_invariance(pairs):
    x = [p[0] for p in pairs]
    y = [p[1] for p in pairs]
    if len(set(x)) == 1 or len(set(y)) == 1:
        return
    r = kendall_tau_b(x, y)
    assert kendall_tau_b(x, [-v for v in y]).tau == pytest.approx(-r.tau, abs=1e-15)
    assert kendall_tau_b([3 * v + 1 for v in x], [v**3 for v in y]).tau == pytest.approx(r.tau, abs=1e-15)
    assert 0 < r.p_two_sided <= 1
