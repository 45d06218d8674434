"""Kendall tau-b with exact and normal-approximation two-sided p-values."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction
from typing import Sequence

from scipy.stats import norm

from ..errors import UndefinedCorrelationError

EXACT_MAX_N = 20


@dataclass(frozen=True)
class CorrelationResult:
    n: int
    tau: float
    p_two_sided: float
    method: str = "exact"


@dataclass(frozen=True)
class _Counts:
    n: int
    s: int  # concordant - discordant
    ties_x: int  # pairs tied in x (including joint ties)
    ties_y: int
    x_groups: tuple[int, ...]
    y_groups: tuple[int, ...]


def _merge_count(a: list) -> int:
    """Sort ``a`` in place, returning the number of inversions (strict)."""
    n = len(a)
    if n < 2:
        return 0
    mid = n // 2
    left, right = a[:mid], a[mid:]
    inv = _merge_count(left) + _merge_count(right)
    i = j = k = 0
    while i < len(left) and j < len(right):
        if right[j] < left[i]:
            a[k] = right[j]
            inv += len(left) - i
            j += 1
        else:
            a[k] = left[i]
            i += 1
        k += 1
    a[k:] = left[i:] + right[j:]
    return inv


def _tie_groups(values) -> tuple[int, ...]:
    groups = []
    run = 1
    for prev, cur in zip(values, values[1:]):
        if cur == prev:
            run += 1
        else:
            if run > 1:
                groups.append(run)
            run = 1
    if run > 1:
        groups.append(run)
    return tuple(groups)


def _pairs(k: int) -> int:
    return k * (k - 1) // 2


def _counts(x: Sequence[float], y: Sequence[float]) -> _Counts:
    # Knight's O(n log n) method: sort by (x, y), count y-inversions.
    n = len(x)
    pts = sorted(zip(x, y))
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    x_groups = _tie_groups(xs)
    joint_groups = _tie_groups(pts)
    n1 = sum(_pairs(g) for g in x_groups)
    n3 = sum(_pairs(g) for g in joint_groups)
    swaps = _merge_count(ys)
    y_groups = _tie_groups(ys)  # ys is now sorted
    n2 = sum(_pairs(g) for g in y_groups)
    n0 = _pairs(n)
    s = n0 - n1 - n2 + n3 - 2 * swaps
    return _Counts(n, s, n1, n2, x_groups, y_groups)


@lru_cache(maxsize=None)
def inversion_counts(n: int) -> tuple[int, ...]:
    """Number of permutations of n items with k inversions, k = 0..n(n-1)/2."""
    counts = [1]
    for m in range(2, n + 1):
        new = [0] * (len(counts) + m - 1)
        # add the m-th item in any of m slots, creating 0..m-1 new inversions
        window = 0
        for k in range(len(new)):
            if k < len(counts):
                window += counts[k]
            if k - m >= 0:
                window -= counts[k - m]
            new[k] = window
        counts = new
    return tuple(counts)


def exact_null_distribution(n: int) -> dict[int, Fraction]:
    """P(S = s) under independence for tie-free samples, S = concordant - discordant."""
    counts = inversion_counts(n)
    total = math.factorial(n)
    n0 = _pairs(n)
    return {n0 - 2 * k: Fraction(c, total) for k, c in enumerate(counts)}


def exact_p_value(s: int, n: int) -> float:
    counts = inversion_counts(n)
    total = math.factorial(n)
    n0 = _pairs(n)
    # S = n0 - 2*inv, so S >= s  <=>  inv <= (n0 - s)/2
    k = (n0 - abs(s)) // 2
    tail = sum(counts[: k + 1])
    return min(1.0, float(Fraction(2 * tail, total)))


def normal_p_value(c: _Counts, continuity: bool = True) -> float:
    n = c.n
    v0 = n * (n - 1) * (2 * n + 5)
    vt = sum(t * (t - 1) * (2 * t + 5) for t in c.x_groups)
    vu = sum(u * (u - 1) * (2 * u + 5) for u in c.y_groups)
    t1 = sum(t * (t - 1) for t in c.x_groups)
    u1 = sum(u * (u - 1) for u in c.y_groups)
    t2 = sum(t * (t - 1) * (t - 2) for t in c.x_groups)
    u2 = sum(u * (u - 1) * (u - 2) for u in c.y_groups)
    var = (v0 - vt - vu) / 18.0
    var += t1 * u1 / (2.0 * n * (n - 1))
    if n > 2:
        var += t2 * u2 / (9.0 * n * (n - 1) * (n - 2))
    stat = abs(c.s)
    if continuity:
        stat = max(stat - 1, 0)
    z = stat / math.sqrt(var)
    return min(1.0, float(2 * norm.sf(z)))


def kendall_tau_b(
    x: Sequence[float],
    y: Sequence[float],
    *,
    exact_max_n: int = EXACT_MAX_N,
    continuity: bool = True,
) -> CorrelationResult:
    """Kendall tau-b and its two-sided p-value.

    The p-value is exact (permutation distribution of S) for tie-free data
    with n <= ``exact_max_n``; otherwise the normal approximation with the
    tie-adjusted variance of S is used.
    """
    if len(x) != len(y):
        raise ValueError("x and y differ in length")
    n = len(x)
    if n < 3:
        raise ValueError("need at least 3 observations")
    c = _counts(list(x), list(y))
    n0 = _pairs(n)
    if c.ties_x == n0 or c.ties_y == n0:
        raise UndefinedCorrelationError("tau is undefined for a constant sample")
    tau = c.s / math.sqrt((n0 - c.ties_x) * (n0 - c.ties_y))
    tau = max(-1.0, min(1.0, tau))
    if n <= exact_max_n and not c.x_groups and not c.y_groups:
        return CorrelationResult(n, tau, exact_p_value(c.s, n), "exact")
    return CorrelationResult(n, tau, normal_p_value(c, continuity), "normal")
