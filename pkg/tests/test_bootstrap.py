import math

import numpy as np
import pytest

from depdist.errors import BootstrapError
from depdist.stats.bootstrap import (
    bootstrap_ci,
    bootstrap_replicates,
    percentile_indices,
)
from depdist.stats.lmm import LmmFit, fit_lmm


def design(rng, n_groups=6, per_group=3):
    g = np.repeat(np.arange(n_groups), per_group)
    return rng.normal(size=g.size), g


def test_percentile_indices():
    # 1-based order statistics floor(0.025 * 1000) = 25 and ceil(0.975 * 1000) = 975
    assert percentile_indices(999, 0.95) == (24, 974)
    assert percentile_indices(1000, 0.95) == (24, 975)
    assert percentile_indices(199, 0.90) == (9, 189)


def test_deterministic_given_seed(np_rng):
    x, g = design(np_rng)
    y = 1 - 2 * x + np_rng.normal(size=x.size)
    fit = fit_lmm(y, x, g)
    a = bootstrap_ci(fit, x, g, B=100, seed=11)
    b = bootstrap_ci(fit, x, g, B=100, seed=11)
    c = bootstrap_ci(fit, x, g, B=100, seed=12)
    assert a == b
    assert (a.lower, a.upper) != (c.lower, c.upper)


def test_endpoints_are_order_statistics(np_rng):
    x, g = design(np_rng)
    y = 0.5 * x + np_rng.normal(size=x.size)
    fit = fit_lmm(y, x, g)
    slopes, failures = bootstrap_replicates(fit, x, g, B=150, seed=4)
    ci = bootstrap_ci(fit, x, g, B=150, seed=4)
    assert failures == 0
    s = np.sort(slopes)
    lo, hi = percentile_indices(150, 0.95)
    assert (ci.lower, ci.upper) == (s[lo], s[hi])
    assert ci.lower < fit.beta1 < ci.upper


def test_replicates_independent_of_B(np_rng):
    # replicate i has its own stream, so a longer run extends a shorter one
    x, g = design(np_rng)
    y = x + np_rng.normal(size=x.size)
    fit = fit_lmm(y, x, g)
    short, _ = bootstrap_replicates(fit, x, g, B=20, seed=9)
    long, _ = bootstrap_replicates(fit, x, g, B=40, seed=9)
    np.testing.assert_array_equal(short, long[:20])


def test_argument_checks(np_rng):
    x, g = design(np_rng)
    y = x + np_rng.normal(size=x.size)
    fit = fit_lmm(y, x, g)
    with pytest.raises(ValueError):
        bootstrap_ci(fit, x, g, B=50)
    with pytest.raises(ValueError):
        bootstrap_ci(fit, x, g, B=100, level=1.0)
    with pytest.raises(ValueError):
        bootstrap_ci(fit_lmm(y, None, g), x, g, B=100)


def test_too_many_failures():
    # zero residual variance: every simulated response is fitted exactly,
    # the variance ratio diverges and each refit fails
    x = np.array([0.1, 0.5, 0.9, 0.2, 0.6, 1.0, 0.3, 0.7, 1.1])
    g = np.repeat(np.arange(3), 3)
    fit = LmmFit(beta0=1.0, beta1=-2.0, sigma_u2=1.0, sigma2=0.0, logLik=0.0, AIC=8.0, k=4, n=9)
    with pytest.raises(BootstrapError) as info:
        bootstrap_ci(fit, x, g, B=100, seed=0)
    assert info.value.failures > 5


@pytest.mark.slow
def test_coverage_under_null():
    # true slope 0: a 95% interval should cover it in 95% of simulated data
    # sets; the band is 3 binomial SDs for 200 trials
    rng = np.random.default_rng(2024)
    trials = 200
    covered = 0
    for t in range(trials):
        x, g = design(rng, n_groups=6, per_group=4)
        u = rng.normal(0, 1.0, 6)
        y = 2.0 + u[g] + rng.normal(0, 1.0, x.size)
        fit = fit_lmm(y, x, g)
        ci = bootstrap_ci(fit, x, g, B=199, seed=t)
        covered += ci.lower <= 0.0 <= ci.upper
    sd = math.sqrt(0.95 * 0.05 / trials)
    rate = covered / trials
    assert abs(rate - 0.95) <= 3 * sd, rate
