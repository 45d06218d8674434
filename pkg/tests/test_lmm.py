import math
import warnings

import numpy as np
import pytest

from depdist.errors import ConvergenceError, SingularDesignError
from depdist.stats.lmm import LmmFit, RandomInterceptModel, aic_select, fit_lmm, ols_loglik


def simulate(rng, n_groups=7, per_group=20, beta0=3.0, beta1=-5.0, sigma_u=1.0, sigma=0.5):
    g = np.repeat(np.arange(n_groups), per_group)
    x = rng.normal(size=g.size)
    u = rng.normal(0, sigma_u, n_groups)
    y = beta0 + beta1 * x + u[g] + rng.normal(0, sigma, g.size)
    return y, x, g


def grid_max(model, y, criterion="ml"):
    grid = np.concatenate([[0.0], np.logspace(-6, 3, 10_000)])
    return float(model.loglik(grid, y, criterion).max())


def test_recovers_slope(np_rng):
    y, x, g = simulate(np_rng)
    fit = fit_lmm(y, x, g)
    assert abs(fit.beta1 - (-5.0)) < 3 * fit.beta1_se
    assert fit.k == 4 and fit.AIC == pytest.approx(-2 * fit.logLik + 8)
    null = fit_lmm(y, None, g)
    assert null.k == 3 and null.beta1 is None
    assert null.AIC == pytest.approx(-2 * null.logLik + 6)


@pytest.mark.parametrize("criterion", ["ml", "reml"])
def test_profile_matches_grid(np_rng, criterion):
    for _ in range(10):
        y, x, g = simulate(np_rng, n_groups=5, per_group=6, sigma_u=np_rng.uniform(0, 2))
        model = RandomInterceptModel(x, g)
        fit = model.fit(y, criterion)
        assert fit.logLik >= grid_max(model, y, criterion) - 1e-6


def test_boundary_equals_ols(np_rng):
    y, x, g = simulate(np_rng, sigma_u=0.0)
    model = RandomInterceptModel(x, g)
    assert model.loglik(0.0, y)[0] == pytest.approx(ols_loglik(y, x), abs=1e-10)
    null = RandomInterceptModel(None, g)
    assert null.loglik(0.0, y)[0] == pytest.approx(ols_loglik(y, None), abs=1e-10)


def test_uninformative_groups_give_zero_variance():
    # identical group means: the family variance estimate sits on the boundary
    base = np.array([-1.0, 1.0, -0.5, 0.5])
    y = np.concatenate([base + 2.0 for _ in range(5)])
    g = np.repeat(np.arange(5), 4)
    fit = fit_lmm(y, None, g)
    assert fit.theta == 0.0 and fit.sigma_u2 == 0.0
    assert fit.logLik == pytest.approx(ols_loglik(y, None), abs=1e-10)


def test_matches_statsmodels(np_rng):
    sm = pytest.importorskip("statsmodels.formula.api")
    import pandas as pd

    y, x, g = simulate(np_rng, n_groups=6, per_group=8)
    df = pd.DataFrame({"y": y, "x": x, "g": g})
    for reml in (False, True):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            ref = sm.mixedlm("y ~ x", df, groups=df["g"]).fit(reml=reml)
        ours = fit_lmm(y, x, g, "reml" if reml else "ml")
        assert ours.logLik == pytest.approx(ref.llf, abs=1e-4)
        assert ours.beta1 == pytest.approx(ref.fe_params["x"], abs=1e-4)


def test_nesting_monotone_one_obs_per_group(np_rng):
    for _ in range(20):
        n = 12
        x = np_rng.normal(size=n)
        y = 1 + 0.3 * x + np_rng.normal(size=n)
        groups = np.arange(n)
        assert fit_lmm(y, x, groups).logLik >= fit_lmm(y, None, groups).logLik - 1e-9


def test_small_family_design(np_rng):
    families = ["IE"] * 11 + ["Turkic", "Japonic", "Koreanic", "ST", "TK", "Uralic"]
    x = np_rng.uniform(0.2, 0.4, 17)
    y = 5 - 8 * x + np_rng.normal(0, 0.3, 17)
    fit = fit_lmm(y, x, families)
    assert fit.sigma2 > 0 and fit.sigma_u2 >= 0
    assert math.isfinite(fit.AIC)


def test_singular_design():
    with pytest.raises(SingularDesignError):
        fit_lmm([1.0, 2.0, 3.0, 4.0], [2.0, 2.0, 2.0, 2.0], [0, 0, 1, 1])


def test_divergent_variance_ratio_reports_best_iterate():
    # no within-family variation at all: residual variance -> 0
    y = np.repeat([1.0, 3.0, 2.0, 5.0], 3)
    g = np.repeat(np.arange(4), 3)
    with pytest.raises(ConvergenceError) as info:
        fit_lmm(y, None, g)
    assert isinstance(info.value.best, LmmFit)


def test_input_checks():
    with pytest.raises(ValueError):
        fit_lmm([1.0, 2.0], None, [0, 0])
    with pytest.raises(ValueError):
        fit_lmm([1.0, 2.0, 3.0], [1.0, 2.0], [0, 0, 1])
    with pytest.raises(ValueError):
        fit_lmm([1.0, 2.0, 3.0], None, [0, 0, 1], criterion="bayes")


def _fit(aic, slope):
    k = 3 if slope is None else 4
    return LmmFit(beta0=0.0, beta1=slope, sigma_u2=0.0, sigma2=1.0, logLik=(2 * k - aic) / 2, AIC=aic, k=k, n=17)


def test_aic_select_mixed_wins():
    sel = aic_select(_fit(47.64, None), _fit(42.16, -4.0))
    assert sel.delta_aic == pytest.approx(5.48)
    assert sel.selected == "mixed"
    assert sel.prediction_confirmed


def test_aic_select_null_wins():
    sel = aic_select(_fit(23.9, None), _fit(32.28, -0.01))
    assert sel.selected == "null"
    assert not sel.prediction_confirmed


def test_aic_select_tie_prefers_null():
    sel = aic_select(_fit(30.0, None), _fit(30.0, -1.0))
    assert sel.delta_aic == 0 and sel.selected == "null"


def test_aic_select_sign_mismatch():
    sel = aic_select(_fit(47.64, None), _fit(42.16, 3.0), expected_sign=-1)
    assert sel.selected == "mixed" and not sel.prediction_confirmed


def test_aic_select_mismatched_data(np_rng):
    y, x, g = simulate(np_rng, per_group=3)
    null = fit_lmm(y, None, g)
    mixed = fit_lmm(y + 1.0, x, g)
    with pytest.raises(ValueError):
        aic_select(null, mixed)
    with pytest.raises(ValueError):
        aic_select(mixed, null)
