"""Random-intercept linear mixed models fitted by profiled (RE)ML.

Model: ``y_ij = b0 [+ b1 * x_ij] + u_j + e_ij`` with ``u_j ~ N(0, s_u^2)``
and ``e_ij ~ N(0, s^2)``.  Given the variance ratio ``theta = s_u^2 / s^2``
the fixed effects and ``s^2`` have closed forms, which leaves a
one-dimensional maximization over ``theta >= 0``.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from ..errors import ConvergenceError, SingularDesignError

CRITERIA = ("ml", "reml")
THETA_TOL = 1e-9
MAX_ITER = 500
# coarse scan over log10(theta) that seeds the bracketed search
_LOG10_GRID = np.linspace(-8.0, 8.0, 161)


@dataclass(frozen=True)
class LmmFit:
    beta0: float
    beta1: float | None
    sigma_u2: float
    sigma2: float
    logLik: float
    AIC: float
    k: int
    theta: float = 0.0
    criterion: str = "ml"
    n: int = 0
    beta1_se: float | None = None
    response_key: str = field(default="", compare=False)

    @property
    def has_slope(self) -> bool:
        return self.beta1 is not None


def _design(x: Sequence[float] | None, n: int) -> np.ndarray:
    if x is None:
        return np.ones((n, 1))
    x = np.asarray(x, dtype=float)
    if x.shape != (n,):
        raise ValueError("x and y differ in length")
    return np.column_stack([np.ones(n), x])


def response_key(y) -> str:
    return hashlib.sha1(np.asarray(y, dtype=float).tobytes()).hexdigest()


class RandomInterceptModel:
    """Design (fixed effects + grouping) that can be fitted to many responses."""

    def __init__(self, x: Sequence[float] | None, groups: Sequence, n: int | None = None):
        groups = list(groups)
        n = len(groups) if n is None else n
        if len(groups) != n:
            raise ValueError("groups and y differ in length")
        if n < 3:
            raise ValueError("need at least 3 observations")
        labels = sorted(set(groups), key=str)
        if not labels:
            raise ValueError("need at least one group")
        index = {g: j for j, g in enumerate(labels)}
        self.n = n
        self.group_index = np.array([index[g] for g in groups])
        self.n_groups = len(labels)
        self.X = _design(x, n)
        self.p = self.X.shape[1]
        if np.linalg.matrix_rank(self.X) < self.p:
            raise SingularDesignError("fixed-effects design is rank deficient (constant predictor?)")
        self.group_sizes = np.bincount(self.group_index, minlength=self.n_groups).astype(float)
        # per-group column sums of X, shape (J, p)
        self.group_X = np.zeros((self.n_groups, self.p))
        np.add.at(self.group_X, self.group_index, self.X)
        self.XtX = self.X.T @ self.X

    def _stats(self, y: np.ndarray):
        gy = np.bincount(self.group_index, weights=y, minlength=self.n_groups)
        return self.X.T @ y, float(y @ y), gy

    def profile(self, theta, y: np.ndarray, criterion: str = "ml"):
        """Profiled log-likelihood at each theta; returns (loglik, beta, sigma2, XtHinvX)."""
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        Xty, yty, gy = self._stats(y)
        c = theta[:, None] / (1.0 + theta[:, None] * self.group_sizes[None, :])  # (T, J)
        A = self.XtX[None] - np.einsum("tj,jp,jq->tpq", c, self.group_X, self.group_X)
        b = Xty[None] - np.einsum("tj,jp,j->tp", c, self.group_X, gy)
        q = yty - c @ (gy * gy)
        beta = np.linalg.solve(A, b[..., None])[..., 0]
        rss = q - np.einsum("tp,tp->t", b, beta)
        rss = np.maximum(rss, 1e-300)
        logdetH = np.log1p(theta[:, None] * self.group_sizes[None, :]).sum(axis=1)
        logdetA = np.linalg.slogdet(A)[1]
        if criterion == "ml":
            dof = self.n
            ll = -0.5 * dof * (math.log(2 * math.pi) + np.log(rss / dof) + 1.0) - 0.5 * logdetH
        elif criterion == "reml":
            dof = self.n - self.p
            ll = -0.5 * dof * (math.log(2 * math.pi) + np.log(rss / dof) + 1.0) - 0.5 * logdetH - 0.5 * logdetA
        else:
            raise ValueError(f"unknown criterion {criterion!r}")
        return ll, beta, rss / dof, A

    def loglik(self, theta, y, criterion: str = "ml") -> np.ndarray:
        return self.profile(theta, np.asarray(y, dtype=float), criterion)[0]

    def fit(self, y: Sequence[float], criterion: str = "ml") -> LmmFit:
        y = np.asarray(y, dtype=float)
        if y.shape != (self.n,):
            raise ValueError("y has the wrong length")
        if criterion not in CRITERIA:
            raise ValueError(f"unknown criterion {criterion!r}")

        grid = np.concatenate([[0.0], 10.0**_LOG10_GRID])
        ll_grid = self.loglik(grid, y, criterion)
        # a flat profile (e.g. one observation per group) resolves to the
        # smallest theta rather than to rounding noise at the grid edge
        top = float(ll_grid.max())
        i = int(np.flatnonzero(ll_grid >= top - 1e-8 * max(1.0, abs(top)))[0])
        lo = grid[max(i - 1, 0)]
        hi = grid[min(i + 1, len(grid) - 1)]
        best_theta, best_ll = float(grid[i]), float(ll_grid[i])
        if i == len(grid) - 1:
            raise ConvergenceError(
                "variance ratio diverges (residual variance -> 0)",
                best=self._make_fit(best_theta, y, criterion),
            )
        if hi > lo:
            res = minimize_scalar(
                lambda t: -float(self.loglik(t, y, criterion)[0]),
                bounds=(lo, hi),
                method="bounded",
                options={"xatol": THETA_TOL, "maxiter": MAX_ITER},
            )
            if not res.success:
                cand = float(res.x) if -res.fun > best_ll else best_theta
                raise ConvergenceError(
                    f"theta search did not converge in {MAX_ITER} iterations",
                    best=self._make_fit(cand, y, criterion),
                )
            if -res.fun > best_ll:
                best_theta, best_ll = float(res.x), float(-res.fun)
        return self._make_fit(best_theta, y, criterion)

    def _make_fit(self, theta: float, y: np.ndarray, criterion: str) -> LmmFit:
        ll, beta, sigma2, A = self.profile(theta, y, criterion)
        ll, beta, sigma2, A = float(ll[0]), beta[0], float(sigma2[0]), A[0]
        k = self.p + 2
        beta1 = float(beta[1]) if self.p == 2 else None
        se = None
        if self.p == 2:
            # GLS covariance of beta at the fitted variances
            cov = sigma2 * np.linalg.inv(A)
            se = float(math.sqrt(max(cov[1, 1], 0.0)))
        return LmmFit(
            beta0=float(beta[0]),
            beta1=beta1,
            sigma_u2=theta * sigma2,
            sigma2=sigma2,
            logLik=ll,
            AIC=-2.0 * ll + 2 * k,
            k=k,
            theta=theta,
            criterion=criterion,
            n=self.n,
            beta1_se=se,
            response_key=response_key(y),
        )


def fit_lmm(
    y: Sequence[float],
    x: Sequence[float] | None,
    groups: Sequence,
    criterion: str = "ml",
) -> LmmFit:
    """Fit the random-intercept model; ``x=None`` gives the intercept-only null model."""
    return RandomInterceptModel(x, groups, n=len(y)).fit(y, criterion)


def ols_loglik(y: Sequence[float], x: Sequence[float] | None) -> float:
    """Maximized normal log-likelihood of the fixed-effects-only regression."""
    y = np.asarray(y, dtype=float)
    X = _design(x, len(y))
    beta, *_ = np.linalg.lstsq(X, y, rcond=None)
    rss = float(np.sum((y - X @ beta) ** 2))
    n = len(y)
    return -0.5 * n * (math.log(2 * math.pi * rss / n) + 1.0)


@dataclass(frozen=True)
class AicSelection:
    aic_null: float
    aic_mixed: float
    delta_aic: float
    selected: str
    beta1: float
    expected_sign: int
    sign_matches: bool

    @property
    def prediction_confirmed(self) -> bool:
        return self.selected == "mixed" and self.sign_matches


def aic_select(fit_null: LmmFit, fit_mixed: LmmFit, expected_sign: int = -1) -> AicSelection:
    """Compare the null and mixed models; ties go to the null model."""
    if fit_null.has_slope or not fit_mixed.has_slope:
        raise ValueError("expected (null, mixed) fits in that order")
    if fit_null.n != fit_mixed.n or (
        fit_null.response_key and fit_mixed.response_key and fit_null.response_key != fit_mixed.response_key
    ):
        raise ValueError("fits were made on different response data")
    delta = fit_null.AIC - fit_mixed.AIC
    selected = "mixed" if fit_mixed.AIC < fit_null.AIC else "null"
    sign = int(np.sign(fit_mixed.beta1))
    return AicSelection(
        aic_null=fit_null.AIC,
        aic_mixed=fit_mixed.AIC,
        delta_aic=delta,
        selected=selected,
        beta1=fit_mixed.beta1,
        expected_sign=expected_sign,
        sign_matches=sign == expected_sign,
    )
