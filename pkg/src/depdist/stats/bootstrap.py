"""Parametric bootstrap confidence interval for the fixed-effect slope."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import BootstrapError, ConvergenceError, SingularDesignError
from .lmm import LmmFit, RandomInterceptModel

MAX_FAILURE_RATE = 0.05


@dataclass(frozen=True)
class BootstrapCI:
    level: float
    lower: float
    upper: float
    replicates: int
    seed: int
    failures: int = 0


def percentile_indices(B: int, level: float) -> tuple[int, int]:
    """0-based order-statistic indices bounding a central ``level`` interval."""
    alpha = 1.0 - level
    # round off representation error, e.g. 1 - 0.9 = 0.09999...
    lo = max(1, math.floor(round((B + 1) * alpha / 2, 9)))
    hi = min(B, math.ceil(round((B + 1) * (1 - alpha / 2), 9)))
    return lo - 1, hi - 1


def simulate_response(fit: LmmFit, model: RandomInterceptModel, rng: np.random.Generator) -> np.ndarray:
    beta = [fit.beta0] + ([fit.beta1] if fit.has_slope else [])
    u = rng.normal(0.0, math.sqrt(fit.sigma_u2), model.n_groups)
    e = rng.normal(0.0, math.sqrt(fit.sigma2), model.n)
    return model.X @ np.asarray(beta) + u[model.group_index] + e


def bootstrap_replicates(
    fit: LmmFit,
    x: Sequence[float],
    groups: Sequence,
    B: int = 1000,
    seed: int = 0,
) -> tuple[np.ndarray, int]:
    """Slope estimates refitted on B responses simulated from ``fit``.

    Replicate i draws from its own stream seeded by ``(seed, i)``, so the
    result does not depend on evaluation order.  Returns (slopes, failures).
    """
    model = RandomInterceptModel(x, groups)
    slopes = []
    failures = 0
    for i in range(B):
        rng = np.random.default_rng([seed, i])
        y_star = simulate_response(fit, model, rng)
        try:
            slopes.append(model.fit(y_star, fit.criterion).beta1)
        except (ConvergenceError, SingularDesignError, np.linalg.LinAlgError):
            failures += 1
    return np.asarray(slopes), failures


def bootstrap_ci(
    fit: LmmFit,
    x: Sequence[float],
    groups: Sequence,
    B: int = 1000,
    level: float = 0.95,
    seed: int = 0,
) -> BootstrapCI:
    """Percentile interval for the slope of a fitted mixed model."""
    if not fit.has_slope:
        raise ValueError("bootstrap interval needs a model with a fixed-effect slope")
    if B < 100:
        raise ValueError("B must be at least 100")
    if not 0 < level < 1:
        raise ValueError("level must lie in (0, 1)")
    slopes, failures = bootstrap_replicates(fit, x, groups, B, seed)
    if failures > MAX_FAILURE_RATE * B:
        raise BootstrapError(
            f"{failures} of {B} bootstrap refits failed", failures=failures, replicates=B
        )
    slopes = np.sort(slopes)
    lo, hi = percentile_indices(len(slopes), level)
    return BootstrapCI(level, float(slopes[lo]), float(slopes[hi]), B, seed, failures)
