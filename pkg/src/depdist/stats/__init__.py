"""Correlation tests, mixed models and bootstrap intervals."""

from .bootstrap import BootstrapCI, bootstrap_ci
from .kendall import CorrelationResult, kendall_tau_b
from .lmm import AicSelection, LmmFit, aic_select, fit_lmm

__all__ = [
    "AicSelection",
    "BootstrapCI",
    "CorrelationResult",
    "LmmFit",
    "aic_select",
    "bootstrap_ci",
    "fit_lmm",
    "kendall_tau_b",
]
