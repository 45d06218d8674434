"""Sentence-level Omega and D, and their treebank means."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .arrangements import minla_exact, minla_projective
from .errors import UndefinedScoreError
from .preprocess import Style
from .trees import Arrangement, DependencyTree, expected_D_random, sum_dependency_distances

MIN_OMEGA_LEN = 3

_SOLVERS = {"unconstrained": minla_exact, "projective": minla_projective}


@dataclass(frozen=True)
class SentenceScores:
    n: int
    D: int
    D_min: int
    E_rla: Fraction
    omega: float | None


@dataclass(frozen=True)
class TreebankSummary:
    language: str
    style: Style
    mean_omega: float
    mean_D: float
    sentences_used: int
    sentences_skipped: int

    def row(self) -> dict:
        return {
            "language": self.language,
            "style": self.style.value,
            "mean_omega": self.mean_omega,
            "mean_D": self.mean_D,
            "sentences_used": self.sentences_used,
            "sentences_skipped": self.sentences_skipped,
        }


def omega_from_costs(D, D_min, E_rla) -> float:
    """(E_rla - D) / (E_rla - D_min); exact when the inputs are int/Fraction."""
    denom = E_rla - D_min
    if denom <= 0:
        raise UndefinedScoreError("Omega undefined: random baseline does not exceed the minimum")
    return float(Fraction(E_rla - D) / Fraction(denom)) if _exact(D, D_min, E_rla) else (E_rla - D) / denom


def omega_exact(D: int, D_min: int, E_rla: Fraction) -> Fraction:
    denom = E_rla - D_min
    if denom <= 0:
        raise UndefinedScoreError("Omega undefined: random baseline does not exceed the minimum")
    return (E_rla - D) / denom


def _exact(*xs) -> bool:
    return all(isinstance(x, (int, Fraction)) for x in xs)


def minimum_cost(t: DependencyTree, minla: str = "unconstrained") -> int:
    try:
        solver = _SOLVERS[minla]
    except KeyError:
        raise ValueError(f"unknown minimum arrangement variant {minla!r}") from None
    return solver(t).cost


def omega(
    t: DependencyTree,
    a: Arrangement | None = None,
    *,
    D_min: int | None = None,
    minla: str = "unconstrained",
) -> float:
    """Omega of ``t`` in arrangement ``a`` (the surface order by default).

    1 at a minimum arrangement, 0 in expectation under random order,
    negative when D exceeds its random expectation.
    """
    if t.n < MIN_OMEGA_LEN:
        raise UndefinedScoreError(f"Omega undefined for n={t.n} < {MIN_OMEGA_LEN}")
    if D_min is None:
        D_min = minimum_cost(t, minla)
    return omega_from_costs(sum_dependency_distances(t, a), D_min, expected_D_random(t.n))


def sentence_scores(t: DependencyTree, minla: str = "unconstrained") -> SentenceScores:
    D = sum_dependency_distances(t)
    E = expected_D_random(t.n)
    D_min = minimum_cost(t, minla)
    om = omega_from_costs(D, D_min, E) if E > D_min else None
    return SentenceScores(t.n, D, D_min, E, om)


def treebank_summary(
    trees: Iterable[DependencyTree],
    language: str,
    style: Style | str = Style.UD,
    *,
    min_len: int = MIN_OMEGA_LEN,
    minla: str = "unconstrained",
) -> TreebankSummary:
    """Mean Omega and mean D over the sentences with at least ``min_len`` words.

    Sentences whose Omega is undefined are skipped for both means, so the
    two scores always describe the same sentence set.
    """
    style = Style(style)
    omegas: list[float] = []
    Ds: list[int] = []
    skipped = 0
    for t in trees:
        if t.n < max(min_len, 1):
            skipped += 1
            continue
        s = sentence_scores(t, minla)
        if s.omega is None:
            skipped += 1
            continue
        omegas.append(s.omega)
        Ds.append(s.D)
    if not omegas:
        raise UndefinedScoreError(f"{language}: no sentence with a defined Omega")
    return TreebankSummary(
        language=language,
        style=style,
        mean_omega=_mean(omegas),
        mean_D=_mean(Ds),
        sentences_used=len(omegas),
        sentences_skipped=skipped,
    )


def _mean(xs: Sequence[float]) -> float:
    # fsum is correctly rounded, hence independent of sentence order
    return math.fsum(xs) / len(xs)


def mean_field_distance(d: int, L: float) -> float:
    """Distance in sub-word units between words d positions apart: d * L."""
    if d < 1:
        raise ValueError("d must be >= 1")
    if not L > 0:
        raise ValueError("L must be positive")
    return d * L
