"""Exception hierarchy shared by every stage of the pipeline."""

from __future__ import annotations


class DepDistError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(DepDistError):
    """Malformed treebank, head-vector or table input."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class InvalidTreeError(DepDistError):
    """A head vector that does not describe a rooted tree."""

    def __init__(self, message: str, sentence_id: str | None = None):
        self.sentence_id = sentence_id
        if sentence_id is not None:
            message = f"sentence {sentence_id!r}: {message}"
        super().__init__(message)


class ValidationError(DepDistError):
    """A record violating a value constraint (e.g. word lengths)."""


class SizeError(DepDistError):
    """Input too large for an exhaustive (factorial) search."""


class UndefinedScoreError(DepDistError):
    """A score that is undefined for the given input (e.g. Omega with n < 3)."""


class NoParallelSentencesError(DepDistError):
    """Reparallelization left no sentence shared by every language."""

    def __init__(self, message: str = "no parallel sentences remain"):
        super().__init__(message)


class UndefinedCorrelationError(DepDistError):
    """Correlation requested on a constant sample."""


class SingularDesignError(DepDistError):
    """Fixed-effects design matrix without full column rank."""


class ConvergenceError(DepDistError):
    """Optimizer stopped before convergence; ``best`` holds the best iterate."""

    def __init__(self, message: str, best=None):
        self.best = best
        super().__init__(message)


class BootstrapError(DepDistError):
    """Too many bootstrap refits failed."""

    def __init__(self, message: str, failures: int = 0, replicates: int = 0):
        self.failures = failures
        self.replicates = replicates
        super().__init__(message)
