"""Dependency trees, linear arrangements and raw dependency distances.

Words are numbered 1..n in their original (surface) order.  A head vector
stores, for every word, the position of its head, with 0 marking the root.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import InvalidTreeError

HeadVector = tuple[int, ...]


def validate_heads(heads: Sequence[int], sentence_id: str | None = None) -> HeadVector:
    """Check that ``heads`` encodes a rooted tree and return it as a tuple.

    Raises :class:`InvalidTreeError` on an empty vector, out-of-range or
    self-referencing heads, zero or several roots, or a cycle.
    """
    hv = tuple(int(h) for h in heads)
    n = len(hv)
    if n == 0:
        raise InvalidTreeError("empty head vector", sentence_id)
    roots = [i for i, h in enumerate(hv, start=1) if h == 0]
    if len(roots) != 1:
        raise InvalidTreeError(f"expected exactly one root, found {len(roots)}", sentence_id)
    for i, h in enumerate(hv, start=1):
        if h < 0 or h > n:
            raise InvalidTreeError(f"head {h} of word {i} out of range 0..{n}", sentence_id)
        if h == i:
            raise InvalidTreeError(f"word {i} is its own head", sentence_id)
    # every word must reach the root; memoize words already known to do so
    reaches_root = [False] * (n + 1)
    reaches_root[0] = True
    for start in range(1, n + 1):
        path = []
        seen = set()
        v = start
        while not reaches_root[v]:
            if v in seen:
                raise InvalidTreeError(f"cycle through word {v}", sentence_id)
            seen.add(v)
            path.append(v)
            v = hv[v - 1]
        for w in path:
            reaches_root[w] = True
    return hv


@dataclass(frozen=True)
class DependencyTree:
    """A validated rooted tree over sentence positions 1..n."""

    heads: HeadVector

    def __post_init__(self):
        object.__setattr__(self, "heads", validate_heads(self.heads))

    @property
    def n(self) -> int:
        return len(self.heads)

    @property
    def root(self) -> int:
        return self.heads.index(0) + 1

    @property
    def edges(self) -> frozenset[frozenset[int]]:
        return frozenset(frozenset((i, h)) for i, h in enumerate(self.heads, start=1) if h)

    def edge_list(self) -> list[tuple[int, int]]:
        """Edges as (dependent, head) pairs in dependent order."""
        return [(i, h) for i, h in enumerate(self.heads, start=1) if h]

    def adjacency(self) -> dict[int, list[int]]:
        adj: dict[int, list[int]] = {v: [] for v in range(1, self.n + 1)}
        for i, h in self.edge_list():
            adj[i].append(h)
            adj[h].append(i)
        return adj


@dataclass(frozen=True)
class Arrangement:
    """A linear order of the words of a sentence.

    ``ranks[i - 1]`` is the position (1..n) assigned to word ``i``.
    """

    ranks: tuple[int, ...]

    def __post_init__(self):
        ranks = tuple(int(r) for r in self.ranks)
        if sorted(ranks) != list(range(1, len(ranks) + 1)):
            raise ValueError(f"not a permutation of 1..{len(ranks)}: {ranks}")
        object.__setattr__(self, "ranks", ranks)

    @classmethod
    def identity(cls, n: int) -> "Arrangement":
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def from_order(cls, order: Iterable[int]) -> "Arrangement":
        """Build from the sequence of words read left to right."""
        order = list(order)
        ranks = [0] * len(order)
        for pos, word in enumerate(order, start=1):
            ranks[word - 1] = pos
        return cls(tuple(ranks))

    @property
    def n(self) -> int:
        return len(self.ranks)

    def order(self) -> list[int]:
        """Words read left to right."""
        out = [0] * self.n
        for word, r in enumerate(self.ranks, start=1):
            out[r - 1] = word
        return out

    def __getitem__(self, word: int) -> int:
        return self.ranks[word - 1]


def tree_from_head_vector(hv: Sequence[int]) -> DependencyTree:
    return DependencyTree(tuple(hv))


def sum_dependency_distances(t: DependencyTree, a: Arrangement | None = None) -> int:
    """Sum of |pi(dependent) - pi(head)| over all edges; identity order by default."""
    if a is None:
        return sum(abs(i - h) for i, h in t.edge_list())
    if a.n != t.n:
        raise ValueError(f"arrangement of size {a.n} for a tree of size {t.n}")
    r = a.ranks
    return sum(abs(r[i - 1] - r[h - 1]) for i, h in t.edge_list())


def expected_D_random(n: int) -> Fraction:
    """Expected D of any n-word tree under a uniformly random arrangement: (n^2 - 1)/3."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return Fraction((n - 1) * (n + 1), 3)
