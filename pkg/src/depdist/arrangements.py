"""Minimum and maximum linear arrangements of trees, and random arrangements.

``minla_exact`` solves the unconstrained minimum linear arrangement problem
on free trees.  It follows the divide-and-conquer scheme for trees: root the
tree at a centroid, place whole subtrees as contiguous blocks on both sides
of a central part that holds the root and the smallest subtrees, and recurse.
Blocks hanging off a vertex are solved as *anchored* problems, whose cost
also counts the stretch of the edge towards the parent that lies inside the
block.

For every vertex we try each admissible number of side blocks and keep the
cheapest, instead of relying on a closed-form choice; subproblems are
memoized by vertex set.  Correctness is checked against exhaustive search.
"""

from __future__ import annotations

import itertools
import math
import sys
from dataclasses import dataclass

import numpy as np

from .errors import SizeError
from .trees import Arrangement, DependencyTree, sum_dependency_distances

BRUTEFORCE_MAX_N = 10

_Solution = tuple[int, tuple[int, ...]]


@dataclass(frozen=True)
class ArrangementResult:
    cost: int
    arrangement: Arrangement


class _MinLASolver:
    """Memoized exact solver over vertex subsets of one tree."""

    def __init__(self, adj: dict[int, list[int]]):
        self.adj = {v: sorted(ns) for v, ns in adj.items()}
        self._free: dict[frozenset, _Solution] = {}
        self._anchored: dict[tuple[int, frozenset], _Solution] = {}

    def _branches(self, u: int, verts: frozenset) -> list[frozenset]:
        """Components of ``verts - {u}``, one per neighbour of u, largest first."""
        out = []
        for c in self.adj[u]:
            if c not in verts:
                continue
            seen = {c}
            stack = [c]
            while stack:
                x = stack.pop()
                for y in self.adj[x]:
                    if y != u and y in verts and y not in seen:
                        seen.add(y)
                        stack.append(y)
            out.append((c, frozenset(seen)))
        out.sort(key=lambda cs: (-len(cs[1]), cs[0]))
        return out

    def _centroid(self, verts: frozenset) -> int:
        start = min(verts)
        parent = {start: 0}
        order = [start]
        i = 0
        while i < len(order):
            x = order[i]
            i += 1
            for y in self.adj[x]:
                if y in verts and y != parent[x]:
                    parent[y] = x
                    order.append(y)
        size = dict.fromkeys(order, 1)
        heaviest = dict.fromkeys(order, 0)
        for x in reversed(order[1:]):
            p = parent[x]
            size[p] += size[x]
            heaviest[p] = max(heaviest[p], size[x])
        m = len(verts)
        for x in order:
            if max(heaviest[x], m - size[x]) * 2 <= m:
                return x
        raise AssertionError("tree without centroid")  # pragma: no cover

    def free(self, verts: frozenset) -> _Solution:
        hit = self._free.get(verts)
        if hit is not None:
            return hit
        if len(verts) == 1:
            (v,) = verts
            return self._free.setdefault(verts, (0, (v,)))

        u = self._centroid(verts)
        branches = self._branches(u, verts)
        sizes = [len(b) for _, b in branches]
        sides = [self.anchored(c, b) for c, b in branches]

        # largest branch on one side, the rest of the tree on the other,
        # each anchored towards the edge joining them
        c1, b1 = branches[0]
        rest_cost, rest_order = self.anchored(u, verts - b1)
        best = (sides[0][0] + rest_cost + 1, sides[0][1] + rest_order[::-1])

        # 2p whole branches around a freely arranged centre
        for p in range(1, len(branches) // 2 + 1):
            used = frozenset().union(*(b for _, b in branches[: 2 * p]))
            centre = verts - used
            centre_cost, centre_order = self.free(centre)
            cost = centre_cost + p * (len(centre) + 1)
            cost += sum(s[0] for s in sides[: 2 * p])
            cost += sum((j - 1) * (sizes[2 * j - 2] + sizes[2 * j - 1]) for j in range(1, p + 1))
            if cost < best[0]:
                left = [sides[2 * j - 2][1] for j in range(1, p + 1)]
                right = [sides[2 * j - 1][1][::-1] for j in range(p, 0, -1)]
                order = tuple(itertools.chain(*left, centre_order, *right))
                best = (cost, order)
        self._free[verts] = best
        return best

    def anchored(self, r: int, verts: frozenset) -> _Solution:
        """Arrange ``verts`` with r's parent just beyond the right end.

        The returned cost includes the distance from r to the right end.
        """
        key = (r, verts)
        hit = self._anchored.get(key)
        if hit is not None:
            return hit
        branches = self._branches(r, verts)
        if not branches:
            return self._anchored.setdefault(key, (0, (r,)))
        sizes = [len(b) for _, b in branches]
        sides = [self.anchored(c, b) for c, b in branches]
        k = len(branches)

        best: _Solution | None = None
        # j blocks on the left, j - 1 on the right; the parent edge balances them
        for j in range(1, (k + 1) // 2 + 1):
            nside = 2 * j - 1
            used = frozenset().union(*(b for _, b in branches[:nside]))
            centre = verts - used
            centre_cost, centre_order = self.free(centre)
            cost = centre_cost + j * (len(centre) + 1) - 1
            cost += sum(s[0] for s in sides[:nside])
            cost += sum((i - 1) * sizes[2 * i - 2] for i in range(1, j + 1))
            cost += sum(i * sizes[2 * i - 1] for i in range(1, j))
            if best is None or cost < best[0]:
                left = [sides[2 * i - 2][1] for i in range(1, j + 1)]
                right = [sides[2 * i - 1][1][::-1] for i in range(j - 1, 0, -1)]
                best = (cost, tuple(itertools.chain(*left, centre_order, *right)))
        self._anchored[key] = best
        return best


def minla_exact(t: DependencyTree) -> ArrangementResult:
    """Exact unconstrained minimum linear arrangement of a free tree."""
    if t.n == 1:
        return ArrangementResult(0, Arrangement.identity(1))
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 20 * t.n + 1000))
    try:
        cost, order = _MinLASolver(t.adjacency()).free(frozenset(range(1, t.n + 1)))
    finally:
        sys.setrecursionlimit(limit)
    return ArrangementResult(cost, Arrangement.from_order(order))


def minla_projective(t: DependencyTree) -> ArrangementResult:
    """Minimum arrangement among projective ones (root not covered by any edge).

    Children of every vertex are laid out by decreasing subtree size,
    alternating sides from the outside in; for a non-root vertex the largest
    child goes on the side away from its own head.
    """
    children: dict[int, list[int]] = {v: [] for v in range(1, t.n + 1)}
    for i, h in t.edge_list():
        children[h].append(i)
    size = {}
    for v in _postorder(t.root, children):
        size[v] = 1 + sum(size[c] for c in children[v])

    def place(v: int, head_side: int) -> list[int]:
        # head_side: -1 head to the left, +1 head to the right, 0 root
        kids = sorted(children[v], key=lambda c: (-size[c], c))
        far, near = [], []
        for idx, c in enumerate(kids):
            # even indices on the side opposite the head (left for the root)
            if head_side == -1:
                target_right = idx % 2 == 0
            else:
                target_right = idx % 2 == 1
            (near if target_right else far).append(c)
        # `far` children are left of v, `near` children right of v
        left = [place(c, +1) for c in far]
        right = [place(c, -1) for c in reversed(near)]
        return list(itertools.chain(*left, [v], *right))

    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 20 * t.n + 1000))
    try:
        order = place(t.root, 0)
    finally:
        sys.setrecursionlimit(limit)
    a = Arrangement.from_order(order)
    return ArrangementResult(sum_dependency_distances(t, a), a)


def _postorder(root: int, children: dict[int, list[int]]) -> list[int]:
    out, stack = [], [root]
    while stack:
        v = stack.pop()
        out.append(v)
        stack.extend(children[v])
    return out[::-1]


def _all_costs(t: DependencyTree, max_n: int) -> tuple[np.ndarray, np.ndarray]:
    if t.n > max_n:
        raise SizeError(f"exhaustive search refused for n={t.n} > {max_n}")
    perms = np.array(list(itertools.permutations(range(1, t.n + 1))), dtype=np.int16)
    costs = np.zeros(len(perms), dtype=np.int64)
    for i, h in t.edge_list():
        costs += np.abs(perms[:, i - 1] - perms[:, h - 1])
    return perms, costs


def all_arrangement_costs(t: DependencyTree, max_n: int = BRUTEFORCE_MAX_N) -> np.ndarray:
    """D for every one of the n! arrangements (rank vectors in lexicographic order)."""
    return _all_costs(t, max_n)[1]


def minla_bruteforce(t: DependencyTree, max_n: int = BRUTEFORCE_MAX_N) -> ArrangementResult:
    perms, costs = _all_costs(t, max_n)
    i = int(np.argmin(costs))
    return ArrangementResult(int(costs[i]), Arrangement(tuple(perms[i])))


def maxla_bruteforce(t: DependencyTree, max_n: int = BRUTEFORCE_MAX_N) -> ArrangementResult:
    perms, costs = _all_costs(t, max_n)
    i = int(np.argmax(costs))
    return ArrangementResult(int(costs[i]), Arrangement(tuple(perms[i])))


def random_arrangement(n: int, rng: np.random.Generator) -> Arrangement:
    """Uniformly random arrangement; deterministic given the generator state."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return Arrangement(tuple(int(r) for r in rng.permutation(n) + 1))


def n_arrangements(n: int) -> int:
    return math.factorial(n)
