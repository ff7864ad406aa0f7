"""Linear-width of edge orderings, vertex-separation of vertex orderings.

Both widths are bottleneck quantities over the prefix sets of an ordering: at
position ``i`` the cost depends only on the *set* ``{x_1..x_{i-1}}``, never on
its internal order. The exact searches therefore run a dynamic program over
prefix sets (2^k states, one numpy layer per prefix size).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .graph import Graph, Kind
from .models import CapExceededError

EXACT_CAP = 16


class NotAPermutationError(ValueError):
    pass


@dataclass(frozen=True)
class Ordering:
    kind: Kind
    perm: tuple[int, ...]
    width: int

    @classmethod
    def of(cls, g: Graph, kind: Kind, perm: Sequence[int]) -> "Ordering":
        perm = tuple(int(p) for p in perm)
        return cls(kind, perm, width_of_ordering(g, kind, perm))

    def position(self) -> list[int]:
        """position()[x] is the place of element ``x`` in the ordering."""
        pos = [0] * len(self.perm)
        for i, x in enumerate(self.perm):
            pos[x] = i
        return pos


def _check_perm(perm: Sequence[int], k: int):
    if sorted(perm) != list(range(k)):
        raise NotAPermutationError(f"expected a permutation of 0..{k - 1}, got {list(perm)}")


def edge_boundary(g: Graph, prefix_mask: int) -> int:
    """Vertices incident to an edge in the prefix and to an edge outside it."""
    full = (1 << g.m) - 1
    rest = full & ~prefix_mask
    return sum(1 for inc in g.incident_masks() if inc & prefix_mask and inc & rest)


def vertex_boundary(g: Graph, prefix_mask: int) -> int:
    """Prefix vertices adjacent to some vertex outside the prefix."""
    rest = ((1 << g.n) - 1) & ~prefix_mask
    nbr = g.neighbor_masks()
    return sum(1 for v in range(g.n) if prefix_mask >> v & 1 and nbr[v] & rest)


def _boundary(g: Graph, kind: Kind):
    return edge_boundary if kind is Kind.EDGE else vertex_boundary


def width_of_ordering(g: Graph, kind: Kind, perm: Sequence[int]) -> int:
    k = g.universe(kind)
    _check_perm(perm, k)
    boundary = _boundary(g, kind)
    width, prefix = 0, 0
    for x in perm:
        # cost at position i uses the prefix strictly before x
        width = max(width, boundary(g, prefix))
        prefix |= 1 << x
    return width


def linear_width_of_ordering(g: Graph, o: Ordering | Sequence[int]) -> int:
    perm = o.perm if isinstance(o, Ordering) else o
    return width_of_ordering(g, Kind.EDGE, perm)


def vertex_separation_of_ordering(g: Graph, o: Ordering | Sequence[int]) -> int:
    perm = o.perm if isinstance(o, Ordering) else o
    return width_of_ordering(g, Kind.VERTEX, perm)


def boundary_table(g: Graph, kind: Kind) -> np.ndarray:
    """Boundary size of every prefix set, indexed by bitmask."""
    k = g.universe(kind)
    sets = np.arange(1 << k, dtype=np.int64)
    full = (1 << k) - 1
    rest = full & ~sets
    out = np.zeros(1 << k, dtype=np.int64)
    if kind is Kind.EDGE:
        for inc in g.incident_masks():
            out += ((sets & inc) != 0) & ((rest & inc) != 0)
    else:
        for v, nbr in enumerate(g.neighbor_masks()):
            out += ((sets >> v & 1) == 1) & ((rest & nbr) != 0)
    return out


def _optimal(g: Graph, kind: Kind, cap: int) -> Ordering:
    k = g.universe(kind)
    if k > cap:
        raise CapExceededError(f"{k} {kind.value}s exceed the exact-search cap {cap}")
    if k == 0:
        return Ordering(kind, (), 0)
    b = boundary_table(g, kind)
    size = 1 << k
    sets = np.arange(size, dtype=np.int64)
    popcount = np.zeros(size, dtype=np.int64)
    for i in range(k):
        popcount += sets >> i & 1
    big = np.iinfo(np.int64).max
    f = np.full(size, big, dtype=np.int64)
    f[0] = b[0]
    order = np.argsort(popcount, kind="stable")
    bounds = np.searchsorted(popcount[order], np.arange(k + 1), side="left")
    # layers 1..k-1 are the prefix sets that still have a position after them
    for layer in range(1, k):
        idx = order[bounds[layer] : bounds[layer + 1]]
        best = np.full(len(idx), big, dtype=np.int64)
        for e in range(k):
            has = (idx >> e & 1) == 1
            cand = np.where(has, f[idx ^ (1 << e)], big)
            np.minimum(best, cand, out=best)
        f[idx] = np.maximum(b[idx], best)
    # walk back from the full set, choosing the lowest index on ties
    perm_rev = []
    current = size - 1
    while current:
        choice, choice_val = -1, big
        for e in range(k):
            if current >> e & 1:
                val = f[current ^ (1 << e)]
                if val < choice_val:
                    choice, choice_val = e, val
        perm_rev.append(choice)
        current ^= 1 << choice
    perm = tuple(reversed(perm_rev))
    ordering = Ordering.of(g, kind, perm)
    best_total = min(f[(size - 1) ^ (1 << e)] for e in range(k))
    assert ordering.width == best_total
    return ordering


def optimal_edge_ordering(g: Graph, cap: int = EXACT_CAP) -> Ordering:
    """An edge ordering achieving the linear-width of ``g``."""
    return _optimal(g, Kind.EDGE, cap)


def optimal_vertex_ordering(g: Graph, cap: int = EXACT_CAP) -> Ordering:
    """A vertex ordering achieving the vertex-separation (= path-width) of ``g``."""
    return _optimal(g, Kind.VERTEX, cap)


def greedy_ordering(g: Graph, kind: Kind) -> Ordering:
    """Append the element that keeps the new prefix boundary smallest (lowest index on ties)."""
    k = g.universe(kind)
    boundary = _boundary(g, kind)
    prefix, perm = 0, []
    remaining = list(range(k))
    while remaining:
        best = min(remaining, key=lambda x: (boundary(g, prefix | 1 << x), x))
        perm.append(best)
        remaining.remove(best)
        prefix |= 1 << best
    return Ordering.of(g, kind, perm)


def resolve_ordering(g: Graph, kind: Kind, how: str = "exact", cap: int = EXACT_CAP) -> Ordering:
    """``how`` is ``exact``, ``greedy``, ``auto`` (exact within the cap) or a file path."""
    if how == "exact":
        return _optimal(g, kind, cap)
    if how == "greedy":
        return greedy_ordering(g, kind)
    if how == "auto":
        return _optimal(g, kind, cap) if g.universe(kind) <= cap else greedy_ordering(g, kind)
    return read_ordering(how, g, kind)


def parse_ordering(text: str, g: Graph, kind: Kind) -> Ordering:
    perm = [int(tok) for tok in text.split()]
    return Ordering.of(g, kind, perm)


def read_ordering(path, g: Graph, kind: Kind) -> Ordering:
    with open(path) as fh:
        return parse_ordering(fh.read(), g, kind)


def write_ordering(o: Ordering) -> str:
    return "".join(f"{x}\n" for x in o.perm)
