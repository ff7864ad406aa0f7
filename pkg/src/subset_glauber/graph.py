"""Simple graphs, index subsets, and the combinatorial kernels behind every weight.

Subsets are bitmasks over edge indices (``Kind.EDGE``) or vertex indices
(``Kind.VERTEX``). All ranks are computed over GF(2) with int bitset rows.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Sequence


class Kind(str, enum.Enum):
    EDGE = "edge"
    VERTEX = "vertex"


class GraphParseError(ValueError):
    """Base class for edge-list format errors."""


class MalformedLineError(GraphParseError):
    pass


class SelfLoopError(GraphParseError):
    pass


class DuplicateEdgeError(GraphParseError):
    pass


class IndexRangeError(GraphParseError):
    pass


@dataclass(frozen=True)
class Graph:
    n: int
    edges: tuple[tuple[int, int], ...]
    adjacency: tuple[tuple[tuple[int, int], ...], ...] = field(
        init=False, repr=False, compare=False
    )

    def __post_init__(self):
        edges = tuple((int(u), int(v)) for u, v in self.edges)
        seen = set()
        adj: list[list[tuple[int, int]]] = [[] for _ in range(self.n)]
        for idx, (u, v) in enumerate(edges):
            if u == v:
                raise SelfLoopError(f"self-loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise IndexRangeError(f"edge ({u}, {v}) outside 0..{self.n - 1}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise DuplicateEdgeError(f"duplicate edge {key}")
            seen.add(key)
            adj[u].append((v, idx))
            adj[v].append((u, idx))
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "adjacency", tuple(tuple(a) for a in adj))

    @property
    def m(self) -> int:
        return len(self.edges)

    def universe(self, kind: Kind) -> int:
        return self.m if kind is Kind.EDGE else self.n

    def neighbor_masks(self) -> tuple[int, ...]:
        masks = [0] * self.n
        for u, v in self.edges:
            masks[u] |= 1 << v
            masks[v] |= 1 << u
        return tuple(masks)

    def incident_masks(self) -> tuple[int, ...]:
        """Per vertex, the bitmask of incident edge indices."""
        masks = [0] * self.n
        for idx, (u, v) in enumerate(self.edges):
            masks[u] |= 1 << idx
            masks[v] |= 1 << idx
        return tuple(masks)

    def to_text(self) -> str:
        lines = [f"{self.n} {self.m}"] + [f"{u} {v}" for u, v in self.edges]
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class Subset:
    kind: Kind
    universe: int
    mask: int = 0

    def __post_init__(self):
        if self.mask < 0 or self.mask >> self.universe:
            raise ValueError(f"mask {self.mask:#x} has bits outside 0..{self.universe - 1}")

    @classmethod
    def of(cls, kind: Kind, universe: int, indices: Iterable[int] = ()) -> "Subset":
        mask = 0
        for i in indices:
            if not 0 <= i < universe:
                raise ValueError(f"index {i} outside 0..{universe - 1}")
            mask |= 1 << i
        return cls(kind, universe, mask)

    @classmethod
    def full(cls, kind: Kind, universe: int) -> "Subset":
        return cls(kind, universe, (1 << universe) - 1)

    def indices(self) -> list[int]:
        return [i for i in range(self.universe) if self.mask >> i & 1]

    def __contains__(self, i: int) -> bool:
        return bool(self.mask >> i & 1)

    def __len__(self) -> int:
        return bin(self.mask).count("1")

    def flip(self, i: int) -> "Subset":
        if not 0 <= i < self.universe:
            raise IndexError(f"index {i} outside 0..{self.universe - 1}")
        return Subset(self.kind, self.universe, self.mask ^ (1 << i))

    def __xor__(self, other: "Subset") -> "Subset":
        _check_compatible(self, other)
        return Subset(self.kind, self.universe, self.mask ^ other.mask)

    def hex(self) -> str:
        return f"{self.mask:x}"


def _check_compatible(a: Subset, b: Subset):
    if a.kind is not b.kind or a.universe != b.universe:
        raise ValueError(f"incompatible subsets: {a.kind}/{a.universe} vs {b.kind}/{b.universe}")


@dataclass(frozen=True)
class Separation:
    """Vertex cut ``k`` separating ``v1`` from ``v2`` (all as bitmasks)."""

    v1: int
    k: int
    v2: int

    def is_valid(self, g: Graph, edge_mask: int | None = None) -> bool:
        full = (1 << g.n) - 1
        if self.v1 & self.k or self.v1 & self.v2 or self.k & self.v2:
            return False
        if self.v1 | self.k | self.v2 != full:
            return False
        for idx, (u, v) in enumerate(g.edges):
            if edge_mask is not None and not edge_mask >> idx & 1:
                continue
            a, b = 1 << u, 1 << v
            if (self.v1 & a and self.v2 & b) or (self.v1 & b and self.v2 & a):
                return False
        return True


def parse_graph(text: str) -> Graph:
    """Parse the edge-list format: a header ``n m`` followed by ``m`` lines ``u v``."""
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise MalformedLineError("empty document; expected header 'n m'")

    def ints(line: str, lineno: int) -> tuple[int, int]:
        parts = line.split()
        if len(parts) != 2:
            raise MalformedLineError(f"line {lineno}: expected two integers, got {line!r}")
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError:
            raise MalformedLineError(f"line {lineno}: expected two integers, got {line!r}") from None
        return a, b

    n, m = ints(lines[0], 1)
    if n < 0 or m < 0:
        raise MalformedLineError(f"negative header values: {lines[0]!r}")
    if len(lines) - 1 != m:
        raise MalformedLineError(f"header announces {m} edges, found {len(lines) - 1}")
    edges = []
    for lineno, line in enumerate(lines[1:], start=2):
        u, v = ints(line, lineno)
        if not (0 <= u < n and 0 <= v < n):
            raise IndexRangeError(f"line {lineno}: endpoint out of range 0..{n - 1}")
        edges.append((u, v))
    return Graph(n, tuple(edges))


def read_graph(path) -> Graph:
    with open(path) as fh:
        return parse_graph(fh.read())


def _require(s: Subset, kind: Kind, g: Graph):
    if s.kind is not kind:
        raise ValueError(f"expected a {kind.value} subset, got {s.kind.value}")
    if s.universe != g.universe(kind):
        raise ValueError(f"subset universe {s.universe} does not match graph ({g.universe(kind)})")


def _components(n: int, pairs: Iterable[tuple[int, int]]) -> list[int]:
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in pairs:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
    return [find(x) for x in range(n)]


def _selected_edges(g: Graph, mask: int) -> list[tuple[int, int]]:
    return [e for i, e in enumerate(g.edges) if mask >> i & 1]


def components_count(g: Graph, s: Subset) -> int:
    """Connected components of the spanning subgraph (V, S); isolated vertices count."""
    _require(s, Kind.EDGE, g)
    return len(set(_components(g.n, _selected_edges(g, s.mask))))


def component_size_profile(g: Graph, s: Subset) -> list[int]:
    """Entry ``i - 1`` counts the components of (V, S) with exactly ``i`` vertices."""
    _require(s, Kind.EDGE, g)
    roots = _components(g.n, _selected_edges(g, s.mask))
    sizes: dict[int, int] = {}
    for r in roots:
        sizes[r] = sizes.get(r, 0) + 1
    profile = [0] * g.n
    for size in sizes.values():
        profile[size - 1] += 1
    return profile


def gf2_rank(rows: Sequence[int]) -> int:
    """Rank over GF(2) of int-bitset rows (Gaussian elimination on leading bits)."""
    pivots: dict[int, int] = {}
    rank = 0
    for row in rows:
        while row:
            top = row.bit_length() - 1
            if top in pivots:
                row ^= pivots[top]
            else:
                pivots[top] = row
                rank += 1
                break
    return rank


def incidence_rank(g: Graph, s: Subset) -> int:
    """GF(2) rank of the n x |S| vertex-edge incidence matrix of (V, S)."""
    _require(s, Kind.EDGE, g)
    # columns of the incidence matrix as rows: same rank, fewer bits
    return gf2_rank([(1 << u) | (1 << v) for u, v in _selected_edges(g, s.mask)])


def _adjacency_rows(n: int, pairs: Iterable[tuple[int, int]]) -> list[int]:
    rows = [0] * n
    for u, v in pairs:
        rows[u] |= 1 << v
        rows[v] |= 1 << u
    return rows


def adjacency_rank_edges(g: Graph, s: Subset) -> int:
    """GF(2) rank of the adjacency matrix of the spanning subgraph (V, S)."""
    _require(s, Kind.EDGE, g)
    return gf2_rank(_adjacency_rows(g.n, _selected_edges(g, s.mask)))


def adjacency_rank_induced(g: Graph, s: Subset) -> int:
    """GF(2) rank of the adjacency matrix of G[S]."""
    _require(s, Kind.VERTEX, g)
    nbr = g.neighbor_masks()
    return gf2_rank([nbr[v] & s.mask for v in range(g.n) if s.mask >> v & 1])


def induced_subgraph(g: Graph, s: Subset) -> Graph:
    """G[S] with vertices reindexed in ascending order of their original index."""
    _require(s, Kind.VERTEX, g)
    keep = s.indices()
    relabel = {v: i for i, v in enumerate(keep)}
    edges = tuple(
        (relabel[u], relabel[v]) for u, v in g.edges if u in relabel and v in relabel
    )
    return Graph(len(keep), edges)


def relabel(g: Graph, perm: Sequence[int]) -> Graph:
    """Graph with vertex ``v`` renamed ``perm[v]``; edge order is preserved."""
    return Graph(g.n, tuple((perm[u], perm[v]) for u, v in g.edges))


# named families ------------------------------------------------------------

def path_graph(n: int) -> Graph:
    return Graph(n, tuple((i, i + 1) for i in range(n - 1)))


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise ValueError("a simple cycle needs at least 3 vertices")
    return Graph(n, tuple((i, i + 1) for i in range(n - 1)) + ((0, n - 1),))


def complete_graph(n: int) -> Graph:
    return Graph(n, tuple((i, j) for i in range(n) for j in range(i + 1, n)))


def star_graph(leaves: int) -> Graph:
    return Graph(leaves + 1, tuple((0, i) for i in range(1, leaves + 1)))


def empty_graph(n: int) -> Graph:
    return Graph(n, ())
