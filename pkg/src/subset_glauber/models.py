"""Subset-expansion weight functions, evaluated in the log domain.

Each model is a frozen dataclass carrying its parameters. Weights are computed
from the graph kernels (component counts, GF(2) ranks, component-size
profiles) collected in a :class:`SubsetStats` block, so one kernel pass over a
state space serves every model and parameter point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import ClassVar, Iterable, Sequence

import numpy as np

from .graph import (
    Graph,
    Kind,
    Subset,
    _adjacency_rows,
    _components,
    gf2_rank,
)

ENUMERATION_CAP = 1 << 24


class InvalidModelError(ValueError):
    """Parameters outside the model's open domain, or malformed model config."""


class CapExceededError(ValueError):
    """Requested enumeration is larger than the configured cap."""


@dataclass(frozen=True)
class SubsetStats:
    """Kernel values for a batch of subsets (one entry per mask)."""

    masks: np.ndarray
    size: np.ndarray
    kappa: np.ndarray | None = None
    rank: np.ndarray | None = None
    rank2: np.ndarray | None = None
    profile: np.ndarray | None = None  # (len, n); column i-1 counts order-i components
    bits: np.ndarray | None = None  # (len, universe) 0/1 membership


def subset_stats(g: Graph, kind: Kind, masks: Iterable[int]) -> SubsetStats:
    masks = list(masks)
    universe = g.universe(kind)
    size = [bin(s).count("1") for s in masks]
    bits = np.array(
        [[(s >> i) & 1 for i in range(universe)] for s in masks], dtype=np.float64
    ).reshape(len(masks), universe)
    mask_arr = np.array(masks, dtype=np.int64 if universe <= 62 else object)
    if kind is Kind.VERTEX:
        nbr = g.neighbor_masks()
        rank2 = [
            gf2_rank([nbr[v] & s for v in range(g.n) if s >> v & 1]) for s in masks
        ]
        return SubsetStats(mask_arr, np.array(size), rank2=np.array(rank2), bits=bits)

    kappa, rank, rank2 = [], [], []
    profile = np.zeros((len(masks), g.n), dtype=np.int64)
    for row, s in enumerate(masks):
        pairs = [e for i, e in enumerate(g.edges) if s >> i & 1]
        roots = _components(g.n, pairs)
        counts: dict[int, int] = {}
        for r in roots:
            counts[r] = counts.get(r, 0) + 1
        for c in counts.values():
            profile[row, c - 1] += 1
        kappa.append(len(counts))
        rank.append(gf2_rank([(1 << u) | (1 << v) for u, v in pairs]))
        rank2.append(gf2_rank(_adjacency_rows(g.n, pairs)))
    return SubsetStats(
        mask_arr,
        np.array(size),
        kappa=np.array(kappa),
        rank=np.array(rank),
        rank2=np.array(rank2),
        profile=profile,
        bits=bits,
    )


@lru_cache(maxsize=4096)
def stats_table(g: Graph, kind: Kind) -> SubsetStats:
    """Kernels for every subset, indexed by bitmask. Cached per graph."""
    universe = g.universe(kind)
    if 1 << universe > 1 << 20:
        raise CapExceededError(f"2^{universe} states exceed the table cap 2^20")
    return subset_stats(g, kind, range(1 << universe))


def _pos(value: float, name: str):
    if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
        raise InvalidModelError(f"{name} must be a finite positive number, got {value!r}")


def _above_one(value: float, name: str):
    if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 1):
        raise InvalidModelError(
            f"{name} must exceed 1 (zero weights are not supported), got {value!r}"
        )


class WeightModel:
    """Common surface of the six weight families."""

    family: ClassVar[str]
    kind: ClassVar[Kind] = Kind.EDGE

    @property
    def lam(self) -> float:
        raise NotImplementedError

    @property
    def lam_hat(self) -> float:
        lam = self.lam
        return max(lam, 1.0 / lam)

    def check_graph(self, g: Graph):
        """Hook for models whose parameters are sized by the graph."""

    def log_weights(self, g: Graph, stats: SubsetStats) -> np.ndarray:
        raise NotImplementedError

    def restrict(self, edge_indices: Sequence[int]) -> "WeightModel":
        """The model seen by a subgraph keeping ``edge_indices`` (per-edge parameters follow their edges)."""
        return self

    def graph_log_weight_offset(self, g: Graph) -> float:
        """Log of the constant host factor dropped when ``g`` is weighted as a standalone graph."""
        return 0.0

    def config(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class RandomCluster(WeightModel):
    q: float
    mu: float
    family: ClassVar[str] = "rc"

    def __post_init__(self):
        _pos(self.q, "q")
        _pos(self.mu, "mu")

    @property
    def lam(self) -> float:
        return float(self.q)

    def log_weights(self, g, stats):
        return stats.kappa * math.log(self.q) + stats.size * math.log(self.mu)

    def config(self):
        return {"family": self.family, "q": self.q, "mu": self.mu}


@dataclass(frozen=True)
class Tutte(WeightModel):
    x: float
    y: float
    family: ClassVar[str] = "tutte"

    def __post_init__(self):
        _above_one(self.x, "x")
        _above_one(self.y, "y")

    @property
    def lam(self) -> float:
        return (self.x - 1.0) * (self.y - 1.0)

    def log_weights(self, g, stats):
        full_rank = gf2_rank([(1 << u) | (1 << v) for u, v in g.edges])
        return (full_rank - stats.rank) * math.log(self.x - 1.0) + (
            stats.size - stats.rank
        ) * math.log(self.y - 1.0)

    def graph_log_weight_offset(self, g):
        # (x-1)^{r(E)} is constant over the state space of g; as a graph
        # function the weight is taken without it
        return gf2_rank([(1 << u) | (1 << v) for u, v in g.edges]) * math.log(self.x - 1.0)

    def config(self):
        return {"family": self.family, "x": self.x, "y": self.y}


@dataclass(frozen=True)
class AdjacencyRank(WeightModel):
    q: float
    mu: float
    family: ClassVar[str] = "r2"

    def __post_init__(self):
        _pos(self.q, "q")
        _pos(self.mu, "mu")

    @property
    def lam(self) -> float:
        return float(self.q) ** 2

    def log_weights(self, g, stats):
        return stats.rank2 * math.log(self.q) + stats.size * math.log(self.mu)

    def config(self):
        return {"family": self.family, "q": self.q, "mu": self.mu}


@dataclass(frozen=True)
class MultiTutte(WeightModel):
    q: float
    v: tuple[float, ...]
    family: ClassVar[str] = "multi_tutte"

    def __post_init__(self):
        _pos(self.q, "q")
        object.__setattr__(self, "v", tuple(float(x) for x in self.v))
        for i, ve in enumerate(self.v):
            _pos(ve, f"v[{i}]")

    @property
    def lam(self) -> float:
        return float(self.q)

    def check_graph(self, g):
        if len(self.v) != g.m:
            raise InvalidModelError(f"multi_tutte needs {g.m} edge weights, got {len(self.v)}")

    def restrict(self, edge_indices):
        return MultiTutte(self.q, tuple(self.v[i] for i in edge_indices))

    def log_weights(self, g, stats):
        log_v = np.log(np.asarray(self.v, dtype=np.float64))
        return stats.kappa * math.log(self.q) + (stats.bits * log_v).sum(axis=1)

    def config(self):
        return {"family": self.family, "q": self.q, "v": list(self.v)}


@dataclass(frozen=True)
class UPolynomial(WeightModel):
    y: float
    x: tuple[float, ...]
    family: ClassVar[str] = "upoly"

    def __post_init__(self):
        _above_one(self.y, "y")
        object.__setattr__(self, "x", tuple(float(t) for t in self.x))
        if not self.x:
            raise InvalidModelError("upoly needs a non-empty x vector")
        for i, xi in enumerate(self.x, start=1):
            _pos(xi, f"x[{i}]")

    @property
    def lam(self) -> float:
        x_prime = max(max(xi, 1.0 / xi) for xi in self.x)
        y_prime = max(self.y - 1.0, 1.0 / (self.y - 1.0))
        return y_prime * x_prime**3

    def check_graph(self, g):
        if len(self.x) < g.n:
            raise InvalidModelError(
                f"upoly needs x_1..x_{g.n} for a {g.n}-vertex graph, got {len(self.x)}"
            )

    def log_weights(self, g, stats):
        log_x = np.log(np.asarray(self.x[: g.n], dtype=np.float64))
        return (stats.size - stats.rank) * math.log(self.y - 1.0) + (stats.profile * log_x).sum(axis=1)

    def config(self):
        return {"family": self.family, "y": self.y, "x": list(self.x)}


@dataclass(frozen=True)
class Interlace(WeightModel):
    x: float
    y: float
    family: ClassVar[str] = "interlace"
    kind: ClassVar[Kind] = Kind.VERTEX

    def __post_init__(self):
        _above_one(self.x, "x")
        _above_one(self.y, "y")

    @property
    def lam(self) -> float:
        return ((self.x - 1.0) / (self.y - 1.0)) ** 2

    def log_weights(self, g, stats):
        # the (y-1) exponent uses |V| of the graph being weighted
        return stats.rank2 * math.log(self.x - 1.0) + (g.n - stats.rank2) * math.log(
            self.y - 1.0
        )

    def config(self):
        return {"family": self.family, "x": self.x, "y": self.y}


FAMILIES: dict[str, type[WeightModel]] = {
    cls.family: cls
    for cls in (RandomCluster, Tutte, AdjacencyRank, MultiTutte, UPolynomial, Interlace)
}


def model_from_config(cfg: dict) -> WeightModel:
    """Build a model from e.g. ``{"family": "rc", "q": 2.0, "mu": 1.0}``."""
    if not isinstance(cfg, dict) or "family" not in cfg:
        raise InvalidModelError(f"model config needs a 'family' key: {cfg!r}")
    family = cfg["family"]
    if family not in FAMILIES:
        raise InvalidModelError(f"unknown family {family!r}; choose from {sorted(FAMILIES)}")
    params = {k: v for k, v in cfg.items() if k != "family"}
    if "λ" in params or "lambda" in params:
        raise InvalidModelError("lambda is derived from the parameters, not configured")
    try:
        return FAMILIES[family](**params)
    except TypeError as exc:
        raise InvalidModelError(f"bad parameters for {family}: {exc}") from None


# operations ----------------------------------------------------------------

def _require_kind(model: WeightModel, g: Graph, s: Subset):
    if s.kind is not model.kind:
        raise ValueError(f"{model.family} weighs {model.kind.value} subsets, got {s.kind.value}")
    if s.universe != g.universe(model.kind):
        raise ValueError("subset universe does not match the graph")


def log_weights_of_masks(model: WeightModel, g: Graph, masks: Sequence[int]) -> np.ndarray:
    model.check_graph(g)
    return model.log_weights(g, subset_stats(g, model.kind, masks))


def log_weight(model: WeightModel, g: Graph, s: Subset) -> float:
    """Natural log of w((V,S)) for edge models or w(G[S]) for vertex models."""
    _require_kind(model, g, s)
    return float(log_weights_of_masks(model, g, [s.mask])[0])


def lambda_of(model: WeightModel) -> float:
    return model.lam


def lambda_hat(model: WeightModel) -> float:
    return model.lam_hat


def log_weight_ratio(model: WeightModel, g: Graph, s: Subset, flip: int) -> float:
    """log w(S xor {flip}) - log w(S)."""
    _require_kind(model, g, s)
    if not 0 <= flip < s.universe:
        raise IndexError(f"flip index {flip} outside 0..{s.universe - 1}")
    lw = log_weights_of_masks(model, g, [s.mask, s.mask ^ (1 << flip)])
    return float(lw[1] - lw[0])


def log_weight_table(model: WeightModel, g: Graph) -> np.ndarray:
    """Log weights of every state, indexed by bitmask."""
    model.check_graph(g)
    return model.log_weights(g, stats_table(g, model.kind))


def graph_log_weight(model: WeightModel, g: Graph) -> float:
    """Log weight of ``g`` itself viewed as a standalone graph (all edges / all vertices)."""
    full = Subset.full(model.kind, g.universe(model.kind))
    return log_weight(model, g, full) - model.graph_log_weight_offset(g)


def exact_partition_log(model: WeightModel, g: Graph, cap: int = ENUMERATION_CAP) -> float:
    """log of the sum of weights over all subsets, by streaming log-sum-exp."""
    model.check_graph(g)
    total = 1 << g.universe(model.kind)
    if total > cap:
        raise CapExceededError(f"{total} states exceed enumeration cap {cap}")
    acc = -math.inf
    chunk = 1 << 12
    for start in range(0, total, chunk):
        lw = log_weights_of_masks(model, g, range(start, min(total, start + chunk)))
        acc = float(np.logaddexp(acc, np.logaddexp.reduce(lw)))
    return acc
