"""Single bond flip and single site flip Glauber dynamics.

Random stream discipline (pinned for reproducibility across versions):

* generator: numpy's PCG64 seeded with ``SeedSequence(seed)``, consumed through
  ``random_raw`` as unsigned 64-bit words;
* each step makes two logical draws, index first, then the acceptance uniform,
  whether or not the move can be rejected;
* index in ``[0, k)``: rejection on raw words at or above the largest multiple
  of ``k`` not exceeding 2^64, then ``word % k`` (no modulo bias);
* uniform in ``[0, 1)``: ``(word >> 11) * 2**-53``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .graph import Graph, Subset
from .models import CapExceededError, WeightModel, log_weight_table, log_weights_of_masks

_TWO64 = 1 << 64
_BUFFER = 4096


class ChainRNG:
    """Buffered PCG64 stream with the draw rules documented in the module docstring."""

    def __init__(self, seed: int):
        if not 0 <= seed < _TWO64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        self._bitgen = np.random.PCG64(np.random.SeedSequence(seed))
        self._buf: list[int] = []
        self._pos = 0

    def raw(self) -> int:
        if self._pos == len(self._buf):
            self._buf = self._bitgen.random_raw(_BUFFER).tolist()
            self._pos = 0
        word = self._buf[self._pos]
        self._pos += 1
        return word

    def index(self, k: int) -> int:
        if k <= 0:
            raise ValueError("cannot draw from an empty range")
        limit = _TWO64 - _TWO64 % k
        while True:
            word = self.raw()
            if word < limit:
                return word % k

    def uniform(self) -> float:
        return (self.raw() >> 11) * (1.0 / (1 << 53))


class EmptyGroundSetError(ValueError):
    pass


def acceptance_probability(log_ratio: float) -> float:
    """Metropolis filter of the lazy chain: half of min(1, ratio)."""
    return 0.5 * math.exp(min(log_ratio, 0.0))


def step(model: WeightModel, g: Graph, state: Subset, rng: ChainRNG) -> Subset:
    if state.kind is not model.kind:
        raise ValueError(f"{model.family} runs on {model.kind.value} subsets")
    k = g.universe(model.kind)
    if k == 0:
        raise EmptyGroundSetError(f"no {model.kind.value}s to flip")
    i = rng.index(k)
    u = rng.uniform()
    proposal = state.mask ^ (1 << i)
    lw = log_weights_of_masks(model, g, [state.mask, proposal])
    if u < acceptance_probability(float(lw[1] - lw[0])):
        return Subset(state.kind, state.universe, proposal)
    return state


@dataclass(frozen=True)
class ChainConfig:
    model: WeightModel
    graph: Graph
    seed: int = 0
    steps: int = 0
    initial: Subset | None = None
    burn_in: int | None = None
    thinning: int = 1

    def __post_init__(self):
        universe = self.graph.universe(self.model.kind)
        if self.initial is None:
            object.__setattr__(self, "initial", Subset(self.model.kind, universe, 0))
        if self.initial.kind is not self.model.kind or self.initial.universe != universe:
            raise ValueError("initial subset does not match model kind / graph")
        if self.burn_in is None:
            object.__setattr__(self, "burn_in", self.steps // 10)
        if self.steps < 0 or self.burn_in < 0:
            raise ValueError("steps and burn_in must be nonnegative")
        if self.thinning < 1:
            raise ValueError("thinning must be at least 1")
        if not 0 <= self.seed < _TWO64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        self.model.check_graph(self.graph)


@dataclass(frozen=True)
class Trace:
    masks: np.ndarray  # retained states as bitmasks
    sample_steps: np.ndarray
    log_weights: np.ndarray
    acceptance_rate: float
    final: Subset
    universe: int = field(repr=False, default=0)

    @property
    def samples(self) -> list[Subset]:
        return [Subset(self.final.kind, self.universe, int(s)) for s in self.masks]

    def __len__(self) -> int:
        return len(self.masks)


def run(config: ChainConfig) -> Trace:
    """Simulate the chain; a pure function of ``config`` (seed included)."""
    model, g = config.model, config.graph
    kind = model.kind
    k = g.universe(kind)
    if config.steps and k == 0:
        raise EmptyGroundSetError(f"no {kind.value}s to flip")

    cache: dict[int, float] = {}
    use_table = k <= 16
    table = log_weight_table(model, g) if use_table and config.steps else None

    def lw(mask: int) -> float:
        if table is not None:
            return float(table[mask])
        val = cache.get(mask)
        if val is None:
            val = float(log_weights_of_masks(model, g, [mask])[0])
            if len(cache) < 1 << 20:
                cache[mask] = val
        return val

    rng = ChainRNG(config.seed)
    state = config.initial.mask
    state_lw = lw(state) if config.steps else 0.0
    accepted = 0
    kept_masks, kept_steps, kept_lw = [], [], []
    burn_in, thin = config.burn_in, config.thinning
    for t in range(1, config.steps + 1):
        i = rng.index(k)
        u = rng.uniform()
        proposal = state ^ (1 << i)
        prop_lw = lw(proposal)
        if u < 0.5 * math.exp(min(prop_lw - state_lw, 0.0)):
            state, state_lw = proposal, prop_lw
            accepted += 1
        if t > burn_in and (t - burn_in) % thin == 0:
            kept_masks.append(state)
            kept_steps.append(t)
            kept_lw.append(state_lw)
    rate = accepted / config.steps if config.steps else 0.0
    return Trace(
        masks=np.array(kept_masks, dtype=np.int64 if k <= 62 else object),
        sample_steps=np.array(kept_steps, dtype=np.int64),
        log_weights=np.array(kept_lw, dtype=np.float64),
        acceptance_rate=rate,
        final=Subset(kind, k, state),
        universe=k,
    )


def transition_probability(model: WeightModel, g: Graph, h: Subset, h2: Subset) -> float:
    """Exact one-step probability P(h, h2)."""
    if h.kind is not model.kind or h2.kind is not model.kind:
        raise ValueError("subset kinds must match the model")
    k = g.universe(model.kind)
    diff = h.mask ^ h2.mask
    if diff == 0:
        if k == 0:
            return 1.0
        neighbours = [h.mask ^ (1 << i) for i in range(k)]
        lw = log_weights_of_masks(model, g, [h.mask] + neighbours)
        moves = sum(acceptance_probability(float(x - lw[0])) for x in lw[1:]) / k
        return 1.0 - moves
    if diff & (diff - 1):
        return 0.0
    lw = log_weights_of_masks(model, g, [h.mask, h2.mask])
    return acceptance_probability(float(lw[1] - lw[0])) / k


def transition_matrix(model: WeightModel, g: Graph, cap: int = 1 << 12) -> np.ndarray:
    """Dense transition matrix over all states, indexed by bitmask."""
    k = g.universe(model.kind)
    size = 1 << k
    if size > cap:
        raise CapExceededError(f"{size} states exceed the dense matrix cap {cap}")
    lw = log_weight_table(model, g)
    states = np.arange(size)
    P = np.zeros((size, size))
    if k == 0:
        P[0, 0] = 1.0
        return P
    for i in range(k):
        other = states ^ (1 << i)
        P[states, other] = 0.5 * np.exp(np.minimum(lw[other] - lw, 0.0)) / k
    P[states, states] = 1.0 - P.sum(axis=1)
    return P


def empirical_vector(trace: Trace) -> np.ndarray:
    """Visit frequencies of the retained samples as a dense vector over all states."""
    counts = np.bincount(trace.masks, minlength=1 << trace.universe).astype(np.float64)
    total = counts.sum()
    return counts / total if total else counts


def empirical_distribution(config: ChainConfig, exact: bool = True) -> dict[Subset, float]:
    """Normalized visit frequencies over the thinned samples of one run."""
    k = config.graph.universe(config.model.kind)
    if exact and k > 20:
        raise CapExceededError(f"2^{k} states exceed the exact-comparison cap 2^20")
    trace = run(config)
    if not len(trace):
        return {}
    values, counts = np.unique(trace.masks, return_counts=True)
    total = counts.sum()
    kind = config.model.kind
    return {Subset(kind, k, int(v)): c / total for v, c in zip(values, counts)}
