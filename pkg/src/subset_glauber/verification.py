"""Exhaustive small-instance checks of the structural bounds.

Everything here enumerates the full state space, so the caps are deliberately
small. The congestion and lemma sweeps relabel states so that bit ``p`` is the
element at ordering position ``p``; then the pairs (I, F) routed through a
transition factor into a prefix part and a suffix part, which turns the
2^{2k} sum into a handful of matrix products.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import product

import numpy as np

from .graph import Graph, Kind, Subset
from .models import (
    CapExceededError,
    WeightModel,
    exact_partition_log,
    graph_log_weight,
    log_weight_table,
)
from .dynamics import transition_matrix
from .widths import Ordering, optimal_edge_ordering, optimal_vertex_ordering

LOG_SLACK = 1e-9
CONGESTION_CAP = 1 << 10
MIXING_CAP = 1 << 10


# stationary distribution and total variation --------------------------------

def stationary_distribution(model: WeightModel, g: Graph, cap: int = 1 << 20) -> np.ndarray:
    """pi(S) proportional to w(S), as a vector indexed by bitmask."""
    size = 1 << g.universe(model.kind)
    if size > cap:
        raise CapExceededError(f"{size} states exceed the cap {cap}")
    lw = log_weight_table(model, g)
    return np.exp(lw - exact_partition_log(model, g))


def tv_distance(nu, nu2, tol: float = 1e-9) -> float:
    nu, nu2 = np.asarray(nu, dtype=np.float64), np.asarray(nu2, dtype=np.float64)
    if nu.shape != nu2.shape:
        raise ValueError("distributions have different support sizes")
    for d in (nu, nu2):
        if abs(d.sum() - 1.0) > tol or (d < 0).any():
            raise ValueError("distribution is not normalized")
    return 0.5 * float(np.abs(nu - nu2).sum())


# canonical paths -------------------------------------------------------------

@dataclass(frozen=True)
class CanonicalPath:
    states: tuple[Subset, ...]
    flips: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.flips)


def canonical_path(o: Ordering, i: Subset, f: Subset) -> CanonicalPath:
    """Path from ``i`` to ``f`` flipping the elements of I xor F in ordering position."""
    if i.kind is not o.kind or f.kind is not o.kind:
        raise ValueError("ordering and subsets must have the same kind")
    if i.universe != f.universe or i.universe != len(o.perm):
        raise ValueError("subset universe does not match the ordering")
    diff = i.mask ^ f.mask
    flips = tuple(x for x in o.perm if diff >> x & 1)
    states = [i]
    for x in flips:
        states.append(states[-1].flip(x))
    return CanonicalPath(tuple(states), flips)


def _position_relabel(perm) -> np.ndarray:
    """relabel[p_mask] = original mask, where bit p of p_mask is element perm[p]."""
    k = len(perm)
    p_masks = np.arange(1 << k, dtype=np.int64)
    orig = np.zeros(1 << k, dtype=np.int64)
    for p, x in enumerate(perm):
        orig |= (p_masks >> p & 1) << x
    return orig


@lru_cache(maxsize=32)
def _hamming(bits: int) -> np.ndarray:
    a = np.arange(1 << bits, dtype=np.int64)
    x = a[:, None] ^ a[None, :]
    out = np.zeros_like(x)
    for i in range(bits):
        out += x >> i & 1
    return out.astype(np.float64)


# congestion -----------------------------------------------------------------

@dataclass(frozen=True)
class CongestionReport:
    rho: float
    argmax_transition: tuple[Subset, Subset] | None
    bound: float
    ordering_width: int
    lam_hat: float
    kind: Kind
    passed: bool

    def to_json(self) -> dict:
        return {
            "rho": self.rho,
            "argmax_transition": None
            if self.argmax_transition is None
            else [s.hex() for s in self.argmax_transition],
            "bound": self.bound,
            "ordering_width": self.ordering_width,
            "lambda_hat": self.lam_hat,
            "kind": self.kind.value,
            "pass": self.passed,
        }


def congestion_bound(k: int, lam_hat: float, width: int) -> float:
    """2 k^2 lambda_hat^{4 width}; ``k`` is m for edge chains and n for vertex chains."""
    return 2.0 * k * k * lam_hat ** (4 * width)


def transition_loads(pi_pos: np.ndarray, k: int) -> np.ndarray:
    """loads[p, h] = sum of pi(I) pi(F) |gamma| over paths using the move h -> h xor bit p.

    States are in position labelling (bit p = ordering position p).
    """
    loads = np.zeros((k, 1 << k))
    for p in range(k):
        hi_bits = k - p - 1
        A = pi_pos.reshape(1 << hi_bits, 2, 1 << p)
        s_low = A.sum(axis=2)  # [hh, hp]: sum over I's free low part
        d_low = A @ _hamming(p)  # [hh, hp, hl]: sum_a A[hh,hp,a] |a xor hl|
        s_high = A.sum(axis=0)  # [hp, hl]: sum over F's free high part
        d_high = np.einsum("hb,bpl->hpl", _hamming(hi_bits), A)  # sum_b |hh xor b| A[b,hp,hl]
        # F takes the opposite bit at position p
        sf = s_high[::-1]  # [hp, hl] -> mass of F with bit 1-hp
        df = d_high[:, ::-1, :]
        load = (
            d_low * sf[None, :, :]
            + s_low[:, :, None] * sf[None, :, :]
            + s_low[:, :, None] * df
        )
        loads[p] = load.reshape(-1)
    return loads


def congestion(
    model: WeightModel, g: Graph, o: Ordering, cap: int = CONGESTION_CAP
) -> CongestionReport:
    """Exact congestion of the canonical paths of ``o`` (self-loops excluded)."""
    if o.kind is not model.kind:
        raise ValueError("ordering kind does not match the model")
    k = g.universe(model.kind)
    if 1 << k > cap:
        raise CapExceededError(f"2^{k} states exceed the congestion cap {cap}")
    bound = congestion_bound(k, model.lam_hat, o.width)
    if k == 0:
        return CongestionReport(0.0, None, bound, o.width, model.lam_hat, model.kind, True)
    relabel = _position_relabel(o.perm)
    lw = log_weight_table(model, g)[relabel]
    log_z = float(np.logaddexp.reduce(lw))
    pi = np.exp(lw - log_z)
    loads = transition_loads(pi, k)
    states = np.arange(1 << k, dtype=np.int64)
    best, arg = -1.0, None
    for p in range(k):
        other = states ^ (1 << p)
        # pi(H) P(H, H') = min(pi(H), pi(H')) / (2k)
        flow = np.exp(np.minimum(lw, lw[other]) - log_z) / (2 * k)
        ratio = loads[p] / flow
        j = int(np.argmax(ratio))
        if ratio[j] > best:
            best, arg = float(ratio[j]), (int(relabel[j]), int(relabel[other[j]]))
    argmax = (Subset(model.kind, k, arg[0]), Subset(model.kind, k, arg[1]))
    return CongestionReport(best, argmax, bound, o.width, model.lam_hat, model.kind, best <= bound)


def default_ordering(model: WeightModel, g: Graph) -> Ordering:
    if model.kind is Kind.EDGE:
        return optimal_edge_ordering(g)
    return optimal_vertex_ordering(g)


# lemma ratio ----------------------------------------------------------------

@dataclass(frozen=True)
class LemmaReport:
    log_ratio: float
    witness: tuple[Subset, Subset, Subset] | None  # (I, F, H)
    log_bound: float
    ordering_width: int
    passed: bool

    @property
    def ratio(self) -> float:
        return math.exp(self.log_ratio)

    def to_json(self) -> dict:
        return {
            "log_ratio": self.log_ratio,
            "ratio": self.ratio,
            "log_bound": self.log_bound,
            "ordering_width": self.ordering_width,
            "witness": None if self.witness is None else [s.hex() for s in self.witness],
            "pass": self.passed,
        }


def lemma_report(model: WeightModel, g: Graph, o: Ordering, cap: int = CONGESTION_CAP) -> LemmaReport:
    """Max over I, F and H on the canonical path of w(I)w(F) / (w(H)w(C)), C = I xor F xor H."""
    if o.kind is not model.kind:
        raise ValueError("ordering kind does not match the model")
    k = g.universe(model.kind)
    if 1 << k > cap:
        raise CapExceededError(f"2^{k} states exceed the cap {cap}")
    log_bound = 4 * o.width * math.log(model.lam_hat)
    relabel = _position_relabel(o.perm)
    lw = log_weight_table(model, g)[relabel]
    best, witness = 0.0, None
    for c in range(k + 1):
        # H keeps F below position c and I from c on
        M = lw.reshape(1 << (k - c), 1 << c)  # [high, low]
        T = (
            M[:, None, :, None]
            + M[None, :, None, :]
            - M[:, None, None, :]
            - M[None, :, :, None]
        )  # [hI, hF, lI, lF]
        j = int(np.argmax(T))
        if T.flat[j] > best or witness is None:
            h1, h2, l1, l2 = np.unravel_index(j, T.shape)
            best = float(T.flat[j])
            I = (int(h1) << c) | int(l1)
            F = (int(h2) << c) | int(l2)
            H = (int(h1) << c) | int(l2)
            witness = tuple(Subset(model.kind, k, int(relabel[x])) for x in (I, F, H))
    return LemmaReport(best, witness, log_bound, o.width, best <= log_bound + LOG_SLACK)


def lemma_ratio_max(model: WeightModel, g: Graph, o: Ordering, cap: int = CONGESTION_CAP) -> float:
    return lemma_report(model, g, o, cap).ratio


# multiplicativity -----------------------------------------------------------

@dataclass
class MultiplicativityReport:
    lam: float
    lam_hat: float
    kind: Kind
    checked: int = 0
    max_excess: float = -math.inf  # max of |log ratio| - |K| log lambda_hat
    max_log_ratio_per_cut: float = 0.0  # max |log ratio| / |K| over nonempty cuts
    witness: dict | None = None
    passed: bool = True

    def to_json(self) -> dict:
        return {
            "lambda": self.lam,
            "lambda_hat": self.lam_hat,
            "kind": self.kind.value,
            "checked": self.checked,
            "max_excess": self.max_excess,
            "max_log_ratio_per_cut_vertex": self.max_log_ratio_per_cut,
            "witness": self.witness,
            "pass": self.passed,
        }


def _piece_graph(g: Graph, vmask: int, emask: int) -> tuple[Graph, list[int]]:
    keep = [v for v in range(g.n) if vmask >> v & 1]
    pos = {v: i for i, v in enumerate(keep)}
    idx = [i for i in range(g.m) if emask >> i & 1]
    return Graph(len(keep), tuple((pos[g.edges[i][0]], pos[g.edges[i][1]]) for i in idx)), idx


def piece_log_weight(model: WeightModel, g: Graph, vmask: int, emask: int) -> float:
    """log w of the graph (vmask, emask), both given in the labelling of ``g``."""
    piece, idx = _piece_graph(g, vmask, emask)
    return graph_log_weight(model.restrict(idx), piece)


def induced_log_weight(model: WeightModel, g: Graph, vmask: int) -> float:
    """log w(G[vmask]) with the graph being weighted taken as G[vmask] itself."""
    emask = 0
    for i, (u, v) in enumerate(g.edges):
        if vmask >> u & 1 and vmask >> v & 1:
            emask |= 1 << i
    piece, _ = _piece_graph(g, vmask, emask)
    return graph_log_weight(model, piece)


def split_log_ratio(model: WeightModel, g: Graph, v1: int, k: int, v2: int, e1: int, s: int) -> float:
    """log of w((V1+K, E1)) w((V2+K, E2)) / w((V, S)) with E2 = S - E1."""
    full = (1 << g.n) - 1
    return (
        piece_log_weight(model, g, v1 | k, e1)
        + piece_log_weight(model, g, v2 | k, s & ~e1)
        - piece_log_weight(model, g, full, s)
    )


@dataclass(frozen=True)
class _EdgeSplits:
    pieces: tuple[tuple[int, int], ...]  # (vmask, emask)
    left: np.ndarray
    right: np.ndarray
    whole: np.ndarray
    cut: np.ndarray
    meta: tuple[tuple[int, int, int, int, int], ...]  # (s, v1, k, v2, e1)


def _assignments(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    v1s, ks, v2s = [], [], []
    for labels in product((0, 1, 2), repeat=n):
        masks = [0, 0, 0]
        for v, lab in enumerate(labels):
            masks[lab] |= 1 << v
        v1s.append(masks[0])
        ks.append(masks[1])
        v2s.append(masks[2])
    return np.array(v1s), np.array(ks), np.array(v2s)


@lru_cache(maxsize=64)
def _edge_splits(g: Graph, subgraph_cap: int) -> _EdgeSplits:
    v1s, ks, v2s = _assignments(g.n)
    bad = []
    for u, v in g.edges:
        a, b = 1 << u, 1 << v
        bad.append(((v1s & a) != 0) & ((v2s & b) != 0) | ((v1s & b) != 0) & ((v2s & a) != 0))
    inc_v = [0] * g.n  # per vertex, incident edge mask
    for i, (u, v) in enumerate(g.edges):
        inc_v[u] |= 1 << i
        inc_v[v] |= 1 << i
    full = (1 << g.n) - 1
    piece_id: dict[tuple[int, int], int] = {}

    def pid(vm, em):
        key = (vm, em)
        if key not in piece_id:
            piece_id[key] = len(piece_id)
        return piece_id[key]

    left, right, whole, cut, meta = [], [], [], [], []
    hosts = range(1 << g.m)
    if len(hosts) > subgraph_cap:
        # the base graph first, then the others in index order up to the cap
        hosts = [(1 << g.m) - 1] + list(range(subgraph_cap - 1))
    for s in hosts:
        invalid = np.zeros(len(v1s), dtype=bool)
        for i in range(g.m):
            if s >> i & 1:
                invalid |= bad[i]
        w_id = pid(full, s)
        for a in np.flatnonzero(~invalid):
            v1, k, v2 = int(v1s[a]), int(ks[a]), int(v2s[a])
            forced1 = 0
            free = 0
            for v in range(g.n):
                if v1 >> v & 1:
                    forced1 |= inc_v[v]
            forced1 &= s
            for i in range(g.m):
                if s >> i & 1:
                    u, w = g.edges[i]
                    if k >> u & 1 and k >> w & 1:
                        free |= 1 << i
            sub = free
            while True:
                e1 = forced1 | sub
                left.append(pid(v1 | k, e1))
                right.append(pid(v2 | k, s & ~e1))
                whole.append(w_id)
                cut.append(bin(k).count("1"))
                meta.append((s, v1, k, v2, e1))
                if sub == 0:
                    break
                sub = (sub - 1) & free
    pieces = tuple(sorted(piece_id, key=piece_id.get))
    return _EdgeSplits(pieces, np.array(left), np.array(right), np.array(whole), np.array(cut), tuple(meta))


def _fill_report(report: MultiplicativityReport, log_ratio: np.ndarray, cut: np.ndarray, describe):
    lhat = math.log(report.lam_hat)
    excess = np.abs(log_ratio) - cut * lhat
    report.checked = len(log_ratio)
    if not len(log_ratio):
        return report
    j = int(np.argmax(excess))
    report.max_excess = float(excess[j])
    nonempty = cut > 0
    if nonempty.any():
        report.max_log_ratio_per_cut = float((np.abs(log_ratio[nonempty]) / cut[nonempty]).max())
    report.passed = report.max_excess <= LOG_SLACK
    report.witness = describe(j) | {"log_ratio": float(log_ratio[j]), "cut_size": int(cut[j])}
    return report


def check_edge_multiplicativity(
    model: WeightModel, g: Graph, lam: float | None = None, subgraph_cap: int = 1 << 12
) -> MultiplicativityReport:
    """Check lambda-multiplicativity on ``g`` and its spanning subgraphs.

    Every separation (V1, K, V2) of each host (V, S) and every appropriate
    partition (E1, E2) of S is tried; edges inside K go to either side.
    """
    if model.kind is not Kind.EDGE:
        raise ValueError("edge multiplicativity needs an edge model")
    if g.n > 12:
        raise CapExceededError("separation enumeration is capped at 12 vertices")
    model.check_graph(g)
    lam = model.lam if lam is None else lam
    report = MultiplicativityReport(lam, max(lam, 1.0 / lam), Kind.EDGE)
    splits = _edge_splits(g, subgraph_cap)
    weights = np.array([piece_log_weight(model, g, vm, em) for vm, em in splits.pieces])
    log_ratio = weights[splits.left] + weights[splits.right] - weights[splits.whole]

    def describe(j):
        s, v1, k, v2, e1 = splits.meta[j]
        return {
            "subgraph": f"{s:x}",
            "v1": f"{v1:x}",
            "k": f"{k:x}",
            "v2": f"{v2:x}",
            "e1": f"{e1:x}",
            "e2": f"{s & ~e1:x}",
        }

    return _fill_report(report, log_ratio, splits.cut, describe)


@lru_cache(maxsize=64)
def _vertex_splits(g: Graph):
    nbr = g.neighbor_masks()
    full = (1 << g.n) - 1
    left, right, whole, cut, meta = [], [], [], [], []
    host = full
    while True:
        # v1 ranges over submasks of host, k over submasks of the remainder
        v1 = host
        while True:
            rest = host & ~v1
            k = rest
            while True:
                v2 = rest & ~k
                if all(not (v1 >> v & 1) or not (nbr[v] & v2) for v in range(g.n)):
                    left.append(v1)
                    right.append(v2 | k)
                    whole.append(host)
                    cut.append(bin(k).count("1"))
                    meta.append((host, v1, k, v2))
                if k == 0:
                    break
                k = (k - 1) & rest
            if v1 == 0:
                break
            v1 = (v1 - 1) & host
        if host == 0:
            break
        host = (host - 1) & full
    return np.array(left), np.array(right), np.array(whole), np.array(cut), tuple(meta)


def check_vertex_multiplicativity(
    model: WeightModel, g: Graph, lam: float | None = None
) -> MultiplicativityReport:
    """Check vertex lambda-multiplicativity on ``g`` and all its induced subgraphs.

    The ratio is w(G[V1]) w(G[V2 + K]) / w(G) for every separation of each
    induced subgraph G; note V1 is weighed without the cut.
    """
    if model.kind is not Kind.VERTEX:
        raise ValueError("vertex multiplicativity needs a vertex model")
    if g.n > 12:
        raise CapExceededError("separation enumeration is capped at 12 vertices")
    lam = model.lam if lam is None else lam
    report = MultiplicativityReport(lam, max(lam, 1.0 / lam), Kind.VERTEX)
    left, right, whole, cut, meta = _vertex_splits(g)
    weights = np.array([induced_log_weight(model, g, vm) for vm in range(1 << g.n)])
    log_ratio = weights[left] + weights[right] - weights[whole]

    def describe(j):
        host, v1, k, v2 = meta[j]
        return {"induced_on": f"{host:x}", "v1": f"{v1:x}", "k": f"{k:x}", "v2": f"{v2:x}"}

    return _fill_report(report, log_ratio, cut, describe)


def check_multiplicativity(model: WeightModel, g: Graph, lam: float | None = None, **kw):
    if model.kind is Kind.EDGE:
        return check_edge_multiplicativity(model, g, lam, **kw)
    return check_vertex_multiplicativity(model, g, lam)


# mixing ---------------------------------------------------------------------

@dataclass(frozen=True)
class MixingReport:
    tau: int
    epsilon: float
    sinclair_bound: float
    pi_min: float
    rho: float
    passed: bool

    def to_json(self) -> dict:
        return {
            "tau": self.tau,
            "epsilon": self.epsilon,
            "sinclair_bound": self.sinclair_bound,
            "pi_min": self.pi_min,
            "rho": self.rho,
            "pass": self.passed,
        }


def _worst_tv(Q: np.ndarray, pi: np.ndarray) -> float:
    return 0.5 * float(np.abs(Q - pi[None, :]).sum(axis=1).max())


def mixing_time(P: np.ndarray, pi: np.ndarray, eps: float) -> int:
    """Smallest t with max_H TV(P^t(H, .), pi) <= eps.

    The worst-start distance is nonincreasing in t, so the search doubles t
    with repeated squaring and then bisects with the stored powers.
    """
    if _worst_tv(np.eye(len(pi)), pi) <= eps:
        return 0
    powers = [P]
    while _worst_tv(powers[-1], pi) > eps:
        if len(powers) > 60:
            raise RuntimeError("chain does not reach the requested distance")
        powers.append(powers[-1] @ powers[-1])
    # d(2^(J-1)) > eps >= d(2^J); bisect inside that window
    J = len(powers) - 1
    if J == 0:
        return 1
    lo, Q = 1 << (J - 1), powers[J - 1]
    for j in range(J - 2, -1, -1):
        cand = Q @ powers[j]
        if _worst_tv(cand, pi) > eps:
            lo, Q = lo + (1 << j), cand
    return lo + 1


def tv_curve(P: np.ndarray, pi: np.ndarray, t_max: int) -> list[float]:
    """Worst-start TV distance for t = 0..t_max by iterated row updates."""
    Q = np.eye(len(pi))
    out = [_worst_tv(Q, pi)]
    for _ in range(t_max):
        Q = Q @ P
        out.append(_worst_tv(Q, pi))
    return out


def sinclair_bound(rho: float, pi_min: float, eps: float) -> float:
    return rho * (math.log(1.0 / pi_min) + math.log(1.0 / eps))


def exact_mixing_time(
    model: WeightModel,
    g: Graph,
    eps: float,
    congestion_report: CongestionReport | None = None,
    cap: int = MIXING_CAP,
) -> MixingReport:
    size = 1 << g.universe(model.kind)
    if size > cap:
        raise CapExceededError(f"{size} states exceed the mixing cap {cap}")
    if not 0 < eps < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    if congestion_report is None:
        congestion_report = congestion(model, g, default_ordering(model, g), cap=cap)
    P = transition_matrix(model, g, cap=cap)
    pi = stationary_distribution(model, g)
    tau = mixing_time(P, pi, eps)
    pi_min = float(pi.min())
    bound = sinclair_bound(congestion_report.rho, pi_min, eps)
    return MixingReport(tau, eps, bound, pi_min, congestion_report.rho, tau <= bound)
