"""The small-graph corpus and the model test matrix used by the verification sweeps."""

from __future__ import annotations

import json
import os
from itertools import combinations
from typing import Iterator

import networkx as nx

from .graph import (
    Graph,
    complete_graph,
    cycle_graph,
    path_graph,
    read_graph,
    star_graph,
)
from .models import (
    AdjacencyRank,
    Interlace,
    MultiTutte,
    RandomCluster,
    Tutte,
    UPolynomial,
    WeightModel,
    model_from_config,
)


def is_connected(g: Graph) -> bool:
    if g.n <= 1:
        return True
    seen, stack = {0}, [0]
    while stack:
        u = stack.pop()
        for v, _ in g.adjacency[u]:
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return len(seen) == g.n


def labeled_graphs(n: int) -> Iterator[Graph]:
    """All simple graphs on vertices 0..n-1; edges listed in lexicographic pair order."""
    pairs = list(combinations(range(n), 2))
    for mask in range(1 << len(pairs)):
        yield Graph(n, tuple(p for i, p in enumerate(pairs) if mask >> i & 1))


def labeled_connected_graphs(n: int) -> list[Graph]:
    return [g for g in labeled_graphs(n) if is_connected(g)]


def named_families(max_edges: int = 8) -> list[tuple[str, Graph]]:
    out = [(f"P{n}", path_graph(n)) for n in range(2, max_edges + 2)]
    out += [(f"C{n}", cycle_graph(n)) for n in range(3, max_edges + 1)]
    out += [("K4", complete_graph(4))]
    out += [(f"S{k}", star_graph(k)) for k in range(1, max_edges + 1)]
    return out


def _key(g: Graph):
    return g.n, frozenset(tuple(sorted(e)) for e in g.edges)


def default_corpus(max_labeled_n: int = 5, max_edges: int = 8) -> list[tuple[str, Graph]]:
    """All labeled connected graphs with n <= 5, then named families up to ``max_edges``."""
    corpus, seen = [], set()
    for n in range(1, max_labeled_n + 1):
        for i, g in enumerate(labeled_connected_graphs(n)):
            corpus.append((f"L{n}_{i}", g))
            seen.add(_key(g))
    for name, g in named_families(max_edges):
        if _key(g) not in seen:
            corpus.append((name, g))
            seen.add(_key(g))
    return corpus


def isomorphism_representatives(graphs: list[tuple[str, Graph]]) -> list[tuple[str, Graph]]:
    """First member of each isomorphism class, in input order."""
    reps: list[tuple[str, Graph, nx.Graph]] = []
    buckets: dict[tuple, list[int]] = {}
    for name, g in graphs:
        h = nx.Graph()
        h.add_nodes_from(range(g.n))
        h.add_edges_from(g.edges)
        key = (g.n, g.m, tuple(sorted(d for _, d in h.degree())))
        if any(nx.is_isomorphic(h, reps[j][2]) for j in buckets.get(key, [])):
            continue
        buckets.setdefault(key, []).append(len(reps))
        reps.append((name, g, h))
    return [(name, g) for name, g, _ in reps]


def _cycled(pattern: list[float], length: int) -> tuple[float, ...]:
    return tuple(pattern[i % len(pattern)] for i in range(length))


def model_matrix(g: Graph) -> list[WeightModel]:
    """Two parameter points per family, with per-edge / per-size vectors sized to ``g``."""
    return [
        RandomCluster(2.0, 1.0),
        RandomCluster(0.5, 3.0),
        Tutte(3.0, 2.0),
        Tutte(1.5, 4.0),
        AdjacencyRank(2.0, 1.0),
        AdjacencyRank(0.6, 1.5),
        MultiTutte(1.5, _cycled([0.5, 2.0, 1.3], g.m)),
        MultiTutte(0.7, _cycled([3.0, 0.8], g.m)),
        UPolynomial(2.0, _cycled([1.2, 0.9, 1.1], max(g.n, 1))),
        UPolynomial(1.5, _cycled([0.8, 1.25], max(g.n, 1))),
        Interlace(2.0, 3.0),
        Interlace(3.0, 1.5),
    ]


def load_manifest(path) -> list[tuple[str, Graph, list[WeightModel] | None]]:
    """Manifest: JSON list of ``{"graph": path, "models": [config, ...]}``.

    Graph paths are relative to the manifest; ``models`` may be omitted to use
    the default matrix. ``graph-path`` / ``graph_path`` are accepted as keys.
    """
    base = os.path.dirname(os.path.abspath(path))
    with open(path) as fh:
        entries = json.load(fh)
    if not isinstance(entries, list):
        raise ValueError("corpus manifest must be a JSON list")
    out = []
    for entry in entries:
        gpath = entry.get("graph") or entry.get("graph-path") or entry.get("graph_path")
        if gpath is None:
            raise ValueError(f"manifest entry without a graph path: {entry!r}")
        g = read_graph(os.path.join(base, gpath))
        models = entry.get("models")
        out.append(
            (entry.get("name", gpath), g, None if models is None else [model_from_config(c) for c in models])
        )
    return out


def write_corpus(directory, graphs: list[tuple[str, Graph]]) -> str:
    """Write graphs as edge-list files plus ``manifest.json``; returns the manifest path."""
    os.makedirs(directory, exist_ok=True)
    entries = []
    for name, g in graphs:
        fname = f"{name}.txt"
        with open(os.path.join(directory, fname), "w") as fh:
            fh.write(g.to_text())
        entries.append({"name": name, "graph": fname})
    manifest = os.path.join(directory, "manifest.json")
    with open(manifest, "w") as fh:
        json.dump(entries, fh, indent=1)
    return manifest
