import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import graphs
from oracles import brute_width, ordering_width
from subset_glauber.graph import Graph, Kind, complete_graph, cycle_graph, path_graph, star_graph
from subset_glauber.models import CapExceededError
from subset_glauber.widths import (
    NotAPermutationError,
    Ordering,
    boundary_table,
    edge_boundary,
    greedy_ordering,
    linear_width_of_ordering,
    optimal_edge_ordering,
    optimal_vertex_ordering,
    parse_ordering,
    read_ordering,
    resolve_ordering,
    vertex_separation_of_ordering,
    write_ordering,
)

E, V = Kind.EDGE, Kind.VERTEX


def test_named_widths():
    for n in range(2, 9):
        assert optimal_edge_ordering(path_graph(n)).width == (1 if n >= 3 else 0)
    for n in range(3, 8):
        assert optimal_edge_ordering(cycle_graph(n)).width == 2
    for n in range(2, 7):
        assert optimal_vertex_ordering(complete_graph(n)).width == n - 1
    assert optimal_edge_ordering(star_graph(4)).width == 1
    assert optimal_vertex_ordering(star_graph(4)).width == 1


def test_ordering_widths_by_hand():
    c4 = cycle_graph(4)  # edges 01, 12, 23, 03
    assert linear_width_of_ordering(c4, [0, 1, 2, 3]) == 2
    p4 = path_graph(4)
    assert linear_width_of_ordering(p4, [0, 1, 2]) == 1
    assert linear_width_of_ordering(p4, [0, 2, 1]) == 2
    assert vertex_separation_of_ordering(p4, [0, 1, 2, 3]) == 1
    assert vertex_separation_of_ordering(p4, [1, 3, 0, 2]) == 2
    assert edge_boundary(p4, 0b001) == 1


def test_not_a_permutation():
    with pytest.raises(NotAPermutationError):
        linear_width_of_ordering(path_graph(4), [0, 0, 1])
    with pytest.raises(NotAPermutationError):
        Ordering.of(path_graph(3), V, [0, 1])


def test_exact_cap():
    with pytest.raises(CapExceededError):
        optimal_edge_ordering(complete_graph(6), cap=14)


def test_empty_universe():
    assert optimal_edge_ordering(Graph(3, ())).width == 0
    assert optimal_vertex_ordering(Graph(0, ())).perm == ()


def test_ordering_file_roundtrip(tmp_path):
    g = cycle_graph(5)
    o = optimal_edge_ordering(g)
    p = tmp_path / "o.txt"
    p.write_text(write_ordering(o))
    assert read_ordering(p, g, E) == o
    assert resolve_ordering(g, E, str(p)) == o
    with pytest.raises(NotAPermutationError):
        parse_ordering("0 1 2", g, E)


def test_resolve_modes():
    g = complete_graph(6)
    assert resolve_ordering(g, E, "auto", cap=10) == greedy_ordering(g, E)
    assert resolve_ordering(g, V, "auto") == optimal_vertex_ordering(g)
    assert greedy_ordering(path_graph(6), E).width == 1


@settings(max_examples=60, deadline=None)
@given(graphs(max_n=6, max_m=7))
def test_exact_matches_permutation_search(g):
    for kind, opt in ((E, optimal_edge_ordering), (V, optimal_vertex_ordering)):
        o = opt(g)
        assert o.width == brute_width(g.n, g.edges, kind)
        assert ordering_width(g.n, g.edges, kind, o.perm) == o.width


@settings(max_examples=100, deadline=None)
@given(graphs(max_n=7), st.data())
def test_width_of_any_ordering(g, data):
    for kind in (E, V):
        k = g.universe(kind)
        perm = data.draw(st.permutations(range(k)))
        o = Ordering.of(g, kind, perm)
        assert o.width == ordering_width(g.n, g.edges, kind, perm)
        assert o.width >= resolve_ordering(g, kind).width
        assert greedy_ordering(g, kind).width >= resolve_ordering(g, kind).width
        pos = o.position()
        assert [o.perm[pos[x]] for x in range(k)] == list(range(k))


@settings(max_examples=80, deadline=None)
@given(graphs(max_n=6))
def test_lw_sandwiches_vertex_separation(g):
    vs = optimal_vertex_ordering(g).width
    lw = optimal_edge_ordering(g).width
    assert lw <= vs + 1
    if max(map(len, g.adjacency), default=0) >= 2:
        assert vs <= lw
    else:
        # a matching: no vertex is shared by two edges, yet each edge costs one in vs
        assert (lw, vs) == (0, 1 if g.m else 0)


@settings(max_examples=40, deadline=None)
@given(graphs(max_n=6))
def test_boundary_table(g):
    t = boundary_table(g, E)
    assert all(t[s] == edge_boundary(g, s) for s in range(1 << g.m))
    assert t[0] == 0 and t[-1] == 0
