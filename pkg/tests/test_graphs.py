import itertools
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from perclab.graphs import (
    BinaryTree,
    Hypercubic,
    TreeCrossLine,
    Triangular,
    build_graph,
    dumps_graph,
    from_edges,
    isoperimetric_ratio,
    loads_graph,
    parse_spec,
    vertex_boundary,
)

GOLDEN = Path(__file__).parent / "golden"


def test_small_counts():
    g = build_graph(Hypercubic(2, 3))
    assert (g.n_vertices, g.n_edges) == (9, 12)
    t = build_graph(BinaryTree(2))
    assert (t.n_vertices, t.n_edges) == (7, 6)
    assert sorted(map(tuple, t.edges.tolist())) == [(0, 1), (0, 2), (1, 3), (1, 4), (2, 5), (2, 6)]


@pytest.mark.parametrize("d", [2, 3])
@pytest.mark.parametrize("L", range(2, 9))
def test_hypercubic_edge_count(d, L):
    g = build_graph(Hypercubic(d, L))
    assert g.n_vertices == L**d
    assert g.n_edges == d * L ** (d - 1) * (L - 1)


@pytest.mark.parametrize("L", [2, 3, 4, 6])
def test_hypercubic_edges_are_unit_distance(L):
    g = build_graph(Hypercubic(2, L))
    want = {
        (i, j)
        for i, j in itertools.combinations(range(g.n_vertices), 2)
        if abs(g.coords[i] - g.coords[j]).sum() == 1
    }
    assert set(map(tuple, g.edges.tolist())) == want


@pytest.mark.parametrize("L", [2, 3, 4, 5])
def test_triangular_matches_enumeration(L):
    # brute force over all coordinate pairs
    pts = [(x, y) for x in range(L) for y in range(L)]
    steps = {(1, 0), (0, 1), (1, 1)}
    pairs = {
        frozenset((a, b))
        for a, b in itertools.permutations(pts, 2)
        if (b[0] - a[0], b[1] - a[1]) in steps
    }
    g = build_graph(Triangular(L))
    got = {frozenset((tuple(g.coords[u]), tuple(g.coords[v]))) for u, v in g.edges.tolist()}
    assert g.n_vertices == len(pts)
    assert got == pairs
    if L == 4:
        assert g.n_edges == 33


def test_tree_cross_line_is_product():
    g = build_graph(TreeCrossLine(2, 3))
    assert g.n_vertices == 21
    assert g.n_edges == 6 * 3 + 7 * 2


@pytest.mark.parametrize(
    "spec",
    [Hypercubic(1, 3), Hypercubic(2, 1), Triangular(1), BinaryTree(0), TreeCrossLine(1, 1)],
)
def test_invalid_specs_rejected(spec):
    with pytest.raises(ValueError):
        build_graph(spec)


@pytest.mark.parametrize("spec", [Hypercubic(2, 5), Hypercubic(3, 3), Triangular(4), BinaryTree(4), TreeCrossLine(2, 4)])
def test_deterministic_and_consistent(spec):
    a, b = build_graph(spec), build_graph(spec)
    assert (a.edges == b.edges).all()
    assert (a.edges[:, 0] < a.edges[:, 1]).all()
    assert len({tuple(e) for e in a.edges.tolist()}) == a.n_edges
    for v, nbrs in enumerate(a.adjacency):
        for nb, e in nbrs:
            assert set(a.edges[e].tolist()) == {v, nb}
    assert sum(len(x) for x in a.adjacency) == 2 * a.n_edges


def test_boundary_examples():
    g = build_graph(Hypercubic(2, 3))
    everything = range(9)
    assert vertex_boundary(g, everything, "lattice") == frozenset(everything) - {4}
    assert vertex_boundary(g, [4], "subgraph") == {4}
    assert vertex_boundary(g, everything, "subgraph") == frozenset()


def test_isoperimetric_examples():
    for n, want in [(4, Fraction(12, 16)), (10, Fraction(36, 100))]:
        g = build_graph(Hypercubic(2, n))
        assert isoperimetric_ratio(g, range(g.n_vertices)) == want
    with pytest.raises(ValueError):
        isoperimetric_ratio(build_graph(Hypercubic(2, 3)), [])


def test_amenability_signatures():
    ratios = [isoperimetric_ratio(g, range(g.n_vertices)) for g in (build_graph(Hypercubic(2, L)) for L in range(2, 40))]
    assert all(a > b for a, b in zip(ratios, ratios[1:]))
    assert ratios[-1] < Fraction(1, 9)
    for k in range(1, 11):
        t = build_graph(BinaryTree(k))
        r = isoperimetric_ratio(t, range(t.n_vertices))
        assert r == Fraction(2**k, 2 ** (k + 1) - 1)
        assert r > Fraction(1, 2)


def test_golden_dump():
    g = build_graph(Hypercubic(2, 3))
    assert dumps_graph(g) == (GOLDEN / "hypercubic_2_3.txt").read_text()


@pytest.mark.parametrize("spec", [Hypercubic(2, 4), Triangular(3), BinaryTree(3), TreeCrossLine(1, 3)])
def test_dump_round_trip(spec):
    g = build_graph(spec)
    h = loads_graph(dumps_graph(g))
    assert h.spec == spec and (h.edges == g.edges).all()
    assert parse_spec(repr(spec)) == spec


def test_from_edges_rejects_non_simple():
    with pytest.raises(ValueError):
        from_edges(3, [(0, 0)])
    with pytest.raises(ValueError):
        from_edges(3, [(0, 1), (1, 0)])


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 7), st.data())
def test_boundary_definition(L, data):
    g = build_graph(Hypercubic(2, L))
    W = data.draw(st.sets(st.integers(0, g.n_vertices - 1), min_size=1))
    got = vertex_boundary(g, W, "subgraph")
    want = {w for w in W if any(nb not in W for nb, _ in g.adjacency[w])}
    assert got == want
    lat = vertex_boundary(g, W, "lattice")
    assert got <= lat <= W
    assert lat - got <= g.boundary
