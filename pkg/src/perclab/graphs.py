"""Finite lattice and tree graphs with boundaries and isoperimetric diagnostics.

Vertices are numbered row-major by coordinate tuple, so ``build_graph`` is
deterministic and golden dumps are byte-stable. The triangular lattice is
embedded as Z^2 plus the (+1, +1) diagonals. Tree specs carry synthetic
coordinates ``(level, position)``; ``TreeCrossLine`` appends the line
coordinate.

The finite truncations used here (boxes, tree balls) are conventions: there
is no canonical finite piece of an infinite lattice.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Literal, Union

import numpy as np

__all__ = [
    "Hypercubic",
    "Triangular",
    "BinaryTree",
    "TreeCrossLine",
    "LatticeSpec",
    "FiniteGraph",
    "build_graph",
    "from_edges",
    "vertex_boundary",
    "isoperimetric_ratio",
    "dumps_graph",
    "loads_graph",
]


@dataclass(frozen=True)
class Hypercubic:
    d: int
    L: int

    def validate(self) -> None:
        if self.d < 2:
            raise ValueError(f"dimension must be >= 2, got d={self.d}")
        if self.L < 2:
            raise ValueError(f"side must be >= 2, got L={self.L}")


@dataclass(frozen=True)
class Triangular:
    L: int

    def validate(self) -> None:
        if self.L < 2:
            raise ValueError(f"side must be >= 2, got L={self.L}")


@dataclass(frozen=True)
class BinaryTree:
    depth: int

    def validate(self) -> None:
        if self.depth < 1:
            raise ValueError(f"depth must be >= 1, got depth={self.depth}")


@dataclass(frozen=True)
class TreeCrossLine:
    depth: int
    line_length: int

    def validate(self) -> None:
        if self.depth < 1:
            raise ValueError(f"depth must be >= 1, got depth={self.depth}")
        if self.line_length < 2:
            raise ValueError(f"line_length must be >= 2, got {self.line_length}")


LatticeSpec = Union[Hypercubic, Triangular, BinaryTree, TreeCrossLine]
BOX_SPECS = (Hypercubic, Triangular)


@dataclass(frozen=True, eq=False)
class FiniteGraph:
    """Immutable simple graph with integer coordinates and a boundary set.

    Attributes
    ----------
    n_vertices : int
    edges : ndarray of shape (m, 2)
        Edge endpoints with ``u < v``; row ``e`` is edge index ``e``.
    adjacency : tuple of tuple of (neighbor, edge index)
    coords : ndarray of shape (n, k)
    boundary : frozenset of int
        Vertices adjacent, in the infinite ambient graph, to a vertex outside.
    spec : LatticeSpec or None
        ``None`` for graphs built with :func:`from_edges`.
    """

    n_vertices: int
    edges: np.ndarray
    adjacency: tuple
    coords: np.ndarray
    boundary: frozenset
    spec: LatticeSpec | None = None
    _meta: dict = field(default_factory=dict, repr=False)

    @property
    def n_edges(self) -> int:
        return int(self.edges.shape[0])

    @property
    def is_box(self) -> bool:
        return isinstance(self.spec, BOX_SPECS)

    @property
    def side(self) -> int:
        if not self.is_box:
            raise ValueError("side is defined only for box graphs")
        return self.spec.L

    @cached_property
    def edge_index(self) -> dict[tuple[int, int], int]:
        return {(int(u), int(v)): e for e, (u, v) in enumerate(self.edges)}

    def edge_id(self, u: int, v: int) -> int:
        return self.edge_index[(u, v) if u < v else (v, u)]

    def face(self, axis: int, high: bool) -> np.ndarray:
        """Vertex indices on the box face ``coords[:, axis] == 0`` (or ``L-1``)."""
        if not self.is_box:
            raise ValueError("faces are defined only for box graphs")
        target = self.side - 1 if high else 0
        return np.flatnonzero(self.coords[:, axis] == target)

    @cached_property
    def boundary_mask(self) -> np.ndarray:
        mask = np.zeros(self.n_vertices, dtype=bool)
        mask[list(self.boundary)] = True
        mask.flags.writeable = False
        return mask

    @property
    def center(self) -> int:
        """Vertex nearest the box center (lower-left of the middle for even L)."""
        if not self.is_box:
            raise ValueError("center is defined only for box graphs")
        mid = (self.side - 1) // 2
        target = np.full(self.coords.shape[1], mid)
        return int(np.flatnonzero((self.coords == target).all(axis=1))[0])


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


def _assemble(n, edges, coords, boundary, spec) -> FiniteGraph:
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for e, (u, v) in enumerate(edges.tolist()):
        adj[u].append((v, e))
        adj[v].append((u, e))
    return FiniteGraph(
        n_vertices=n,
        edges=_freeze(edges),
        adjacency=tuple(tuple(a) for a in adj),
        coords=_freeze(np.asarray(coords, dtype=np.int64)),
        boundary=frozenset(int(b) for b in boundary),
        spec=spec,
    )


def _box(L: int, d: int, steps: list[tuple[int, ...]], spec) -> FiniteGraph:
    coords = list(itertools.product(range(L), repeat=d))
    weights = [L ** (d - 1 - i) for i in range(d)]
    edges = []
    for c in coords:
        u = sum(ci * w for ci, w in zip(c, weights))
        for step in steps:
            nc = [ci + si for ci, si in zip(c, step)]
            if all(0 <= x < L for x in nc):
                edges.append((u, sum(ci * w for ci, w in zip(nc, weights))))
    boundary = [i for i, c in enumerate(coords) if any(x in (0, L - 1) for x in c)]
    return _assemble(len(coords), edges, coords, boundary, spec)


def _tree_coords(depth: int) -> list[tuple[int, int]]:
    return [(lvl, pos) for lvl in range(depth + 1) for pos in range(2**lvl)]


def build_graph(spec: LatticeSpec) -> FiniteGraph:
    """Build the finite graph for ``spec``.

    Hypercubic and triangular specs give the box ``{0..L-1}^d``; a binary
    tree of depth ``k`` is the ball of radius ``k`` about the root of the
    rooted binary tree (heap order, boundary = leaves). ``TreeCrossLine`` is
    the Cartesian product of that tree with a path of ``line_length``
    vertices.
    """
    spec.validate()
    if isinstance(spec, Hypercubic):
        steps = [tuple(int(i == a) for i in range(spec.d)) for a in range(spec.d)]
        return _box(spec.L, spec.d, steps, spec)
    if isinstance(spec, Triangular):
        return _box(spec.L, 2, [(1, 0), (0, 1), (1, 1)], spec)
    if isinstance(spec, BinaryTree):
        n = 2 ** (spec.depth + 1) - 1
        first_leaf = 2**spec.depth - 1
        edges = [(v, c) for v in range(first_leaf) for c in (2 * v + 1, 2 * v + 2)]
        return _assemble(n, edges, _tree_coords(spec.depth), range(first_leaf, n), spec)
    if isinstance(spec, TreeCrossLine):
        n_tree = 2 ** (spec.depth + 1) - 1
        first_leaf = 2**spec.depth - 1
        T = spec.line_length
        edges, coords, boundary = [], [], []
        for v, (lvl, pos) in enumerate(_tree_coords(spec.depth)):
            for t in range(T):
                idx = v * T + t
                coords.append((lvl, pos, t))
                if v >= first_leaf or t in (0, T - 1):
                    boundary.append(idx)
                if v < first_leaf:
                    edges.append((idx, (2 * v + 1) * T + t))
                    edges.append((idx, (2 * v + 2) * T + t))
                if t + 1 < T:
                    edges.append((idx, idx + 1))
        edges.sort()
        return _assemble(n_tree * T, edges, coords, boundary, spec)
    raise TypeError(f"unknown lattice spec {spec!r}")


def from_edges(
    n_vertices: int,
    edges: Iterable[tuple[int, int]],
    boundary: Iterable[int] = (),
    coords=None,
) -> FiniteGraph:
    """Wrap an explicit simple graph. Edges are normalized to ``u < v``."""
    norm = []
    seen = set()
    for u, v in edges:
        u, v = int(u), int(v)
        if u == v:
            raise ValueError(f"self-loop at vertex {u}")
        if not (0 <= u < n_vertices and 0 <= v < n_vertices):
            raise ValueError(f"edge ({u}, {v}) out of range")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise ValueError(f"multi-edge {key}")
        seen.add(key)
        norm.append(key)
    if coords is None:
        coords = np.arange(n_vertices).reshape(-1, 1)
    return _assemble(n_vertices, norm, coords, boundary, None)


Ambient = Literal["lattice", "subgraph"]


def _as_vertex_set(graph: FiniteGraph, W: Iterable[int]) -> frozenset:
    W = frozenset(int(w) for w in W)
    bad = [w for w in W if not 0 <= w < graph.n_vertices]
    if bad:
        raise IndexError(f"vertices out of range: {sorted(bad)[:5]}")
    return W


def vertex_boundary(graph: FiniteGraph, W: Iterable[int], ambient: Ambient = "lattice") -> frozenset:
    """Members of ``W`` adjacent to some vertex outside ``W``.

    With ``ambient="lattice"`` adjacency is taken in the infinite lattice (or
    tree) the graph was cut from, so vertices of ``graph.boundary`` always
    qualify. With ``ambient="subgraph"`` only edges of ``graph`` count.
    """
    W = _as_vertex_set(graph, W)
    if ambient not in ("lattice", "subgraph"):
        raise ValueError(f"unknown ambient {ambient!r}")
    out = set()
    for w in W:
        if ambient == "lattice" and w in graph.boundary:
            out.add(w)
        elif any(nb not in W for nb, _ in graph.adjacency[w]):
            out.add(w)
    return frozenset(out)


def isoperimetric_ratio(graph: FiniteGraph, W: Iterable[int], ambient: Ambient = "lattice") -> Fraction:
    """Exact ``|boundary(W)| / |W|``."""
    W = _as_vertex_set(graph, W)
    if not W:
        raise ValueError("W must be non-empty")
    return Fraction(len(vertex_boundary(graph, W, ambient)), len(W))


_SPEC_RE = re.compile(r"^(\w+)\((.*)\)$")
_SPEC_TYPES = {c.__name__: c for c in (Hypercubic, Triangular, BinaryTree, TreeCrossLine)}


def parse_spec(text: str) -> LatticeSpec:
    """Inverse of ``repr(spec)``, e.g. ``"Hypercubic(d=2, L=3)"``."""
    m = _SPEC_RE.match(text.strip())
    if not m or m.group(1) not in _SPEC_TYPES:
        raise ValueError(f"cannot parse lattice spec {text!r}")
    kwargs = {}
    for part in filter(None, (s.strip() for s in m.group(2).split(","))):
        key, _, val = part.partition("=")
        kwargs[key.strip()] = int(val)
    return _SPEC_TYPES[m.group(1)](**kwargs)


def dumps_graph(graph: FiniteGraph) -> str:
    """Plain-text dump: header lines, then one ``u v`` edge per line."""
    lines = [
        "# perclab graph",
        f"spec: {graph.spec!r}" if graph.spec is not None else "spec: custom",
        f"vertices: {graph.n_vertices}",
        f"edges: {graph.n_edges}",
    ]
    lines += [f"{u} {v}" for u, v in graph.edges.tolist()]
    return "\n".join(lines) + "\n"


def loads_graph(text: str) -> FiniteGraph:
    """Read a dump. Lattice specs are rebuilt and checked against the edges."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != "# perclab graph":
        raise ValueError("missing '# perclab graph' header")
    header = dict(ln.split(": ", 1) for ln in lines[1:4])
    n = int(header["vertices"])
    m = int(header["edges"])
    edges = [tuple(map(int, ln.split())) for ln in lines[4:]]
    if len(edges) != m:
        raise ValueError(f"expected {m} edges, found {len(edges)}")
    if header["spec"] == "custom":
        return from_edges(n, edges)
    graph = build_graph(parse_spec(header["spec"]))
    if graph.n_vertices != n or graph.edges.tolist() != [list(e) for e in edges]:
        raise ValueError("edge list does not match the declared spec")
    return graph
