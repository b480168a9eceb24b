"""Generic rigidity in the plane: rigidity-matrix rank, (2,3) pebble game,
rigid-component census and rigidity percolation on the triangular lattice.

The pebble game follows Jacobs and Hendrickson: every vertex starts with two
pebbles, an accepted edge is covered by a pebble of its tail, and an edge is
independent iff four pebbles can be gathered on its endpoints. Rigid
components are read off afterwards by pinning three pebbles on an edge and
growing the set of vertices that cannot obtain a free pebble.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .graphs import FiniteGraph, Hypercubic, Triangular, build_graph
from .percolation import Estimate, _labels, check_probability, sample_bernoulli
from .seeding import derive_seed, make_rng

__all__ = [
    "Framework",
    "DegeneratePlacement",
    "random_framework",
    "rigidity_matrix",
    "rigidity_matrix_rank",
    "PebbleGame",
    "is_generically_rigid_2d",
    "rigid_component_census",
    "RigidCensus",
    "spanning_indicators",
    "estimate_theta_rig",
    "pivot_from_grid",
    "RIGIDITY_COLUMNS",
]

RIGIDITY_COLUMNS = ("p", "L", "theta_rig_estimate", "theta_rig_stderr", "theta_conn_estimate", "theta_conn_stderr")
RANK_TOL = 1e-9


class DegeneratePlacement(ValueError):
    """Two vertices share a position; draw a new placement."""


@dataclass(frozen=True)
class Framework:
    n_vertices: int
    edges: tuple  # ((u, v), ...)
    placement: np.ndarray  # (n, 2)


def random_framework(n_vertices: int, edges: Iterable[tuple[int, int]], seed) -> Framework:
    """Placement drawn uniformly from the unit square."""
    return Framework(n_vertices, tuple((int(u), int(v)) for u, v in edges), make_rng(seed).random((n_vertices, 2)))


def rigidity_matrix(fw: Framework) -> np.ndarray:
    R = np.zeros((len(fw.edges), 2 * fw.n_vertices))
    for row, (u, v) in enumerate(fw.edges):
        diff = fw.placement[u] - fw.placement[v]
        R[row, 2 * u : 2 * u + 2] = diff
        R[row, 2 * v : 2 * v + 2] = -diff
    return R


def rigidity_matrix_rank(fw: Framework, tol: float = RANK_TOL) -> int:
    """Rank of the ``|E| x 2n`` rigidity matrix (singular values above ``tol``).

    The framework is infinitesimally rigid iff the rank is ``2n - 3``.
    """
    if fw.n_vertices < 2:
        raise ValueError("need at least two vertices")
    if len(np.unique(np.round(fw.placement, 12), axis=0)) < fw.n_vertices:
        raise DegeneratePlacement("placement is not injective")
    if not fw.edges:
        return 0
    s = np.linalg.svd(rigidity_matrix(fw), compute_uv=False)
    return int((s > tol).sum())


class PebbleGame:
    """Incremental (2,3) pebble game on ``n`` vertices."""

    def __init__(self, n: int):
        self.n = n
        self.pebbles = [2] * n
        self.out: list[set[int]] = [set() for _ in range(n)]
        self.independent: list[tuple[int, int]] = []
        self.redundant: list[tuple[int, int]] = []

    def _find_pebble(self, start: int, blocked: set) -> list[int] | None:
        # DFS along out-edges for a vertex outside ``blocked`` with a free
        # pebble; returns the path start -> ... -> holder
        parent = {start: None}
        stack = [start]
        while stack:
            x = stack.pop()
            for y in self.out[x]:
                if y in parent or y in blocked:
                    continue
                parent[y] = x
                if self.pebbles[y] > 0:
                    path = [y]
                    while parent[path[-1]] is not None:
                        path.append(parent[path[-1]])
                    return path[::-1]
                stack.append(y)
        return None

    def _bring(self, a: int, blocked: set) -> bool:
        path = self._find_pebble(a, blocked | {a})
        if path is None:
            return False
        for x, y in zip(path, path[1:]):
            self.out[x].discard(y)
            self.out[y].add(x)
        self.pebbles[path[-1]] -= 1
        self.pebbles[a] += 1
        return True

    def _gather(self, u: int, v: int, total: int) -> int:
        # pull pebbles onto u and v (at most 2 each) until they hold ``total``;
        # a pebble reachable only through one endpoint is taken by that one
        while self.pebbles[u] + self.pebbles[v] < total:
            if self.pebbles[u] < 2 and self._bring(u, {v}):
                continue
            if self.pebbles[v] < 2 and self._bring(v, {u}):
                continue
            break
        return self.pebbles[u] + self.pebbles[v]

    def add_edge(self, u: int, v: int) -> bool:
        """Insert ``uv``; returns True iff it is independent."""
        if u == v:
            raise ValueError("self-loop")
        if self._gather(u, v, 4) == 4:
            self.pebbles[u] -= 1
            self.out[u].add(v)
            self.independent.append((u, v))
            return True
        self.redundant.append((u, v))
        return False

    @property
    def rank(self) -> int:
        return len(self.independent)

    def rigid_vertex_set(self, u: int, v: int, adjacency) -> set[int]:
        """Vertices rigidly attached to the pair ``u, v``.

        ``adjacency[x]`` lists neighbours of ``x`` in the inserted graph; the
        component is grown through it, testing each frontier vertex.
        """
        if self._gather(u, v, 3) < 3:
            raise RuntimeError("could not pin three pebbles on an edge")
        pinned = {u, v}
        rigid = {u, v}
        floppy: set[int] = set()
        frontier = [y for x in (u, v) for y in adjacency[x]]
        while frontier:
            w = frontier.pop()
            if w in rigid or w in floppy:
                continue
            if self.pebbles[w] > 0:
                floppy.add(w)
                continue
            reach = {w}
            stack = [w]
            found = False
            while stack and not found:
                x = stack.pop()
                for y in self.out[x]:
                    if y in reach or y in pinned:
                        continue
                    if self.pebbles[y] > 0 or y in floppy:
                        found = True
                        break
                    reach.add(y)
                    stack.append(y)
            if found:
                floppy.add(w)
                continue
            for x in reach:
                if x not in rigid:
                    rigid.add(x)
                    frontier.extend(adjacency[x])
        return rigid


def _adjacency(n: int, edges: Sequence[tuple[int, int]]) -> list[list[int]]:
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    return adj


def is_generically_rigid_2d(n_vertices: int, edges: Iterable[tuple[int, int]]) -> bool:
    """Laman rigidity via the pebble game: rank ``2n - 3`` (a single vertex counts as rigid)."""
    if n_vertices < 1:
        raise ValueError("need at least one vertex")
    if n_vertices == 1:
        return True
    game = PebbleGame(n_vertices)
    for u, v in edges:
        game.add_edge(int(u), int(v))
    return game.rank == 2 * n_vertices - 3


@dataclass(frozen=True)
class RigidCensus:
    components: tuple  # tuple of tuples of edge indices, one per maximal rigid component

    @property
    def sizes(self) -> tuple:
        return tuple(len(c) for c in self.components)

    def vertex_sets(self, graph: FiniteGraph) -> list[set[int]]:
        return [set(graph.edges[list(c)].ravel().tolist()) for c in self.components]


def _census_edges(n: int, edge_list: list[tuple[int, int]], edge_ids: list[int], seeds: Iterable[int] | None = None):
    game = PebbleGame(n)
    for u, v in edge_list:
        game.add_edge(u, v)
    adj = _adjacency(n, edge_list)
    by_pair = {(min(u, v), max(u, v)): eid for (u, v), eid in zip(edge_list, edge_ids)}
    assigned: set[int] = set()
    comps = []
    order = range(len(edge_list)) if seeds is None else list(seeds)
    for k in order:
        u, v = edge_list[k]
        if edge_ids[k] in assigned:
            continue
        R = game.rigid_vertex_set(u, v, adj)
        comp = sorted(by_pair[(min(x, y), max(x, y))] for x in R for y in adj[x] if x < y and y in R)
        assigned.update(comp)
        comps.append(tuple(comp))
    return comps


def rigid_component_census(graph: FiniteGraph, config) -> RigidCensus:
    """Partition the open edges into maximal generically rigid components."""
    config = np.asarray(config, dtype=bool)
    ids = np.flatnonzero(config).tolist()
    edge_list = [tuple(graph.edges[e].tolist()) for e in ids]
    comps = _census_edges(graph.n_vertices, edge_list, ids)
    return RigidCensus(tuple(sorted(comps)))


def _touches_both(vertices, graph: FiniteGraph) -> bool:
    col = graph.coords[list(vertices), -1]
    return bool((col == 0).any() and (col == graph.side - 1).any())


def spanning_indicators(graph: FiniteGraph, config) -> tuple[bool, bool]:
    """(rigid, connected) spanning indicators for the center vertex.

    Connected: the open cluster of the center touches the left and right
    faces. Rigid: some rigid component containing the center does.
    """
    config = np.asarray(config, dtype=bool)
    center = graph.center
    labels = _labels(graph, config)
    cluster = np.flatnonzero(labels == labels[center])
    if not _touches_both(cluster, graph):
        return False, False
    in_cluster = np.zeros(graph.n_vertices, dtype=bool)
    in_cluster[cluster] = True
    ids = [e for e in np.flatnonzero(config).tolist() if in_cluster[graph.edges[e, 0]]]
    edge_list = [tuple(graph.edges[e].tolist()) for e in ids]
    local = [k for k, (u, v) in enumerate(edge_list) if center in (u, v)]
    for comp in _census_edges(graph.n_vertices, edge_list, ids, seeds=local):
        verts = set(graph.edges[list(comp)].ravel().tolist())
        if center in verts and _touches_both(verts, graph):
            return True, True
    return False, True


def estimate_theta_rig(p: float, L: int, replicas: int, seed: int) -> tuple[Estimate, Estimate]:
    """Estimates of P(center in a left-right spanning rigid component) and of
    the connectivity analogue, on the triangular patch of side ``L``."""
    p = check_probability(p)
    graph = build_graph(Triangular(L))
    rig = conn = 0
    for r in range(replicas):
        a, b = spanning_indicators(graph, sample_bernoulli(graph, p, derive_seed(seed, r)))
        rig += a
        conn += b

    def est(k):
        f = k / replicas
        return Estimate(f, math.sqrt(f * (1 - f) / replicas), replicas)

    return est(rig), est(conn)


def theta_rig_for_spec(spec, p: float, replicas: int, seed: int) -> tuple[Estimate, Estimate]:
    if isinstance(spec, Hypercubic):
        raise ValueError(
            "rigidity percolation on the hypercubic lattice is trivial: the lattice itself is not rigid"
        )
    if not isinstance(spec, Triangular):
        raise ValueError(f"rigidity percolation needs a triangular spec, got {spec!r}")
    return estimate_theta_rig(p, spec.L, replicas, seed)


def pivot_from_grid(ps: Sequence[float], estimates: Sequence[Estimate], target: float = 0.5) -> tuple[float, float]:
    """First crossing of ``target`` by linear interpolation, with a
    delta-method standard error. Returns ``(ps[0], 0)`` if already above."""
    vals = [e.value for e in estimates]
    if vals[0] >= target:
        return float(ps[0]), 0.0
    for i in range(1, len(ps)):
        if vals[i] >= target:
            p0, p1 = ps[i - 1], ps[i]
            f0, f1 = vals[i - 1], vals[i]
            slope = (f1 - f0) / (p1 - p0)
            t = (target - f0) / (f1 - f0)
            pivot = p0 + t * (p1 - p0)
            se_f = math.hypot((1 - t) * estimates[i - 1].stderr, t * estimates[i].stderr)
            return float(pivot), float(se_f / slope)
    return float(ps[-1]), float("inf")
