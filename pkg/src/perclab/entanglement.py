"""Entanglement certificates for finite edge-sets of Z^3.

Only one-sided witnesses are produced. A connected edge-set is entangled; a
disconnected one is certified when two cycles taken from different
components have non-zero linking number, since a sphere separating them would
force the linking number to vanish. Anything else is reported as unknown,
never as "not entangled".

Linking numbers are computed from signed crossings of a generic planar
projection (random rotation, resampled on degeneracies) and double-checked
with a second independent projection.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

import networkx as nx
import numpy as np
from scipy.spatial.transform import Rotation

from .seeding import make_rng

__all__ = [
    "LatticeCycle",
    "EntangledByConnectivity",
    "EntangledByLinking",
    "Unknown",
    "linking_number",
    "projected_linking_number",
    "gauss_linking_integral",
    "entanglement_witness",
    "count_connected_edge_sets",
    "parse_cycle",
    "format_cycle",
    "MAX_EDGE_SET_SIZE",
]

MAX_EDGE_SET_SIZE = 7
Point = tuple[int, int, int]


@dataclass(frozen=True)
class LatticeCycle:
    """Closed simple lattice polygon; ``vertices`` excludes the repeated endpoint."""

    vertices: tuple

    def __post_init__(self):
        vs = [tuple(int(c) for c in v) for v in self.vertices]
        if len(vs) > 1 and vs[0] == vs[-1]:
            vs = vs[:-1]
        if len(vs) < 4:
            raise ValueError("a lattice cycle needs at least 4 vertices")
        if len(set(vs)) != len(vs):
            raise ValueError("cycle repeats a vertex")
        for a, b in zip(vs, vs[1:] + vs[:1]):
            if sum(abs(x - y) for x, y in zip(a, b)) != 1:
                raise ValueError(f"consecutive vertices {a} and {b} are not lattice neighbours")
        object.__setattr__(self, "vertices", tuple(vs))

    def reversed(self) -> "LatticeCycle":
        return LatticeCycle(self.vertices[::-1])

    def translated(self, shift: Sequence[int]) -> "LatticeCycle":
        return LatticeCycle(tuple(tuple(c + s for c, s in zip(v, shift)) for v in self.vertices))

    @property
    def edges(self) -> set[frozenset]:
        vs = self.vertices
        return {frozenset((a, b)) for a, b in zip(vs, vs[1:] + vs[:1])}

    def array(self) -> np.ndarray:
        return np.array(self.vertices, dtype=float)


def parse_cycle(text: str) -> LatticeCycle:
    """One ``x y z`` triple per line; the cycle closes implicitly."""
    pts = [tuple(int(t) for t in ln.replace(",", " ").split()) for ln in text.splitlines() if ln.strip()]
    return LatticeCycle(tuple(pts))


def format_cycle(cycle: LatticeCycle) -> str:
    return "".join(f"{x} {y} {z}\n" for x, y, z in cycle.vertices)


class DegenerateProjection(Exception):
    pass


def _cross2(a, b):
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def _crossing_sum(P1: np.ndarray, P2: np.ndarray, eps: float = 1e-9) -> tuple[int, int]:
    """Signed crossing sums (cycle 1 over cycle 2, cycle 2 over cycle 1).

    ``P1``/``P2`` are closed polygons already rotated; projection is onto
    the first two coordinates and height is the third.
    """
    A, B = P1, np.roll(P1, -1, axis=0)
    C, D = P2, np.roll(P2, -1, axis=0)
    r = (B - A)[:, None, :2]
    s = (D - C)[None, :, :2]
    qp = (C[None, :, :2] - A[:, None, :2])
    denom = _cross2(r, s)
    parallel = np.abs(denom) < eps
    # parallel images only matter when they overlap on a common line
    rr = np.maximum((r**2).sum(-1), eps)
    collinear = parallel & (np.abs(_cross2(qp, r)) < eps * np.sqrt(rr))
    if collinear.any():
        tc = (qp * r).sum(-1) / rr
        td = tc + (s * r).sum(-1) / rr
        lo, hi = np.minimum(tc, td), np.maximum(tc, td)
        if np.any(collinear & (lo < 1 + eps) & (hi > -eps)):
            raise DegenerateProjection("overlapping projected segments")
    safe = np.where(parallel, 1.0, denom)
    t = np.where(parallel, -1.0, _cross2(qp, s) / safe)
    u = np.where(parallel, -1.0, _cross2(qp, r) / safe)
    near = lambda x: np.abs(x) < eps  # noqa: E731
    if np.any(((near(t) | near(t - 1)) & (u > -eps) & (u < 1 + eps)) | ((near(u) | near(u - 1)) & (t > -eps) & (t < 1 + eps))):
        raise DegenerateProjection("vertex projects onto a segment")
    hit = (t > 0) & (t < 1) & (u > 0) & (u < 1)
    z1 = A[:, None, 2] + t * (B - A)[:, None, 2]
    z2 = C[None, :, 2] + u * (D - C)[None, :, 2]
    if np.any(hit & (np.abs(z1 - z2) < eps)):
        raise DegenerateProjection("curves intersect")
    # crossing sign = orientation of (over direction, under direction) seen
    # from +z; the higher strand is the over strand
    over1 = z1 > z2
    sign = np.sign(denom)
    return int(np.sum(np.where(hit & over1, sign, 0))), int(np.sum(np.where(hit & ~over1, -sign, 0)))


def projected_linking_number(c1: LatticeCycle, c2: LatticeCycle, rng) -> int:
    """Linking number from one random generic projection.

    Both halves of the crossing sum (cycle 1 over, cycle 2 over) are
    computed; they must agree for a valid projection.
    """
    P1, P2 = c1.array(), c2.array()
    for _ in range(100):
        rot = Rotation.random(random_state=rng).as_matrix()
        try:
            over, under = _crossing_sum(P1 @ rot.T, P2 @ rot.T)
        except DegenerateProjection:
            continue
        if over != under:
            raise RuntimeError("inconsistent crossing sums; projection bookkeeping is broken")
        return over
    raise RuntimeError("no generic projection found in 100 attempts")


def _check_disjoint(c1: LatticeCycle, c2: LatticeCycle):
    if set(c1.vertices) & set(c2.vertices):
        raise ValueError("cycles share a vertex")


def linking_number(c1: LatticeCycle, c2: LatticeCycle, seed=0) -> int:
    """Linking number, confirmed by two independent random projections."""
    _check_disjoint(c1, c2)
    rng = make_rng(seed)
    a = projected_linking_number(c1, c2, rng)
    b = projected_linking_number(c1, c2, rng)
    if a != b:
        raise RuntimeError(f"projections disagree: {a} vs {b}")
    return a


def gauss_linking_integral(c1: LatticeCycle, c2: LatticeCycle, nodes: int = 24) -> float:
    """Gauss double integral summed over segment pairs (Gauss-Legendre quadrature).

    ``lk = (1/4pi) sum_ij int int (r1 - r2) . (dr1 x dr2) / |r1 - r2|^3``.
    """
    _check_disjoint(c1, c2)
    x, w = np.polynomial.legendre.leggauss(nodes)
    t = 0.5 * (x + 1.0)
    w = 0.5 * w
    P1, P2 = c1.array(), c2.array()
    d1 = np.roll(P1, -1, axis=0) - P1
    d2 = np.roll(P2, -1, axis=0) - P2
    pts1 = P1[:, None, :] + t[None, :, None] * d1[:, None, :]  # (n1, k, 3)
    pts2 = P2[:, None, :] + t[None, :, None] * d2[:, None, :]
    diff = pts1[:, None, :, None, :] - pts2[None, :, None, :, :]  # (n1, n2, k, k, 3)
    cross = np.cross(d1[:, None, :], d2[None, :, :])  # (n1, n2, 3)
    num = np.einsum("ijabc,ijc->ijab", diff, cross)
    dist3 = np.linalg.norm(diff, axis=-1) ** 3
    total = np.einsum("ijab,a,b->", num / dist3, w, w)
    return float(total / (4 * np.pi))


@dataclass(frozen=True)
class EntangledByConnectivity:
    pass


@dataclass(frozen=True)
class EntangledByLinking:
    cycles: tuple  # (LatticeCycle, LatticeCycle)
    linking: int


@dataclass(frozen=True)
class Unknown:
    pass


def _cycle_from_nodes(nodes: list) -> LatticeCycle | None:
    try:
        return LatticeCycle(tuple(nodes))
    except ValueError:
        return None


def entanglement_witness(edge_set: Iterable[tuple[Point, Point]], max_cycle_length: int = 16, max_cycles: int = 200, seed=0):
    """Certify entanglement of a finite lattice edge-set, or return ``Unknown``."""
    G = nx.Graph()
    for a, b in edge_set:
        a, b = tuple(map(int, a)), tuple(map(int, b))
        if sum(abs(x - y) for x, y in zip(a, b)) != 1:
            raise ValueError(f"{a}-{b} is not a lattice edge")
        G.add_edge(a, b)
    if G.number_of_nodes() == 0:
        return Unknown()
    if nx.is_connected(G):
        return EntangledByConnectivity()
    per_comp = []
    for comp in nx.connected_components(G):
        H = G.subgraph(comp)
        cycles = []
        for nodes in nx.simple_cycles(H, length_bound=max_cycle_length):
            cyc = _cycle_from_nodes(nodes)
            if cyc is not None:
                cycles.append(cyc)
            if len(cycles) >= max_cycles:
                break
        per_comp.append(cycles)
    for A, B in itertools.combinations(per_comp, 2):
        for c1, c2 in itertools.product(A, B):
            lk = linking_number(c1, c2, seed)
            if lk != 0:
                return EntangledByLinking((c1, c2), lk)
    return Unknown()


_DIRS = [(1, 0, 0), (0, 1, 0), (0, 0, 1)]


def _edge_neighbours(edge):
    # edges of Z^3 sharing an endpoint with ``edge``; an edge is (vertex, axis)
    (x, y, z), a = edge
    u = (x, y, z)
    v = tuple(c + d for c, d in zip(u, _DIRS[a]))
    out = []
    for w in (u, v):
        for b, d in enumerate(_DIRS):
            out.append((w, b))
            out.append((tuple(c - e for c, e in zip(w, d)), b))
    return [e for e in out if e != edge]


def _vertices(edges) -> set:
    vs = set()
    for u, a in edges:
        vs.add(u)
        vs.add(tuple(c + d for c, d in zip(u, _DIRS[a])))
    return vs


def count_connected_edge_sets(n: int) -> int:
    """Number of connected ``n``-edge subsets of E(Z^3) with an edge at the origin.

    Each translation class of connected edge-sets (bond animal) is generated
    once by Redelmeier's method, rooted at its lexicographically smallest
    edge; a class with ``V`` vertices contributes ``V`` sets, one for each
    translate placing a vertex at the origin.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > MAX_EDGE_SET_SIZE:
        raise ValueError(f"n={n} exceeds the enumeration limit {MAX_EDGE_SET_SIZE}")
    total = 0
    origin = (0, 0, 0)
    for a in range(3):
        root = (origin, a)

        def allowed(e, root=root):
            return (e[0], e[1]) > root

        def grow(current, untried, seen):
            nonlocal total
            untried = list(untried)
            while untried:
                e = untried.pop()
                current.append(e)
                if len(current) == n:
                    total += len(_vertices(current))
                else:
                    new = [f for f in _edge_neighbours(e) if f not in seen and allowed(f)]
                    grow(current, untried + new, seen | set(new))
                current.pop()

        grow([], [root], {root})
    return total
