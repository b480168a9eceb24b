"""Bernoulli bond percolation: sampling, cluster labels, crossings, p_c bisection.

A configuration is a boolean array with one flag per edge index. Edge ``e``
is open iff ``U_e < p`` for a uniform ``U_e`` drawn from the seeded stream, so
two calls with the same seed at ``p1 < p2`` are monotonically coupled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._kernels import uf_labels
from .graphs import BinaryTree, FiniteGraph, LatticeSpec, build_graph
from .seeding import derive_seed, make_rng

__all__ = [
    "ClusterLabels",
    "Estimate",
    "PcEstimate",
    "check_probability",
    "sample_bernoulli",
    "cluster_decomposition",
    "connects",
    "has_crossing",
    "crossing_probability",
    "estimate_pc",
    "tree_root_statistics",
    "CROSSING_COLUMNS",
]

CROSSING_COLUMNS = ("spec", "p", "L", "replicas", "crossing_fraction", "stderr", "seed")


def check_probability(p: float, name: str = "p") -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0 or math.isnan(p):
        raise ValueError(f"probability out of range: {name}={p}")
    return p


@dataclass(frozen=True)
class Estimate:
    value: float
    stderr: float
    n: int

    def ci(self, z: float = 3.0) -> tuple[float, float]:
        return self.value - z * self.stderr, self.value + z * self.stderr


def binomial_estimate(hits: int, n: int) -> Estimate:
    f = hits / n
    return Estimate(f, math.sqrt(f * (1.0 - f) / n), n)


@dataclass(frozen=True)
class ClusterLabels:
    """Per-vertex component ids; an id is the smallest vertex of its component."""

    component_id: np.ndarray
    component_sizes: dict[int, int]

    def members(self, cid: int) -> np.ndarray:
        return np.flatnonzero(self.component_id == cid)


def sample_bernoulli(graph: FiniteGraph, p: float, seed) -> np.ndarray:
    """Open each edge independently with probability ``p``."""
    p = check_probability(p)
    return make_rng(seed).random(graph.n_edges) < p


def _check_config(graph: FiniteGraph, config) -> np.ndarray:
    config = np.asarray(config, dtype=bool)
    if config.shape != (graph.n_edges,):
        raise ValueError(f"configuration has length {config.shape}, graph has {graph.n_edges} edges")
    return config


def _labels(graph: FiniteGraph, config: np.ndarray, skip_vertex: int = -1) -> np.ndarray:
    return uf_labels(graph.n_vertices, graph.edges[:, 0], graph.edges[:, 1], config, skip_vertex)


def cluster_decomposition(graph: FiniteGraph, config) -> ClusterLabels:
    """Connected components of the open subgraph (union-find)."""
    config = _check_config(graph, config)
    labels = _labels(graph, config)
    ids, counts = np.unique(labels, return_counts=True)
    labels.flags.writeable = False
    return ClusterLabels(labels, dict(zip(ids.tolist(), counts.tolist())))


def connects(labels: ClusterLabels, x: int, y: int) -> bool:
    return bool(labels.component_id[x] == labels.component_id[y])


def has_crossing(graph: FiniteGraph, config, axis: int = -1) -> bool:
    """True iff an open cluster touches both faces orthogonal to ``axis``."""
    labels = _labels(graph, _check_config(graph, config))
    axis = axis % graph.coords.shape[1]
    lo = labels[graph.face(axis, high=False)]
    hi = labels[graph.face(axis, high=True)]
    return bool(np.intersect1d(lo, hi).size)


def _box_graph(spec: LatticeSpec, L: int | None) -> FiniteGraph:
    if isinstance(spec, BinaryTree) or not hasattr(spec, "L"):
        raise ValueError(f"crossing events need a box spec, got {spec!r}")
    if L is not None:
        spec = type(spec)(**{**spec.__dict__, "L": L})
    return build_graph(spec)


def crossing_probability(spec: LatticeSpec, p: float, replicas: int, seed: int, L: int | None = None) -> Estimate:
    """Fraction of replicas with a left-right open crossing of the box.

    Replica ``r`` uses ``derive_seed(seed, r)``, so estimates at different
    ``p`` with the same seed share their uniforms.
    """
    p = check_probability(p)
    if replicas < 1:
        raise ValueError("replicas must be >= 1")
    graph = _box_graph(spec, L)
    hits = sum(has_crossing(graph, sample_bernoulli(graph, p, derive_seed(seed, r))) for r in range(replicas))
    return binomial_estimate(hits, replicas)


@dataclass(frozen=True)
class PcEstimate:
    p_hat: float
    bracket: tuple[float, float]
    iterations: int
    converged: bool

    @property
    def width(self) -> float:
        return self.bracket[1] - self.bracket[0]


def _tree_uniforms(depth: int, replicas: int, seed: int) -> np.ndarray:
    m = 2 ** (depth + 1) - 2
    return np.stack([make_rng(derive_seed(seed, r)).random(m) for r in range(replicas)])


def tree_root_statistics(depth: int, p: float, replicas: int, seed: int, uniforms=None) -> tuple[np.ndarray, np.ndarray]:
    """Per-replica root-to-leaf survival flag and number of leaves joined to the root.

    In heap order edge ``e`` joins vertex ``(e) // 2`` to child ``e + 1``, so
    reachability is propagated one level at a time, vectorized over replicas.
    """
    p = check_probability(p)
    if uniforms is None:
        uniforms = _tree_uniforms(depth, replicas, seed)
    open_ = uniforms < p
    reached = np.ones((uniforms.shape[0], 1), dtype=bool)
    for lvl in range(1, depth + 1):
        first = 2**lvl - 1
        edges = open_[:, first - 1 : first - 1 + 2**lvl]
        reached = np.repeat(reached, 2, axis=1) & edges
    leaves = reached.sum(axis=1)
    return leaves > 0, leaves


def estimate_pc(
    spec: LatticeSpec,
    replicas: int,
    tolerance: float,
    seed: int,
    L: int | None = None,
    interval: tuple[float, float] = (0.0, 1.0),
    max_iter: int = 40,
) -> PcEstimate:
    """Bisect on ``p`` for the finite-size pivot of ``spec``.

    Box specs: crossing probability 1/2. ``BinaryTree``: the branching-rate
    pivot, where the mean number of leaves joined to the root equals 1 (the
    mean generation size of the root cluster is ``(2p)**depth``, critical at
    growth rate 1).

    If the target is already met at the lower end of ``interval`` the lower
    edge is returned; if it is never met the upper edge is returned. When the
    bracket is still wider than ``tolerance`` after ``max_iter`` halvings the
    result has ``converged=False`` and ``p_hat=nan``.
    """
    if tolerance <= 0:
        raise ValueError("tolerance must be > 0")
    lo, hi = (check_probability(x) for x in interval)
    if lo >= hi:
        raise ValueError("interval must satisfy lo < hi")

    if isinstance(spec, BinaryTree):
        uniforms = _tree_uniforms(spec.depth, replicas, seed)

        def above(p):
            return tree_root_statistics(spec.depth, p, replicas, seed, uniforms)[1].mean() >= 1.0

    else:
        graph = _box_graph(spec, L)
        configs_u = np.stack([make_rng(derive_seed(seed, r)).random(graph.n_edges) for r in range(replicas)])

        def above(p):
            hits = sum(has_crossing(graph, u < p) for u in configs_u)
            return hits / replicas >= 0.5

    if above(lo):
        return PcEstimate(lo, (lo, lo), 0, True)
    if not above(hi):
        return PcEstimate(hi, (hi, hi), 0, True)
    it = 0
    while hi - lo > tolerance:
        if it >= max_iter:
            return PcEstimate(float("nan"), (lo, hi), it, False)
        mid = 0.5 * (lo + hi)
        if above(mid):
            hi = mid
        else:
            lo = mid
        it += 1
    return PcEstimate(0.5 * (lo + hi), (lo, hi), it, True)
