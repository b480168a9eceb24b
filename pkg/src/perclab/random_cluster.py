"""Random-cluster measures on small boxes and graphs.

The weight of a configuration is ``prod p^w (1-p)^(1-w) * q^k`` where ``k``
counts open clusters. Under the wired boundary condition every boundary
vertex is joined to one ghost vertex by a permanently open edge, which is
the effect of an all-open exterior on the clusters meeting the box.

Sampling is single-edge heat-bath (Gibbs) dynamics; each sweep visits the
edges in index order. Connectivity off the updated edge is found by a
depth-first search from one endpoint, compiled with numba.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np
from scipy.special import logsumexp

from ._kernels import _connected_without, enumerate_cluster_counts, heat_bath_record, heat_bath_sweeps, uf_labels
from .graphs import FiniteGraph
from .percolation import Estimate, _check_config, binomial_estimate, check_probability
from .seeding import make_rng

__all__ = [
    "RCParams",
    "RCState",
    "ExactRC",
    "cluster_count",
    "exact_rc_distribution",
    "single_edge_conditional",
    "heat_bath_sweep",
    "initial_state",
    "sample_rc",
    "sample_rc_chain",
    "two_point_estimate",
    "RC_COLUMNS",
]

RC_COLUMNS = ("p", "q", "b", "sweeps", "open_fraction", "two_point", "seed")
MAX_EXACT_EDGES = 20


def _boundary_code(b) -> int:
    if b in (0, "free"):
        return 0
    if b in (1, "wired"):
        return 1
    raise ValueError(f"boundary must be 0/'free' or 1/'wired', got {b!r}")


@dataclass(frozen=True)
class RCParams:
    p: float
    q: float
    boundary: int = 0
    burn_in: int = 1000
    spacing: int = 10

    def __post_init__(self):
        check_probability(self.p)
        if not self.q > 0:
            raise ValueError(f"q must be > 0, got {self.q}")
        object.__setattr__(self, "boundary", _boundary_code(self.boundary))
        if self.burn_in < 0 or self.spacing < 1:
            raise ValueError("burn_in must be >= 0 and spacing >= 1")

    def require_sampler_regime(self):
        if self.q < 1:
            raise ValueError(f"heat-bath sampler needs q >= 1, got q={self.q}")


def _extended_edges(graph: FiniteGraph, boundary: int) -> tuple[int, np.ndarray, np.ndarray, int]:
    # real edges first, then ghost edges; returns (n_total, eu, ev, ghost)
    eu, ev = graph.edges[:, 0], graph.edges[:, 1]
    if boundary == 0 or not graph.boundary:
        return graph.n_vertices, eu, ev, -1
    ghost = graph.n_vertices
    b = np.array(sorted(graph.boundary), dtype=np.int64)
    return ghost + 1, np.concatenate([eu, b]), np.concatenate([ev, np.full(b.size, ghost)]), ghost


@lru_cache(maxsize=64)
def _csr(graph: FiniteGraph, boundary: int):
    n_total, eu, ev, ghost = _extended_edges(graph, boundary)
    m = graph.n_edges
    eid = np.concatenate([np.arange(m), np.full(eu.size - m, -1)])
    src = np.concatenate([eu, ev])
    dst = np.concatenate([ev, eu])
    ids = np.concatenate([eid, eid])
    order = np.argsort(src, kind="stable")
    ptr = np.zeros(n_total + 1, dtype=np.int64)
    np.add.at(ptr, src + 1, 1)
    return np.cumsum(ptr), dst[order].astype(np.int64), ids[order].astype(np.int64), ghost


def cluster_count(graph: FiniteGraph, config, boundary=0) -> int:
    """Open clusters; under wired boundary the boundary clusters count as one."""
    boundary = _boundary_code(boundary)
    config = _check_config(graph, config)
    n_total, eu, ev, ghost = _extended_edges(graph, boundary)
    mask = np.concatenate([config, np.ones(eu.size - graph.n_edges, dtype=bool)])
    labels = uf_labels(n_total, eu, ev, mask, -1)
    return int(np.unique(labels).size)


@dataclass
class RCState:
    graph: FiniteGraph
    config: np.ndarray
    boundary: int
    cluster_count: int = field(default=-1)

    def __post_init__(self):
        self.boundary = _boundary_code(self.boundary)
        self.config = _check_config(self.graph, self.config).copy()
        self.cluster_count = cluster_count(self.graph, self.config, self.boundary)


def initial_state(graph: FiniteGraph, boundary=0) -> RCState:
    """All-closed starting state."""
    return RCState(graph, np.zeros(graph.n_edges, dtype=bool), boundary)


@dataclass(frozen=True)
class ExactRC:
    """Exact measure on ``{0,1}^E``; index ``mask`` has edge ``e`` open iff bit ``e`` set."""

    probs: np.ndarray
    n_edges: int

    def prob(self, config) -> float:
        mask = sum(1 << e for e, w in enumerate(config) if w)
        return float(self.probs[mask])

    def as_dict(self) -> dict[tuple[int, ...], float]:
        return {tuple((mask >> e) & 1 for e in range(self.n_edges)): float(pr) for mask, pr in enumerate(self.probs)}

    def edge_marginals(self) -> np.ndarray:
        bits = (np.arange(self.probs.size)[:, None] >> np.arange(self.n_edges)) & 1
        return self.probs @ bits

    def open_count_distribution(self) -> np.ndarray:
        counts = np.array([bin(mask).count("1") for mask in range(self.probs.size)])
        return np.bincount(counts, weights=self.probs, minlength=self.n_edges + 1)


def exact_rc_distribution(graph: FiniteGraph, p: float, q: float, boundary=0) -> ExactRC:
    """Enumerate all ``2**|E|`` configurations (``|E| <= 20``)."""
    p = check_probability(p)
    if not q > 0:
        raise ValueError(f"q must be > 0, got {q}")
    m = graph.n_edges
    if m > MAX_EXACT_EDGES:
        raise ValueError(f"exact enumeration limited to {MAX_EXACT_EDGES} edges, graph has {m}")
    n_total, eu, ev, _ = _extended_edges(graph, _boundary_code(boundary))
    k = enumerate_cluster_counts(n_total, eu, ev, m)
    n_open = np.array([bin(mask).count("1") for mask in range(1 << m)], dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        logw = n_open * np.log(p) + (m - n_open) * np.log1p(-p) + k * math.log(q)
    if p == 0.0:
        logw = np.where(n_open == 0, k * math.log(q), -np.inf)
    elif p == 1.0:
        logw = np.where(n_open == m, k * math.log(q), -np.inf)
    probs = np.exp(logw - logsumexp(logw))
    probs.flags.writeable = False
    return ExactRC(probs, m)


def single_edge_conditional(state: RCState, e: int, p: float, q: float) -> float:
    """P(edge ``e`` open | all other edges) under the state's boundary condition."""
    if q < 1:
        raise ValueError(f"conditional sampler needs q >= 1, got q={q}")
    graph = state.graph
    ptr, nbr, eid, ghost = _csr(graph, state.boundary)
    n_total = ptr.size - 1
    u, v = int(graph.edges[e, 0]), int(graph.edges[e, 1])
    joined = _connected_without(
        u, v, e, state.config, ptr, nbr, eid, ghost,
        np.empty(n_total, dtype=np.int64), np.zeros(n_total, dtype=np.int64), 1,
    )
    if joined:
        return p
    return p / (p + (1.0 - p) * q)


def _run_sweeps(graph: FiniteGraph, config: np.ndarray, params: RCParams, uniforms: np.ndarray) -> None:
    ptr, nbr, eid, ghost = _csr(graph, params.boundary)
    heat_bath_sweeps(
        config, graph.edges[:, 0], graph.edges[:, 1], ptr, nbr, eid, ghost,
        float(params.p), float(params.q), uniforms,
    )


def heat_bath_sweep(state: RCState, params: RCParams, seed) -> RCState:
    """One heat-bath sweep; returns a new state."""
    params.require_sampler_regime()
    params = replace(params, boundary=state.boundary)
    config = state.config.copy()
    _run_sweeps(state.graph, config, params, make_rng(seed).random((1, state.graph.n_edges)))
    return RCState(state.graph, config, state.boundary)


def sample_rc(graph: FiniteGraph, params: RCParams, seed) -> np.ndarray:
    """Configuration after ``params.burn_in`` sweeps from the all-closed state."""
    return sample_rc_chain(graph, params, 1, seed)[0]


def sample_rc_chain(graph: FiniteGraph, params: RCParams, n_samples: int, seed, block: int = 4096) -> np.ndarray:
    """``n_samples`` configurations from one chain: burn-in, then one sample
    every ``params.spacing`` sweeps. Returns an ``(n_samples, |E|)`` array."""
    params.require_sampler_regime()
    rng = make_rng(seed)
    m = graph.n_edges
    config = np.zeros(m, dtype=bool)
    remaining = params.burn_in
    while remaining > 0:
        k = min(block, remaining)
        _run_sweeps(graph, config, params, rng.random((k, m)))
        remaining -= k
    out = np.empty((n_samples, m), dtype=bool)
    ptr, nbr, eid, ghost = _csr(graph, params.boundary)
    # the stream is consumed in the same order as one draw per sweep
    per_block = max(1, block // params.spacing)
    for start in range(0, n_samples, per_block):
        stop = min(n_samples, start + per_block)
        heat_bath_record(
            config, graph.edges[:, 0], graph.edges[:, 1], ptr, nbr, eid, ghost,
            float(params.p), float(params.q), rng.random(((stop - start) * params.spacing, m)),
            params.spacing, out[start:stop],
        )
    return out


def two_point_estimate(graph: FiniteGraph, params: RCParams, x: int, y: int, replicas: int, seed) -> Estimate:
    """Fraction of chain samples in which ``x`` and ``y`` are joined by an open
    path (under wired boundary, paths through the boundary count)."""
    samples = sample_rc_chain(graph, params, replicas, seed)
    n_total, eu, ev, _ = _extended_edges(graph, params.boundary)
    extra = np.ones(eu.size - graph.n_edges, dtype=bool)
    hits = 0
    for config in samples:
        labels = uf_labels(n_total, eu, ev, np.concatenate([config, extra]), -1)
        hits += labels[x] == labels[y]
    return binomial_estimate(int(hits), replicas)
