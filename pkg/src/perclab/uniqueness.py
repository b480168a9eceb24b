"""Trifurcation census, spanning-cluster counts and tree proliferation.

Inside a finite box a vertex ``x`` is a trifurcation when it is not on the
boundary, has exactly three open incident edges, and removing it leaves its
three open neighbours in three distinct clusters that each reach the
boundary. With this rendering the number of trifurcations never exceeds the
boundary size, for every configuration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .graphs import BinaryTree, FiniteGraph, Hypercubic, LatticeSpec, build_graph
from .percolation import (
    Estimate,
    _check_config,
    _labels,
    check_probability,
    sample_bernoulli,
)
from .seeding import derive_seed, make_rng

__all__ = [
    "TrifurcationReport",
    "box_trifurcations",
    "check_burton_keane_bound",
    "spanning_cluster_count",
    "tree_cluster_proliferation",
    "expected_tree_proliferation",
    "FiniteEnergyResult",
    "finite_energy_check",
    "PhaseScanResult",
    "phase_scan",
    "uniqueness_row",
    "UNIQUENESS_COLUMNS",
]

UNIQUENESS_COLUMNS = ("p", "L", "N_mean", "boundary_size", "ratio_N_per_volume", "spanning_count_mean")


@dataclass(frozen=True)
class TrifurcationReport:
    trifurcation_vertices: frozenset
    count: int
    boundary_size: int


def box_trifurcations(graph: FiniteGraph, config) -> TrifurcationReport:
    if not graph.is_box:
        raise ValueError("trifurcation census needs a box graph")
    if graph.side < 3:
        raise ValueError("box has no interior vertices")
    config = _check_config(graph, config)
    open_edges = graph.edges[config]
    degree = np.bincount(open_edges.ravel(), minlength=graph.n_vertices)
    boundary = graph.boundary_mask
    found = []
    for x in np.flatnonzero((degree == 3) & ~boundary):
        x = int(x)
        nbrs = [nb for nb, e in graph.adjacency[x] if config[e]]
        labels = _labels(graph, config, skip_vertex=x)
        ids = {int(labels[nb]) for nb in nbrs}
        if len(ids) != 3:
            continue
        touching = set(labels[boundary].tolist())
        if ids <= touching:
            found.append(x)
    return TrifurcationReport(frozenset(found), len(found), len(graph.boundary))


def check_burton_keane_bound(report: TrifurcationReport) -> bool:
    return report.count <= report.boundary_size


def spanning_cluster_count(graph: FiniteGraph, config, criterion: str = "faces", min_size: int = 1) -> int:
    """Number of open clusters meeting ``criterion``.

    ``"faces"``: the cluster touches both faces orthogonal to the last axis.
    ``"boundary"``: the cluster touches the boundary and has at least
    ``min_size`` vertices.
    """
    labels = _labels(graph, _check_config(graph, config))
    if criterion == "faces":
        lo = labels[graph.face(-1, high=False)]
        hi = labels[graph.face(-1, high=True)]
        return int(np.intersect1d(lo, hi).size)
    if criterion == "boundary":
        if min_size < 1:
            raise ValueError("min_size must be >= 1")
        ids, sizes = np.unique(labels, return_counts=True)
        touching = np.unique(labels[graph.boundary_mask])
        return int(np.isin(ids[sizes >= min_size], touching).sum())
    raise ValueError(f"unknown criterion {criterion!r}")


def _long_cluster_counts(depth: int, open_: np.ndarray) -> np.ndarray:
    # open_: (replicas, 2**(depth+1) - 2) edge flags in heap order.
    # A cluster's longest downward path starts at its top vertex, so count
    # tops (root or closed parent edge) whose open height is >= depth / 2.
    R = open_.shape[0]
    h = np.zeros((R, 2**depth), dtype=np.int64)
    counts = np.zeros(R, dtype=np.int64)
    for lvl in range(depth, 0, -1):
        edges = open_[:, 2**lvl - 2 : 2**lvl - 2 + 2**lvl]
        counts += (~edges & (2 * h >= depth)).sum(axis=1)
        h = np.where(edges, h + 1, 0).reshape(R, -1, 2).max(axis=2)
    counts += (2 * h[:, 0] >= depth)
    return counts


def tree_cluster_proliferation(depth: int, p: float, replicas: int, seed: int) -> Estimate:
    """Mean number of open clusters of the depth-``depth`` binary tree that
    contain a downward path of length at least ``depth / 2``."""
    p = check_probability(p)
    m = 2 ** (depth + 1) - 2
    open_ = np.stack([make_rng(derive_seed(seed, r)).random(m) < p for r in range(replicas)])
    counts = _long_cluster_counts(depth, open_)
    return Estimate(float(counts.mean()), float(counts.std(ddof=1) / math.sqrt(replicas)) if replicas > 1 else 0.0, replicas)


def expected_tree_proliferation(depth: int, p: float) -> float:
    """Exact mean of the statistic in :func:`tree_cluster_proliferation`.

    A vertex at level ``k`` is a counted top iff it is the root or its parent
    edge is closed, and it has an open downward path of length ``ell =
    ceil(depth / 2)`` (needs ``k <= depth - ell``). The path probability
    follows the branching recursion ``s <- 1 - (1 - p s)**2``.
    """
    ell = -(-depth // 2)
    s = 1.0
    for _ in range(ell):
        s = 1.0 - (1.0 - p * s) ** 2
    tops = 1.0 + (1.0 - p) * sum(2**k for k in range(1, depth - ell + 1))
    return tops * s


@dataclass(frozen=True)
class FiniteEnergyResult:
    frequency: float
    ci: tuple[float, float]
    n_matched: int
    status: str  # "ok", "violation" or "inconclusive"


def finite_energy_check(
    sampler: Callable[[int, int], np.ndarray],
    edge: int,
    n_samples: int,
    seed: int,
    reference: Sequence[bool] | None = None,
    min_matches: int = 30,
) -> FiniteEnergyResult:
    """Empirical P(edge open | all other edges equal ``reference``).

    ``sampler(n, seed)`` must return an ``(n, m)`` boolean array with
    ``m <= 12``. Without ``reference`` the most frequent pattern of the other
    edges is used. The CI is a 3-sigma Wilson interval.
    """
    samples = np.asarray(sampler(n_samples, seed), dtype=bool)
    m = samples.shape[1]
    if m > 12:
        raise ValueError("exact-match conditioning is limited to graphs with <= 12 edges")
    others = np.delete(samples, edge, axis=1)
    if reference is None:
        if others.shape[1] == 0:
            match = np.ones(len(samples), dtype=bool)
        else:
            patterns, inverse, counts = np.unique(others, axis=0, return_inverse=True, return_counts=True)
            match = inverse.ravel() == np.argmax(counts)
    else:
        ref = np.delete(np.asarray(reference, dtype=bool), edge)
        match = (others == ref).all(axis=1)
    k = int(match.sum())
    if k < min_matches:
        return FiniteEnergyResult(float("nan"), (0.0, 1.0), k, "inconclusive")
    f = float(samples[match, edge].mean())
    z = 3.0
    denom = 1 + z**2 / k
    centre = (f + z**2 / (2 * k)) / denom
    half = z * math.sqrt(f * (1 - f) / k + z**2 / (4 * k * k)) / denom
    status = "violation" if f in (0.0, 1.0) else "ok"
    return FiniteEnergyResult(f, (centre - half, centre + half), k, status)


@dataclass(frozen=True)
class PhaseScanResult:
    rows: tuple  # (p, mean count, stderr) per grid point


def phase_scan(spec: LatticeSpec, p_grid: Sequence[float], replicas: int, seed: int) -> PhaseScanResult:
    """Mean spanning-cluster count over ``p_grid`` (tree specs: long-cluster count)."""
    rows = []
    for p in p_grid:
        if isinstance(spec, BinaryTree):
            est = tree_cluster_proliferation(spec.depth, p, replicas, seed)
            rows.append((float(p), est.value, est.stderr))
            continue
        graph = build_graph(spec)
        counts = np.array(
            [spanning_cluster_count(graph, sample_bernoulli(graph, p, derive_seed(seed, r))) for r in range(replicas)]
        )
        se = counts.std(ddof=1) / math.sqrt(replicas) if replicas > 1 else 0.0
        rows.append((float(p), float(counts.mean()), float(se)))
    return PhaseScanResult(tuple(rows))


def uniqueness_row(L: int, p: float, replicas: int, seed: int) -> dict:
    """One CSV row of trifurcation and spanning statistics on the Z^2 box of side L."""
    graph = build_graph(Hypercubic(2, L))
    n_tri, spans = 0, 0
    for r in range(replicas):
        config = sample_bernoulli(graph, p, derive_seed(seed, r))
        n_tri += box_trifurcations(graph, config).count
        spans += spanning_cluster_count(graph, config)
    n_mean = n_tri / replicas
    return {
        "p": p,
        "L": L,
        "N_mean": n_mean,
        "boundary_size": len(graph.boundary),
        "ratio_N_per_volume": n_mean / graph.n_vertices,
        "spanning_count_mean": spans / replicas,
    }
