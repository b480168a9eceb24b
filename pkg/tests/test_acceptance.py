"""Acceptance suite: one test per criterion, each reporting a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v``; the lines are printed
in the "acceptance criteria" section at the end of the session.
"""

import itertools
import json
import math
import time

import networkx as nx
import numpy as np
import pytest
from conftest import ACCEPTANCE_LINES
from scipy.stats import chi2_contingency

from perclab.entanglement import (
    EntangledByConnectivity,
    EntangledByLinking,
    LatticeCycle,
    count_connected_edge_sets,
    entanglement_witness,
    gauss_linking_integral,
    linking_number,
)
from perclab.graphs import BinaryTree, Hypercubic, build_graph, from_edges
from perclab.harness import run
from perclab.labyrinth import (
    equivalence_class,
    is_admissible,
    msd_curve,
    msd_in_env,
    replay_backwards,
    run_walk,
    sample_environment,
    trap_environment,
    Complete,
)
from perclab.percolation import estimate_pc, sample_bernoulli
from perclab.random_cluster import RCParams, exact_rc_distribution, sample_rc_chain
from perclab.rigidity import estimate_theta_rig, is_generically_rigid_2d, pivot_from_grid, random_framework, rigidity_matrix_rank
from perclab.seeding import derive_seed
from perclab.uniqueness import (
    box_trifurcations,
    check_burton_keane_bound,
    spanning_cluster_count,
    tree_cluster_proliferation,
)


def report(k, ok, detail, t0):
    line = f"criterion {k}: {'PASS' if ok else 'FAIL'} ({time.perf_counter() - t0:.1f}s) {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def test_criterion_1_burton_keane_bound():
    t0 = time.perf_counter()
    g = build_graph(Hypercubic(2, 20))
    worst, total = 0, 0
    for i, p in enumerate((0.3, 0.5, 0.55, 0.7)):
        for r in range(1000):
            rep = box_trifurcations(g, sample_bernoulli(g, p, derive_seed(100 + i, r)))
            assert check_burton_keane_bound(rep)
            worst = max(worst, rep.count)
            total += 1
    elapsed = time.perf_counter() - t0
    report(1, total == 4000 and elapsed < 60, f"N <= |dL| = {rep.boundary_size} in {total}/4000 configs, max N = {worst}", t0)


def test_criterion_2_z2_critical_point():
    t0 = time.perf_counter()
    res = estimate_pc(Hypercubic(2, 64), replicas=1000, tolerance=0.02, seed=20)
    elapsed = time.perf_counter() - t0
    ok = res.converged and 0.48 <= res.p_hat <= 0.52 and elapsed < 600
    report(2, ok, f"p_hat = {res.p_hat:.4f}, bracket width {res.width:.4f}", t0)


def test_criterion_3_tree_phase_structure():
    t0 = time.perf_counter()
    pc = estimate_pc(BinaryTree(12), replicas=2000, tolerance=0.005, seed=30)
    c8 = tree_cluster_proliferation(8, 0.75, 4000, 31)
    c12 = tree_cluster_proliferation(12, 0.75, 4000, 32)
    z = (c12.value - c8.value) / math.hypot(c8.stderr, c12.stderr)
    g = build_graph(Hypercubic(2, 48))
    counts = [spanning_cluster_count(g, sample_bernoulli(g, 0.7, derive_seed(33, r))) for r in range(500)]
    mean = float(np.mean(counts))
    ok = 0.47 <= pc.p_hat <= 0.53 and z > 3 and abs(mean - 1) <= 0.02 and time.perf_counter() - t0 < 600
    report(3, ok, f"tree pivot {pc.p_hat:.4f}; count(8) = {c8.value:.2f}, count(12) = {c12.value:.2f} (z = {z:.1f}); Z2 spanning mean {mean:.3f}", t0)


def _small_graphs(max_edges=5):
    """Every graph with 1..max_edges edges and no isolated vertex, up to isomorphism."""
    connected = [
        G for G in nx.graph_atlas_g()[1:]
        if 1 <= G.number_of_edges() <= max_edges and nx.is_connected(G)
    ]
    out = []
    for k in range(1, max_edges + 1):
        for combo in itertools.combinations_with_replacement(range(len(connected)), k):
            parts = [connected[i] for i in combo]
            if sum(P.number_of_edges() for P in parts) <= max_edges:
                out.append(nx.convert_node_labels_to_integers(nx.disjoint_union_all(parts)))
    return out


def test_criterion_4_random_cluster_exactness():
    t0 = time.perf_counter()
    graphs = _small_graphs()
    worst = 0.0
    n_cases = 0
    for gi, G in enumerate(graphs):
        n = G.number_of_nodes()
        g = from_edges(n, list(G.edges()), boundary=[0, n - 1])
        m = g.n_edges
        for p, q, b in itertools.product((0.3, 0.6), (1, 2, 4), (0, 1)):
            ex = exact_rc_distribution(g, p, q, b)
            params = RCParams(p, q, b, burn_in=200, spacing=2)
            x = sample_rc_chain(g, params, 100_000, derive_seed(40, n_cases))
            emp = np.bincount(x @ (1 << np.arange(m)), minlength=1 << m) / len(x)
            worst = max(worst, 0.5 * np.abs(emp - ex.probs).sum())
            n_cases += 1
    edge = from_edges(2, [(0, 1)])
    x = sample_rc_chain(edge, RCParams(0.5, 2.0, burn_in=100, spacing=1), 100_000, 41)
    se = math.sqrt(2 / 9 / len(x))
    single = abs(x.mean() - 1 / 3) / se
    ok = worst <= 0.02 and single <= 3 and time.perf_counter() - t0 < 300
    report(4, ok, f"{len(graphs)} graphs x 12 (p,q,b) = {n_cases} cases, max TV {worst:.4f}; single edge P(open) = {x.mean():.4f} ({single:.1f} sigma)", t0)


def test_criterion_5_q1_degeneracy():
    t0 = time.perf_counter()
    g = build_graph(Hypercubic(2, 4))
    p = 0.45
    rc = sample_rc_chain(g, RCParams(p, 1.0, burn_in=10, spacing=1), 10_000, 50).sum(axis=1)
    bern = np.array([sample_bernoulli(g, p, derive_seed(51, r)).sum() for r in range(10_000)])
    # pool sparse tails so every expected cell count is at least 5
    lo, hi = int(np.percentile(np.r_[rc, bern], 1)), int(np.percentile(np.r_[rc, bern], 99))
    table = np.array([np.bincount(np.clip(s, lo, hi) - lo, minlength=hi - lo + 1) for s in (rc, bern)])
    stat, pval, dof, _ = chi2_contingency(table)
    report(5, pval > 0.01, f"chi-square homogeneity on open-edge counts: stat {stat:.1f}, dof {dof}, p = {pval:.3f}", t0)


def test_criterion_6_rigidity():
    t0 = time.perf_counter()
    ps = [round(0.30 + 0.025 * i, 3) for i in range(21)]
    rig, conn = [], []
    for i, p in enumerate(ps):
        r, c = estimate_theta_rig(p, 24, 200, derive_seed(60, i))
        rig.append(r)
        conn.append(c)
    p_rig, se_rig = pivot_from_grid(ps, rig)
    p_conn, se_conn = pivot_from_grid(ps, conn)
    pooled = math.hypot(se_rig, se_conn)
    disagree = checked = 0
    for G in nx.graph_atlas_g():
        n = G.number_of_nodes()
        if not 2 <= n <= 6 or not nx.is_connected(G):
            continue
        edges = list(G.edges())
        rank = rigidity_matrix_rank(random_framework(n, edges, derive_seed(61, checked)))
        disagree += is_generically_rigid_2d(n, edges) != (rank == 2 * n - 3)
        checked += 1
    ok = p_rig > p_conn and p_rig - p_conn > 2 * pooled and disagree == 0
    report(6, ok, f"rigidity pivot {p_rig:.3f} +- {se_rig:.3f} vs connectivity pivot {p_conn:.3f} +- {se_conn:.3f}; "
                  f"pebble vs rank on {checked} graphs: {disagree} disagreements", t0)


def _rect(origin, axes, a, b):
    i, j = axes
    corners = [(0, 0), (a, 0), (a, b), (0, b)]
    pts = []
    for (s0, t0), (s1, t1) in zip(corners, corners[1:] + corners[:1]):
        n = abs(s1 - s0) + abs(t1 - t0)
        for k in range(n):
            p = list(origin)
            p[i] += s0 + (s1 - s0) * k // n
            p[j] += t0 + (t1 - t0) * k // n
            pts.append(tuple(p))
    return LatticeCycle(tuple(pts))


def _edges(c):
    vs = c.vertices
    return list(zip(vs, vs[1:] + vs[:1]))


def test_criterion_7_entanglement():
    t0 = time.perf_counter()
    rng = np.random.default_rng(70)
    # connected sets: random lattice trees/walks
    conn_ok = True
    for _ in range(200):
        pos, edges = (0, 0, 0), []
        for _ in range(int(rng.integers(1, 25))):
            step = [0, 0, 0]
            step[int(rng.integers(3))] = int(rng.choice([-1, 1]))
            nxt = tuple(a + b for a, b in zip(pos, step))
            edges.append((pos, nxt))
            pos = nxt
        conn_ok &= isinstance(entanglement_witness(edges), EntangledByConnectivity)
    a = _rect((0, 0, 0), (0, 1), 2, 2)
    b = _rect((1, 1, -1), (0, 2), 2, 2)
    lk1, lk2 = linking_number(a, b, seed=71), linking_number(a, b, seed=72)
    gauss = gauss_linking_integral(a, b)
    v = entanglement_witness(_edges(a) + _edges(b))
    hopf_ok = abs(lk1) == 1 and lk1 == lk2 == round(gauss) and isinstance(v, EntangledByLinking) and abs(v.linking) == 1
    # plane-separable two-component sets
    sep_ok = True
    for _ in range(200):
        parts = []
        for lo, hi in ((-4, 0), (2, 6)):
            x = int(rng.integers(lo, hi - 1))
            parts += _edges(_rect((x, int(rng.integers(-2, 3)), int(rng.integers(-2, 3))),
                                  [(1, 2), (0, 1), (0, 2)][int(rng.integers(3))], 1, 1))
        sep_ok &= not isinstance(entanglement_witness(parts), (EntangledByLinking, EntangledByConnectivity))
    frozen = {1: 6, 2: 45, 3: 380, 4: 3402}
    counts = {n: count_connected_edge_sets(n) for n in frozen}
    ok = conn_ok and hopf_ok and sep_ok and counts == frozen
    report(7, ok, f"connected certified: {conn_ok}; Hopf lk = {lk1}/{lk2}, Gauss {gauss:.5f}; "
                  f"separable never certified: {sep_ok}; counts {counts}", t0)


def test_criterion_8_labyrinth():
    t0 = time.perf_counter()
    srw = msd_curve(1.0, 0.0, None, (256, 256), 1000, 40, 80, walkers_per_env=100, periodic=True)
    mixed = msd_curve(0.95, 0.05, None, (256, 256), 1000, 40, 81, walkers_per_env=100, periodic=True)
    ratio = mixed.msd_over_n()
    r_half, r_end = ratio[500], ratio[1000]
    stable = abs(r_end - r_half) / r_end < 0.1
    trap = trap_environment()
    tr = msd_in_env(trap, 1000, 50, 82)
    cls = equivalence_class(trap, (1, 1), 10)
    trap_ok = np.nanmax(tr.msd) == 0 and tr.localized and isinstance(cls, Complete) and cls.size == 1
    rng = np.random.default_rng(83)
    replay_ok = 0
    for i in range(1000):
        env = sample_environment((20, 20), 0.3, 0.2, None, derive_seed(84, i), periodic=bool(i % 2))
        pts = env.rw_points()
        start = tuple(pts[rng.integers(len(pts))])
        w = run_walk(env, start, int(rng.integers(1, 200)), derive_seed(85, i))
        replay_ok += is_admissible(env, w.path) and replay_backwards(env, w) == w.path[::-1]
    ok = (abs(srw.delta_hat - 1) <= 0.05 and mixed.delta_hat > 0 and stable and trap_ok
          and replay_ok == 1000 and time.perf_counter() - t0 < 600)
    report(8, ok, f"SRW slope {srw.delta_hat:.4f}; p_rw=0.95,p+=0.05 slope {mixed.delta_hat:.4f}, "
                  f"MSD/n {r_half:.3f} -> {r_end:.3f}; trap max MSD {np.nanmax(tr.msd):.0f}, class size {cls.size}; "
                  f"replay {replay_ok}/1000", t0)


CONFIGS = [
    {"kind": "perc", "lattice": {"type": "Hypercubic", "d": 2, "L": 24}, "p": [0.45, 0.5, 0.55], "replicas": 100, "seed": 90},
    {"kind": "pc-scan", "lattice": {"type": "Hypercubic", "d": 2, "L": 16}, "p_grid": {"start": 0.4, "stop": 0.6, "step": 0.05}, "replicas": 100, "seed": 91},
    {"kind": "uniq", "L": 12, "p": [0.5, 0.7], "replicas": 30, "seed": 92},
    {"kind": "rc", "lattice": {"type": "Hypercubic", "d": 2, "L": 4}, "p": [0.4, 0.6], "q": [1, 2], "b": [0, 1], "samples": 500, "burn_in": 100, "seed": 93},
    {"kind": "rigid", "L": 10, "p": [0.6, 0.7, 0.8], "replicas": 10, "seed": 94},
    {"kind": "entangle", "n_max": 4, "seed": 95},
    {"kind": "labyrinth", "dims": [32, 32], "p_rw": 0.95, "p_plus": 0.05, "t_max": 100, "replicas": 16, "walkers_per_env": 20, "chunk": 2, "seed": 96},
]


def test_criterion_9_reproducibility(tmp_path):
    t0 = time.perf_counter()
    identical = 0
    files = 0
    for cfg in CONFIGS:
        base = tmp_path / cfg["kind"]
        m = run(cfg, base / "orig", workers=1)
        manifest = json.loads((base / "orig" / "manifest.json").read_text())["config"]
        for w in (1, 8):
            run(manifest, base / f"w{w}", workers=w)
            for name in m.outputs:
                files += 1
                identical += (base / "orig" / name).read_bytes() == (base / f"w{w}" / name).read_bytes()
    report(9, identical == files, f"{identical}/{files} manifest reruns byte-identical across {len(CONFIGS)} kinds at 1 and 8 workers", t0)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
