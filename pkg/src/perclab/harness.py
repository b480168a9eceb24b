"""Reproducible experiment runner.

A JSON config names an experiment kind and its parameters. The runner
validates every parameter, splits the work into tasks, gives task ``i`` the
seed ``derive_seed(master_seed, i)`` (``pc-scan`` shares task 0's seed across
its grid so that rows are coupled), runs the tasks on a process pool and
writes the CSV rows in task order, followed by a manifest that echoes the
full config. Feeding the manifest back as a config reproduces the CSV byte
for byte, whatever the worker count.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import platform
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import __version__
from .entanglement import MAX_EDGE_SET_SIZE, count_connected_edge_sets
from .graphs import BinaryTree, Hypercubic, Triangular, TreeCrossLine, build_graph, from_edges
from .labyrinth import MSD_COLUMNS, _fit_tail, _walk_many, sample_environment
from .percolation import CROSSING_COLUMNS, check_probability, crossing_probability
from .random_cluster import RC_COLUMNS, RCParams, sample_rc_chain, two_point_estimate
from .rigidity import RIGIDITY_COLUMNS, estimate_theta_rig
from .seeding import derive_seed, make_rng
from .uniqueness import UNIQUENESS_COLUMNS, uniqueness_row

__all__ = ["ConfigError", "KINDS", "RunManifest", "load_config", "validate_config", "run", "derive_seed"]

KINDS = ("perc", "uniq", "rc", "rigid", "entangle", "labyrinth", "pc-scan")
WORKERS_ENV = "PERCLAB_WORKERS"


class ConfigError(ValueError):
    """Config is malformed or violates a parameter invariant."""


@dataclass(frozen=True)
class RunManifest:
    config: dict
    toolkit_version: str
    wall_time_s: float
    workers: int
    task_seeds: list
    outputs: list

    def to_json(self) -> str:
        return json.dumps(
            {
                "toolkit_version": self.toolkit_version,
                "config": self.config,
                "wall_time_s": self.wall_time_s,
                "workers": self.workers,
                "task_seeds": self.task_seeds,
                "outputs": self.outputs,
                "python": platform.python_version(),
                "numpy": np.__version__,
            },
            indent=2,
        )


def _prob(cfg: dict, key: str) -> float:
    if key not in cfg:
        raise ConfigError(f"missing parameter {key!r}")
    try:
        return check_probability(cfg[key], key)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _probs(values, key: str) -> list[float]:
    out = []
    for v in values:
        try:
            out.append(check_probability(v, key))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    return out


def _grid(cfg: dict, key: str) -> list[float]:
    val = cfg.get(key)
    if val is None:
        raise ConfigError(f"missing parameter {key!r}")
    if isinstance(val, dict):
        start, stop, step = float(val["start"]), float(val["stop"]), float(val["step"])
        if step <= 0:
            raise ConfigError(f"{key}.step must be > 0")
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        val = [round(start + i * step, 12) for i in range(n)]
    elif isinstance(val, (int, float)) and not isinstance(val, bool):
        val = [val]
    if not isinstance(val, list) or not val:
        raise ConfigError(f"{key} must be a non-empty list or a start/stop/step grid")
    return _probs(val, key)


def _positive_int(cfg: dict, key: str, default=None) -> int:
    val = cfg.get(key, default)
    if val is None:
        raise ConfigError(f"missing parameter {key!r}")
    if not isinstance(val, int) or val < 1:
        raise ConfigError(f"{key} must be a positive integer, got {val!r}")
    return val


_LATTICES = {"Hypercubic": Hypercubic, "Triangular": Triangular, "BinaryTree": BinaryTree, "TreeCrossLine": TreeCrossLine}


def _spec(cfg: dict):
    lat = cfg.get("lattice", {"type": "Hypercubic", "d": 2, "L": 32})
    lat = dict(lat)
    kind = lat.pop("type", None)
    if kind not in _LATTICES:
        raise ConfigError(f"unknown lattice type {kind!r}")
    try:
        spec = _LATTICES[kind](**lat)
        spec.validate()
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid lattice: {exc}") from None
    return spec


def validate_config(cfg: dict) -> dict:
    """Check a config and return its normalized form (all defaults filled in)."""
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    kind = cfg.get("kind")
    if kind not in KINDS:
        raise ConfigError(f"unknown experiment kind {kind!r}; expected one of {', '.join(KINDS)}")
    seed = cfg.get("seed", 0)
    if not isinstance(seed, int) or seed < 0:
        raise ConfigError("seed must be a non-negative integer")
    out: dict[str, Any] = {"kind": kind, "seed": seed}
    if kind in ("perc", "pc-scan"):
        spec = _spec(cfg)
        if not isinstance(spec, (Hypercubic, Triangular)):
            raise ConfigError("crossing experiments need a Hypercubic or Triangular lattice")
        out["lattice"] = {"type": type(spec).__name__, **spec.__dict__}
        out["p_grid" if kind == "pc-scan" else "p"] = _grid(cfg, "p_grid" if kind == "pc-scan" else "p")
        out["replicas"] = _positive_int(cfg, "replicas")
    elif kind == "uniq":
        out["L"] = _positive_int(cfg, "L")
        if out["L"] < 3:
            raise ConfigError("L must be >= 3 for a box with interior")
        out["p"] = _grid(cfg, "p")
        out["replicas"] = _positive_int(cfg, "replicas")
    elif kind == "rc":
        if "edges" in cfg:
            edges = [list(map(int, e)) for e in cfg["edges"]]
            n = 1 + max(max(e) for e in edges)
            out["edges"] = edges
            out["boundary_vertices"] = [int(b) for b in cfg.get("boundary_vertices", [])]
            out["n_vertices"] = int(cfg.get("n_vertices", n))
        else:
            spec = _spec(cfg)
            out["lattice"] = {"type": type(spec).__name__, **spec.__dict__}
        out["p"] = _grid(cfg, "p")
        out["q"] = [float(q) for q in cfg.get("q", [1.0])]
        if any(not q >= 1 for q in out["q"]):
            raise ConfigError("q must be >= 1 for the heat-bath sampler")
        out["b"] = [int(b) for b in cfg.get("b", [0])]
        if any(b not in (0, 1) for b in out["b"]):
            raise ConfigError("boundary b must be 0 (free) or 1 (wired)")
        out["samples"] = _positive_int(cfg, "samples")
        out["burn_in"] = int(cfg.get("burn_in", 1000))
        out["spacing"] = _positive_int(cfg, "spacing", 10)
        out["x"], out["y"] = int(cfg.get("x", 0)), int(cfg.get("y", 1))
    elif kind == "rigid":
        out["L"] = _positive_int(cfg, "L")
        out["p"] = _grid(cfg, "p")
        out["replicas"] = _positive_int(cfg, "replicas")
    elif kind == "entangle":
        out["n_max"] = _positive_int(cfg, "n_max")
        if out["n_max"] > MAX_EDGE_SET_SIZE:
            raise ConfigError(f"n_max must be <= {MAX_EDGE_SET_SIZE}")
    elif kind == "labyrinth":
        out["dims"] = [int(x) for x in cfg.get("dims", [64, 64])]
        out["p_rw"] = _prob(cfg, "p_rw")
        out["p_plus"] = _prob(cfg, "p_plus") if "p_plus" in cfg else 0.0
        if out["p_rw"] <= 0:
            raise ConfigError("p_rw must be > 0")
        if out["p_rw"] + out["p_plus"] > 1:
            raise ConfigError("p_rw + p_plus must be <= 1")
        out["t_max"] = _positive_int(cfg, "t_max")
        out["replicas"] = _positive_int(cfg, "replicas")
        out["walkers_per_env"] = _positive_int(cfg, "walkers_per_env", 1)
        out["chunk"] = _positive_int(cfg, "chunk", 8)
        out["periodic"] = bool(cfg.get("periodic", True))
    return out


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _rc_graph(cfg):
    if "edges" in cfg:
        return from_edges(cfg["n_vertices"], cfg["edges"], cfg["boundary_vertices"])
    lat = dict(cfg["lattice"])
    return build_graph(_LATTICES[lat.pop("type")](**lat))


def _crossing_task(cfg, p, seed):
    lat = dict(cfg["lattice"])
    spec = _LATTICES[lat.pop("type")](**lat)
    est = crossing_probability(spec, p, cfg["replicas"], seed)
    return [{"spec": repr(spec), "p": p, "L": spec.L, "replicas": cfg["replicas"],
             "crossing_fraction": est.value, "stderr": est.stderr, "seed": seed}]


def _uniq_task(cfg, p, seed):
    return [uniqueness_row(cfg["L"], p, cfg["replicas"], seed)]


def _rc_task(cfg, pqb, seed):
    p, q, b = pqb
    graph = _rc_graph(cfg)
    params = RCParams(p, q, b, burn_in=cfg["burn_in"], spacing=cfg["spacing"])
    samples = sample_rc_chain(graph, params, cfg["samples"], seed)
    tp = two_point_estimate(graph, params, cfg["x"], cfg["y"], cfg["samples"], seed)
    return [{"p": p, "q": q, "b": b, "sweeps": cfg["burn_in"] + cfg["samples"] * cfg["spacing"],
             "open_fraction": float(samples.mean()), "two_point": tp.value, "seed": seed}]


def _rigid_task(cfg, p, seed):
    rig, conn = estimate_theta_rig(p, cfg["L"], cfg["replicas"], seed)
    return [{"p": p, "L": cfg["L"], "theta_rig_estimate": rig.value, "theta_rig_stderr": rig.stderr,
             "theta_conn_estimate": conn.value, "theta_conn_stderr": conn.stderr}]


def _entangle_task(cfg, n, seed):
    return [{"n": n, "count": count_connected_edge_sets(n)}]


def _labyrinth_task(cfg, env_indices, seed):
    # partial sums over a chunk of environments; merged by summation
    T1 = cfg["t_max"] + 1
    sums = np.zeros((4, T1))
    walkers = 0
    for j, r in enumerate(env_indices):
        env = sample_environment(cfg["dims"], cfg["p_rw"], cfg["p_plus"], None, derive_seed(seed, 2 * j),
                                 periodic=cfg["periodic"])
        rng = make_rng(derive_seed(seed, 2 * j + 1))
        pts = env.rw_points()
        if len(pts) == 0:
            continue
        starts = pts[rng.integers(len(pts), size=cfg["walkers_per_env"])]
        rec, cens, _ = _walk_many(env, starts, cfg["t_max"], rng, 200 * T1)
        sq = (rec**2).sum(axis=2).astype(float)
        alive = np.arange(T1)[None, :] < cens[:, None]
        sums += np.stack([alive.sum(0), (sq * alive).sum(0), (sq**2 * alive).sum(0), np.zeros(T1)])
        walkers += len(starts)
    sums[3] = walkers
    return [{"_sums": sums.tolist()}]


def _tasks(cfg: dict) -> tuple[list, Callable, tuple]:
    kind = cfg["kind"]
    if kind in ("perc", "pc-scan"):
        return cfg["p_grid" if kind == "pc-scan" else "p"], _crossing_task, CROSSING_COLUMNS
    if kind == "uniq":
        return cfg["p"], _uniq_task, UNIQUENESS_COLUMNS
    if kind == "rc":
        return [(p, q, b) for p in cfg["p"] for q in cfg["q"] for b in cfg["b"]], _rc_task, RC_COLUMNS
    if kind == "rigid":
        return cfg["p"], _rigid_task, RIGIDITY_COLUMNS
    if kind == "entangle":
        return list(range(1, cfg["n_max"] + 1)), _entangle_task, ("n", "count")
    if kind == "labyrinth":
        idx = list(range(cfg["replicas"]))
        chunks = [idx[i : i + cfg["chunk"]] for i in range(0, len(idx), cfg["chunk"])]
        return chunks, _labyrinth_task, MSD_COLUMNS
    raise ConfigError(f"unknown experiment kind {kind!r}")


def _call(job):
    fn, cfg, item, seed = job
    return fn(cfg, item, seed)


def _merge_msd(results) -> list[dict]:
    total = np.sum([np.asarray(r[0]["_sums"]) for r in results], axis=0)
    count, s1, s2, walkers = total
    n = np.arange(count.size)
    with np.errstate(invalid="ignore", divide="ignore"):
        msd = np.where(count > 0, s1 / count, np.nan)
        var = np.where(count > 1, (s2 - count * msd**2) / (count - 1), 0.0)
        se = np.sqrt(np.maximum(var, 0.0) / np.maximum(count, 1))
    cens = 1.0 - count / walkers
    return [{"n": int(i), "msd": float(a), "stderr": float(b), "censored_fraction": float(c)}
            for i, a, b, c in zip(n, msd, se, cens)]


def load_config(path: str | os.PathLike) -> dict:
    """Read a JSON config; a manifest is accepted and its ``config`` echo used."""
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    if isinstance(data, dict) and "config" in data and "toolkit_version" in data:
        data = data["config"]
    return data


def resolve_workers(workers: int | None) -> int:
    if workers is None:
        workers = int(os.environ.get(WORKERS_ENV, "1"))
    if workers < 1:
        raise ConfigError("workers must be >= 1")
    return workers


def run(config: dict, out_dir: str | os.PathLike, workers: int | None = None, seed: int | None = None) -> RunManifest:
    """Validate ``config``, run every task and write ``<kind>.csv`` plus ``manifest.json``."""
    if seed is not None:
        config = {**config, "seed": seed}
    cfg = validate_config(config)
    workers = resolve_workers(workers)
    items, fn, columns = _tasks(cfg)
    if cfg["kind"] == "pc-scan":
        # one replica stream shared by every p: the scan is monotone-coupled
        seeds = [derive_seed(cfg["seed"], 0)] * len(items)
    else:
        seeds = [derive_seed(cfg["seed"], i) for i in range(len(items))]
    jobs = [(fn, cfg, item, s) for item, s in zip(items, seeds)]
    t0 = time.perf_counter()
    if workers == 1:
        results = [_call(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_call, jobs))
    rows = _merge_msd(results) if cfg["kind"] == "labyrinth" else [row for res in results for row in res]
    if cfg["kind"] == "labyrinth":
        n = np.array([r["n"] for r in rows])
        msd = np.array([r["msd"] for r in rows])
        slope, resid = _fit_tail(n[1:], msd[1:])
        cfg_summary = {"delta_hat": slope, "fit_residual": resid}
    else:
        cfg_summary = {}
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row[c]) for c in columns])
    csv_name = f"{cfg['kind']}.csv"
    (out / csv_name).write_text(buf.getvalue())
    outputs = [csv_name]
    if cfg_summary:
        (out / "summary.json").write_text(json.dumps(cfg_summary, indent=2, sort_keys=True) + "\n")
        outputs.append("summary.json")
    manifest = RunManifest(cfg, __version__, time.perf_counter() - t0, workers,
                           [{"task": i, "seed": s} for i, s in enumerate(seeds)], outputs)
    (out / "manifest.json").write_text(manifest.to_json() + "\n")
    return manifest
