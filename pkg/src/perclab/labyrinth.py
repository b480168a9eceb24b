"""Random reflecting labyrinths and the random walks they carry.

Directions of Z^d are indexed ``0..2d-1`` with ``2j -> +e_j`` and
``2j+1 -> -e_j``, so negation is ``k ^ 1``. A reflector is a tuple ``rho``
of length ``2d`` sending an incoming heading to an outgoing heading, and is
valid iff ``rho[rho[u] ^ 1] == u ^ 1`` for every ``u`` (reversing the ball
retraces its path).

An environment stores one tag per vertex of a box: ``RW`` for a random-walk
point, ``CROSS`` for the identity reflector, or ``k >= 0`` for reflector
``k`` of the environment's reflector table.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .seeding import derive_seed, make_rng

__all__ = [
    "RW",
    "CROSS",
    "Reflector",
    "validate_reflector",
    "identity",
    "reversal",
    "catalog",
    "LabyrinthEnv",
    "sample_environment",
    "WalkState",
    "run_walk",
    "replay_backwards",
    "Complete",
    "TruncatedAtCap",
    "equivalence_class",
    "MSDResult",
    "msd_in_env",
    "msd_curve",
    "localization_probe",
    "trap_environment",
    "dumps_env",
    "loads_env",
    "MSD_COLUMNS",
]

RW = -1
CROSS = -2
MSD_COLUMNS = ("n", "msd", "stderr", "censored_fraction")

Reflector = tuple


def direction_vectors(d: int) -> np.ndarray:
    vecs = np.zeros((2 * d, d), dtype=np.int64)
    for j in range(d):
        vecs[2 * j, j] = 1
        vecs[2 * j + 1, j] = -1
    return vecs


def validate_reflector(table: Sequence[int]) -> bool:
    """True iff ``table`` is a total map on the ``2d`` headings with
    ``rho(-rho(u)) = -u``."""
    k = len(table)
    if k == 0 or k % 2 or any(not 0 <= t < k for t in table):
        return False
    return all(table[table[u] ^ 1] == u ^ 1 for u in range(k))


def identity(d: int) -> Reflector:
    return tuple(range(2 * d))


def reversal(d: int) -> Reflector:
    """Rotation by pi: sends every heading back the way it came."""
    return tuple(u ^ 1 for u in range(2 * d))


def _swap(d: int, i: int, j: int, flip: bool) -> Reflector:
    # mirror exchanging axes i and j; with flip, +e_i <-> -e_j
    table = list(range(2 * d))
    pi, mi, pj, mj = 2 * i, 2 * i + 1, 2 * j, 2 * j + 1
    if flip:
        table[pi], table[mj], table[mi], table[pj] = mj, pi, pj, mi
    else:
        table[pi], table[pj], table[mi], table[mj] = pj, pi, mj, mi
    return tuple(table)


def catalog(d: int) -> dict[str, Reflector]:
    """Shipped non-trivial reflectors.

    d = 2: the two diagonal mirrors ``/`` (e1 <-> e2) and ``\\`` (e1 <-> -e2)
    and the reversal. d >= 3: both axis mirrors for every pair of axes, and
    the reversal. Quarter-turn rotations are deliberately absent: they fail
    the retracing condition.
    """
    if d == 2:
        out = {"/": _swap(2, 0, 1, False), "\\": _swap(2, 0, 1, True)}
    else:
        out = {}
        for i, j in itertools.combinations(range(d), 2):
            out[f"m{i}{j}+"] = _swap(d, i, j, False)
            out[f"m{i}{j}-"] = _swap(d, i, j, True)
    out["rev"] = reversal(d)
    return out


@dataclass(frozen=True, eq=False)
class LabyrinthEnv:
    """Tags on the box ``{0..dims[0]-1} x ...`` stored row-major."""

    dims: tuple
    tags: np.ndarray  # int8 array of shape dims
    reflectors: tuple  # reflector tables indexed by tag >= 0
    p_rw: float = float("nan")
    p_cross: float = float("nan")
    names: tuple = ()
    periodic: bool = False

    @property
    def d(self) -> int:
        return len(self.dims)

    def tag(self, x) -> int:
        return int(self.tags[tuple(x)])

    def is_rw(self, x) -> bool:
        return self.tag(x) == RW

    def rw_points(self) -> np.ndarray:
        return np.argwhere(self.tags == RW)

    def with_boundary(self, periodic: bool) -> "LabyrinthEnv":
        return LabyrinthEnv(self.dims, self.tags, self.reflectors, self.p_rw, self.p_cross, self.names, periodic)

    @property
    def outgoing(self) -> np.ndarray:
        """``(2d, K + 2)`` table: heading after meeting tag ``t`` (column ``t + 2``)."""
        k = 2 * self.d
        cols = [np.arange(k), np.arange(k)] + [np.asarray(r) for r in self.reflectors]
        return np.stack(cols, axis=1)


def _check_params(p_rw: float, p_cross: float, pi: dict, d: int) -> dict:
    if p_rw < 0 or p_cross < 0 or p_rw + p_cross > 1 + 1e-12:
        raise ValueError(f"need p_rw, p_+ >= 0 and p_rw + p_+ <= 1, got {p_rw}, {p_cross}")
    if pi is None:
        cat = catalog(d)
        pi = {name: (tab, 1.0 / len(cat)) for name, tab in cat.items()}
    norm = {}
    for name, val in pi.items():
        tab, mass = val
        tab = tuple(tab)
        if len(tab) != 2 * d or not validate_reflector(tab):
            raise ValueError(f"reflector {name!r} is not valid in dimension {d}")
        if tab == identity(d):
            raise ValueError("the crossing is not allowed in the reflector mass function")
        if mass < 0:
            raise ValueError(f"negative mass for reflector {name!r}")
        norm[name] = (tab, float(mass))
    if not math.isclose(sum(m for _, m in norm.values()), 1.0, abs_tol=1e-9):
        raise ValueError("reflector masses must sum to 1")
    return norm


def sample_environment(dims: Sequence[int], p_rw: float, p_cross: float, pi: dict | None, seed, periodic: bool = False) -> LabyrinthEnv:
    """Independent tags: rw point w.p. ``p_rw``, crossing w.p. ``p_cross``,
    reflector ``rho`` w.p. ``(1 - p_rw - p_cross) * pi[rho]``.

    ``pi`` maps a name to ``(table, mass)``; ``None`` means uniform over
    :func:`catalog`.
    """
    dims = tuple(int(x) for x in dims)
    pi = _check_params(p_rw, p_cross, pi, len(dims))
    names = tuple(pi)
    rest = max(0.0, 1.0 - p_rw - p_cross)
    probs = np.array([p_rw, p_cross] + [rest * pi[nm][1] for nm in names])
    probs = probs / probs.sum()
    values = np.array([RW, CROSS] + list(range(len(names))), dtype=np.int8)
    idx = make_rng(seed).choice(len(values), size=dims, p=probs)
    return LabyrinthEnv(dims, values[idx], tuple(pi[nm][0] for nm in names), p_rw, p_cross, names, periodic)


def trap_environment(d: int = 2, size: int = 3) -> LabyrinthEnv:
    """Box with a single rw point at the center whose 2d neighbours are
    reversal reflectors; every other vertex is a crossing."""
    dims = (size,) * d
    tags = np.full(dims, CROSS, dtype=np.int8)
    c = np.full(d, size // 2)
    tags[tuple(c)] = RW
    for v in direction_vectors(d):
        tags[tuple(c + v)] = 0
    return LabyrinthEnv(dims, tags, (reversal(d),), names=("rev",))


@dataclass
class WalkState:
    position: tuple
    heading: int
    path: list = field(default_factory=list)  # lattice positions, start included
    headings: list = field(default_factory=list)  # heading taken on each lattice step
    rw_visits: list = field(default_factory=list)  # X_0, X_1, ...
    rw_times: list = field(default_factory=list)  # lattice time of each rw visit
    choices: list = field(default_factory=list)  # heading drawn at each rw visit
    halted: bool = False

    @property
    def n_steps(self) -> int:
        return len(self.headings)


def _advance(env: LabyrinthEnv, pos: np.ndarray, h: int, vecs: np.ndarray):
    nxt = pos + vecs[h]
    dims = np.asarray(env.dims)
    if env.periodic:
        return nxt % dims, False
    if np.any(nxt < 0) or np.any(nxt >= dims):
        return pos, True
    return nxt, False


def run_walk(env: LabyrinthEnv, start: Sequence[int], n_steps: int, seed) -> WalkState:
    """Walk ``n_steps`` lattice steps from the rw point ``start``.

    A fresh uniform heading is drawn at every rw point; reflectors deflect
    deterministically. With a halting boundary the walk stops (``halted``)
    when its next step would leave the box.
    """
    start = np.asarray(start, dtype=np.int64)
    if not env.is_rw(start):
        raise ValueError(f"start {tuple(start)} is not an rw point")
    rng = make_rng(seed)
    vecs = direction_vectors(env.d)
    out = env.outgoing
    k = 2 * env.d
    h = int(rng.integers(k))
    st = WalkState(tuple(start.tolist()), h, [tuple(start.tolist())], [], [tuple(start.tolist())], [0], [h])
    pos = start
    for t in range(n_steps):
        nxt, halted = _advance(env, pos, h, vecs)
        if halted:
            st.halted = True
            break
        pos = nxt
        st.headings.append(h)
        st.path.append(tuple(pos.tolist()))
        tag = env.tag(pos)
        if tag == RW:
            h = int(rng.integers(k))
            st.rw_visits.append(tuple(pos.tolist()))
            st.rw_times.append(t + 1)
            st.choices.append(h)
        else:
            h = int(out[h, tag + 2])
    st.position = tuple(pos.tolist())
    st.heading = h
    return st


def is_admissible(env: LabyrinthEnv, path: Sequence[tuple]) -> bool:
    """Every interior non-rw vertex of ``path`` deflects as its reflector dictates."""
    vecs = direction_vectors(env.d)
    lookup = {tuple(v): i for i, v in enumerate(vecs)}
    dims = np.asarray(env.dims)

    def heading(a, b):
        diff = np.asarray(b) - np.asarray(a)
        if env.periodic:
            diff = (diff + dims // 2) % dims - dims // 2
        return lookup.get(tuple(diff.tolist()))

    out = env.outgoing
    for a, x, b in zip(path, path[1:], path[2:]):
        tag = env.tag(x)
        if tag == RW:
            continue
        hin, hout = heading(a, x), heading(x, b)
        if hin is None or hout is None or out[hin, tag + 2] != hout:
            return False
    return True


def replay_backwards(env: LabyrinthEnv, walk: WalkState) -> list[tuple]:
    """Replay ``walk`` from its end with the heading reversed.

    At reflectors the replay follows the environment; at an rw point it takes
    the reversed incoming step of the forward walk. Returns the visited
    positions, which equal ``walk.path`` reversed when the forward path is
    admissible.
    """
    vecs = direction_vectors(env.d)
    out = env.outgoing
    path = [walk.path[-1]]
    if not walk.headings:
        return path
    pos = np.asarray(walk.path[-1])
    h = walk.headings[-1] ^ 1
    for i in range(len(walk.headings) - 1, -1, -1):
        pos, _ = _advance(env, pos, h, vecs)
        path.append(tuple(pos.tolist()))
        if i == 0:
            break
        tag = env.tag(pos)
        h = walk.headings[i - 1] ^ 1 if tag == RW else int(out[h, tag + 2])
    return path


@dataclass(frozen=True)
class Complete:
    points: frozenset

    @property
    def size(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class TruncatedAtCap:
    explored: int


def equivalence_class(env: LabyrinthEnv, x: Sequence[int], cap: int):
    """Rw points joined to ``x`` by admissible paths.

    Breadth-first search over rw points: from each, all ``2d`` headings are
    followed deterministically through reflectors until the next rw point
    (or the box edge, under a halting boundary). ``TruncatedAtCap`` when more
    than ``cap`` rw points are found.
    """
    if cap <= 0:
        raise ValueError("cap must be positive")
    x = tuple(int(c) for c in x)
    if not env.is_rw(x):
        raise ValueError(f"{x} is not an rw point")
    vecs = direction_vectors(env.d)
    out = env.outgoing
    k = 2 * env.d
    seen = {x}
    queue = [x]
    max_len = env.tags.size * k + 1
    while queue:
        y = queue.pop()
        for h0 in range(k):
            pos, h = np.asarray(y), h0
            for _ in range(max_len):
                pos, halted = _advance(env, pos, h, vecs)
                if halted:
                    break
                tag = env.tag(pos)
                if tag == RW:
                    z = tuple(pos.tolist())
                    if z not in seen:
                        seen.add(z)
                        if len(seen) > cap:
                            return TruncatedAtCap(len(seen))
                        queue.append(z)
                    break
                h = int(out[h, tag + 2])
    return Complete(frozenset(seen))


@dataclass(frozen=True)
class MSDResult:
    n: np.ndarray
    msd: np.ndarray
    stderr: np.ndarray
    censored_fraction: np.ndarray
    delta_hat: float
    fit_residual: float
    localized: bool
    lattice_steps_mean: float

    def rows(self):
        return [
            {"n": int(a), "msd": float(b), "stderr": float(c), "censored_fraction": float(d)}
            for a, b, c, d in zip(self.n, self.msd, self.stderr, self.censored_fraction)
        ]

    def msd_over_n(self) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.msd / self.n


def _walk_many(env: LabyrinthEnv, starts: np.ndarray, t_max: int, rng, max_lattice_steps: int):
    """Vectorized walkers; returns rw-time displacements ``(W, t_max + 1, d)``,
    censoring time per walker (``t_max + 1`` if never censored) and lattice steps."""
    W, d = starts.shape
    vecs = direction_vectors(d)
    out = env.outgoing
    dims = np.asarray(env.dims)
    tags = env.tags
    pos = starts.copy()
    disp = np.zeros((W, d), dtype=np.int64)
    record = np.zeros((W, t_max + 1, d), dtype=np.int64)
    visits = np.zeros(W, dtype=np.int64)
    censored_at = np.full(W, t_max + 1, dtype=np.int64)
    steps = np.zeros(W, dtype=np.int64)
    h = rng.integers(2 * d, size=W)
    active = np.ones(W, dtype=bool)
    for _ in range(max_lattice_steps):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        nxt = pos[idx] + vecs[h[idx]]
        if env.periodic:
            nxt %= dims
        else:
            outside = np.any((nxt < 0) | (nxt >= dims), axis=1)
            if outside.any():
                gone = idx[outside]
                censored_at[gone] = visits[gone] + 1
                active[gone] = False
                idx, nxt = idx[~outside], nxt[~outside]
        disp[idx] += vecs[h[idx]]
        pos[idx] = nxt
        steps[idx] += 1
        tag = tags[tuple(nxt.T)].astype(np.int64)
        rw = tag == RW
        hit = idx[rw]
        visits[hit] += 1
        record[hit, visits[hit]] = disp[hit]
        h[hit] = rng.integers(2 * d, size=hit.size)
        refl = idx[~rw]
        h[refl] = out[h[refl], tag[~rw] + 2]
        active[hit[visits[hit] >= t_max]] = False
    # walkers still short of t_max after the lattice-step budget are censored
    short = visits < t_max
    censored_at[short & (censored_at > t_max)] = visits[short & (censored_at > t_max)] + 1
    return record, censored_at, steps


def _fit_tail(n: np.ndarray, msd: np.ndarray) -> tuple[float, float]:
    # least squares over the final half of the curve
    half = n >= n[-1] / 2
    x, y = n[half].astype(float), msd[half]
    ok = np.isfinite(y)
    if ok.sum() < 2:
        return float("nan"), float("nan")
    A = np.vstack([x[ok], np.ones(ok.sum())]).T
    coef, res, *_ = np.linalg.lstsq(A, y[ok], rcond=None)
    resid = float(np.sqrt(res[0] / ok.sum())) if res.size else 0.0
    return float(coef[0]), resid


def msd_in_env(env: LabyrinthEnv, t_max: int, walkers: int, seed, starts=None, class_cap: int = 500, max_lattice_factor: int = 200) -> MSDResult:
    """Mean squared displacement of ``X_n`` (rw-visit time) in one environment.

    Walkers start at uniformly chosen rw points (or ``starts``). Localization
    is flagged when every start has a complete equivalence class smaller than
    ``class_cap``.
    """
    rng = make_rng(seed)
    if starts is None:
        pts = env.rw_points()
        if len(pts) == 0:
            raise ValueError("environment has no rw points")
        starts = pts[rng.integers(len(pts), size=walkers)]
    starts = np.asarray(starts, dtype=np.int64).reshape(-1, env.d)
    record, censored_at, steps = _walk_many(env, starts, t_max, rng, max_lattice_factor * (t_max + 1))
    return _summarize(record, censored_at, steps, _localized(env, starts, class_cap))


def _localized(env: LabyrinthEnv, starts: np.ndarray, cap: int) -> bool:
    covered: set = set()
    for s in {tuple(x) for x in starts.tolist()}:
        if s in covered:
            continue
        res = equivalence_class(env, s, cap)
        if not isinstance(res, Complete) or res.size >= cap:
            return False
        covered |= res.points
    return True


def _summarize(record, censored_at, steps, localized) -> MSDResult:
    W, T1, _ = record.shape
    n = np.arange(T1)
    sq = (record**2).sum(axis=2).astype(float)
    alive = n[None, :] < censored_at[:, None]
    count = alive.sum(axis=0)
    with np.errstate(invalid="ignore", divide="ignore"):
        msd = np.where(count > 0, (sq * alive).sum(axis=0) / count, np.nan)
        var = np.where(count > 1, ((sq - msd) ** 2 * alive).sum(axis=0) / (count - 1), 0.0)
        se = np.sqrt(var / np.maximum(count, 1))
    delta, resid = _fit_tail(n[1:], msd[1:])
    return MSDResult(n, msd, se, 1.0 - count / W, delta, resid, localized, float(steps.mean()))


def msd_curve(p_rw: float, p_cross: float, pi: dict | None, dims: Sequence[int], t_max: int, replicas: int, seed,
              walkers_per_env: int = 1, periodic: bool = False, class_cap: int = 500) -> MSDResult:
    """MSD averaged over ``replicas`` sampled environments.

    Environment ``r`` uses ``derive_seed(seed, 2r)`` and its walkers
    ``derive_seed(seed, 2r + 1)``. Requires ``p_rw > 0``.
    """
    if p_rw <= 0:
        raise ValueError("p_rw must be > 0: without rw points the walk is a deterministic ray and its law is unknown")
    records, cens, steps, local = [], [], [], True
    for r in range(replicas):
        env = sample_environment(dims, p_rw, p_cross, pi, derive_seed(seed, 2 * r), periodic=periodic)
        rng = make_rng(derive_seed(seed, 2 * r + 1))
        pts = env.rw_points()
        if len(pts) == 0:
            continue
        starts = pts[rng.integers(len(pts), size=walkers_per_env)]
        rec, c, s = _walk_many(env, starts, t_max, rng, 200 * (t_max + 1))
        records.append(rec)
        cens.append(c)
        steps.append(s)
        if local and p_rw < 1:
            local = _localized(env, starts, class_cap)
    if p_rw == 1:
        local = False
    return _summarize(np.concatenate(records), np.concatenate(cens), np.concatenate(steps), local)


def localization_probe(p_rw: float, p_cross: float, pi: dict | None, dims: Sequence[int], cap: int, replicas: int, seed,
                       periodic: bool = False) -> tuple[float, float]:
    """Fraction (and stderr) of sampled rw points whose class is complete with
    fewer than ``cap`` members; one rw point per sampled environment."""
    hits = total = 0
    for r in range(replicas):
        env = sample_environment(dims, p_rw, p_cross, pi, derive_seed(seed, 2 * r), periodic=periodic)
        pts = env.rw_points()
        if len(pts) == 0:
            continue
        x = pts[make_rng(derive_seed(seed, 2 * r + 1)).integers(len(pts))]
        res = equivalence_class(env, x, cap)
        hits += isinstance(res, Complete) and res.size < cap
        total += 1
    if total == 0:
        raise ValueError("no environment contained an rw point")
    f = hits / total
    return f, math.sqrt(f * (1 - f) / total)


_TAG_CHARS = {RW: "o", CROSS: "+"}


def dumps_env(env: LabyrinthEnv) -> str:
    """One tag character per vertex (row-major), then the reflector table.

    ``o`` rw point, ``+`` crossing, ``a``, ``b``, ... reflector 0, 1, ....
    """
    chars = [_TAG_CHARS.get(int(t), chr(ord("a") + int(t))) for t in env.tags.ravel()]
    lines = [
        "# perclab labyrinth",
        "dims: " + " ".join(map(str, env.dims)),
        "periodic: " + str(int(env.periodic)),
        "tags: " + "".join(chars),
        "reflectors:",
    ]
    for i, tab in enumerate(env.reflectors):
        name = env.names[i] if i < len(env.names) else ""
        lines.append(f"{chr(ord('a') + i)} {' '.join(map(str, tab))} {name}".rstrip())
    return "\n".join(lines) + "\n"


def loads_env(text: str) -> LabyrinthEnv:
    lines = text.splitlines()
    if not lines or lines[0] != "# perclab labyrinth":
        raise ValueError("missing '# perclab labyrinth' header")
    dims = tuple(int(x) for x in lines[1].split(": ", 1)[1].split())
    periodic = bool(int(lines[2].split(": ", 1)[1]))
    chars = lines[3].split(": ", 1)[1]
    refl, names = [], []
    for ln in lines[5:]:
        if not ln.strip():
            continue
        parts = ln.split()
        d2 = 2 * len(dims)
        tab = tuple(int(x) for x in parts[1 : 1 + d2])
        if not validate_reflector(tab):
            raise ValueError(f"invalid reflector {parts[0]!r}")
        refl.append(tab)
        names.append(parts[1 + d2] if len(parts) > 1 + d2 else "")
    inv = {"o": RW, "+": CROSS}
    tags = np.array([inv.get(c, ord(c) - ord("a")) for c in chars], dtype=np.int8).reshape(dims)
    return LabyrinthEnv(dims, tags, tuple(refl), names=tuple(names), periodic=periodic)
