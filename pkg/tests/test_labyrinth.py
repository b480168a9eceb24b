from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from perclab.labyrinth import (
    CROSS,
    RW,
    Complete,
    LabyrinthEnv,
    TruncatedAtCap,
    catalog,
    dumps_env,
    equivalence_class,
    identity,
    is_admissible,
    loads_env,
    localization_probe,
    msd_curve,
    msd_in_env,
    replay_backwards,
    reversal,
    run_walk,
    sample_environment,
    trap_environment,
    validate_reflector,
)

# headings: 0 = +e1, 1 = -e1, 2 = +e2, 3 = -e2


def test_reflector_validation():
    assert validate_reflector(identity(2))
    assert validate_reflector((2, 3, 0, 1))  # e1 <-> e2, -e1 <-> -e2
    assert not validate_reflector((0, 0, 2, 3))  # e1 and -e1 both to e1
    assert not validate_reflector((2, 3, 1, 0))  # quarter turn fails to retrace
    assert validate_reflector(reversal(2))
    for d in (2, 3):
        assert all(validate_reflector(t) for t in catalog(d).values())


def test_environment_fractions():
    env = sample_environment((100, 100), 0.5, 0.3, None, 4)
    n = env.tags.size
    for value, p in ((RW, 0.5), (CROSS, 0.3)):
        f = (env.tags == value).mean()
        assert abs(f - p) < 3 * np.sqrt(p * (1 - p) / n)
    assert (sample_environment((10, 10), 1.0, 0.0, None, 1).tags == RW).all()
    assert (sample_environment((10, 10), 0.0, 1.0, None, 1).tags == CROSS).all()


def test_invalid_parameters():
    with pytest.raises(ValueError):
        sample_environment((5, 5), 0.7, 0.5, None, 0)
    with pytest.raises(ValueError):
        sample_environment((5, 5), 0.5, 0.2, {"rot": ((2, 3, 1, 0), 1.0)}, 0)
    with pytest.raises(ValueError):
        msd_curve(0.0, 0.5, None, (10, 10), 10, 2, 0)


def _crossings_with_start(dims, start):
    tags = np.full(dims, CROSS, dtype=np.int8)
    tags[start] = RW
    return LabyrinthEnv(tuple(dims), tags, ())


def test_straight_line_through_crossings():
    env = _crossings_with_start((41, 41), (20, 20))
    w = run_walk(env, (20, 20), 15, 3)
    disp = np.subtract(w.path[-1], w.path[0])
    assert np.abs(disp).sum() == 15 and np.count_nonzero(disp) == 1
    assert len(set(w.headings)) == 1
    w = run_walk(env, (20, 20), 100, 3)
    assert w.halted and w.n_steps == 20


def test_start_must_be_rw():
    env = _crossings_with_start((5, 5), (2, 2))
    with pytest.raises(ValueError):
        run_walk(env, (0, 0), 3, 0)


def test_simple_random_walk_msd():
    env = sample_environment((400, 400), 1.0, 0.0, None, 0, periodic=True)
    res = msd_in_env(env, 200, 4000, 1)
    for n in (50, 100, 200):
        assert abs(res.msd[n] - n) < 4 * res.stderr[n]
    assert abs(res.delta_hat - 1) < 0.1


def test_trap():
    env = trap_environment()
    w = run_walk(env, (1, 1), 40, 2)
    assert set(w.rw_visits) == {(1, 1)}
    assert w.path[::2] == [(1, 1)] * 21
    assert equivalence_class(env, (1, 1), 10) == Complete(frozenset({(1, 1)}))
    res = msd_in_env(env, 100, 20, 3)
    assert np.nanmax(res.msd) == 0 and res.delta_hat == 0 and res.localized


@pytest.mark.parametrize("periodic", [False, True])
def test_reversibility_replay(periodic):
    rng = np.random.default_rng(9)
    for i in range(500):
        env = sample_environment((15, 15), 0.3, 0.2, None, int(rng.integers(2**32)), periodic=periodic)
        pts = env.rw_points()
        if len(pts) == 0:
            continue
        start = tuple(pts[rng.integers(len(pts))])
        w = run_walk(env, start, int(rng.integers(1, 60)), i)
        assert is_admissible(env, w.path)
        assert replay_backwards(env, w) == w.path[::-1]


def test_equivalence_class_examples():
    env = sample_environment((6, 6), 1.0, 0.0, None, 0)
    assert equivalence_class(env, (2, 2), 100) == Complete(frozenset(map(tuple, env.rw_points().tolist())))
    assert isinstance(equivalence_class(env, (2, 2), 5), TruncatedAtCap)
    env = _crossings_with_start((5, 5), (1, 3))
    assert equivalence_class(env, (1, 3), 3) == Complete(frozenset({(1, 3)}))
    with pytest.raises(ValueError):
        equivalence_class(env, (1, 3), 0)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32), st.booleans())
def test_class_symmetry(seed, periodic):
    env = sample_environment((10, 10), 0.25, 0.2, None, seed, periodic=periodic)
    pts = [tuple(p) for p in env.rw_points().tolist()]
    if len(pts) < 2:
        return
    rng = np.random.default_rng(seed)
    for _ in range(5):
        x, y = (pts[i] for i in rng.choice(len(pts), 2, replace=False))
        cx = equivalence_class(env, x, 1000).points
        cy = equivalence_class(env, y, 1000).points
        assert (y in cx) == (x in cy)


def test_transition_count_symmetry():
    env = sample_environment((8, 8), 0.3, 0.1, None, 21, periodic=True)
    start = tuple(env.rw_points()[0])
    assert isinstance(equivalence_class(env, start, 1000), Complete)
    w = run_walk(env, start, 300_000, 5)
    trans = Counter(zip(w.rw_visits, w.rw_visits[1:]))
    for (x, y), nxy in trans.items():
        if x < y:
            nyx = trans.get((y, x), 0)
            assert abs(nxy - nyx) <= 4 * np.sqrt(nxy + nyx) + 1


def test_localization_probe_examples():
    f, _ = localization_probe(1.0, 0.0, None, (30, 30), 100, 20, 0, periodic=True)
    assert f == 0.0
    rev_only = {"rev": (reversal(2), 1.0)}
    f, _ = localization_probe(0.05, 0.0, rev_only, (30, 30), 100, 20, 0, periodic=True)
    assert f == 1.0


def test_dump_round_trip():
    env = sample_environment((5, 7), 0.4, 0.2, None, 3, periodic=True)
    back = loads_env(dumps_env(env))
    assert back.dims == env.dims and back.periodic
    assert (back.tags == env.tags).all() and back.reflectors == env.reflectors
