import math

import numpy as np
import pytest
from scipy import stats

from environment import CookieLaw, Deterministic, IIDLazy
from lattice import SeedSpec, derive_stream
from walker import (
    constructed_vertical,
    lift_symmetric,
    lift_vertical_path,
    simulate_constructed,
    simulate_direct,
    simulate_discovery_order,
    simulate_symmetric,
    visit_count_semantics,
    visit_indices,
)

FIRST_STEP_SAMPLES = 4000


def _brute_visits(positions):
    rows = [tuple(r) for r in positions.tolist()]
    return [rows[: j + 1].count(rows[j]) for j in range(len(rows))]


def _first_steps(simulate, n=FIRST_STEP_SAMPLES):
    counts = np.zeros(4, dtype=np.int64)
    for i in range(n):
        traj = simulate(SeedSpec(31, i))
        delta = traj.positions[1] - traj.positions[0]
        axis = int(np.flatnonzero(delta)[0])
        counts[2 * axis + (0 if delta[axis] > 0 else 1)] += 1
    return counts


def _assert_valid(traj):
    steps = np.abs(np.diff(traj.positions, axis=0)).sum(axis=1)
    assert np.all(steps == 1)
    assert np.array_equal(traj.horiz_increments != 0, traj.move_flags == 1)
    assert np.array_equal(np.diff(traj.X), traj.horiz_increments)
    assert traj.visit_index.tolist() == _brute_visits(traj.positions)


def test_visit_indices_match_brute_force():
    rng = derive_stream(SeedSpec(1))
    points = rng.integers(-2, 3, size=(200, 3))
    assert visit_indices(points).tolist() == _brute_visits(points)


@pytest.mark.parametrize("mechanism", [simulate_direct, simulate_constructed])
def test_trajectories_are_nearest_neighbour_paths(mechanism):
    env = IIDLazy(CookieLaw.parse("uniform:-0.5,0.5"), 2, env_seed=8, identical=False)
    traj = mechanism(env, 3, 300, SeedSpec(4))
    assert traj.n == 300
    assert traj.d == 3
    _assert_valid(traj)
    fresh = traj.visit_index[:-1] <= 2
    assert np.all(traj.cookie_used[~fresh] == 0.0)


def test_symmetric_fast_path_is_valid():
    traj = simulate_symmetric(4, 500, SeedSpec(9))
    _assert_valid(traj)
    assert np.all(traj.cookie_used == 0.0)


def test_full_drift_never_steps_left():
    traj = simulate_direct(Deterministic(1.0, math.inf), 2, 400, SeedSpec(2))
    assert np.all(traj.horiz_increments >= 0)
    assert traj.X[-1] == np.count_nonzero(traj.move_flags)


def test_same_seed_same_trajectory():
    env = Deterministic(0.4, 1)
    a = simulate_direct(env, 3, 100, SeedSpec(5, 7))
    b = simulate_direct(env, 3, 100, SeedSpec(5, 7))
    assert np.array_equal(a.positions, b.positions)


def test_first_step_law_matches_for_both_mechanisms():
    env = Deterministic(0.5, 1)
    expected = np.array([0.375, 0.125, 0.25, 0.25]) * FIRST_STEP_SAMPLES
    for simulate in (simulate_direct, simulate_constructed):
        counts = _first_steps(lambda seed: simulate(env, 2, 1, seed))
        assert stats.chisquare(counts, expected).pvalue > 1e-4


def test_discovery_order_first_step_law():
    law = CookieLaw.parse("discrete:0.2,0.6")
    counts = _first_steps(lambda seed: simulate_discovery_order(law, 1, 2, 1, seed))
    # β̄ = 0.4: P(+e1) = 1.4/4
    expected = np.array([0.35, 0.15, 0.25, 0.25]) * FIRST_STEP_SAMPLES
    assert stats.chisquare(counts, expected).pvalue > 1e-4


def test_direct_and_constructed_agree_on_two_step_laws():
    env = Deterministic([0.6, -0.2], 2)
    n, reps = 6, 3000
    direct = [int(simulate_direct(env, 2, n, SeedSpec(3, i)).X[-1]) for i in range(reps)]
    built = [int(simulate_constructed(env, 2, n, SeedSpec(4, i)).X[-1]) for i in range(reps)]
    values = sorted(set(direct) | set(built))
    table = np.array([[direct.count(v) for v in values], [built.count(v) for v in values]])
    table = table[:, table.sum(axis=0) >= 10]
    assert stats.chi2_contingency(table).pvalue > 1e-4


def test_lift_keeps_vertical_path():
    rng = derive_stream(SeedSpec(12))
    vertical = constructed_vertical(5, 200, rng)
    traj = lift_vertical_path(Deterministic(0.3, 1), vertical, rng)
    assert np.array_equal(traj.Z, vertical)
    sym = lift_symmetric(vertical, rng)
    assert np.array_equal(sym.move_flags, traj.move_flags)
    _assert_valid(traj)


def test_prefix_and_rows():
    traj = simulate_direct(Deterministic(0.2, 1), 3, 10, SeedSpec(1))
    head = traj.prefix(4)
    assert head.n == 4
    assert np.array_equal(head.positions, traj.positions[:5])
    rows = traj.rows()
    assert len(rows) == 11
    assert all(len(r) == len(traj.header()) for r in rows)
    assert visit_count_semantics(traj, 0) == 1
    with pytest.raises(ValueError):
        traj.prefix(11)
    with pytest.raises(ValueError):
        visit_count_semantics(traj, 11)


def test_invalid_arguments():
    with pytest.raises(ValueError):
        simulate_direct(Deterministic(0.2), 1, 10, SeedSpec(0))
    with pytest.raises(ValueError):
        simulate_symmetric(3, -1, SeedSpec(0))


def _horizontal_counts(trajs, fresh):
    """[+e1, -e1, dikey] sayıları; fresh True ise taze, False ise tükenmiş sitelerdeki adımlar"""
    counts = np.zeros(3, dtype=np.int64)
    for traj in trajs:
        mask = (traj.visit_index[:-1] <= 1) == fresh
        E = traj.horiz_increments[mask]
        counts += [np.count_nonzero(E == 1), np.count_nonzero(E == -1), np.count_nonzero(E == 0)]
    return counts


def _horizontal_law(beta, d):
    return np.array([(1 + beta) / (2 * d), (1 - beta) / (2 * d), 1 - 1 / d])


def test_constructed_walk_moves_horizontally_with_probability_one_over_d():
    d = 3
    trajs = [simulate_constructed(Deterministic(0.4, 1), d, 5000, SeedSpec(41, i)) for i in range(4)]
    moves = sum(int(t.move_flags.sum()) for t in trajs)
    assert stats.binomtest(moves, 4 * 5000, 1 / d).pvalue > 1e-4
    # koşullu sürüklenme: taze sitede β/d, tükenmiş sitede 0
    for fresh, beta in ((True, 0.4), (False, 0.0)):
        counts = _horizontal_counts(trajs, fresh)
        assert stats.chisquare(counts, _horizontal_law(beta, d) * counts.sum()).pvalue > 1e-4


@pytest.mark.parametrize("mechanism", [simulate_direct, simulate_constructed])
def test_vertical_component_is_lazy_simple_walk(mechanism):
    d = 3
    env = IIDLazy(CookieLaw.parse("uniform:0.2,0.8"), 1, env_seed=6)
    counts = np.zeros(2 * (d - 1) + 1, dtype=np.int64)
    for i in range(3):
        dz = np.diff(mechanism(env, d, 5000, SeedSpec(43, i)).Z, axis=0)
        counts[-1] += np.count_nonzero(np.all(dz == 0, axis=1))
        for axis in range(d - 1):
            counts[2 * axis] += np.count_nonzero(dz[:, axis] == 1)
            counts[2 * axis + 1] += np.count_nonzero(dz[:, axis] == -1)
    # dikey yönlerin her biri 1/2d, bekleme 1/d
    expected = np.array([1 / (2 * d)] * (2 * (d - 1)) + [1 / d]) * counts.sum()
    assert stats.chisquare(counts, expected).pvalue > 1e-4


def test_discovery_order_drift_uses_law_mean():
    d = 3
    law = CookieLaw.parse("discrete:0.2,0.6")
    trajs = [simulate_discovery_order(law, 1, d, 4000, SeedSpec(47, i)) for i in range(5)]
    for fresh, beta in ((True, law.mean()), (False, 0.0)):
        counts = _horizontal_counts(trajs, fresh)
        assert stats.chisquare(counts, _horizontal_law(beta, d) * counts.sum()).pvalue > 1e-4
