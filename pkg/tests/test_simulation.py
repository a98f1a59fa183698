import math
from dataclasses import replace

import numpy as np
import pytest

from wsn_extract.grid import Grid, hop_distance
from wsn_extract.simulation import (
    ConfigError,
    SimConfig,
    run_batch,
    run_simulation,
    sweep,
    with_tracker,
)
from wsn_extract.tracking import MotionParams, TrackerConfig

BASE = SimConfig()


def cfg_for(alg, vp=3, **kw):
    return replace(BASE, params=MotionParams(4, vp), tracker=TrackerConfig(algorithm=alg), **kw)


def test_run_is_deterministic():
    cfg = cfg_for(5, seed=11)
    assert run_simulation(cfg).to_dict() == run_simulation(cfg).to_dict()


def test_stationary_pursuit_takes_ceiling_steps():
    # collinear start: pure pursuit of a fixed target closes 4 segments per step
    cfg = SimConfig(grid=Grid(200, 5), sink_start=(0, 0), target_start=(188, 0),
                    params=MotionParams(4, 0), tracker=TrackerConfig(algorithm=1))
    res = run_simulation(cfg)
    assert res.caught
    assert res.time_to_catch == math.ceil(188 / 4) == 47


@pytest.mark.slow
def test_default_scenario_alg1_vp2_band():
    stats = run_batch(cfg_for(1, vp=2), 100)
    assert 25 <= stats.mean["time_to_catch"] <= 45


def test_invalid_config_lists_every_problem():
    bad = SimConfig(grid=Grid(10, 10), sink_start=(20, 20), target_start=(20, 20),
                    params=MotionParams(8, 6), max_steps=0)
    with pytest.raises(ConfigError) as e:
        run_simulation(bad)
    assert len(e.value.problems) >= 4


def test_batch_of_one_has_zero_sd():
    cfg = cfg_for(5)
    stats = run_batch(cfg, 1, base_seed=4)
    single = run_simulation(replace(cfg, seed=4))
    assert stats.n == 1
    assert stats.mean["time_to_catch"] == single.time_to_catch
    assert stats.mean["hop_count"] == single.ledger["hop_count"]
    assert all(v == 0.0 for v in stats.sd.values())


def test_batch_determinism():
    cfg = cfg_for(5)
    assert run_batch(cfg, 10, base_seed=3) == run_batch(cfg, 10, base_seed=3)


def test_batch_rejects_zero():
    with pytest.raises(ValueError):
        run_batch(BASE, 0)


@pytest.mark.parametrize("alg", [1, 2, 3, 4, 5])
def test_run_invariants(alg):
    soundness = []
    res = run_simulation(cfg_for(alg, seed=alg), observer=lambda st: soundness.append(st.target in st.region))
    assert all(soundness)
    assert len(res.sink_trajectory) == len(res.target_trajectory) == res.steps + 1
    vp = 3
    for a, b in zip(res.target_trajectory, res.target_trajectory[1:]):
        dx, dy = abs(a[0] - b[0]), abs(a[1] - b[1])
        assert sorted((dx, dy)) == [0, vp]
        assert BASE.grid.contains(b)
    assert res.ledger["active_time"] == sum(res.activations)
    # cumulative snapshots are monotone and end at the final ledger
    for k in res.cumulative[0]:
        seq = [c[k] for c in res.cumulative]
        assert seq == sorted(seq)
        assert seq[-1] == res.ledger[k]
    if alg == 1:
        assert res.ledger["deliveries_to_sink"] == res.time_to_catch


@pytest.mark.parametrize("alg", [1, 3, 4, 5])
def test_termination_bound(alg):
    cfg = cfg_for(alg)
    d = hop_distance(cfg.sink_start, cfg.target_start)
    bound = 10 * d / (cfg.params.v - cfg.params.vp)
    for seed in range(5):
        res = run_simulation(replace(cfg, seed=seed))
        assert res.caught and res.time_to_catch <= bound


def test_same_seed_same_target_trajectory_across_algorithms():
    a = run_simulation(cfg_for(1, seed=9))
    b = run_simulation(cfg_for(5, seed=9))
    n = min(len(a.target_trajectory), len(b.target_trajectory))
    assert a.target_trajectory[:n] == b.target_trajectory[:n]


def test_sweep_single_cell_equals_batch():
    cfg = cfg_for(5)
    ((key, stats),) = sweep(cfg, [0.2], [1.5], [1.0], n=3, base_seed=5)
    assert key == (0.2, 1.5, 1.0)
    assert stats == run_batch(with_tracker(cfg, alpha=0.2, beta=1.5, gamma=1.0), 3, 5)


def test_sweep_empty_axis():
    with pytest.raises(ConfigError):
        sweep(BASE, [], [2.0], [1.3], n=1)


def test_sweep_shape():
    rows = sweep(replace(cfg_for(5), grid=Grid(40, 40), sink_start=(30, 30), target_start=(10, 10)),
                 [0.1, 0.2], [1.0, 2.0], [1.3], n=2)
    assert [k for k, _ in rows] == [(0.1, 1.0, 1.3), (0.1, 2.0, 1.3), (0.2, 1.0, 1.3), (0.2, 2.0, 1.3)]


def test_not_caught_excluded_from_catch_mean():
    cfg = replace(cfg_for(2), max_steps=3)
    stats = run_batch(cfg, 2)
    assert stats.not_caught == 2
    assert np.isnan(stats.mean["time_to_catch"])
