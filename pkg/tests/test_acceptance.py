"""Acceptance criteria, each at its stated tolerance.

Run with ``pytest tests/test_acceptance.py -v``; a PASS/FAIL line per
criterion is printed in the terminal summary. The simulation matrix takes a
few minutes on one core.
"""
import time
from dataclasses import replace

import numpy as np
import pytest

from wsn_extract.example import run_example
from wsn_extract.granules import prob_leq
from wsn_extract.simulation import METRICS, SimConfig, run_batch, run_simulation, summarize, with_tracker
from wsn_extract.tracking import MotionParams, TrackerConfig

pytestmark = pytest.mark.slow

# published hypothesis table: (readings, F(1), F(2), chosen action, UNC)
PUBLISHED_ROWS = [
    ((1, 0, 0, 0, 1, 0, 0, 0), (1, 4), (3, 8), 1, 0.07),
    ((0, 1, 0, 0, 1, 0, 0, 0), (2, 6), (3, 8), 1, 0.45),
    ((0, 0, 1, 0, 1, 0, 0, 0), (3, 8), (3, 8), 1, 1.00),
    ((0, 0, 0, 1, 1, 0, 0, 0), (4, 10), (3, 8), 2, 0.53),
    ((1, 0, 0, 0, 0, 1, 0, 0), (1, 4), (4, 10), 1, 0.00),
    ((0, 1, 0, 0, 0, 1, 0, 0), (2, 6), (4, 10), 1, 0.17),
    ((0, 0, 1, 0, 0, 1, 0, 0), (3, 8), (4, 10), 1, 0.53),
    ((0, 0, 0, 1, 0, 1, 0, 0), (4, 10), (4, 10), 1, 1.00),
    ((1, 0, 0, 0, 0, 0, 1, 0), (1, 4), (5, 12), 1, 0.00),
    ((0, 1, 0, 0, 0, 0, 1, 0), (2, 6), (5, 12), 1, 0.04),
    ((0, 0, 1, 0, 0, 0, 1, 0), (3, 8), (5, 12), 1, 0.26),
    ((0, 0, 0, 1, 0, 0, 1, 0), (4, 10), (5, 12), 1, 0.60),
    ((1, 0, 0, 0, 0, 0, 0, 1), (1, 4), (6, 14), 1, 0.00),
    ((0, 1, 0, 0, 0, 0, 0, 1), (2, 6), (6, 14), 1, 0.00),
    ((0, 0, 1, 0, 0, 0, 0, 1), (3, 8), (6, 14), 1, 0.10),
    ((0, 0, 0, 1, 0, 0, 0, 1), (4, 10), (6, 14), 1, 0.33),
]

RUNS = 100
VELOCITIES = (1, 2, 3)
ALGORITHMS = (1, 2, 3, 4, 5)


def cell_config(alg: int, vp: int) -> SimConfig:
    return replace(SimConfig(), params=MotionParams(4, vp),
                   tracker=TrackerConfig(algorithm=alg, alpha=0.15, beta=2.0, gamma=1.3))


@pytest.fixture(scope="module")
def matrix():
    """All 5 algorithms x vp 1..3 x 100 seeds, with per-step soundness recorded."""
    cells = {}
    for vp in VELOCITIES:
        for alg in ALGORITHMS:
            violations = []

            def watch(st, violations=violations):
                if st.target not in st.region:
                    violations.append((st.step, st.target))

            cfg = cell_config(alg, vp)
            results = [run_simulation(replace(cfg, seed=s), watch) for s in range(RUNS)]
            cells[(alg, vp)] = {"results": results, "stats": summarize(results), "violations": violations}
    return cells


def mean(matrix, alg, vp, metric):
    return matrix[(alg, vp)]["stats"].mean[metric]


# -- 1 and 2: worked example -------------------------------------------------


def test_criterion_1_table_rows():
    t0 = time.perf_counter()
    res = run_example()
    assert len(res.rows) == len(PUBLISHED_ROWS) == 16
    for row, (readings, f1, f2, action, unc) in zip(res.rows, PUBLISHED_ROWS):
        h = row.hypothesis
        assert tuple(row.readings) == readings
        assert (h.forecast[0].lo, h.forecast[0].hi) == f1
        assert (h.forecast[1].lo, h.forecast[1].hi) == f2
        assert h.decision.action + 1 == action
        assert abs(h.decision.uncertainty - unc) <= 0.005
    assert time.perf_counter() - t0 < 1.0


def test_criterion_2_scalars():
    res = run_example()
    assert abs(res.prob - 0.7525) <= 0.005
    assert abs(res.prob - 0.755) <= 0.005
    assert abs(res.baseline.uncertainty - 0.49) <= 0.01
    assert abs(res.mean_unc - 0.32) <= 0.01
    assert abs(res.delta_unc - 0.17) <= 0.015
    assert res.exhaustive == set(range(1, 9))
    assert res.minimum == {4, 5}


# -- 3: closed form against Monte Carlo --------------------------------------


def random_pairs(rng, n):
    lo = rng.uniform(-50, 50, size=(n, 2))
    w = rng.uniform(0.1, 40, size=(n, 2))
    return lo, lo + w


def test_criterion_3_monte_carlo_oracle():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    lo, hi = random_pairs(rng, 1000)
    draws = 10**7
    # common random numbers: one pair of uniform streams reused for every pair
    u = rng.random(draws, dtype=np.float32)
    v = rng.random(draws, dtype=np.float32)
    x, y = np.empty(draws, np.float32), np.empty(draws, np.float32)
    worst = 0.0
    for k in range(len(lo)):
        wa, wb = hi[k] - lo[k]
        np.multiply(u, np.float32(wa), out=x)
        np.multiply(v, np.float32(wb), out=y)
        np.subtract(x, y, out=x)
        est = np.count_nonzero(x <= np.float32(lo[k, 1] - lo[k, 0])) / draws
        exact = prob_leq((lo[k, 0], hi[k, 0]), (lo[k, 1], hi[k, 1]))
        worst = max(worst, abs(est - exact))
    print(f"max |closed form - MC| over 1000 pairs: {worst:.5f}")
    assert worst <= 0.002
    assert time.perf_counter() - t0 < 60


def test_criterion_3_property_suites():
    rng = np.random.default_rng(7)
    n = 10_000
    lo, hi = random_pairs(rng, n)
    shifts = rng.uniform(-100, 100, n)
    scales = rng.uniform(0.05, 20, n)
    for k in range(n):
        a, b = (lo[k, 0], hi[k, 0]), (lo[k, 1], hi[k, 1])
        p = prob_leq(a, b)
        assert abs(p + prob_leq(b, a) - 1) <= 1e-9
        c, s = shifts[k], scales[k]
        assert abs(prob_leq((a[0] + c, a[1] + c), (b[0] + c, b[1] + c)) - p) <= 1e-9
        assert abs(prob_leq((a[0] * s, a[1] * s), (b[0] * s, b[1] * s)) - p) <= 1e-9


# -- 4: relative behaviour of the five controllers ---------------------------


def test_criterion_4a_alg5_hop_reduction(matrix):
    ratio = mean(matrix, 5, 3, "hop_count") / mean(matrix, 1, 3, "hop_count")
    print(f"hop ratio Alg5/Alg1 at vp=3: {ratio:.3f}")
    assert ratio <= 0.40


def test_criterion_4b_alg5_catch_time(matrix):
    ratio = mean(matrix, 5, 3, "time_to_catch") / mean(matrix, 1, 3, "time_to_catch")
    print(f"time-to-catch ratio Alg5/Alg1 at vp=3: {ratio:.3f}")
    assert ratio <= 1.25


def test_criterion_4c_alg2_slowest(matrix):
    for vp in VELOCITIES:
        t2 = mean(matrix, 2, vp, "time_to_catch")
        for alg in (1, 3, 4, 5):
            assert t2 > mean(matrix, alg, vp, "time_to_catch"), (vp, alg)


def test_criterion_4d_alg1_most_deliveries(matrix):
    for vp in VELOCITIES:
        d1 = mean(matrix, 1, vp, "deliveries_to_sink")
        for alg in (2, 3, 4, 5):
            assert d1 > mean(matrix, alg, vp, "deliveries_to_sink"), (vp, alg)


def test_criterion_4e_alg1_least_active_time(matrix):
    a1 = mean(matrix, 1, 3, "active_time")
    for alg in (2, 3, 4, 5):
        assert a1 <= mean(matrix, alg, 3, "active_time"), alg


def test_matrix_all_runs_caught(matrix):
    for (alg, vp), cell in sorted(matrix.items(), key=lambda kv: (kv[0][1], kv[0][0])):
        st = cell["stats"]
        print(f"vp={vp} alg={alg} " + " ".join(f"{m}={st.mean[m]:.1f}" for m in METRICS)
              + f" not_caught={st.not_caught}")
        assert st.not_caught == 0


# -- 5: parameter sweeps -----------------------------------------------------


def test_criterion_5_gamma_interior_minimum():
    gammas = [round(0.5 + 0.1 * k, 1) for k in range(26)]
    base = cell_config(5, 3)
    times = [run_batch(with_tracker(base, gamma=g), 50).mean["time_to_catch"] for g in gammas]
    best = gammas[int(np.argmin(times))]
    print("gamma sweep: " + ", ".join(f"{g}:{t:.2f}" for g, t in zip(gammas, times)))
    assert gammas[0] < best < gammas[-1]
    assert 0.8 <= best <= 2.0


def test_criterion_5_alpha_monotone():
    base = cell_config(5, 3)
    deliveries = [run_batch(with_tracker(base, alpha=a), RUNS).mean["deliveries_to_sink"]
                  for a in (0.05, 0.15, 0.30)]
    print(f"deliveries over alpha 0.05/0.15/0.30: {deliveries}")
    assert deliveries[0] >= deliveries[1] >= deliveries[2]


# -- 6: invariants -----------------------------------------------------------


def test_criterion_6_region_soundness(matrix):
    bad = {k: c["violations"][:3] for k, c in matrix.items() if c["violations"]}
    assert not bad


def test_criterion_6_alg1_deliveries_identity(matrix):
    for vp in VELOCITIES:
        for r in matrix[(1, vp)]["results"]:
            assert r.ledger["deliveries_to_sink"] == r.time_to_catch


def test_criterion_6_batch_determinism(matrix):
    cfg = cell_config(5, 3)
    again = run_batch(cfg, RUNS, base_seed=0)
    assert again == matrix[(5, 3)]["stats"]
    assert run_batch(cfg, 10, base_seed=123) == run_batch(cfg, 10, base_seed=123)
