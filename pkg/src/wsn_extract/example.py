"""Predator choosing between two prey: a single-decision worked example.

Eight sensors each cover a 10 m distance band: sensors 1-4 watch the first
prey at 10-50 m, sensors 5-8 the second at 30-70 m. The predator runs at
30 m/s, the prey at 20-25 m/s.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .decision import (
    Decision,
    Hypothesis,
    expected_unc_decrease,
    mean_hypothesis_uncertainty,
    select_action,
    select_sensors_exhaustive,
    select_sensors_minimum,
)
from .granules import Interval, prob_leq

PREDATOR_SPEED = 30.0
PREY_SPEED = Interval(20.0, 25.0)
SEGMENT = 10.0
PREY1_RANGE = Interval(10.0, 50.0)
PREY2_RANGE = Interval(30.0, 70.0)
ALPHA = 0.1

# (readings, F(1), F(2), chosen action, UNC) as published, row order kept
HYPOTHESIS_TABLE = [
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
PUBLISHED = {
    "prob": 0.755,
    "baseline_unc": 0.49,
    "mean_unc": 0.32,
    "delta_unc": 0.17,
    "exhaustive": {1, 2, 3, 4, 5, 6, 7, 8},
    "minimum": {4, 5},
}


def time_to_catch(distance: Interval, predator: float = PREDATOR_SPEED,
                  prey: Interval = PREY_SPEED) -> Interval:
    """Catch-time interval: distance over the closing-speed interval."""
    slow, fast = predator - prey.hi, predator - prey.lo
    return Interval(distance.lo / fast, distance.hi / slow)


def _bands(rng: Interval) -> list[Interval]:
    n = round(rng.width / SEGMENT)
    return [Interval(rng.lo + i * SEGMENT, rng.lo + (i + 1) * SEGMENT) for i in range(n)]


@dataclass
class ExampleRow:
    readings: tuple[int, ...]
    granule: tuple[Interval, Interval]
    hypothesis: Hypothesis


@dataclass
class ExampleResult:
    baseline_forecast: list[Interval]
    prob: float
    baseline: Decision
    rows: list[ExampleRow]
    mean_unc: float
    delta_unc: float
    exhaustive: set[int]
    minimum: set[int]
    triggered: bool = field(default=False)


def build_hypotheses() -> list[ExampleRow]:
    bands1, bands2 = _bands(PREY1_RANGE), _bands(PREY2_RANGE)
    n1 = len(bands1)
    rows = []
    for j, d2 in enumerate(bands2):
        for i, d1 in enumerate(bands1):
            readings = [0] * (n1 + len(bands2))
            readings[i] = 1
            readings[n1 + j] = 1
            forecast = [time_to_catch(d1), time_to_catch(d2)]
            hyp = Hypothesis(
                signature={s + 1: y for s, y in enumerate(readings)},
                forecast=forecast,
                decision=select_action(forecast),
            )
            rows.append(ExampleRow(tuple(readings), (d1, d2), hyp))
    return rows


def run_example() -> ExampleResult:
    forecast = [time_to_catch(PREY1_RANGE), time_to_catch(PREY2_RANGE)]
    baseline = select_action(forecast)
    rows = build_hypotheses()
    hyps = [r.hypothesis for r in rows]
    delta = expected_unc_decrease(baseline, hyps)
    return ExampleResult(
        baseline_forecast=forecast,
        prob=prob_leq(forecast[0], forecast[1]),
        baseline=baseline,
        rows=rows,
        mean_unc=mean_hypothesis_uncertainty(hyps),
        delta_unc=delta,
        exhaustive=select_sensors_exhaustive(hyps),
        minimum=select_sensors_minimum(hyps),
        triggered=delta > ALPHA,
    )


def check_against_published(res: ExampleResult) -> list[str]:
    """Return human-readable mismatches against the published numbers (empty if none)."""
    errs = []
    for k, (row, exp) in enumerate(zip(res.rows, HYPOTHESIS_TABLE), start=1):
        readings, f1, f2, act, unc = exp
        h = row.hypothesis
        got_f = [(iv.lo, iv.hi) for iv in h.forecast]
        if row.readings != readings:
            errs.append(f"row {k}: readings {row.readings} != {readings}")
        if got_f != [f1, f2]:
            errs.append(f"row {k}: forecast {got_f} != {[f1, f2]}")
        if h.decision.action + 1 != act:
            errs.append(f"row {k}: action {h.decision.action + 1} != {act}")
        if abs(h.decision.uncertainty - unc) > 0.005:
            errs.append(f"row {k}: UNC {h.decision.uncertainty:.4f} != {unc:.2f} +/- 0.005")
    if len(res.rows) != len(HYPOTHESIS_TABLE):
        errs.append(f"{len(res.rows)} rows, expected {len(HYPOTHESIS_TABLE)}")
    checks = [
        ("P[F1 <= F2]", res.prob, PUBLISHED["prob"], 0.005),
        ("UNC(1, S0)", res.baseline.uncertainty, PUBLISHED["baseline_unc"], 0.01),
        ("mean UNC", res.mean_unc, PUBLISHED["mean_unc"], 0.01),
        ("dUNC", res.delta_unc, PUBLISHED["delta_unc"], 0.015),
    ]
    for name, got, exp, tol in checks:
        if abs(got - exp) > tol:
            errs.append(f"{name}: {got:.4f} != {exp} +/- {tol}")
    if res.baseline.action != 0:
        errs.append(f"baseline action {res.baseline.action + 1} != 1")
    if res.exhaustive != PUBLISHED["exhaustive"]:
        errs.append(f"exhaustive {sorted(res.exhaustive)} != {sorted(PUBLISHED['exhaustive'])}")
    if res.minimum != PUBLISHED["minimum"]:
        errs.append(f"minimum {sorted(res.minimum)} != {sorted(PUBLISHED['minimum'])}")
    return errs
