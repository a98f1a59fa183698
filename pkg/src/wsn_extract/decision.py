"""Control decisions over interval forecasts and uncertainty-driven sensor selection."""
from __future__ import annotations

from collections.abc import Hashable, Mapping, Sequence
from dataclasses import dataclass
from itertools import combinations
from typing import Any

import numpy as np

from .granules import Interval, PreconditionError, prob_leq_array

Forecast = Sequence[Interval]


class ContractError(ValueError):
    """Raised when a hypothesis family is internally inconsistent."""


@dataclass(frozen=True)
class Decision:
    action: int
    uncertainty: float


class OneHotSignature(Mapping):
    """Sensor readings where exactly one sensor of ``domain`` reads 1.

    Stands in for a dense ``{sensor: reading}`` dict without materialising it,
    which matters when a family has thousands of members over the same domain.
    """

    __slots__ = ("domain", "sensor")

    def __init__(self, domain: frozenset, sensor: Hashable):
        if sensor not in domain:
            raise ContractError(f"sensor {sensor!r} not in signature domain")
        self.domain = domain
        self.sensor = sensor

    def __getitem__(self, key):
        if key not in self.domain:
            raise KeyError(key)
        return 1 if key == self.sensor else 0

    def __iter__(self):
        return iter(self.domain)

    def __len__(self):
        return len(self.domain)

    def __repr__(self):
        return f"OneHotSignature(sensor={self.sensor!r}, |domain|={len(self.domain)})"


@dataclass(frozen=True)
class Hypothesis:
    """One possible full-data outcome: readings, the forecast they induce and its decision."""

    signature: Mapping[Hashable, Any]
    forecast: Forecast
    decision: Decision
    weight: float = 1.0

    def __post_init__(self):
        if not self.weight > 0:
            raise PreconditionError("hypothesis weight must be positive")


def select_actions_array(lo: np.ndarray, hi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Batch form of :func:`select_action`.

    ``lo`` and ``hi`` have shape ``(n, k)``: n forecasts over k actions.
    Returns the chosen action indices and decision uncertainties, each ``(n,)``.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    n, k = lo.shape
    if k == 0:
        raise PreconditionError("empty action set")
    if k == 1:
        return np.zeros(n, dtype=int), np.zeros(n)
    p = prob_leq_array(lo[:, :, None], hi[:, :, None], lo[:, None, :], hi[:, None, :])
    idx = np.arange(k)
    p[:, idx, idx] = np.inf
    worst = p.min(axis=2)
    actions = worst.argmax(axis=1)  # first maximum -> smallest index on ties
    best = worst[np.arange(n), actions]
    return actions, 2.0 * (1.0 - best)


def select_action(forecast: Forecast) -> Decision:
    """Pick the action whose worst pairwise ``P(F(a) <= F(b))`` is largest.

    The decision uncertainty is the largest pairwise comparison uncertainty of
    the chosen action against its rivals (0 for a single action).
    """
    if len(forecast) == 0:
        raise PreconditionError("empty action set")
    lo = np.array([[iv.lo for iv in forecast]])
    hi = np.array([[iv.hi for iv in forecast]])
    actions, unc = select_actions_array(lo, hi)
    return Decision(int(actions[0]), float(unc[0]))


def mean_hypothesis_uncertainty(hyps: Sequence[Hypothesis]) -> float:
    if not hyps:
        raise PreconditionError("hypothesis family is empty")
    w = np.array([h.weight for h in hyps], dtype=float)
    u = np.array([h.decision.uncertainty for h in hyps], dtype=float)
    return float(np.dot(w, u) / w.sum())


def expected_unc_decrease(baseline: Decision, hyps: Sequence[Hypothesis]) -> float:
    """Baseline decision uncertainty minus the mean uncertainty over ``hyps``."""
    return baseline.uncertainty - mean_hypothesis_uncertainty(hyps)


def _check_domains(hyps: Sequence[Hypothesis]) -> frozenset:
    if not hyps:
        raise PreconditionError("hypothesis family is empty")
    domain = frozenset(hyps[0].signature)
    for h in hyps[1:]:
        sig = h.signature
        if isinstance(sig, OneHotSignature) and sig.domain is domain:
            continue
        if frozenset(sig) != domain:
            raise ContractError("hypothesis signatures have different sensor domains")
    return domain


def select_sensors_exhaustive(hyps: Sequence[Hypothesis]) -> set:
    """Every sensor that reads non-zero in at least one hypothesis."""
    _check_domains(hyps)
    if all(isinstance(h.signature, OneHotSignature) for h in hyps):
        return {h.signature.sensor for h in hyps}
    return {s for h in hyps for s, y in h.signature.items() if y != 0}


def greedy_one_hot_cover(sensors: Sequence, decisions: Sequence[int]) -> set:
    """Greedy distinguishing set for a family of one-hot, pairwise distinct hypotheses.

    Hypothesis j reads 1 only at ``sensors[j]``. A pair with different decisions
    is told apart exactly by its two sensors, so the pair cover is a vertex
    cover of a complete multipartite graph. The uncovered degree of an
    unselected sensor in decision group g is ``U - U_g`` (unselected counts),
    which lets the greedy run in linear time with the generic tie-break.
    """
    if len(set(sensors)) != len(sensors):
        raise ContractError("one-hot hypotheses must have distinct sensors")
    groups: dict[int, list] = {}
    for s, d in zip(sensors, decisions):
        groups.setdefault(int(d), []).append(s)
    for members in groups.values():
        members.sort(reverse=True)  # pop() yields the smallest id
    remaining = {g: len(m) for g, m in groups.items()}
    total = len(sensors)
    chosen = set()
    while True:
        live = [g for g in groups if remaining[g] > 0]
        if len(live) < 2:
            return chosen
        best_deg = max(total - remaining[g] for g in live)
        candidates = [g for g in live if total - remaining[g] == best_deg]
        g = min(candidates, key=lambda g: groups[g][-1])
        chosen.add(groups[g].pop())
        remaining[g] -= 1
        total -= 1


def _one_hot_family(hyps: Sequence[Hypothesis]) -> bool:
    if not all(isinstance(h.signature, OneHotSignature) for h in hyps):
        return False
    return len({h.signature.sensor for h in hyps}) == len(hyps)


def select_sensors_minimum(hyps: Sequence[Hypothesis]) -> set:
    """Greedy set cover of all hypothesis pairs that lead to different decisions.

    Ties go to the smallest sensor id, so the result is deterministic. Raises
    :class:`ContractError` when two hypotheses with different decisions cannot
    be told apart by any sensor.
    """
    domain = _check_domains(hyps)
    if _one_hot_family(hyps):
        return greedy_one_hot_cover(
            [h.signature.sensor for h in hyps], [h.decision.action for h in hyps]
        )
    sensors = sorted(domain)
    pairs = [
        (j, k)
        for j, k in combinations(range(len(hyps)), 2)
        if hyps[j].decision.action != hyps[k].decision.action
    ]
    covers = {
        s: {
            p
            for p in pairs
            if hyps[p[0]].signature[s] != hyps[p[1]].signature[s]
        }
        for s in sensors
    }
    uncovered = set(pairs)
    chosen: set = set()
    while uncovered:
        best, gain = None, 0
        for s in sensors:
            if s in chosen:
                continue
            g = len(covers[s] & uncovered)
            if g > gain:
                best, gain = s, g
        if best is None:
            raise ContractError("hypotheses with different decisions share identical readings")
        chosen.add(best)
        uncovered -= covers[best]
    return chosen


def distinguishes(hyps: Sequence[Hypothesis], sensors: set, only_differing: bool = True) -> bool:
    """Direct pair scan: does ``sensors`` tell apart every (decision-differing) pair?"""
    for a, b in combinations(hyps, 2):
        if only_differing and a.decision.action == b.decision.action:
            continue
        if not any(a.signature[s] != b.signature[s] for s in sensors):
            return False
    return True
