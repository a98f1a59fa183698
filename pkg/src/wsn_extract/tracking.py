"""Mobile-sink target tracking: belief regions, catch-time forecasts and the five controllers.

Grid convention: ``x`` is the column, ``y`` the row; north is ``+y``.
Region masks are indexed ``mask[x, y]``.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .decision import (
    Decision,
    Hypothesis,
    OneHotSignature,
    expected_unc_decrease,
    greedy_one_hot_cover,
    select_action,
    select_actions_array,
)
from .granules import Interval, PreconditionError
from .grid import (
    Grid,
    MessageAccounting,
    MetricsLedger,
    Segment,
    hop_distance,
    query_sensors,
    report_to_beacon,
    report_to_sink,
    request_from_beacon,
)

log = logging.getLogger(__name__)

DIRECTIONS: tuple[tuple[str, tuple[int, int]], ...] = (
    ("N", (0, 1)),
    ("S", (0, -1)),
    ("E", (1, 0)),
    ("W", (-1, 0)),
)
_DIR_VEC = np.array([d for _, d in DIRECTIONS])


@dataclass(frozen=True)
class MotionParams:
    """Sink speed ``v`` and target speed ``vp`` in segments per step.

    ``vp == 0`` is accepted as a stationary-target stub for testing.
    """

    v: int = 4
    vp: int = 1

    def __post_init__(self):
        if not (self.v > self.vp >= 0):
            raise PreconditionError(f"need v > vp >= 0, got v={self.v}, vp={self.vp}")

    def check_grid(self, grid: Grid) -> None:
        if not (grid.width > 2 * self.vp and grid.height > 2 * self.vp):
            raise PreconditionError("grid must be wider and taller than 2*vp")


@dataclass(frozen=True)
class TrackerConfig:
    algorithm: int = 5
    alpha: float = 0.15
    beta: float = 2.0
    gamma: float = 1.3
    strategy: str | None = None

    def __post_init__(self):
        if self.algorithm not in (1, 2, 3, 4, 5):
            raise PreconditionError(f"algorithm must be 1..5, got {self.algorithm}")
        expected = "minimum" if self.algorithm == 4 else "exhaustive"
        if self.strategy is None:
            object.__setattr__(self, "strategy", expected)
        elif self.strategy != expected:
            raise PreconditionError(
                f"algorithm {self.algorithm} uses the {expected} strategy, not {self.strategy}"
            )
        if not 0.0 <= self.alpha <= 1.0:
            raise PreconditionError(f"alpha must lie in [0, 1], got {self.alpha}")
        if not self.beta >= 0.0:
            raise PreconditionError(f"beta must be >= 0, got {self.beta}")
        if not self.gamma > 0.0:
            raise PreconditionError(f"gamma must be > 0, got {self.gamma}")


class BeliefRegion:
    """Crisp set of segments that may hold the target, backed by a boolean grid mask."""

    __slots__ = ("mask", "anchor_known", "_cells")

    def __init__(self, mask: np.ndarray, anchor_known: bool = False):
        mask = np.asarray(mask, dtype=bool)
        if not mask.any():
            raise PreconditionError("belief region must be non-empty")
        mask.flags.writeable = False
        self.mask = mask
        self.anchor_known = anchor_known
        self._cells = None

    @classmethod
    def from_cells(cls, cells, grid: Grid, anchor_known: bool = False) -> BeliefRegion:
        mask = np.zeros((grid.width, grid.height), dtype=bool)
        for c in cells:
            grid.require(c)
            mask[c] = True
        return cls(mask, anchor_known)

    @classmethod
    def singleton(cls, cell: Segment, grid: Grid) -> BeliefRegion:
        return cls.from_cells([cell], grid, anchor_known=True)

    @property
    def cells(self) -> frozenset[Segment]:
        if self._cells is None:
            xs, ys = np.nonzero(self.mask)
            self._cells = frozenset(zip(xs.tolist(), ys.tolist()))
        return self._cells

    def coords(self) -> np.ndarray:
        """Cell coordinates as an ``(n, 2)`` array in ``(x, y)`` lexicographic order."""
        return np.argwhere(self.mask)

    @property
    def size(self) -> int:
        return int(self.mask.sum())

    def __len__(self):
        return self.size

    def __contains__(self, s: Segment) -> bool:
        x, y = s
        w, h = self.mask.shape
        return 0 <= x < w and 0 <= y < h and bool(self.mask[x, y])

    def __eq__(self, other):
        if not isinstance(other, BeliefRegion):
            return NotImplemented
        return self.anchor_known == other.anchor_known and np.array_equal(self.mask, other.mask)

    def __repr__(self):
        return f"BeliefRegion(size={self.size}, anchor_known={self.anchor_known})"


def _dilate(mask: np.ndarray, vp: int) -> np.ndarray:
    if vp == 0:
        return mask.copy()
    out = np.zeros_like(mask)
    out[vp:, :] |= mask[:-vp, :]
    out[:-vp, :] |= mask[vp:, :]
    out[:, vp:] |= mask[:, :-vp]
    out[:, :-vp] |= mask[:, vp:]
    return out


def propagate_region(r: BeliefRegion, params: MotionParams, grid: Grid) -> BeliefRegion:
    """One step of the four-moves motion model, restricted to the grid."""
    return BeliefRegion(_dilate(r.mask, params.vp), anchor_known=False)


def shrink_region(r: BeliefRegion, detected, probed) -> BeliefRegion:
    detected = set(detected)
    probed = set(probed)
    if len(detected) > 1 or not detected <= probed:
        raise PreconditionError("detections must be a subset of probed cells, at most one")
    if detected:
        (cell,) = detected
        mask = np.zeros_like(r.mask)
        mask[cell] = True
        return BeliefRegion(mask, anchor_known=True)
    if not probed:
        return r
    mask = r.mask.copy()
    for c in probed:
        if c in r:
            mask[c] = False
    if not mask.any():
        log.warning("negative information would empty the belief region; keeping it unchanged")
        return r
    return BeliefRegion(mask, anchor_known=False)


@dataclass(frozen=True)
class DirectionForecast:
    """Predicted catch-time interval per movement direction (order N, S, E, W)."""

    intervals: tuple[Interval, Interval, Interval, Interval]
    dist: Interval
    horizon: int

    @property
    def dist_mid(self) -> float:
        return self.dist.mid

    def by_name(self) -> dict[str, Interval]:
        return {name: iv for (name, _), iv in zip(DIRECTIONS, self.intervals)}


def horizon(dist_mid: float, gamma: float) -> int:
    return max(1, math.floor(gamma * math.sqrt(dist_mid)))


def _probe_points(sink: Segment, h, v: int, grid: Grid) -> tuple[np.ndarray, np.ndarray]:
    """Sink positions after ``h`` steps in each direction, clamped; shapes ``(..., 4)``."""
    h = np.asarray(h)[..., None]
    px = np.clip(sink[0] + h * v * _DIR_VEC[:, 0], 0, grid.width - 1)
    py = np.clip(sink[1] + h * v * _DIR_VEC[:, 1], 0, grid.height - 1)
    return px, py


def forecast_directions(sink: Segment, r: BeliefRegion, cfg: TrackerConfig,
                        params: MotionParams, grid: Grid) -> DirectionForecast:
    """Catch-time forecast for the four moves, from an arbitrary belief region."""
    cells = r.coords()
    d = np.abs(cells[:, 0] - sink[0]) + np.abs(cells[:, 1] - sink[1])
    dist = Interval(float(d.min()), float(d.max()))
    h = horizon(dist.mid, cfg.gamma)
    reach = r.mask
    for _ in range(h):
        reach = _dilate(reach, params.vp)
    rc = np.argwhere(reach)
    px, py = _probe_points(sink, h, params.v, grid)
    dd = np.abs(rc[:, 0:1] - px) + np.abs(rc[:, 1:2] - py)
    close = params.v - params.vp
    lo = h + dd.min(axis=0) / close
    hi = h + dd.max(axis=0) / close
    return DirectionForecast(
        intervals=tuple(Interval(float(a), float(b)) for a, b in zip(lo, hi)),
        dist=dist,
        horizon=h,
    )


def _lattice_extent(cx, cy, px, py, h, vp: int, grid: Grid):
    """Min and max hop distance from ``(px, py)`` to everything reachable from ``(cx, cy)``
    in exactly ``h`` in-grid moves of length ``vp``.

    The reachable set is ``{c + vp*(i, j) : |i|+|j| <= h, |i|+|j| = h (mod 2)}``
    intersected with the grid; both extremes are found without enumerating it.
    All arguments broadcast; returns two integer arrays.
    """
    cx, cy, px, py, h = np.broadcast_arrays(*(np.asarray(a, dtype=np.int64) for a in (cx, cy, px, py, h)))
    if vp == 0:
        d = np.abs(px - cx) + np.abs(py - cy)
        return d, d.copy()
    ilo, ihi = -(cx // vp), (grid.width - 1 - cx) // vp
    jlo, jhi = -(cy // vp), (grid.height - 1 - cy) // vp

    dmax = None
    for s1 in (1, -1):
        b1 = ihi if s1 > 0 else -ilo
        for s2 in (1, -1):
            b2 = jhi if s2 > 0 else -jlo
            b = b1 + b2
            m = np.where(b <= h, np.where((h - b) % 2 == 0, b, b - 1), h)
            val = s1 * (cx - px) + s2 * (cy - py) + vp * m
            dmax = val if dmax is None else np.maximum(dmax, val)

    ux, uy = px - cx, py - cy
    hmax = int(h.max()) if h.size else 0
    dmin = np.full(h.shape, np.iinfo(np.int64).max)
    for i in range(-hmax, hmax + 1):
        r = h - abs(i)
        ok = (r >= 0) & (ilo <= i) & (i <= ihi)
        low = np.maximum(-r, jlo)
        low = low + ((low - r) % 2)
        high = np.minimum(r, jhi)
        high = high - ((high - r) % 2)
        ok &= low <= high
        # nearest admissible j to uy/vp: bracket with step-2 lattice points
        base = low + 2 * np.floor_divide(uy - vp * low, 2 * vp)
        j1 = np.clip(base, low, high)
        j2 = np.clip(base + 2, low, high)
        cost_j = np.minimum(np.abs(vp * j1 - uy), np.abs(vp * j2 - uy))
        cost = np.abs(vp * i - ux) + cost_j
        dmin = np.where(ok, np.minimum(dmin, cost), dmin)
    return dmin, dmax


def singleton_forecasts(sink: Segment, cells: np.ndarray, cfg: TrackerConfig,
                        params: MotionParams, grid: Grid) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Catch-time bounds for every single-cell hypothesis at once.

    Returns ``(lo, hi, h)`` with ``lo``/``hi`` of shape ``(n, 4)``; row ``k``
    equals ``forecast_directions`` on the region ``{cells[k]}``.
    """
    cells = np.asarray(cells, dtype=np.int64).reshape(-1, 2)
    cx, cy = cells[:, 0], cells[:, 1]
    d = np.abs(cx - sink[0]) + np.abs(cy - sink[1])
    h = np.maximum(1, np.floor(cfg.gamma * np.sqrt(d)).astype(np.int64))
    px, py = _probe_points(sink, h, params.v, grid)
    dmin, dmax = _lattice_extent(cx[:, None], cy[:, None], px, py, h[:, None], params.vp, grid)
    close = params.v - params.vp
    return h[:, None] + dmin / close, h[:, None] + dmax / close, h


@dataclass
class HypothesisFamily:
    """Array form of the single-cell hypothesis family of a region."""

    cells: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    actions: np.ndarray
    uncertainty: np.ndarray

    @property
    def mean_uncertainty(self) -> float:
        return float(self.uncertainty.mean())

    def sensors(self) -> list[Segment]:
        return [tuple(c) for c in self.cells.tolist()]


def hypothesis_family(sink: Segment, r: BeliefRegion, cfg: TrackerConfig,
                      params: MotionParams, grid: Grid) -> HypothesisFamily:
    cells = r.coords()
    lo, hi, _ = singleton_forecasts(sink, cells, cfg, params, grid)
    actions, unc = select_actions_array(lo, hi)
    return HypothesisFamily(cells, lo, hi, actions, unc)


def hypotheses_for_region(sink: Segment, r: BeliefRegion, cfg: TrackerConfig,
                          params: MotionParams, grid: Grid) -> list[Hypothesis]:
    """One hypothesis per region cell: that cell detects the target, all others do not."""
    fam = hypothesis_family(sink, r, cfg, params, grid)
    domain = r.cells
    out = []
    for k, cell in enumerate(fam.sensors()):
        forecast = [Interval(float(a), float(b)) for a, b in zip(fam.lo[k], fam.hi[k])]
        out.append(Hypothesis(
            signature=OneHotSignature(domain, cell),
            forecast=forecast,
            decision=Decision(int(fam.actions[k]), float(fam.uncertainty[k])),
        ))
    return out


def _close_enough(dist_mid: float, area: int, beta: float) -> bool:
    return dist_mid / math.sqrt(area) < beta


def collection_trigger(baseline: Decision, forecastctx: DirectionForecast, r: BeliefRegion,
                       hyps, cfg: TrackerConfig) -> bool:
    """Collect when the expected uncertainty drop beats ``alpha`` or the sink is near the region."""
    if expected_unc_decrease(baseline, hyps) > cfg.alpha:
        return True
    return _close_enough(forecastctx.dist_mid, r.size, cfg.beta)


# -- controllers -------------------------------------------------------------


@dataclass
class TrackerState:
    grid: Grid
    params: MotionParams
    cfg: TrackerConfig
    acct: MessageAccounting
    sink: Segment
    target: Segment
    region: BeliefRegion
    beacon: Segment
    target_node: Segment
    ledger: MetricsLedger = field(default_factory=MetricsLedger)
    step: int = 0
    caught: bool = False
    activations: list[int] = field(default_factory=list)
    collections: int = 0

    @classmethod
    def initial(cls, grid: Grid, params: MotionParams, cfg: TrackerConfig,
                acct: MessageAccounting, sink: Segment, target: Segment) -> TrackerState:
        # the starting target location is known to everyone at no cost
        return cls(grid, params, cfg, acct, sink, target,
                   BeliefRegion.singleton(target, grid), beacon=target, target_node=target)


def sink_path(start: Segment, direction: int, length: int, grid: Grid) -> list[Segment]:
    """Cells traversed when moving ``length`` segments in ``direction``, stopping at the border."""
    dx, dy = DIRECTIONS[direction][1]
    path = [start]
    x, y = start
    for _ in range(length):
        nx, ny = x + dx, y + dy
        if not grid.contains((nx, ny)):
            break
        x, y = nx, ny
        path.append((x, y))
    return path


def pursuit_move(sink: Segment, goal: Segment, v: int, grid: Grid) -> tuple[int, list[Segment]]:
    """Move toward a known cell: the direction whose end point is nearest ``goal``.

    A move toward the goal stops on the goal's row/column instead of
    overshooting it. Ties resolve in N, S, E, W order.
    """
    best = None
    for k, (_, (dx, dy)) in enumerate(DIRECTIONS):
        ahead = (goal[0] - sink[0]) * dx + (goal[1] - sink[1]) * dy
        length = min(v, ahead) if ahead > 0 else v
        path = sink_path(sink, k, length, grid)
        d = hop_distance(path[-1], goal)
        if best is None or d < best[0]:
            best = (d, k, path)
    return best[1], best[2]


def _in_network_detection(st: TrackerState) -> None:
    candidates = propagate_region(BeliefRegion.singleton(st.target_node, st.grid), st.params, st.grid).cells
    detected = query_sensors(st.target_node, candidates, st.target, st.acct, st.ledger,
                             count_queries=st.acct.local_activation)
    st.activations[-1] += len(candidates)
    if detected != {st.target}:
        raise RuntimeError(f"target at {st.target} escaped the in-network candidate set")
    st.target_node = st.target


def _finish(st: TrackerState, path: list[Segment]) -> None:
    st.sink = path[-1]
    if st.target in path:
        st.caught = True
    if st.target not in st.region:
        raise RuntimeError(f"belief region lost the target at step {st.step}")


def _decide(st: TrackerState) -> tuple[DirectionForecast, Decision]:
    fc = forecast_directions(st.sink, st.region, st.cfg, st.params, st.grid)
    return fc, select_action(fc.intervals)


def _wants_data(st: TrackerState, fc: DirectionForecast, baseline: Decision,
                fam: Callable[[], HypothesisFamily]) -> bool:
    if _close_enough(fc.dist_mid, st.region.size, st.cfg.beta):
        return True
    if st.region.size == 1:
        return False  # the only hypothesis is the baseline itself
    return baseline.uncertainty - fam().mean_uncertainty > st.cfg.alpha


def _lazy_family(st: TrackerState) -> Callable[[], HypothesisFamily]:
    cache: list[HypothesisFamily] = []

    def get() -> HypothesisFamily:
        if not cache:
            cache.append(hypothesis_family(st.sink, st.region, st.cfg, st.params, st.grid))
        return cache[0]

    return get


def step_algorithm_1(st: TrackerState) -> None:
    """Locate the target every step and report it straight to the sink."""
    _in_network_detection(st)
    report_to_sink(st.target_node, st.sink, st.ledger)
    st.region = BeliefRegion.singleton(st.target, st.grid)
    _, path = pursuit_move(st.sink, st.target, st.params.v, st.grid)
    _finish(st, path)


def step_algorithm_2(st: TrackerState) -> None:
    """Locate every step, report to the beacon; the sink chases the beacon."""
    _in_network_detection(st)
    report_to_beacon(st.target_node, st.beacon, st.ledger)
    st.region = propagate_region(st.region, st.params, st.grid)
    _, path = pursuit_move(st.sink, st.beacon, st.params.v, st.grid)
    if st.beacon in path:
        # sink meets the beacon on its way: local handover, no hops
        st.ledger.record("beacon_handover", deliveries=1)
        st.beacon = st.target_node
        st.region = BeliefRegion.singleton(st.target_node, st.grid)
    _finish(st, path)


def _step_collecting(st: TrackerState) -> None:
    st.region = propagate_region(st.region, st.params, st.grid)
    fc, decision = _decide(st)
    fam = _lazy_family(st)
    if _wants_data(st, fc, decision, fam):
        st.collections += 1
        if st.cfg.strategy == "minimum":
            f = fam()
            probed = greedy_one_hot_cover(f.sensors(), f.actions.tolist())
        else:
            probed = st.region.cells
        detected = query_sensors(st.sink, probed, st.target, st.acct, st.ledger)
        st.activations[-1] += len(probed)
        if detected:
            st.ledger.record("delivery", deliveries=1)
        st.region = shrink_region(st.region, detected, probed)
        fc, decision = _decide(st)
    path = sink_path(st.sink, decision.action, st.params.v, st.grid)
    _finish(st, path)


def step_algorithm_3(st: TrackerState) -> None:
    """Collect from every possible location when the decision needs it."""
    _step_collecting(st)


def step_algorithm_4(st: TrackerState) -> None:
    """Collect only from cells whose hypotheses change the decision."""
    _step_collecting(st)


def step_algorithm_5(st: TrackerState) -> None:
    """In-network beacon updates every step; the sink asks the beacon only when needed."""
    _in_network_detection(st)
    report_to_beacon(st.target_node, st.beacon, st.ledger)
    st.region = propagate_region(st.region, st.params, st.grid)
    fc, decision = _decide(st)
    if _wants_data(st, fc, decision, _lazy_family(st)):
        st.collections += 1
        request_from_beacon(st.sink, st.beacon, st.ledger)
        st.beacon = st.target_node
        st.region = BeliefRegion.singleton(st.target_node, st.grid)
        fc, decision = _decide(st)
    path = sink_path(st.sink, decision.action, st.params.v, st.grid)
    _finish(st, path)


STEP_FUNCTIONS: dict[int, Callable[[TrackerState], None]] = {
    1: step_algorithm_1,
    2: step_algorithm_2,
    3: step_algorithm_3,
    4: step_algorithm_4,
    5: step_algorithm_5,
}


def advance(st: TrackerState, new_target: Segment) -> None:
    """One control step: the target has moved to ``new_target``; sense, decide, move, check."""
    if st.caught:
        raise PreconditionError("target already caught")
    st.step += 1
    st.target = new_target
    st.activations.append(0)
    STEP_FUNCTIONS[st.cfg.algorithm](st)
