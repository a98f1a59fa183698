"""Seeded simulation runs, replicated batches and parameter sweeps."""
from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass, field, replace
from typing import Callable

import numpy as np

from .granules import PreconditionError
from .grid import Grid, MessageAccounting, Segment, hop_distance
from .tracking import DIRECTIONS, MotionParams, TrackerConfig, TrackerState, advance

METRICS = ("time_to_catch", "hop_count", "active_time", "deliveries_to_sink")


class ConfigError(PreconditionError):
    """Invalid simulation configuration; ``problems`` lists every violation."""

    def __init__(self, problems: list[str]):
        super().__init__("; ".join(problems))
        self.problems = problems


@dataclass(frozen=True)
class SimConfig:
    grid: Grid = Grid(200, 200)
    sink_start: Segment = (160, 160)
    target_start: Segment = (66, 66)
    params: MotionParams = MotionParams(v=4, vp=3)
    tracker: TrackerConfig = TrackerConfig()
    seed: int = 0
    max_steps: int | None = None
    accounting: MessageAccounting = MessageAccounting()

    def validate(self) -> None:
        problems = []
        for name in ("sink_start", "target_start"):
            s = getattr(self, name)
            if not self.grid.contains(s):
                problems.append(f"{name} {s} outside {self.grid.width}x{self.grid.height} grid")
        if self.sink_start == self.target_start:
            problems.append("sink and target must start on different segments")
        if not (self.grid.width > 2 * self.params.vp and self.grid.height > 2 * self.params.vp):
            problems.append(f"grid too small for target speed vp={self.params.vp}")
        if self.max_steps is not None and self.max_steps <= 0:
            problems.append("max_steps must be positive")
        if not 0 <= self.seed < 2**64:
            problems.append("seed must be a 64-bit unsigned integer")
        if problems:
            raise ConfigError(problems)

    @property
    def step_limit(self) -> int:
        if self.max_steps is not None:
            return self.max_steps
        d = hop_distance(self.sink_start, self.target_start)
        return max(1, math.ceil(50 * d / (self.params.v - self.params.vp)))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["sink_start"] = list(self.sink_start)
        d["target_start"] = list(self.target_start)
        d["step_limit"] = self.step_limit
        return d


@dataclass
class RunResult:
    caught: bool
    time_to_catch: int
    ledger: dict[str, int]
    sink_trajectory: list[Segment]
    target_trajectory: list[Segment]
    cumulative: list[dict[str, int]] = field(default_factory=list)
    activations: list[int] = field(default_factory=list)
    collections: int = 0

    @property
    def steps(self) -> int:
        return len(self.sink_trajectory) - 1

    def metric(self, name: str) -> float:
        if name == "time_to_catch":
            return self.time_to_catch
        return self.ledger[name]

    def to_dict(self) -> dict:
        return {
            "caught": self.caught,
            "time_to_catch": self.time_to_catch,
            "steps": self.steps,
            "collections": self.collections,
            "ledger": dict(self.ledger),
            "sink_trajectory": [list(s) for s in self.sink_trajectory],
            "target_trajectory": [list(s) for s in self.target_trajectory],
        }


def feasible_moves(pos: Segment, vp: int, grid: Grid) -> list[Segment]:
    out = []
    for _, (dx, dy) in DIRECTIONS:
        nxt = (pos[0] + dx * vp, pos[1] + dy * vp)
        if grid.contains(nxt):
            out.append(nxt)
    return out


def run_simulation(cfg: SimConfig,
                   observer: Callable[[TrackerState], None] | None = None) -> RunResult:
    """Drive one tracker until the sink catches the target or the step limit runs out.

    The target picks uniformly among its in-grid moves using a PCG64 stream
    seeded with ``cfg.seed``; nothing else draws random numbers, so for a given
    seed every algorithm faces the same target trajectory. ``observer`` sees
    the tracker state after every step.
    """
    cfg.validate()
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    st = TrackerState.initial(cfg.grid, cfg.params, cfg.tracker, cfg.accounting,
                              cfg.sink_start, cfg.target_start)
    sinks = [st.sink]
    targets = [st.target]
    cumulative = [st.ledger.snapshot()]
    limit = cfg.step_limit
    while not st.caught and st.step < limit:
        moves = feasible_moves(st.target, cfg.params.vp, cfg.grid)
        nxt = moves[int(rng.integers(len(moves)))]
        advance(st, nxt)
        if observer is not None:
            observer(st)
        sinks.append(st.sink)
        targets.append(st.target)
        cumulative.append(st.ledger.snapshot())
    return RunResult(
        caught=st.caught,
        time_to_catch=st.step,
        ledger=st.ledger.snapshot(),
        sink_trajectory=sinks,
        target_trajectory=targets,
        cumulative=cumulative,
        activations=st.activations,
        collections=st.collections,
    )


@dataclass(frozen=True)
class BatchStats:
    n: int
    mean: dict[str, float]
    sd: dict[str, float]
    not_caught: int = 0

    def row(self) -> dict[str, float]:
        out: dict[str, float] = {"n": self.n, "not_caught": self.not_caught}
        for m in METRICS:
            out[f"{m}_mean"] = self.mean[m]
            out[f"{m}_sd"] = self.sd[m]
        return out


def summarize(results: list[RunResult]) -> BatchStats:
    if not results:
        raise PreconditionError("cannot summarise an empty batch")
    mean, sd = {}, {}
    caught = [r for r in results if r.caught]
    for m in METRICS:
        pool = caught if m == "time_to_catch" else results
        vals = np.array([r.metric(m) for r in pool], dtype=float)
        mean[m] = float(vals.mean()) if vals.size else math.nan
        sd[m] = float(vals.std(ddof=1)) if vals.size > 1 else 0.0
    return BatchStats(n=len(results), mean=mean, sd=sd, not_caught=len(results) - len(caught))


def batch_seeds(base_seed: int, n: int) -> list[int]:
    return [base_seed + i for i in range(n)]


def run_batch(cfg: SimConfig, n: int, base_seed: int = 0,
              observer: Callable[[TrackerState], None] | None = None) -> BatchStats:
    """``n`` runs with seeds ``base_seed + i``; time-to-catch averages caught runs only."""
    if n < 1:
        raise PreconditionError("replication count must be >= 1")
    return summarize([run_simulation(replace(cfg, seed=s), observer)
                      for s in batch_seeds(base_seed, n)])


def with_tracker(cfg: SimConfig, **changes) -> SimConfig:
    return replace(cfg, tracker=replace(cfg.tracker, **changes))


def sweep(cfg: SimConfig, alphas, betas, gammas, n: int, base_seed: int = 0):
    """Evaluate ``run_batch`` over the Cartesian product of the three axes.

    Returns ``[((alpha, beta, gamma), BatchStats), ...]`` in axis order.
    """
    axes = {"alpha": list(alphas), "beta": list(betas), "gamma": list(gammas)}
    empty = [k for k, v in axes.items() if not v]
    if empty:
        raise ConfigError([f"axis {k} is empty" for k in empty])
    rows = []
    for a, b, g in itertools.product(axes["alpha"], axes["beta"], axes["gamma"]):
        stats = run_batch(with_tracker(cfg, alpha=a, beta=b, gamma=g), n, base_seed)
        rows.append(((a, b, g), stats))
    return rows
