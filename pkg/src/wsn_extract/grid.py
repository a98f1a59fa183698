"""Sensor field on a square-segment grid and message/activation accounting."""
from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass, field

from .granules import PreconditionError

Segment = tuple[int, int]


@dataclass(frozen=True)
class Grid:
    width: int
    height: int

    def __post_init__(self):
        if self.width < 2 or self.height < 2:
            raise PreconditionError(f"grid must be at least 2x2, got {self.width}x{self.height}")

    @property
    def node_count(self) -> int:
        return self.width * self.height

    def contains(self, s: Segment) -> bool:
        return 0 <= s[0] < self.width and 0 <= s[1] < self.height

    def require(self, *segments: Segment) -> None:
        for s in segments:
            if not self.contains(s):
                raise PreconditionError(f"segment {s} outside {self.width}x{self.height} grid")

    def clamp(self, s: Segment) -> Segment:
        return (min(max(s[0], 0), self.width - 1), min(max(s[1], 0), self.height - 1))


@dataclass(frozen=True)
class MessageAccounting:
    """Which messages cost hops.

    ``count_queries``: sink-issued collections pay for each query and each
    response (absence reports included); otherwise only detections are paid.
    ``local_activation``: same switch for the per-step activations a target
    node sends to its candidate neighbours.
    """

    count_queries: bool = True
    local_activation: bool = True


@dataclass
class MetricsLedger:
    hop_count: int = 0
    active_time: int = 0
    deliveries_to_sink: int = 0
    log: list[tuple[str, int, int, int]] = field(default_factory=list, repr=False)

    def record(self, kind: str, hops: int = 0, active: int = 0, deliveries: int = 0) -> None:
        if hops < 0 or active < 0 or deliveries < 0:
            raise PreconditionError("ledger deltas must be non-negative")
        self.hop_count += hops
        self.active_time += active
        self.deliveries_to_sink += deliveries
        self.log.append((kind, hops, active, deliveries))

    def snapshot(self) -> dict[str, int]:
        return {
            "hop_count": self.hop_count,
            "active_time": self.active_time,
            "deliveries_to_sink": self.deliveries_to_sink,
        }


def hop_distance(a: Segment, b: Segment, grid: Grid | None = None) -> int:
    """Shortest-path hop count between two segments of a 4-connected grid."""
    if grid is not None:
        grid.require(a, b)
    return abs(a[0] - b[0]) + abs(a[1] - b[1])


def query_sensors(querier: Segment, targets: Iterable[Segment], truth: Segment,
                  acct: MessageAccounting, ledger: MetricsLedger,
                  grid: Grid | None = None, *, count_queries: bool | None = None) -> set[Segment]:
    """Activate ``targets`` on behalf of ``querier`` and return the ones that detect.

    ``count_queries`` overrides ``acct.count_queries`` (the tracker passes
    ``acct.local_activation`` for in-network activations).
    """
    targets = set(targets)
    if grid is not None:
        grid.require(*targets)
    if not targets:
        return set()
    paid = acct.count_queries if count_queries is None else count_queries
    detected = {truth} if truth in targets else set()
    if paid:
        hops = 2 * sum(hop_distance(querier, s) for s in targets)
    else:
        hops = sum(hop_distance(s, querier) for s in detected)
    ledger.record("query", hops=hops, active=len(targets))
    return detected


def report_to_beacon(target_node: Segment, beacon: Segment, ledger: MetricsLedger,
                     grid: Grid | None = None) -> None:
    ledger.record("report_beacon", hops=hop_distance(target_node, beacon, grid))


def request_from_beacon(sink: Segment, beacon: Segment, ledger: MetricsLedger,
                        grid: Grid | None = None) -> None:
    """Request plus reply between sink and beacon; one location delivered."""
    ledger.record("request_beacon", hops=2 * hop_distance(sink, beacon, grid), deliveries=1)


def report_to_sink(source: Segment, sink: Segment, ledger: MetricsLedger,
                   grid: Grid | None = None) -> None:
    ledger.record("report_sink", hops=hop_distance(source, sink, grid), deliveries=1)
