"""Interval granules and the probabilistic comparison kernel.

Both operands of a comparison are modelled as independent uniform random
variables over their intervals; ``prob_leq`` is the exact closed form of
``P(X <= Y)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class PreconditionError(ValueError):
    """Raised when an operation is called with arguments outside its contract."""


@dataclass(frozen=True)
class Interval:
    """Closed real interval ``[lo, hi]``; ``lo == hi`` is a point."""

    lo: float
    hi: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise PreconditionError(f"interval bounds must be finite: [{self.lo}, {self.hi}]")
        if self.lo > self.hi:
            raise PreconditionError(f"invalid interval: lo={self.lo} > hi={self.hi}")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def shift(self, c: float) -> Interval:
        return Interval(self.lo + c, self.hi + c)

    def scale(self, k: float) -> Interval:
        if k <= 0:
            raise PreconditionError("scale factor must be positive")
        return Interval(self.lo * k, self.hi * k)

    def __iter__(self):
        yield self.lo
        yield self.hi


def _as_interval(a) -> Interval:
    if isinstance(a, Interval):
        return a
    lo, hi = a
    return Interval(float(lo), float(hi))


def _ramp(x: float, lo: float, hi: float) -> float:
    # integral of the CDF of U[lo, hi] from -inf to x
    if x <= lo:
        return 0.0
    if x >= hi:
        return 0.5 * (hi - lo) + (x - hi)
    return (x - lo) ** 2 / (2.0 * (hi - lo))


def prob_leq(a, b) -> float:
    """Return ``P(X <= Y)`` for ``X ~ U(a)``, ``Y ~ U(b)`` independent.

    Two identical point intervals compare with probability 0.5.
    """
    a = _as_interval(a)
    b = _as_interval(b)
    wa, wb = a.width, b.width
    if wa == 0.0 and wb == 0.0:
        if a.lo < b.lo:
            return 1.0
        return 0.5 if a.lo == b.lo else 0.0
    if wb == 0.0:
        return min(1.0, max(0.0, (b.lo - a.lo) / wa))
    if wa == 0.0:
        return min(1.0, max(0.0, (b.hi - a.lo) / wb))
    p = 1.0 - (_ramp(a.hi, b.lo, b.hi) - _ramp(a.lo, b.lo, b.hi)) / wa
    return min(1.0, max(0.0, p))


def unc_leq(a, b) -> float:
    """Uncertainty of the comparison ``a <= b``: ``2 * P(X > Y)``."""
    return 2.0 * (1.0 - prob_leq(a, b))


def com_leq(a, b) -> float:
    """Confidence of ``a <= b``: ``P(X <= Y) - P(X > Y)``."""
    return 1.0 - unc_leq(a, b)


def prob_leq_array(a_lo, a_hi, b_lo, b_hi) -> np.ndarray:
    """Vectorised :func:`prob_leq` over broadcastable bound arrays.

    Bounds are assumed valid (``lo <= hi``); no validation is done here.
    """
    a_lo, a_hi, b_lo, b_hi = np.broadcast_arrays(
        *(np.asarray(v, dtype=float) for v in (a_lo, a_hi, b_lo, b_hi))
    )
    wa = a_hi - a_lo
    wb = b_hi - b_lo
    safe_wa = np.where(wa > 0, wa, 1.0)
    safe_wb = np.where(wb > 0, wb, 1.0)

    def ramp(x):
        inner = (x - b_lo) ** 2 / (2.0 * safe_wb)
        upper = 0.5 * wb + (x - b_hi)
        return np.where(x <= b_lo, 0.0, np.where(x >= b_hi, upper, inner))

    both_wide = 1.0 - (ramp(a_hi) - ramp(a_lo)) / safe_wa
    b_point = (b_lo - a_lo) / safe_wa
    a_point = (b_hi - a_lo) / safe_wb
    points = np.where(a_lo < b_lo, 1.0, np.where(a_lo == b_lo, 0.5, 0.0))

    out = np.where(
        wa > 0,
        np.where(wb > 0, both_wide, b_point),
        np.where(wb > 0, a_point, points),
    )
    return np.clip(out, 0.0, 1.0)
