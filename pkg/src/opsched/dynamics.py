"""Closed-form utilization-ratio transitions and trace sampling.

The operator's utilization ratio x lives in [0, 1] and obeys
dx/dt = alpha * (b(t) - x), where b(t) is 1 while working and 0 while
resting.  Every rest or work segment therefore has an exact exponential
solution, and all transitions here are evaluated in closed form rather
than by integrating the differential equation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import IO, TYPE_CHECKING

from .errors import InvalidArgumentError, UnreachableTargetError

if TYPE_CHECKING:
    from .model import ProblemInstance, Schedule

__all__ = [
    "rest_transition",
    "work_transition",
    "rest_work_transition",
    "work_time_to_reach",
    "rest_time_to_reach",
    "TraceSample",
    "UtilizationTrace",
    "trace",
]

# Tolerance used when merging sample times that coincide with breakpoints.
_TIME_MERGE_EPS = 1e-12


def _check_ratio(name: str, value: float) -> None:
    if math.isnan(value) or not 0.0 <= value <= 1.0:
        raise InvalidArgumentError(f"{name} must lie in [0, 1], got {value!r}")


def _check_duration(name: str, value: float) -> None:
    if math.isnan(value) or math.isinf(value) or value < 0.0:
        raise InvalidArgumentError(f"{name} must be a finite duration >= 0, got {value!r}")


def _check_alpha(alpha: float) -> None:
    if math.isnan(alpha) or math.isinf(alpha) or alpha <= 0.0:
        raise InvalidArgumentError(f"alpha must be a finite positive rate, got {alpha!r}")


def rest_transition(x: float, r: float, alpha: float) -> float:
    """Ratio after resting for ``r`` starting from ``x``: x * exp(-alpha * r)."""
    _check_ratio("x", x)
    _check_duration("r", r)
    _check_alpha(alpha)
    return x * math.exp(-alpha * r)


def work_transition(x_bar: float, t: float, alpha: float) -> float:
    """Ratio after working for ``t`` starting from ``x_bar``.

    While working, the ratio relaxes exponentially toward 1:
    1 - exp(-alpha * t) * (1 - x_bar).
    """
    _check_ratio("x_bar", x_bar)
    _check_duration("t", t)
    _check_alpha(alpha)
    if t == 0.0:
        return x_bar
    return 1.0 - math.exp(-alpha * t) * (1.0 - x_bar)


def rest_work_transition(x0: float, r: float, t: float, alpha: float) -> float:
    """Ratio after resting for ``r`` and then working for ``t`` from ``x0``.

    Equals 1 - exp(-alpha*t) + x0 * exp(-alpha*(r+t)); computed as the
    composition of the two single-segment transitions so the identity
    with ``work_transition(rest_transition(...))`` holds exactly.
    """
    return work_transition(rest_transition(x0, r, alpha), t, alpha)


def work_time_to_reach(x_from: float, x_to: float, alpha: float) -> float:
    """Work duration that raises the ratio from ``x_from`` to ``x_to``.

    Inverts the work transition: (1/alpha) * ln((1 - x_from) / (1 - x_to)).
    """
    _check_ratio("x_from", x_from)
    _check_alpha(alpha)
    if math.isnan(x_to) or x_to < 0.0:
        raise InvalidArgumentError(f"x_to must lie in [0, 1), got {x_to!r}")
    if x_to >= 1.0:
        raise UnreachableTargetError("working approaches 1 only asymptotically; x_to must be < 1")
    if x_to < x_from:
        raise InvalidArgumentError(f"working cannot lower the ratio ({x_from!r} -> {x_to!r})")
    return math.log((1.0 - x_from) / (1.0 - x_to)) / alpha


def rest_time_to_reach(x_from: float, x_to: float, alpha: float) -> float:
    """Rest duration that lowers the ratio from ``x_from`` to ``x_to``.

    Inverts the rest transition: (1/alpha) * ln(x_from / x_to).
    """
    _check_ratio("x_from", x_from)
    _check_ratio("x_to", x_to)
    _check_alpha(alpha)
    if x_to == 0.0:
        raise UnreachableTargetError("resting approaches 0 only asymptotically; x_to must be > 0")
    if x_to > x_from:
        raise InvalidArgumentError(f"resting cannot raise the ratio ({x_from!r} -> {x_to!r})")
    return math.log(x_from / x_to) / alpha


@dataclass(frozen=True)
class TraceSample:
    """One sampled point of a utilization path."""

    time: float
    x: float
    working: bool


@dataclass(frozen=True)
class UtilizationTrace:
    """Sampled utilization path plus the exact segment-boundary times.

    ``samples`` are strictly increasing in time, start at 0, and include a
    row for every breakpoint even when it falls off the sampling grid.
    The working flag is right-continuous: a sample taken exactly at a
    boundary carries the flag of the segment that starts there.
    """

    samples: tuple[TraceSample, ...]
    breakpoints: tuple[float, ...]

    @property
    def final(self) -> TraceSample:
        return self.samples[-1]

    def write_csv(self, stream: IO[str]) -> None:
        """Write the samples as ``time,x,working`` rows (working is 0/1)."""
        stream.write("time,x,working\n")
        for sample in self.samples:
            stream.write(f"{sample.time!r},{sample.x!r},{1 if sample.working else 0}\n")


@dataclass(frozen=True)
class _Segment:
    start: float
    end: float
    x_start: float
    working: bool

    def value_at(self, time: float, alpha: float) -> float:
        elapsed = min(max(time - self.start, 0.0), self.end - self.start)
        if self.working:
            return work_transition(self.x_start, elapsed, alpha)
        return rest_transition(self.x_start, elapsed, alpha)


def trace(instance: ProblemInstance, schedule: Schedule, dt: float) -> UtilizationTrace:
    """Sample the utilization path of ``schedule`` at step ``dt``.

    Returns grid samples merged with the exact rest/work boundary times.
    A schedule whose segments are all empty traces to the single sample
    (0, x0, not working).
    """
    if math.isnan(dt) or dt <= 0.0:
        raise InvalidArgumentError(f"dt must be > 0, got {dt!r}")
    if len(schedule.segments) not in (0, instance.n):
        raise InvalidArgumentError(
            f"schedule has {len(schedule.segments)} tasks, instance expects {instance.n}"
        )

    alpha = instance.alpha
    segments: list[_Segment] = []
    now = 0.0
    x = instance.x0
    for seg in schedule.segments:
        if seg.rest > 0.0:
            x_next = rest_transition(x, seg.rest, alpha)
            segments.append(_Segment(now, now + seg.rest, x, False))
            now += seg.rest
            x = x_next
        if seg.work > 0.0:
            x_next = work_transition(x, seg.work, alpha)
            segments.append(_Segment(now, now + seg.work, x, True))
            now += seg.work
            x = x_next

    breakpoints = [0.0] + [seg.end for seg in segments]
    if not segments:
        return UtilizationTrace(
            samples=(TraceSample(0.0, instance.x0, False),), breakpoints=(0.0,)
        )

    total = segments[-1].end
    eps = _TIME_MERGE_EPS * max(1.0, total)
    times = list(breakpoints)
    k = 1
    while k * dt < total - eps:
        times.append(k * dt)
        k += 1
    times.sort()
    merged: list[float] = []
    for time in times:
        if merged and time - merged[-1] <= eps:
            continue
        merged.append(time)

    samples: list[TraceSample] = []
    seg_idx = 0
    for time in merged:
        # Right-continuous flag: a boundary sample belongs to the segment
        # that starts there; the final time stays in the last segment.
        while seg_idx + 1 < len(segments) and time >= segments[seg_idx].end - eps:
            seg_idx += 1
        seg = segments[seg_idx]
        samples.append(TraceSample(time, seg.value_at(time, alpha), seg.working))

    return UtilizationTrace(samples=tuple(samples), breakpoints=tuple(breakpoints))
