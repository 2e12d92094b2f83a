"""Problem instances, schedules, feasibility checking, and the objective.

A problem instance fixes the task count N, the horizon T, the dynamics
rate alpha, the utilization band [x_min, x_max], the initial ratio x0,
and the utility family.  A schedule assigns each task a rest followed by
a work duration; it is feasible when the total duration fits the horizon
and the ratio right before each work period stays at or above x_min while
the ratio right after stays at or below x_max.  Because the ratio is
monotone within any single rest or work segment, checking it at segment
endpoints bounds it along the whole path.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Sequence

from .dynamics import rest_transition, work_transition
from .errors import InvalidArgumentError, InvalidInstanceError
from .utility import UtilityFunction

__all__ = [
    "ProblemInstance",
    "Segment",
    "Schedule",
    "TaskFeasibility",
    "FeasibilityReport",
    "check_feasibility",
    "total_utility",
    "DEFAULT_FEASIBILITY_TOL",
]

# Well above double-precision transition noise, far below reporting precision.
DEFAULT_FEASIBILITY_TOL = 1e-9


@dataclass(frozen=True)
class ProblemInstance:
    """Input to the scheduling problem."""

    n: int
    t_horizon: float
    alpha: float
    x_min: float
    x_max: float
    x0: float
    utility: UtilityFunction

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or self.n < 1:
            raise InvalidInstanceError(f"n must be an integer >= 1, got {self.n!r}")
        if math.isnan(self.t_horizon) or math.isinf(self.t_horizon) or self.t_horizon <= 0:
            raise InvalidInstanceError(f"t_horizon must be finite and > 0, got {self.t_horizon!r}")
        if math.isnan(self.alpha) or math.isinf(self.alpha) or self.alpha <= 0:
            raise InvalidInstanceError(f"alpha must be finite and > 0, got {self.alpha!r}")
        if not 0.0 < self.x_min < self.x_max < 1.0:
            raise InvalidInstanceError(
                f"need 0 < x_min < x_max < 1, got x_min={self.x_min!r}, x_max={self.x_max!r}"
            )
        if not self.x_min <= self.x0 <= self.x_max:
            # The structural analysis assumes the start inside the band;
            # repairing silently would change the problem.
            raise InvalidInstanceError(
                f"x0 must lie in [x_min, x_max], got {self.x0!r} outside "
                f"[{self.x_min!r}, {self.x_max!r}]"
            )

    def to_dict(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "t_horizon": self.t_horizon,
            "alpha": self.alpha,
            "x_min": self.x_min,
            "x_max": self.x_max,
            "x0": self.x0,
            "utility": self.utility.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> ProblemInstance:
        if not isinstance(data, dict):
            raise InvalidInstanceError("instance document must be a JSON object")
        required = {"n", "t_horizon", "alpha", "x_min", "x_max", "x0", "utility"}
        missing = required - set(data)
        if missing:
            raise InvalidInstanceError(f"instance document missing keys: {sorted(missing)}")
        return cls(
            n=int(data["n"]),
            t_horizon=float(data["t_horizon"]),
            alpha=float(data["alpha"]),
            x_min=float(data["x_min"]),
            x_max=float(data["x_max"]),
            x0=float(data["x0"]),
            utility=UtilityFunction.from_dict(data["utility"]),
        )

    @classmethod
    def load(cls, path: str | Path) -> ProblemInstance:
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n", encoding="utf-8")


@dataclass(frozen=True)
class Segment:
    """One task's decision variables: rest first, then work."""

    rest: float
    work: float

    def __post_init__(self) -> None:
        for name, value in (("rest", self.rest), ("work", self.work)):
            if math.isnan(value) or math.isinf(value) or value < 0.0:
                raise InvalidArgumentError(f"{name} must be a finite duration >= 0, got {value!r}")


@dataclass(frozen=True)
class Schedule:
    """Ordered per-task (rest, work) durations."""

    segments: tuple[Segment, ...]

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[float, float]]) -> Schedule:
        return cls(tuple(Segment(rest=float(r), work=float(t)) for r, t in pairs))

    @property
    def rests(self) -> tuple[float, ...]:
        return tuple(seg.rest for seg in self.segments)

    @property
    def works(self) -> tuple[float, ...]:
        return tuple(seg.work for seg in self.segments)

    @property
    def total_duration(self) -> float:
        return sum(seg.rest + seg.work for seg in self.segments)

    def to_list(self) -> list[dict[str, float]]:
        return [{"rest": seg.rest, "work": seg.work} for seg in self.segments]

    @classmethod
    def from_list(cls, data: Sequence[Any]) -> Schedule:
        if not isinstance(data, (list, tuple)):
            raise InvalidArgumentError("schedule document must be a JSON array")
        pairs = []
        for i, item in enumerate(data):
            if not isinstance(item, dict) or "rest" not in item or "work" not in item:
                raise InvalidArgumentError(
                    f"schedule entry {i} must be an object with 'rest' and 'work' keys"
                )
            pairs.append((float(item["rest"]), float(item["work"])))
        return cls.from_pairs(pairs)

    @classmethod
    def load(cls, path: str | Path) -> Schedule:
        return cls.from_list(json.loads(Path(path).read_text(encoding="utf-8")))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_list(), indent=2) + "\n", encoding="utf-8")


@dataclass(frozen=True)
class TaskFeasibility:
    """Endpoint ratios and constraint violations for one task."""

    index: int
    rest: float
    work: float
    x_pre: float
    x_post: float
    violations: tuple[str, ...]


@dataclass(frozen=True)
class FeasibilityReport:
    """Outcome of checking a schedule against an instance."""

    feasible: bool
    budget_used: float
    budget_limit: float
    tasks: tuple[TaskFeasibility, ...]
    violations: tuple[str, ...] = field(default=())
    worst_violation: float = 0.0

    @property
    def terminal_ratio(self) -> float:
        return self.tasks[-1].x_post if self.tasks else math.nan

    def to_dict(self) -> dict[str, Any]:
        return {
            "feasible": self.feasible,
            "budget_used": self.budget_used,
            "budget_limit": self.budget_limit,
            "worst_violation": self.worst_violation,
            "violations": list(self.violations),
            "tasks": [
                {
                    "index": task.index,
                    "rest": task.rest,
                    "work": task.work,
                    "x_pre": task.x_pre,
                    "x_post": task.x_post,
                    "violations": list(task.violations),
                }
                for task in self.tasks
            ],
        }


def check_feasibility(
    instance: ProblemInstance,
    schedule: Schedule,
    tol: float = DEFAULT_FEASIBILITY_TOL,
) -> FeasibilityReport:
    """Evaluate every constraint of the scheduling problem at tolerance ``tol``.

    Walks the closed-form transitions task by task, recording the ratio
    right before and right after each work period, and flags the time
    budget as well as any band violation.
    """
    if math.isnan(tol) or tol < 0.0:
        raise InvalidArgumentError(f"tol must be >= 0, got {tol!r}")
    if len(schedule.segments) != instance.n:
        raise InvalidArgumentError(
            f"schedule has {len(schedule.segments)} tasks, instance expects {instance.n}"
        )

    violations: list[str] = []
    worst = 0.0
    tasks: list[TaskFeasibility] = []
    x = instance.x0
    for i, seg in enumerate(schedule.segments, start=1):
        x_pre = rest_transition(x, seg.rest, instance.alpha)
        x_post = work_transition(x_pre, seg.work, instance.alpha)
        task_violations: list[str] = []
        if x_pre < instance.x_min - tol:
            gap = instance.x_min - x_pre
            task_violations.append(f"x_pre {x_pre:.12g} below x_min by {gap:.3g}")
            worst = max(worst, gap)
        if x_post > instance.x_max + tol:
            gap = x_post - instance.x_max
            task_violations.append(f"x_post {x_post:.12g} above x_max by {gap:.3g}")
            worst = max(worst, gap)
        if task_violations:
            violations.extend(f"task {i}: {v}" for v in task_violations)
        tasks.append(
            TaskFeasibility(
                index=i,
                rest=seg.rest,
                work=seg.work,
                x_pre=x_pre,
                x_post=x_post,
                violations=tuple(task_violations),
            )
        )
        x = x_post

    budget_used = schedule.total_duration
    if budget_used > instance.t_horizon + tol:
        gap = budget_used - instance.t_horizon
        violations.append(f"budget: total duration {budget_used:.12g} over T by {gap:.3g}")
        worst = max(worst, gap)

    return FeasibilityReport(
        feasible=not violations,
        budget_used=budget_used,
        budget_limit=instance.t_horizon,
        tasks=tuple(tasks),
        violations=tuple(violations),
        worst_violation=worst,
    )


def total_utility(schedule: Schedule, utility: UtilityFunction) -> float:
    """Sum of per-task utilities of the work durations; rests earn nothing."""
    return sum(utility.value(seg.work) for seg in schedule.segments)
