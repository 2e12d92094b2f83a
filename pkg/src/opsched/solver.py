"""Exact structural solver for the rest/work scheduling problem.

The optimum falls into one of three regimes:

* ``SLACK``                the horizon is long enough that every task can
                           rest down to x_min and work up to x_max; leftover
                           time stays unused.
* ``NO_REST_EQUAL_SPLIT``  working the whole horizon never reaches x_max;
                           the horizon is split evenly with no rest.
* ``STRUCTURED``           the budget binds and the ratio ends at x_max.
                           The schedule consists of a no-rest phase of m
                           tasks with a common work time t1_tilde, followed
                           by an alternating phase in which every task rests
                           and then works a common time t2_tilde, ending
                           each work period exactly at x_max.  The first
                           alternating task rests r1_tilde (absent when the
                           no-rest phase ends exactly at x_max) and the
                           remaining ones rest r2_tilde.

The structured regime is solved exactly: for each candidate phase split m
the common alternating work time follows from the binding time budget via
bisection, and the remaining one-dimensional maximization over t1_tilde
uses a coarse scan plus golden-section refinement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable

from .dynamics import rest_time_to_reach, work_time_to_reach, work_transition
from .errors import (
    InfeasibleCombinationError,
    InternalSolverError,
    InvalidArgumentError,
)
from .model import (
    DEFAULT_FEASIBILITY_TOL,
    ProblemInstance,
    Schedule,
    check_feasibility,
    total_utility,
)

__all__ = [
    "CaseTag",
    "CaseLabel",
    "Candidate",
    "Diagnostics",
    "Solution",
    "BudgetRoot",
    "StationarityReport",
    "Lemma5Report",
    "greedy_saturating_schedule",
    "classify_case",
    "policy2_pre_work_ratio",
    "budget",
    "solve_t2_for_budget",
    "solve",
    "verify_stationarity",
    "lemma5_classify",
]

# Bisection/golden-section targets; budget roots are Newton-polished below
# these widths so non-slack schedules land on the horizon to ~1e-12.
_BISECT_TOL = 1e-12
_GOLDEN_TOL = 1e-9
_SCAN_POINTS = 64
_TIE_TOL = 1e-12
_BOUNDARY_TOL = 1e-9

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
_INV_PHI_SQ = (3.0 - math.sqrt(5.0)) / 2.0


class CaseTag(str, Enum):
    SLACK = "SLACK"
    NO_REST_EQUAL_SPLIT = "NO_REST_EQUAL_SPLIT"
    STRUCTURED = "STRUCTURED"


@dataclass(frozen=True)
class CaseLabel:
    """Regime tag; ``m`` and ``boundary`` are filled for STRUCTURED only.

    ``boundary`` is true when the no-rest phase ends exactly at x_max, so
    no distinct first-rest r1_tilde exists.
    """

    tag: CaseTag
    m: int | None = None
    boundary: bool | None = None


@dataclass(frozen=True)
class Candidate:
    """One evaluated phase split in the structured search."""

    m: int
    t1: float | None
    t2: float | None
    objective: float
    boundary: bool
    residual_slack: float
    feasible: bool
    note: str | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "m": self.m,
            "t1": self.t1,
            "t2": self.t2,
            "objective": None if math.isinf(self.objective) else self.objective,
            "boundary": self.boundary,
            "residual_slack": self.residual_slack,
            "feasible": self.feasible,
            "note": self.note,
        }


@dataclass(frozen=True)
class Diagnostics:
    """Audit trail attached to every solution."""

    candidates: tuple[Candidate, ...]
    stationarity_residual: float | None
    budget_residual: float
    flags: tuple[str, ...] = ()

    def to_dict(self) -> dict[str, Any]:
        return {
            "candidates": [c.to_dict() for c in self.candidates],
            "stationarity_residual": self.stationarity_residual,
            "budget_residual": self.budget_residual,
            "flags": list(self.flags),
        }


@dataclass(frozen=True)
class Solution:
    """Optimal schedule plus its structural parameters."""

    case: CaseLabel
    schedule: Schedule
    t1_tilde: float | None
    t2_tilde: float | None
    r1_tilde: float | None
    r2_tilde: float | None
    objective: float
    diagnostics: Diagnostics

    def to_dict(self) -> dict[str, Any]:
        return {
            "case": self.case.tag.value,
            "m": self.case.m,
            "boundary": self.case.boundary,
            "t1_tilde": self.t1_tilde,
            "t2_tilde": self.t2_tilde,
            "r1_tilde": self.r1_tilde,
            "r2_tilde": self.r2_tilde,
            "schedule": self.schedule.to_list(),
            "objective": self.objective,
            "diagnostics": self.diagnostics.to_dict(),
        }


@dataclass(frozen=True)
class BudgetRoot:
    """Alternating-phase work time meeting the budget, plus leftover slack.

    ``slack`` is nonzero only when even the longest admissible work time
    (the one that rests all the way down to x_min) leaves budget unused.
    """

    t2: float
    slack: float


def greedy_saturating_schedule(instance: ProblemInstance) -> tuple[Schedule, float]:
    """Schedule that rests to x_min and works to x_max for every task.

    This maximizes every single work time simultaneously, so whenever it
    fits the horizon it is optimal with time to spare.  Returned regardless
    of whether its total duration fits.
    """
    alpha = instance.alpha
    t_star = work_time_to_reach(instance.x_min, instance.x_max, alpha)
    r_star = rest_time_to_reach(instance.x_max, instance.x_min, alpha)
    r_first = rest_time_to_reach(instance.x0, instance.x_min, alpha)
    pairs = [(r_first, t_star)] + [(r_star, t_star)] * (instance.n - 1)
    schedule = Schedule.from_pairs(pairs)
    return schedule, schedule.total_duration


def policy2_pre_work_ratio(t2: float, x_max: float, alpha: float) -> float:
    """Ratio from which working ``t2`` ends exactly at ``x_max``.

    Inverts the work transition around its endpoint:
    1 - (1 - x_max) * exp(alpha * t2).
    """
    if math.isnan(t2) or t2 < 0.0:
        raise InvalidArgumentError(f"t2 must be >= 0, got {t2!r}")
    if math.isnan(x_max) or not 0.0 < x_max < 1.0:
        raise InvalidArgumentError(f"x_max must lie in (0, 1), got {x_max!r}")
    if math.isnan(alpha) or alpha <= 0.0:
        raise InvalidArgumentError(f"alpha must be > 0, got {alpha!r}")
    result = 1.0 - (1.0 - x_max) * math.exp(alpha * t2)
    if result < 0.0:
        raise InvalidArgumentError(
            f"t2 = {t2!r} is too large: no starting ratio reaches x_max in that time"
        )
    return result


# Rounded structural parameters (4-decimal reporting) may overshoot the
# work ceiling by a few 1e-5; treat that as landing exactly on it.
_CEILING_SLOP = 1e-4


def _phase1_exit_ratio(instance: ProblemInstance, m: int, t1: float) -> float:
    """Ratio after the no-rest phase: m tasks of work ``t1`` from x0.

    Raises when the phase works materially past x_max; overshoot within
    rounding slop clamps to x_max.
    """
    if m == 0:
        return instance.x0
    ceiling = work_time_to_reach(instance.x0, instance.x_max, instance.alpha)
    if m * t1 > ceiling * (1.0 + _CEILING_SLOP) + 1e-12:
        raise InfeasibleCombinationError(
            f"no-rest phase works past x_max: m*t1 = {m * t1!r} exceeds {ceiling!r}"
        )
    x_m = work_transition(instance.x0, m * t1, instance.alpha)
    return min(x_m, instance.x_max)


def budget(instance: ProblemInstance, m: int, t1: float, t2: float) -> float:
    """Total duration of the structured schedule (m, t1, t2).

    m tasks of work t1 with no rest, then N - m tasks of work t2, the
    first prefixed by the rest reaching the pre-work ratio of t2 and the
    remaining ones by the rest from x_max down to that ratio.  Strictly
    increasing in t2 on its domain.
    """
    if not 0 <= m <= instance.n - 1:
        raise InvalidArgumentError(f"m must lie in [0, {instance.n - 1}], got {m}")
    alpha = instance.alpha
    x_m = _phase1_exit_ratio(instance, m, t1)
    x_bar = policy2_pre_work_ratio(t2, instance.x_max, alpha)
    if x_bar < instance.x_min - 1e-9:
        raise InfeasibleCombinationError(
            f"pre-work ratio {x_bar!r} falls below x_min = {instance.x_min!r}"
        )
    if x_bar > x_m + 1e-9:
        raise InfeasibleCombinationError(
            f"pre-work ratio {x_bar!r} exceeds the no-rest exit ratio {x_m!r}; "
            "t2 is too short for this phase split"
        )
    x_bar = min(x_bar, x_m)
    first_rest = rest_time_to_reach(x_m, x_bar, alpha)
    later_rest = rest_time_to_reach(instance.x_max, x_bar, alpha)
    k = instance.n - m
    return m * t1 + first_rest + k * t2 + (k - 1) * later_rest


def solve_t2_for_budget(instance: ProblemInstance, m: int, t1: float) -> BudgetRoot:
    """Alternating-phase work time that makes the budget meet the horizon.

    The budget is strictly increasing in t2, so the root is unique.  It is
    bracketed by the shortest admissible t2 (no first rest) and the longest
    (pre-work ratio at x_min); bisection is followed by Newton polishing
    using the closed-form budget slope (N - m) / pre_work_ratio.
    """
    alpha = instance.alpha
    x_m = _phase1_exit_ratio(instance, m, t1)
    t2_lo = work_time_to_reach(x_m, instance.x_max, alpha)
    t2_hi = work_time_to_reach(instance.x_min, instance.x_max, alpha)
    target = instance.t_horizon

    lo_budget = budget(instance, m, t1, t2_lo)
    if lo_budget > target + 1e-12:
        raise InfeasibleCombinationError(
            f"minimum-duration schedule for (m={m}, t1={t1!r}) already needs "
            f"{lo_budget!r} > T = {target!r}"
        )
    hi_budget = budget(instance, m, t1, t2_hi)
    if hi_budget < target:
        return BudgetRoot(t2=t2_hi, slack=target - hi_budget)

    lo, hi = t2_lo, t2_hi
    while hi - lo > _BISECT_TOL:
        mid = 0.5 * (lo + hi)
        if budget(instance, m, t1, mid) < target:
            lo = mid
        else:
            hi = mid
    t2 = 0.5 * (lo + hi)
    # Newton polish: d(budget)/d(t2) = (N - m) / pre_work_ratio.
    for _ in range(3):
        x_bar = policy2_pre_work_ratio(t2, instance.x_max, alpha)
        step = (budget(instance, m, t1, t2) - target) * x_bar / (instance.n - m)
        t2 = min(max(t2 - step, t2_lo), t2_hi)
    return BudgetRoot(t2=t2, slack=0.0)


def _golden_max(f: Callable[[float], float], lo: float, hi: float, tol: float) -> float:
    """Argmax of a unimodal ``f`` on [lo, hi] by golden-section search."""
    h = hi - lo
    if h <= tol:
        return 0.5 * (lo + hi)
    steps = int(math.ceil(math.log(tol / h) / math.log(_INV_PHI)))
    c = lo + _INV_PHI_SQ * h
    d = lo + _INV_PHI * h
    fc = f(c)
    fd = f(d)
    for _ in range(steps - 1):
        if fc > fd:
            hi = d
            d, fd = c, fc
            h = _INV_PHI * h
            c = lo + _INV_PHI_SQ * h
            fc = f(c)
        else:
            lo = c
            c, fc = d, fd
            h = _INV_PHI * h
            d = lo + _INV_PHI * h
            fd = f(d)
    return c if fc > fd else d


@dataclass
class _StructuredBest:
    m: int
    t1: float | None
    t2: float
    slack: float
    objective: float


def _structured_search(instance: ProblemInstance) -> tuple[_StructuredBest, list[Candidate]]:
    """Sweep the phase split m and maximize over t1 for each."""
    u = instance.utility
    n = instance.n
    work_to_ceiling = work_time_to_reach(instance.x0, instance.x_max, instance.alpha)

    candidates: list[Candidate] = []
    best: _StructuredBest | None = None

    for m in range(0, n):
        if m == 0:
            try:
                root = solve_t2_for_budget(instance, 0, 0.0)
            except InfeasibleCombinationError as exc:
                candidates.append(
                    Candidate(0, None, None, -math.inf, False, 0.0, False, str(exc))
                )
                continue
            objective = n * u.value(root.t2)
            boundary = abs(instance.x0 - instance.x_max) <= _BOUNDARY_TOL
            candidates.append(
                Candidate(0, None, root.t2, objective, boundary, root.slack, True)
            )
            if best is None or objective > best.objective + _TIE_TOL:
                best = _StructuredBest(0, None, root.t2, root.slack, objective)
            continue

        upper = work_to_ceiling / m
        if upper <= 0.0:
            candidates.append(
                Candidate(m, None, None, -math.inf, False, 0.0, False,
                          "start ratio already at x_max; no-rest phase is empty")
            )
            continue

        cache: dict[float, BudgetRoot] = {}

        def evaluate(t1: float, m: int = m) -> float:
            try:
                root = cache[t1]
            except KeyError:
                try:
                    root = solve_t2_for_budget(instance, m, t1)
                except InfeasibleCombinationError:
                    cache[t1] = BudgetRoot(t2=math.nan, slack=math.nan)
                    return -math.inf
                cache[t1] = root
            if math.isnan(root.t2):
                return -math.inf
            return m * u.value(t1) + (n - m) * u.value(root.t2)

        grid = [upper * k / _SCAN_POINTS for k in range(1, _SCAN_POINTS + 1)]
        values = [evaluate(t1) for t1 in grid]
        best_idx = max(range(len(grid)), key=lambda i: values[i])
        if math.isinf(values[best_idx]):
            candidates.append(
                Candidate(m, None, None, -math.inf, False, 0.0, False,
                          "no admissible t1 on the scan grid")
            )
            continue

        lo = grid[best_idx - 1] if best_idx > 0 else grid[0] * 1e-6
        hi = grid[best_idx + 1] if best_idx + 1 < len(grid) else grid[best_idx]
        t1_best = _golden_max(evaluate, lo, hi, _GOLDEN_TOL)
        # The x_max-boundary split is a distinct sub-case the golden search
        # may not land on exactly; always evaluate it explicitly.
        contenders = [grid[best_idx], t1_best, upper]
        t1_opt = max(contenders, key=evaluate)
        if t1_opt < upper * (1.0 - 1e-9):
            polished = _polish_interior_t1(instance, m, t1_opt, upper)
            if evaluate(polished) >= evaluate(t1_opt) - 1e-10:
                t1_opt = polished
        obj_opt = evaluate(t1_opt)
        root_opt = cache[t1_opt]
        x_m = _phase1_exit_ratio(instance, m, t1_opt)
        boundary = abs(x_m - instance.x_max) <= _BOUNDARY_TOL
        candidates.append(
            Candidate(m, t1_opt, root_opt.t2, obj_opt, boundary, root_opt.slack, True)
        )
        if best is None or obj_opt > best.objective + _TIE_TOL:
            best = _StructuredBest(m, t1_opt, root_opt.t2, root_opt.slack, obj_opt)

    if best is None:
        raise InternalSolverError(
            "no feasible structured candidate for any phase split; "
            f"candidates: {[c.to_dict() for c in candidates]}"
        )
    return best, candidates


def _stationarity_values(
    instance: ProblemInstance, m: int, t1: float, t2: float
) -> tuple[float, float]:
    """Both sides of the interior first-order balance.

    At an interior optimum the marginal utility of each phase, weighted by
    its time cost along the binding budget, must match:
    u'(t1) * exit_ratio = u'(t2) * pre_work_ratio.
    """
    u = instance.utility
    x_m = _phase1_exit_ratio(instance, m, t1)
    x_bar = policy2_pre_work_ratio(t2, instance.x_max, instance.alpha)
    return u.derivative(t1) * x_m, u.derivative(t2) * x_bar


def _stationarity_gap(instance: ProblemInstance, m: int, t1: float) -> float | None:
    """Signed first-order balance at (m, t1); None when off the interior domain."""
    try:
        root = solve_t2_for_budget(instance, m, t1)
    except InfeasibleCombinationError:
        return None
    if root.slack > 0.0:
        return None
    x_bar = policy2_pre_work_ratio(root.t2, instance.x_max, instance.alpha)
    if x_bar <= instance.x_min + _BOUNDARY_TOL:
        return None
    lhs, rhs = _stationarity_values(instance, m, t1, root.t2)
    return lhs - rhs


def _polish_interior_t1(
    instance: ProblemInstance, m: int, t1: float, upper: float
) -> float:
    """Secant refinement of an interior t1 on the first-order balance.

    Near saturation the objective can be flat at machine precision, so the
    golden search alone cannot pin the stationary point; zeroing the
    balance directly stays well conditioned because both of its sides are
    evaluated in closed form.
    """
    gap = _stationarity_gap(instance, m, t1)
    if gap is None:
        return t1
    scale = abs(instance.utility.derivative(t1)) + abs(gap)
    if scale == 0.0:
        return t1
    prev_t, prev_g = t1, gap
    cur_t = min(max(t1 * (1.0 + 1e-7) + 1e-12, 1e-12), upper)
    best_t, best_abs = t1, abs(gap)
    for _ in range(30):
        cur_g = _stationarity_gap(instance, m, cur_t)
        if cur_g is None or cur_g == prev_g:
            break
        if abs(cur_g) < best_abs:
            best_t, best_abs = cur_t, abs(cur_g)
        if abs(cur_g) <= 1e-13 * scale:
            break
        step = cur_g * (cur_t - prev_t) / (cur_g - prev_g)
        next_t = min(max(cur_t - step, 1e-12), upper)
        if next_t == cur_t:
            break
        prev_t, prev_g = cur_t, cur_g
        cur_t = next_t
    return best_t


def _assemble_structured(
    instance: ProblemInstance, best: _StructuredBest, candidates: list[Candidate]
) -> Solution:
    alpha = instance.alpha
    m = best.m
    t1 = best.t1
    t2 = best.t2
    x_m = _phase1_exit_ratio(instance, m, t1 if t1 is not None else 0.0)
    x_bar = policy2_pre_work_ratio(t2, instance.x_max, alpha)
    x_bar = min(x_bar, x_m)  # guard 1-ulp drift at the no-first-rest edge
    first_rest = rest_time_to_reach(x_m, x_bar, alpha)
    later_rest = rest_time_to_reach(instance.x_max, x_bar, alpha)
    boundary = abs(x_m - instance.x_max) <= _BOUNDARY_TOL

    pairs: list[tuple[float, float]] = [(0.0, t1) for _ in range(m)] if t1 is not None else []
    pairs.append((first_rest, t2))
    pairs.extend((later_rest, t2) for _ in range(instance.n - m - 1))
    schedule = Schedule.from_pairs(pairs)

    stationarity: float | None = None
    if (
        m >= 1
        and t1 is not None
        and not boundary
        and best.slack == 0.0
        and x_bar > instance.x_min + _BOUNDARY_TOL
    ):
        lhs, rhs = _stationarity_values(instance, m, t1, t2)
        denom = max(lhs, rhs)
        stationarity = abs(lhs - rhs) / denom if denom > 0.0 else 0.0

    flags = ("residual_slack",) if best.slack > 0.0 else ()
    return Solution(
        case=CaseLabel(tag=CaseTag.STRUCTURED, m=m, boundary=boundary),
        schedule=schedule,
        t1_tilde=t1,
        t2_tilde=t2,
        r1_tilde=None if boundary else first_rest,
        r2_tilde=later_rest,
        objective=total_utility(schedule, instance.utility),
        diagnostics=Diagnostics(
            candidates=tuple(candidates),
            stationarity_residual=stationarity,
            budget_residual=schedule.total_duration - instance.t_horizon,
            flags=flags,
        ),
    )


def solve(instance: ProblemInstance) -> Solution:
    """Compute the optimal schedule for ``instance``.

    Classifies the regime, runs the structured phase-split sweep when the
    budget binds and the ratio must end at x_max, and validates the result
    against the feasibility checker before returning.
    """
    greedy, greedy_total = greedy_saturating_schedule(instance)
    if greedy_total <= instance.t_horizon:
        solution = Solution(
            case=CaseLabel(tag=CaseTag.SLACK),
            schedule=greedy,
            t1_tilde=None,
            t2_tilde=greedy.segments[0].work,
            r1_tilde=greedy.segments[0].rest,
            r2_tilde=(
                greedy.segments[1].rest
                if instance.n > 1
                else rest_time_to_reach(instance.x_max, instance.x_min, instance.alpha)
            ),
            objective=total_utility(greedy, instance.utility),
            diagnostics=Diagnostics(
                candidates=(),
                stationarity_residual=None,
                budget_residual=greedy_total - instance.t_horizon,
            ),
        )
        return _validated(instance, solution)

    x_end = work_transition(instance.x0, instance.t_horizon, instance.alpha)
    if x_end < instance.x_max:
        share = instance.t_horizon / instance.n
        schedule = Schedule.from_pairs([(0.0, share)] * instance.n)
        solution = Solution(
            case=CaseLabel(tag=CaseTag.NO_REST_EQUAL_SPLIT),
            schedule=schedule,
            t1_tilde=share,
            t2_tilde=None,
            r1_tilde=None,
            r2_tilde=None,
            objective=total_utility(schedule, instance.utility),
            diagnostics=Diagnostics(
                candidates=(),
                stationarity_residual=None,
                budget_residual=schedule.total_duration - instance.t_horizon,
            ),
        )
        return _validated(instance, solution)

    best, candidates = _structured_search(instance)
    solution = _assemble_structured(instance, best, candidates)

    if x_end == instance.x_max:
        # Knife-edge between the regimes: working the whole horizon ends
        # exactly at x_max, so the even split is admissible too.
        share = instance.t_horizon / instance.n
        even = instance.n * instance.utility.value(share)
        if even > solution.objective + _TIE_TOL:
            schedule = Schedule.from_pairs([(0.0, share)] * instance.n)
            solution = Solution(
                case=CaseLabel(tag=CaseTag.NO_REST_EQUAL_SPLIT),
                schedule=schedule,
                t1_tilde=share,
                t2_tilde=None,
                r1_tilde=None,
                r2_tilde=None,
                objective=total_utility(schedule, instance.utility),
                diagnostics=Diagnostics(
                    candidates=tuple(candidates),
                    stationarity_residual=None,
                    budget_residual=schedule.total_duration - instance.t_horizon,
                ),
            )
    return _validated(instance, solution)


def _validated(instance: ProblemInstance, solution: Solution) -> Solution:
    report = check_feasibility(instance, solution.schedule, DEFAULT_FEASIBILITY_TOL)
    if not report.feasible:
        raise InternalSolverError(
            f"solver produced an infeasible schedule: {list(report.violations)}"
        )
    return solution


def classify_case(instance: ProblemInstance) -> CaseLabel:
    """Regime label of the optimal solution (runs the full solve when needed)."""
    _, greedy_total = greedy_saturating_schedule(instance)
    if greedy_total <= instance.t_horizon:
        return CaseLabel(tag=CaseTag.SLACK)
    x_end = work_transition(instance.x0, instance.t_horizon, instance.alpha)
    if x_end < instance.x_max:
        return CaseLabel(tag=CaseTag.NO_REST_EQUAL_SPLIT)
    return solve(instance).case


@dataclass(frozen=True)
class StationarityReport:
    """First-order optimality audit of an interior structured solution."""

    applicable: bool
    passed: bool | None
    residual: float | None
    lhs: float | None
    rhs: float | None
    reason: str | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "applicable": self.applicable,
            "passed": self.passed,
            "residual": self.residual,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "reason": self.reason,
        }


def verify_stationarity(
    instance: ProblemInstance, solution: Solution, tol: float
) -> StationarityReport:
    """Check the interior first-order balance of a structured solution.

    Only applicable to structured optima with a nonempty no-rest phase
    that stop short of x_max (interior t1) and rest strictly above x_min
    (interior t2); all other cases report not-applicable with a reason.
    """
    label = solution.case
    if label.tag is not CaseTag.STRUCTURED:
        return StationarityReport(False, None, None, None, None,
                                  f"case {label.tag.value} has no interior balance")
    if label.m is None or label.m < 1 or solution.t1_tilde is None:
        return StationarityReport(False, None, None, None, None,
                                  "no-rest phase is empty (m = 0)")
    if label.boundary:
        return StationarityReport(False, None, None, None, None,
                                  "no-rest phase ends exactly at x_max (boundary sub-case)")
    if "residual_slack" in solution.diagnostics.flags:
        return StationarityReport(False, None, None, None, None,
                                  "budget not binding for this schedule")
    x_bar = policy2_pre_work_ratio(solution.t2_tilde, instance.x_max, instance.alpha)
    if x_bar <= instance.x_min + _BOUNDARY_TOL:
        return StationarityReport(False, None, None, None, None,
                                  "pre-work ratio pinned at x_min")
    lhs, rhs = _stationarity_values(
        instance, label.m, solution.t1_tilde, solution.t2_tilde
    )
    denom = max(lhs, rhs)
    residual = abs(lhs - rhs) / denom if denom > 0.0 else 0.0
    return StationarityReport(True, residual <= tol, residual, lhs, rhs, None)


class Ordering(str, Enum):
    T1_GREATER = "t1_tilde > t2_tilde"
    T1_SMALLER = "t1_tilde < t2_tilde"
    EQUAL = "t1_tilde = t2_tilde"


@dataclass(frozen=True)
class Lemma5Report:
    """Predicted ordering of the two phase work times.

    ``branch`` records which rule produced the prediction: the boundary
    sub-case, the task-count test (N >= 2m), or the ratio comparison used
    when N < 2m.  The ratio branch carries a discrepancy flag whenever its
    prediction contradicts the interior first-order balance, which forces
    t1_tilde > t2_tilde for strictly concave utilities whenever the
    pre-work ratio sits below the no-rest exit ratio.
    """

    ordering: Ordering
    branch: str
    ratio_lhs: float | None = None
    ratio_rhs: float | None = None
    discrepancy: bool = False
    note: str | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "ordering": self.ordering.value,
            "branch": self.branch,
            "ratio_lhs": self.ratio_lhs,
            "ratio_rhs": self.ratio_rhs,
            "discrepancy": self.discrepancy,
            "note": self.note,
        }


def lemma5_classify(
    case: CaseLabel, n: int, m: int, x_m: float, x_bar: float
) -> Lemma5Report:
    """Predict the phase work-time ordering from the published rule, verbatim.

    Boundary evolutions predict t1_tilde > t2_tilde, as do non-boundary
    splits with N >= 2m.  For N < 2m the rule compares
    m * (1 - x_m) / x_m against (N - m) * (1 - x_bar) / x_bar.
    """
    if case.tag is not CaseTag.STRUCTURED:
        raise InvalidArgumentError("ordering prediction applies to STRUCTURED solutions only")
    if case.boundary:
        return Lemma5Report(ordering=Ordering.T1_GREATER, branch="boundary")
    if n >= 2 * m:
        return Lemma5Report(ordering=Ordering.T1_GREATER, branch="task_count")
    lhs = m * (1.0 - x_m) / x_m
    rhs = (n - m) * (1.0 - x_bar) / x_bar
    if abs(lhs - rhs) <= _TIE_TOL:
        ordering = Ordering.EQUAL
    elif lhs < rhs:
        ordering = Ordering.T1_GREATER
    else:
        ordering = Ordering.T1_SMALLER
    discrepancy = ordering is not Ordering.T1_GREATER and x_bar < x_m - _TIE_TOL
    note = None
    if discrepancy:
        note = (
            "ratio rule predicts the alternating phase works longer, but the "
            "interior first-order balance forces the no-rest phase to work "
            "longer whenever the pre-work ratio is below the no-rest exit ratio"
        )
    return Lemma5Report(
        ordering=ordering,
        branch="ratio",
        ratio_lhs=lhs,
        ratio_rhs=rhs,
        discrepancy=discrepancy,
        note=note,
    )
