"""Optimal rest/work scheduling for a fatigue-limited operator.

A library and CLI that computes provably structured optimal schedules
for a sequence of identical tasks processed over a fixed horizon.  The
operator's utilization ratio rises exponentially toward 1 while working
and decays toward 0 while resting, and must stay inside a prescribed
band; the objective is a sum of concave per-task utilities of the
processing times.
"""

from __future__ import annotations

from .dynamics import (
    TraceSample,
    UtilizationTrace,
    rest_time_to_reach,
    rest_transition,
    rest_work_transition,
    trace,
    work_time_to_reach,
    work_transition,
)
from .errors import (
    InfeasibleCombinationError,
    InternalSolverError,
    InvalidArgumentError,
    InvalidInstanceError,
    SchedulingError,
    SingularDerivativeError,
    UnreachableTargetError,
    UnsupportedSizeError,
)
from .model import (
    FeasibilityReport,
    ProblemInstance,
    Schedule,
    Segment,
    TaskFeasibility,
    check_feasibility,
    total_utility,
)
from .oracle import (
    ComparisonReport,
    OracleConfig,
    compare,
    coordinate_ascent,
    grid_oracle,
    solution_from_schedule,
)
from .presets import REFERENCE_EXAMPLES, ReferenceExample
from .solver import (
    BudgetRoot,
    CaseLabel,
    CaseTag,
    Candidate,
    Diagnostics,
    Lemma5Report,
    Solution,
    StationarityReport,
    budget,
    classify_case,
    greedy_saturating_schedule,
    lemma5_classify,
    policy2_pre_work_ratio,
    solve,
    solve_t2_for_budget,
    verify_stationarity,
)
from .utility import UtilityFunction, ValidationReport, validate_utility

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # dynamics
    "rest_transition",
    "work_transition",
    "rest_work_transition",
    "work_time_to_reach",
    "rest_time_to_reach",
    "trace",
    "TraceSample",
    "UtilizationTrace",
    # utility
    "UtilityFunction",
    "ValidationReport",
    "validate_utility",
    # model
    "ProblemInstance",
    "Segment",
    "Schedule",
    "TaskFeasibility",
    "FeasibilityReport",
    "check_feasibility",
    "total_utility",
    # solver
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
    # oracle
    "OracleConfig",
    "grid_oracle",
    "coordinate_ascent",
    "solution_from_schedule",
    "ComparisonReport",
    "compare",
    # presets
    "ReferenceExample",
    "REFERENCE_EXAMPLES",
    # errors
    "SchedulingError",
    "InvalidArgumentError",
    "UnreachableTargetError",
    "SingularDerivativeError",
    "InvalidInstanceError",
    "InfeasibleCombinationError",
    "UnsupportedSizeError",
    "InternalSolverError",
]
