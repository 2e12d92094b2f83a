"""Bundled reference instances with independently verified optimal values.

Three small instances, one per regime of the structured optimum.  The
expected values were derived from the closed-form optimality conditions
(budget root plus first-order balance) and cross-checked against the
grid and ascent oracles; the reporting precision is four decimals, so
they are compared at 1e-3.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import ProblemInstance
from .utility import UtilityFunction

__all__ = ["ReferenceExample", "REFERENCE_EXAMPLES"]

_LOG1P = UtilityFunction(family="log_one_plus")


@dataclass(frozen=True)
class ReferenceExample:
    """A bundled instance plus the values its solution must reproduce."""

    key: str
    description: str
    instance: ProblemInstance
    expected: dict[str, float]
    tolerance: float = 1e-3


REFERENCE_EXAMPLES: tuple[ReferenceExample, ...] = (
    ReferenceExample(
        key="no-rest",
        description="short horizon, even no-rest split; the ratio never hits x_max",
        instance=ProblemInstance(
            n=3, t_horizon=7.0, alpha=0.125, x_min=0.4, x_max=0.85, x0=0.6,
            utility=_LOG1P,
        ),
        expected={
            "work_per_task": 2.3333,
            "rest_per_task": 0.0,
            "terminal_ratio": 0.8332,
        },
    ),
    ReferenceExample(
        key="boundary",
        description="two no-rest tasks land exactly on x_max, then one rested task",
        instance=ProblemInstance(
            n=3, t_horizon=8.8, alpha=0.125, x_min=0.4, x_max=0.85, x0=0.7,
            utility=_LOG1P,
        ),
        expected={
            "m": 2.0,
            "t1_tilde": 2.7726,
            "t2_tilde": 2.6740,
            "r2_tilde": 0.5808,
        },
    ),
    ReferenceExample(
        key="interior",
        description="two no-rest tasks stop short of x_max; a first rest precedes task 3",
        instance=ProblemInstance(
            n=3, t_horizon=7.4, alpha=0.125, x_min=0.4, x_max=0.85, x0=0.7,
            utility=_LOG1P,
        ),
        expected={
            "m": 2.0,
            "t1_tilde": 2.4013,
            "t2_tilde": 2.2610,
            "r1_tilde": 0.3364,
        },
    ),
)
