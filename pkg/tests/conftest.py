"""Shared fixtures: reference instances and a seeded instance sampler."""

from __future__ import annotations

import numpy as np
import pytest

from opsched import (
    ProblemInstance,
    UtilityFunction,
    greedy_saturating_schedule,
    work_time_to_reach,
)
from opsched.presets import REFERENCE_EXAMPLES

LOG1P = UtilityFunction(family="log_one_plus")


@pytest.fixture
def example_no_rest() -> ProblemInstance:
    return REFERENCE_EXAMPLES[0].instance


@pytest.fixture
def example_boundary() -> ProblemInstance:
    return REFERENCE_EXAMPLES[1].instance


@pytest.fixture
def example_interior() -> ProblemInstance:
    return REFERENCE_EXAMPLES[2].instance


def sample_instance(
    rng: np.random.Generator,
    n_choices: tuple[int, ...],
    index: int,
    families: tuple[str, ...] = ("log_one_plus", "exp_saturation", "rate_distortion"),
) -> ProblemInstance:
    """Random instance cycling through horizon regimes and utility families.

    Horizon regimes alternate slack / binding-structured / binding-no-rest
    so every solver branch is exercised.
    """
    x_min = float(rng.uniform(0.2, 0.5))
    x_max = float(rng.uniform(0.7, 0.95))
    alpha = float(rng.uniform(0.05, 0.5))
    x0 = float(rng.uniform(x_min, x_max))
    n = int(rng.choice(n_choices))

    family = families[index % len(families)]
    if family == "log_one_plus":
        utility = UtilityFunction(family=family)
    elif family == "exp_saturation":
        utility = UtilityFunction(family=family, a=float(rng.uniform(0.2, 2.0)))
    else:
        utility = UtilityFunction(
            family=family, a=float(rng.uniform(0.5, 2.0)), b=float(rng.uniform(0.5, 2.0))
        )

    probe = ProblemInstance(
        n=n, t_horizon=1.0, alpha=alpha, x_min=x_min, x_max=x_max, x0=x0, utility=utility
    )
    _, greedy_total = greedy_saturating_schedule(probe)
    w1 = work_time_to_reach(x0, x_max, alpha)
    regime = index % 3
    if regime == 0:
        t_horizon = greedy_total * float(rng.uniform(1.01, 1.4))
    elif regime == 1:
        t_horizon = float(rng.uniform(w1 * 1.0001 + 1e-9, max(greedy_total * 0.999, w1 * 1.01)))
    else:
        t_horizon = w1 * float(rng.uniform(0.2, 0.98))
    return ProblemInstance(
        n=n,
        t_horizon=float(t_horizon),
        alpha=alpha,
        x_min=x_min,
        x_max=x_max,
        x0=x0,
        utility=utility,
    )
