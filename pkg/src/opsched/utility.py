"""Concave per-task utility families.

Three families are supported, all nondecreasing and concave on [0, inf):

* ``log_one_plus``       u(t) = ln(1 + t)
* ``exp_saturation``     u(t) = 1 - exp(-a * t),      a > 0
* ``rate_distortion``    u(t) = a / (1 + b / t),      a, b > 0, u(0) = 0

The reward for a task is the utility of its processing time; rest time
earns nothing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Protocol

from .errors import InvalidArgumentError, SingularDerivativeError

__all__ = ["UtilityFunction", "ValidationReport", "validate_utility", "FAMILIES"]

FAMILIES = ("log_one_plus", "exp_saturation", "rate_distortion")


@dataclass(frozen=True)
class UtilityFunction:
    """A concave utility family tag with its parameters."""

    family: str
    a: float | None = None
    b: float | None = None

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise InvalidArgumentError(
                f"unknown utility family {self.family!r}; expected one of {FAMILIES}"
            )
        if self.family == "log_one_plus":
            if self.a is not None or self.b is not None:
                raise InvalidArgumentError("log_one_plus takes no parameters")
        elif self.family == "exp_saturation":
            if self.a is None or not self.a > 0:
                raise InvalidArgumentError("exp_saturation requires a > 0")
            if self.b is not None:
                raise InvalidArgumentError("exp_saturation takes no b parameter")
        else:  # rate_distortion
            if self.a is None or not self.a > 0 or self.b is None or not self.b > 0:
                raise InvalidArgumentError("rate_distortion requires a > 0 and b > 0")

    def value(self, t: float) -> float:
        """Utility of processing time ``t``."""
        if math.isnan(t) or t < 0.0:
            raise InvalidArgumentError(f"processing time must be >= 0, got {t!r}")
        if self.family == "log_one_plus":
            return math.log1p(t)
        if self.family == "exp_saturation":
            return 1.0 - math.exp(-self.a * t)
        if t == 0.0:
            return 0.0  # continuous extension of a / (1 + b/t)
        return self.a / (1.0 + self.b / t)

    def derivative(self, t: float) -> float:
        """Marginal utility at processing time ``t``."""
        if math.isnan(t) or t < 0.0:
            raise InvalidArgumentError(f"processing time must be >= 0, got {t!r}")
        if self.family == "log_one_plus":
            return 1.0 / (1.0 + t)
        if self.family == "exp_saturation":
            return self.a * math.exp(-self.a * t)
        if t == 0.0:
            raise SingularDerivativeError(
                "rate_distortion derivative is not evaluated at t = 0"
            )
        return self.a * self.b / (t + self.b) ** 2

    def to_dict(self) -> dict[str, Any]:
        """Config form: ``{"family": ..., "a": ..., "b": ...}``, unused params omitted."""
        spec: dict[str, Any] = {"family": self.family}
        if self.a is not None:
            spec["a"] = self.a
        if self.b is not None:
            spec["b"] = self.b
        return spec

    @classmethod
    def from_dict(cls, spec: dict[str, Any]) -> UtilityFunction:
        if not isinstance(spec, dict) or "family" not in spec:
            raise InvalidArgumentError("utility spec must be an object with a 'family' key")
        extra = set(spec) - {"family", "a", "b"}
        if extra:
            raise InvalidArgumentError(f"unexpected utility spec keys: {sorted(extra)}")
        a = spec.get("a")
        b = spec.get("b")
        return cls(
            family=spec["family"],
            a=None if a is None else float(a),
            b=None if b is None else float(b),
        )


class _Evaluable(Protocol):
    def value(self, t: float) -> float: ...

    def derivative(self, t: float) -> float: ...


@dataclass(frozen=True)
class ValidationReport:
    """Grid check of the monotonicity and concavity a utility must satisfy."""

    monotone: bool
    concave: bool
    min_derivative: float
    max_second_difference: float
    t_max: float
    grid_points: int

    @property
    def passed(self) -> bool:
        return self.monotone and self.concave


def validate_utility(
    u: _Evaluable, t_max: float, grid_points: int, concavity_tol: float = 1e-9
) -> ValidationReport:
    """Check ``u`` numerically on a uniform grid over [0, t_max].

    Monotonicity requires a nonnegative derivative at every grid point;
    concavity requires every second central difference of the values to
    stay below ``concavity_tol``.  Failures are reported, not raised.
    """
    if not t_max > 0.0:
        raise InvalidArgumentError(f"t_max must be > 0, got {t_max!r}")
    if grid_points < 3:
        raise InvalidArgumentError(f"grid_points must be >= 3, got {grid_points}")

    h = t_max / (grid_points - 1)
    grid = [i * h for i in range(grid_points)]
    values = [u.value(t) for t in grid]

    min_derivative = math.inf
    for t in grid:
        try:
            d = u.derivative(t)
        except SingularDerivativeError:
            # One-sided slope at a singular endpoint of the derivative.
            d = (u.value(t + h) - u.value(t)) / h
        min_derivative = min(min_derivative, d)

    max_second = -math.inf
    for i in range(1, grid_points - 1):
        max_second = max(max_second, values[i - 1] - 2.0 * values[i] + values[i + 1])

    return ValidationReport(
        monotone=min_derivative >= 0.0,
        concave=max_second <= concavity_tol,
        min_derivative=min_derivative,
        max_second_difference=max_second,
        t_max=t_max,
        grid_points=grid_points,
    )
