"""Exception types shared across the package."""

from __future__ import annotations


class SchedulingError(Exception):
    """Base class for all errors raised by this package."""


class InvalidArgumentError(SchedulingError, ValueError):
    """An argument violates a documented precondition."""


class UnreachableTargetError(SchedulingError, ValueError):
    """The requested target ratio cannot be reached in finite time."""


class SingularDerivativeError(SchedulingError, ValueError):
    """The utility derivative is not defined at the requested point."""


class InvalidInstanceError(SchedulingError, ValueError):
    """A problem instance violates its structural invariants."""


class InfeasibleCombinationError(SchedulingError):
    """A (phase split, processing time) combination admits no feasible schedule."""


class UnsupportedSizeError(SchedulingError, ValueError):
    """The requested operation does not support instances of this size."""


class InternalSolverError(SchedulingError, RuntimeError):
    """The solver reached a state that should be impossible for valid inputs."""
