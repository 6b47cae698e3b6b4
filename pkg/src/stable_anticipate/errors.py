"""Exception taxonomy shared across the package.

Every error that names a parameter carries it in ``field`` so callers
(and the CLI) can report which input was at fault without parsing
messages.
"""

from __future__ import annotations


class StableAnticipateError(Exception):
    """Base class for all package errors."""


class ParameterError(StableAnticipateError, ValueError):
    """A parameter value violates its admissible range."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class DomainError(StableAnticipateError, ValueError):
    """An evaluation point lies outside the domain of the requested quantity."""


class DivergenceError(StableAnticipateError, ValueError):
    """The requested integral diverges (integrand not integrable)."""


class NumericalError(StableAnticipateError, ArithmeticError):
    """A numerical routine failed to reach its target accuracy.

    Carries the best partial value and the achieved error estimate so a
    caller can decide whether the partial result is still usable.
    """

    def __init__(self, message: str, partial_value: float | None = None,
                 err_estimate: float | None = None):
        self.partial_value = partial_value
        self.err_estimate = err_estimate
        detail = message
        if partial_value is not None:
            detail += f" (partial value {partial_value!r}, err estimate {err_estimate!r})"
        super().__init__(detail)


class MomentExistenceError(StableAnticipateError, ValueError):
    """The requested moment quantity does not exist for these parameters."""

    def __init__(self, message: str | None = None, *, p: int | None = None,
                 alpha: float | None = None, required: str | None = None):
        self.p = p
        self.alpha = alpha
        self.required = required
        if message is None:
            message = (f"conditional moment of order {p} requires alpha in "
                       f"{required}; got alpha={alpha}")
        super().__init__(message)


class InsufficientDataError(StableAnticipateError, RuntimeError):
    """Too few Monte Carlo hits fell in the conditioning bin."""

    def __init__(self, n_hits: int, floor: int, half_width: float, n_paths: int):
        self.n_hits = n_hits
        self.floor = floor
        self.half_width = half_width
        self.n_paths = n_paths
        super().__init__(
            f"only {n_hits} pairs hit the conditioning bin (floor {floor}); "
            f"increase half_width (now {half_width}) or n_paths (now {n_paths})")


class UnsupportedError(StableAnticipateError, NotImplementedError):
    """The combination of model and operation has no formula to implement."""


class DegenerateModelError(StableAnticipateError, ValueError):
    """The model definition collapses to a degenerate process."""
