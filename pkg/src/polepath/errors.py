"""Exception types raised by the numerical layers.

Every failure carries enough state for the caller to decide what to do next
(retry with a perturbed contour, shrink a step, hand off to the degeneracy
solver).
"""

from __future__ import annotations


class PolepathError(Exception):
    """Base class for all numerical failures in this package."""


class GammaPoleError(PolepathError, ZeroDivisionError):
    """Argument sits on a pole of the gamma function."""

    def __init__(self, z: complex):
        super().__init__(f"gamma function pole at z = {z}")
        self.z = z


class AccuracyError(PolepathError):
    """A series or quadrature did not reach its accuracy target."""


class RecursionSingularError(PolepathError):
    """Series recursion denominator vanishes (k sits on a fixed zero)."""

    def __init__(self, k: complex, n: int):
        super().__init__(f"series recursion singular at k = {k} (fixed zero n = {n})")
        self.k = k
        self.n = n


class ConvergenceError(PolepathError):
    """Iteration did not converge; ``last`` holds the final iterate."""

    def __init__(self, message: str, last=None):
        super().__init__(message)
        self.last = last


class NearDegeneracyError(PolepathError):
    """Derivative vanished relative to the function scale (double root nearby)."""

    def __init__(self, message: str, k: complex | None = None):
        super().__init__(message)
        self.k = k


class IllConditionedError(PolepathError):
    """Jacobian of the degeneracy system is numerically singular."""

    def __init__(self, message: str, last=None, condition: float = float("inf")):
        super().__init__(message)
        self.last = last
        self.condition = condition


class ContourTooCoarseError(PolepathError):
    """Argument-principle contour could not be resolved."""


class SMatrixPoleError(PolepathError, ZeroDivisionError):
    """S-matrix evaluated at (or numerically on top of) a pole."""


class StepUnderflowError(PolepathError):
    """Continuation step shrank below its floor; a degeneracy is nearby.

    ``bracket`` is the parameter interval (last accepted, failed target) and
    ``k`` the last accepted root.
    """

    def __init__(self, message: str, bracket: tuple[float, float], k: complex):
        super().__init__(message)
        self.bracket = bracket
        self.k = k


class LostPoleError(PolepathError):
    """Homotopy in the potential strength lost track of a labelled pole."""

    def __init__(self, message: str, n: int):
        super().__init__(message)
        self.n = n


class ConfigError(PolepathError, ValueError):
    """Invalid run configuration."""
