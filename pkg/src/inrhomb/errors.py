"""Exception taxonomy.

HypothesisViolationError groups every solver-level failure that, on a body
satisfying the inscribing hypotheses (regularity, no special corners), cannot
occur; the CLI maps it to its own exit code and points the user at the
diagnostics subcommand.
"""


class InrhombError(Exception):
    """Base class for all package errors."""


class ContractError(InrhombError):
    """A documented precondition was violated (dimensions, bounds, ...)."""


class NumericError(InrhombError):
    """Non-finite values or a numerically impossible configuration."""


class DegenerateFrameError(ContractError):
    """Rows could not be orthonormalised (rank deficiency)."""


class FiberDegenerateError(InrhombError):
    """A fiber expected to be a chord was tangent or empty."""


class OutsideShadowError(InrhombError):
    """Reduced coordinates fell outside the shadow of the body."""


class ConvergenceFailureError(InrhombError):
    """An iterative search stagnated; carries the best iterate found."""

    def __init__(self, message, best=None, value=None):
        super().__init__(message)
        self.best = best
        self.value = value


class MirandaPreconditionError(ContractError):
    """Face sign condition failed on the initial box."""

    def __init__(self, axis, side, point, value):
        super().__init__(
            f"sign condition violated on axis {axis} ({side} face): "
            f"field value {value:.3e} at {point}")
        self.axis = axis
        self.side = side
        self.point = point
        self.value = value


class HypothesisViolationError(InrhombError):
    """Solver failure consistent with a violated inscribing hypothesis."""


class SearchExhaustedError(HypothesisViolationError):
    """Every sub-box was rejected; carries the best sampled point."""

    def __init__(self, message, best_point=None, best_residual=None):
        super().__init__(message)
        self.best_point = best_point
        self.best_residual = best_residual


class DegenerateIntersectionError(HypothesisViolationError):
    """The located intersection point has a degenerate fiber (lies on the
    boundary sphere), which cannot happen for conforming bodies."""


class InscriptionError(HypothesisViolationError):
    """The extracted rhomb failed post-verification."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
