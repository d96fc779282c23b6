"""Exception types raised across the package.

The CLI maps these onto exit codes, so every failure a user can provoke
should surface as one of them rather than a bare ``ValueError``.
"""


class TunnelCircuitError(Exception):
    """Base class for every error raised by this package."""


class DomainError(TunnelCircuitError, ValueError):
    """An input lies outside the range where an operation is defined."""


class RegimeViolationError(DomainError):
    """A potential leaves the tunneling regime ``0 < E < phi - U0``."""


class EvaluationError(TunnelCircuitError, ArithmeticError):
    """A numerical routine failed to converge or produced non-finite output."""


class SingularSystemError(EvaluationError):
    """A linear system expected to be regular has a vanishing determinant."""


class NumericalConsistencyError(EvaluationError):
    """A quantity that must be real (or conserved) is not, beyond roundoff."""


class NotAnEigenvalueError(EvaluationError):
    """The boundary matrix has no numerically isolated null direction."""


class RootNotFoundError(TunnelCircuitError):
    """No sign change of the eigenvalue residual was found in the bracket.

    ``extrema`` holds ``(min, max)`` of the coarse-scan residual so the caller
    can tell whether the bracket was close to a root.
    """

    def __init__(self, message: str, extrema: tuple[float, float]):
        super().__init__(message)
        self.extrema = extrema
