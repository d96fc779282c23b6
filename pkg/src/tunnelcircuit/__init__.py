"""Linear tunneling barriers, closed tunneling circuits and their drive response."""

from .closed_loop import ClosedLoopSolution, find_energy_eigenvalue, solve_coefficients
from .errors import (
    DomainError,
    EvaluationError,
    NotAnEigenvalueError,
    RegimeViolationError,
    RootNotFoundError,
    SingularSystemError,
    TunnelCircuitError,
)
from .model import CODATA2018, BarrierSpec, ClosedLoopSpec, PhysicalConstants
from .open_barrier import solve_open_barrier, transmission_probability
from .specfun import airy_all, airy_scaled, bessel_jn

__all__ = [
    "BarrierSpec",
    "ClosedLoopSpec",
    "ClosedLoopSolution",
    "CODATA2018",
    "PhysicalConstants",
    "DomainError",
    "EvaluationError",
    "NotAnEigenvalueError",
    "RegimeViolationError",
    "RootNotFoundError",
    "SingularSystemError",
    "TunnelCircuitError",
    "airy_all",
    "airy_scaled",
    "bessel_jn",
    "find_energy_eigenvalue",
    "solve_coefficients",
    "solve_open_barrier",
    "transmission_probability",
]

__version__ = "0.1.0"
