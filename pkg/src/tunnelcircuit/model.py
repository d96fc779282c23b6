"""Physical constants, unit conversion, parameter records and Airy maps.

All arithmetic is SI.  The ``from_ev`` constructors are the boundary where
eV and nm are accepted.

Geometry (x in metres):

* barrier (tunneling junction), ``0 <= x <= a``: ``U(x) = phi - U0 x / a``
* battery, ``-S <= x <= a``: ``U(x) = -U0 (S + x) / (S + a)``

Each linear segment maps onto the Airy equation through
``psi(x) = c Ai((B - x)/A) + d Bi((B - x)/A)``; :class:`AiryParams` holds
``A`` (``a_scale``) and ``B`` (``b_offset``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, RegimeViolationError

__all__ = [
    "PhysicalConstants",
    "CODATA2018",
    "EV",
    "NM",
    "ev_to_joule",
    "joule_to_ev",
    "nm_to_m",
    "m_to_nm",
    "BarrierSpec",
    "ClosedLoopSpec",
    "AiryParams",
    "wavevector_k1",
    "wavevector_k3",
    "de_broglie_wavelength",
    "airy_params_barrier",
    "airy_params_battery",
    "battery_params",
    "REGIME_MARGIN_EV",
]

EV = 1.602176634e-19
NM = 1.0e-9
REGIME_MARGIN_EV = 1e-12


@dataclass(frozen=True)
class PhysicalConstants:
    hbar: float
    m_e: float
    e_charge: float

    def __post_init__(self):
        for name in ("hbar", "m_e", "e_charge"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"constant {name} must be positive and finite, got {value!r}")

    @property
    def h(self) -> float:
        return 2.0 * math.pi * self.hbar

    @property
    def kinetic_scale(self) -> float:
        """hbar^2 / 2m, in J m^2."""
        return self.hbar**2 / (2.0 * self.m_e)


CODATA2018 = PhysicalConstants(hbar=1.054571817e-34, m_e=9.1093837015e-31, e_charge=1.602176634e-19)


def ev_to_joule(value: float) -> float:
    return value * EV


def joule_to_ev(value: float) -> float:
    return value / EV


def nm_to_m(value: float) -> float:
    return value * NM


def m_to_nm(value: float) -> float:
    return value / NM


@dataclass(frozen=True)
class BarrierSpec:
    """Linear tunneling barrier: work function, bias drop, length, energy (SI).

    ``margin`` is the strictness of the regime check, in joules.
    """

    phi: float
    u0: float
    a: float
    energy: float
    margin: float = REGIME_MARGIN_EV * EV

    def __post_init__(self):
        for name in ("phi", "u0", "a", "energy"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise DomainError(f"{name} must be finite, got {value!r}")
        if self.u0 <= self.margin:
            raise DomainError(f"u0 must be > 0, got {joule_to_ev(self.u0)!r} eV")
        if self.a <= 0:
            raise DomainError(f"barrier length a must be > 0, got {self.a!r} m")
        ceiling = self.phi - self.u0
        if not (self.margin < self.energy < ceiling - self.margin):
            raise RegimeViolationError(
                "tunneling regime requires 0 < E < phi - U0; got "
                f"E={joule_to_ev(self.energy)!r} eV, phi - U0={joule_to_ev(ceiling)!r} eV"
            )

    @classmethod
    def from_ev(cls, phi: float, u0: float, a_nm: float, energy: float) -> "BarrierSpec":
        return cls(ev_to_joule(phi), ev_to_joule(u0), nm_to_m(a_nm), ev_to_joule(energy))

    def replace(self, **changes) -> "BarrierSpec":
        fields = {"phi": self.phi, "u0": self.u0, "a": self.a, "energy": self.energy, "margin": self.margin}
        fields.update(changes)
        return BarrierSpec(**fields)

    def as_ev(self) -> dict[str, float]:
        return {
            "phi_ev": joule_to_ev(self.phi),
            "u0_ev": joule_to_ev(self.u0),
            "a_nm": m_to_nm(self.a),
            "energy_ev": joule_to_ev(self.energy),
        }


@dataclass(frozen=True)
class AiryParams:
    a_scale: float
    b_offset: float

    def __post_init__(self):
        if not self.a_scale > 0:
            raise DomainError(f"Airy length scale must be positive, got {self.a_scale!r}")

    def argument(self, x: float) -> float:
        return (self.b_offset - x) / self.a_scale


def wavevector_k1(energy: float, constants: PhysicalConstants = CODATA2018) -> float:
    """Free-electron wavevector sqrt(2 m E)/hbar for ``energy`` in J."""
    if not energy > 0:
        raise DomainError(f"energy must be > 0, got {energy!r} J")
    return math.sqrt(2.0 * constants.m_e * energy) / constants.hbar


def wavevector_k3(spec: BarrierSpec, constants: PhysicalConstants = CODATA2018) -> float:
    """Wavevector beyond the barrier, where the kinetic energy is E + U0."""
    return wavevector_k1(spec.energy + spec.u0, constants)


def de_broglie_wavelength(energy: float, constants: PhysicalConstants = CODATA2018) -> float:
    return 2.0 * math.pi / wavevector_k1(energy, constants)


def airy_params_barrier(spec: BarrierSpec, constants: PhysicalConstants = CODATA2018) -> AiryParams:
    a_scale = (constants.kinetic_scale * spec.a / spec.u0) ** (1.0 / 3.0)
    b_offset = (spec.phi - spec.energy) * spec.a / spec.u0
    return AiryParams(a_scale, b_offset)


def battery_params(spec: BarrierSpec, s: float, constants: PhysicalConstants = CODATA2018) -> AiryParams:
    """Airy map of the battery segment for an arbitrary pre-barrier length ``s``."""
    if not s > 0:
        raise DomainError(f"pre-barrier length must be > 0, got {s!r} m")
    span = s + spec.a
    a_scale = (constants.kinetic_scale * span / spec.u0) ** (1.0 / 3.0)
    b_offset = -span * spec.energy / spec.u0 - s
    return AiryParams(a_scale, b_offset)


@dataclass(frozen=True)
class ClosedLoopSpec:
    """Barrier plus pre-barrier length ``s`` (m) and mode index ``n``.

    ``s`` must satisfy ``k1 s = n pi``; use :meth:`for_mode` to build one.
    """

    barrier: BarrierSpec
    s: float
    n: int
    constants: PhysicalConstants = CODATA2018

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"mode index n must be a positive integer, got {self.n!r}")
        if not (math.isfinite(self.s) and self.s > 0):
            raise DomainError(f"pre-barrier length must be > 0, got {self.s!r} m")
        k1 = wavevector_k1(self.barrier.energy, self.constants)
        target = self.n * math.pi
        if abs(k1 * self.s - target) > 1e-9 * target:
            raise DomainError(f"k1 S = {k1 * self.s!r} is not n pi = {target!r} within 1e-9 relative")

    @classmethod
    def for_mode(cls, barrier: BarrierSpec, n: int, constants: PhysicalConstants = CODATA2018) -> "ClosedLoopSpec":
        if int(n) != n or n < 1:
            raise DomainError(f"mode index n must be a positive integer, got {n!r}")
        s = n * math.pi / wavevector_k1(barrier.energy, constants)
        return cls(barrier, s, int(n), constants)

    @property
    def k1(self) -> float:
        return wavevector_k1(self.barrier.energy, self.constants)


def airy_params_battery(spec: ClosedLoopSpec) -> AiryParams:
    return battery_params(spec.barrier, spec.s, spec.constants)
