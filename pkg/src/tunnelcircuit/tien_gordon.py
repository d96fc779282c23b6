"""Photon-assisted tunneling: sidebands, the Bessel summation identity and
the potential implied by the Tien-Gordon wavefunction.

A drive ``e V1 cos(wt)`` multiplies a static solution by the pure phase
``exp(-i alpha sin wt)`` with modulation index ``alpha = e V1 / (hbar w)``.
Expanding that phase gives sidebands at ``E + n hbar w`` weighted by
``J_n(alpha)``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError
from .model import CODATA2018, BarrierSpec, PhysicalConstants, airy_params_barrier
from .open_barrier import (
    WaveSample,
    barrier_wavefunction,
    current_density,
    solve_open_barrier,
    wavefunction_open,
)
from .specfun import BESSEL_MAX_ORDER, bessel_jn_sequence

__all__ = [
    "SidebandSet",
    "modulation_index",
    "sideband_amplitudes",
    "identity_check",
    "tg_phase_factor",
    "tg_current_time_independence",
    "implicit_potential",
    "potential_from_airy_curvature",
    "reconstructed_potential",
    "implied_barrier",
    "TRUNCATION_MARGIN",
]

TRUNCATION_MARGIN = 40


def modulation_index(v1: float, omega: float, constants: PhysicalConstants = CODATA2018) -> float:
    if not (math.isfinite(omega) and omega > 0):
        raise DomainError(f"omega must be > 0, got {omega!r} rad/s")
    if not math.isfinite(v1):
        raise DomainError(f"v1 must be finite, got {v1!r} V")
    return constants.e_charge * v1 / (constants.hbar * omega)


def _signed_sequence(n_max: int, alpha: float) -> dict[int, float]:
    pos = bessel_jn_sequence(n_max, alpha)
    out = {n: v for n, v in enumerate(pos)}
    for n in range(1, n_max + 1):
        out[-n] = -pos[n] if n % 2 else pos[n]
    return out


@dataclass(frozen=True)
class SidebandSet:
    alpha: float
    amplitudes: tuple[tuple[int, float], ...]
    n_max: int

    def power_sum(self) -> float:
        return math.fsum(v * v for _, v in self.amplitudes)

    def value(self, n: int) -> float:
        if abs(n) > self.n_max:
            raise DomainError(f"order {n} beyond retained n_max={self.n_max}")
        return self.amplitudes[n + self.n_max][1]


def sideband_amplitudes(
    v1: float, omega: float, n_max: int | None = None, constants: PhysicalConstants = CODATA2018
) -> SidebandSet:
    """``J_n(e V1 / hbar w)`` for ``-n_max <= n <= n_max``.

    ``n_max`` defaults to ``ceil(|alpha|) + 40``.
    """
    alpha = modulation_index(v1, omega, constants)
    if n_max is None:
        n_max = math.ceil(abs(alpha)) + TRUNCATION_MARGIN
    if int(n_max) != n_max or n_max < 1:
        raise DomainError(f"n_max must be an integer >= 1, got {n_max!r}")
    if n_max > BESSEL_MAX_ORDER:
        raise DomainError(f"n_max={n_max} exceeds the Bessel order cap {BESSEL_MAX_ORDER} (alpha={alpha:.6g})")
    n_max = int(n_max)
    seq = _signed_sequence(n_max, alpha)
    return SidebandSet(alpha, tuple((n, seq[n]) for n in range(-n_max, n_max + 1)), n_max)


def identity_check(alpha: float, beta: float, n_max: int) -> float:
    """``|sum_{|n|<=n_max} J_n(alpha) e^{-i n beta} - e^{-i alpha sin beta}|``.

    Real and imaginary parts are accumulated with ``math.fsum``.
    """
    if not (math.isfinite(alpha) and math.isfinite(beta)):
        raise DomainError("alpha and beta must be finite")
    n_max = int(n_max)
    if n_max < 0:
        raise DomainError(f"n_max must be >= 0, got {n_max}")
    if n_max > BESSEL_MAX_ORDER:
        raise DomainError(f"n_max={n_max} exceeds the Bessel order cap {BESSEL_MAX_ORDER}")
    seq = _signed_sequence(n_max, alpha) if n_max > 0 else {0: bessel_jn_sequence(0, alpha)[0]}
    re = math.fsum(v * math.cos(n * beta) for n, v in seq.items())
    im = math.fsum(-v * math.sin(n * beta) for n, v in seq.items())
    target = cmath.exp(-1j * alpha * math.sin(beta))
    return abs(complex(re - target.real, im - target.imag))


def tg_phase_factor(t: float, v1: float, omega: float, constants: PhysicalConstants = CODATA2018) -> complex:
    """``exp(-i alpha sin(wt))``."""
    alpha = modulation_index(v1, omega, constants)
    angle = alpha * math.sin(omega * t)
    return complex(math.cos(angle), -math.sin(angle))


def tg_current_time_independence(
    spec: BarrierSpec,
    v1: float,
    omega: float,
    t_samples: Iterable[float],
    x_samples: Sequence[float] | None = None,
    constants: PhysicalConstants = CODATA2018,
) -> float:
    """Largest relative gap between the driven and the static current density.

    The driven wavefunction is the static open-barrier solution times
    ``exp(-iEt/hbar) exp(-i alpha sin wt)``.  ``x_samples`` defaults to 31
    points over ``[-a, 2a]``.
    """
    sol = solve_open_barrier(spec, constants)
    if x_samples is None:
        x_samples = np.linspace(-spec.a, 2.0 * spec.a, 31)
    statics = [wavefunction_open(spec, sol, float(x)) for x in x_samples]
    ref = [current_density(s, constants) for s in statics]
    scale = max(abs(j) for j in ref)
    worst = 0.0
    for t in t_samples:
        energy_angle = -spec.energy * t / constants.hbar
        phase = complex(math.cos(energy_angle), math.sin(energy_angle)) * tg_phase_factor(t, v1, omega, constants)
        for s, j_static in zip(statics, ref):
            driven = WaveSample(s.x, s.psi * phase, s.dpsi_dx * phase)
            worst = max(worst, abs(current_density(driven, constants) - j_static) / scale)
    return worst


def implicit_potential(
    x: float, t: float, spec: BarrierSpec, v1: float, omega: float, constants: PhysicalConstants = CODATA2018
) -> float:
    """``phi + (1 - x/a) U0 + e V1 cos(wt)`` in J."""
    if not (0.0 <= x <= spec.a):
        raise DomainError(f"x={x!r} m outside the barrier [0, {spec.a!r}]")
    return spec.phi + (1.0 - x / spec.a) * spec.u0 + constants.e_charge * v1 * math.cos(omega * t)


def implied_barrier(spec: BarrierSpec) -> BarrierSpec:
    """Barrier whose static Airy solution produces :func:`implicit_potential`.

    The Airy offset ``a(1 + (phi - E)/U0)`` belongs to a slope running from
    ``phi + U0`` at x = 0 down to ``phi`` at x = a.
    """
    return spec.replace(phi=spec.phi + spec.u0)


def potential_from_airy_curvature(
    x: float, t: float, spec: BarrierSpec, v1: float, omega: float, constants: PhysicalConstants = CODATA2018
) -> float:
    """``E + e V1 cos(wt) + (hbar^2/2m)(B - x)/A^3`` using the Airy map of :func:`implied_barrier`."""
    params = airy_params_barrier(implied_barrier(spec), constants)
    curvature = constants.kinetic_scale * (params.b_offset - x) / params.a_scale**3
    return spec.energy + constants.e_charge * v1 * math.cos(omega * t) + curvature


def reconstructed_potential(
    x: float,
    t: float,
    spec: BarrierSpec,
    v1: float,
    omega: float,
    h: float | None = None,
    constants: PhysicalConstants = CODATA2018,
) -> complex:
    """``(i hbar dPsi/dt + (hbar^2/2m) d2Psi/dx2) / Psi`` for the driven barrier solution.

    The time term is exact (``E + e V1 cos wt``); the space term uses a
    central difference with step ``h`` (default ``a / 1e4``).
    """
    if not (0.0 <= x <= spec.a):
        raise DomainError(f"x={x!r} m outside the barrier [0, {spec.a!r}]")
    h = spec.a * 1e-4 if h is None else float(h)
    sol = solve_open_barrier(implied_barrier(spec), constants)
    lo, mid, hi = (barrier_wavefunction(sol, x + d).psi for d in (-h, 0.0, h))
    second = (lo - 2.0 * mid + hi) / (h * h)
    time_term = spec.energy + constants.e_charge * v1 * math.cos(omega * t)
    return time_term + constants.kinetic_scale * second / mid
