"""Open three-region tunneling problem through a linear barrier.

A unit-amplitude wave ``e^{i k1 x}`` arrives from x < 0, is partly reflected
(``R``), tunnels through ``0 <= x <= a`` where ``psi = C1 Ai + C2 Bi`` and
leaves as ``T e^{i k3 x}`` with ``k3 = sqrt(2m(E+U0))/hbar``.

The four matching conditions are solved by elimination on exponentially
rescaled unknowns ``u1 = C1 e^{-zeta_a}``, ``u2 = C2 e^{zeta_0}`` (``zeta`` is
the Airy scale exponent at the two barrier faces), which keeps the system
well conditioned even when Bi itself overflows, e.g. for nearly flat
barriers.  The closed-form coefficients are kept as an independent check.

Sign convention at x = a: continuity of the derivative reads
``C1 Ai' + C2 Bi' + A P2 P3 T = 0``; the closed forms below are written for
that sign.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import NumericalConsistencyError, SingularSystemError
from .linalg import solve_dense
from .model import (
    CODATA2018,
    AiryParams,
    BarrierSpec,
    PhysicalConstants,
    airy_params_barrier,
    wavevector_k1,
    wavevector_k3,
)
from .specfun import airy_all, airy_scale_exponent, airy_scaled

__all__ = [
    "OpenBarrierSolution",
    "WaveSample",
    "solve_open_barrier",
    "transmission_probability",
    "wavefunction_open",
    "barrier_wavefunction",
    "current_density",
    "static_current_density",
    "closed_form_coefficients",
    "boundary_residuals",
    "tunneling_probability_closed_form",
    "printed_tunneling_probability",
]


@dataclass(frozen=True)
class WaveSample:
    x: float
    psi: complex
    dpsi_dx: complex


def _scaled_exp(value: complex, exponent: float) -> complex:
    # value * e^exponent, saturating to inf/0 instead of raising
    if value == 0:
        return 0j
    try:
        return value * math.exp(exponent)
    except OverflowError:
        return complex(math.copysign(math.inf, value.real), math.copysign(math.inf, value.imag))


@dataclass(frozen=True)
class OpenBarrierSolution:
    """Coefficients of the open-barrier solution (unit incident amplitude).

    ``c1``/``c2`` may saturate to inf or 0 for extremely flat barriers; the
    scaled fields are always finite and are what the wavefunction uses.
    ``d`` is the common denominator of the closed forms, likewise
    ``d_scaled * exp(d_exponent)``.
    """

    r: complex
    t: complex
    p1: complex
    p2: complex
    p3: complex
    u1: complex
    u2: complex
    d_scaled: complex
    zeta_0: float
    zeta_a: float
    airy: AiryParams
    k1: float
    k3: float

    @property
    def c1(self) -> complex:
        return _scaled_exp(self.u1, self.zeta_a)

    @property
    def c2(self) -> complex:
        return _scaled_exp(self.u2, -self.zeta_0)

    @property
    def d_exponent(self) -> float:
        return self.zeta_0 - self.zeta_a

    @property
    def d(self) -> complex:
        return _scaled_exp(self.d_scaled, self.d_exponent)

    @property
    def transmission(self) -> float:
        return self.t.real * self.t.real + self.t.imag * self.t.imag

    @property
    def reflection(self) -> float:
        return self.r.real * self.r.real + self.r.imag * self.r.imag


def _face_values(spec: BarrierSpec, constants: PhysicalConstants):
    params = airy_params_barrier(spec, constants)
    z0 = params.argument(0.0)
    za = params.argument(spec.a)
    return params, z0, za, airy_scaled(z0), airy_scaled(za)


def solve_open_barrier(spec: BarrierSpec, constants: PhysicalConstants = CODATA2018) -> OpenBarrierSolution:
    """Solve the four matching conditions for ``(C1, C2, R, T)``.

    Raises
    ------
    SingularSystemError
        If the scaled denominator vanishes (never for a valid spec).
    """
    params, z0, za, s0, sa = _face_values(spec, constants)
    zeta_0, zeta_a = airy_scale_exponent(z0), airy_scale_exponent(za)
    delta = math.exp(-(zeta_0 - zeta_a))
    k1 = wavevector_k1(spec.energy, constants)
    k3 = wavevector_k3(spec, constants)
    p1, p2, p3 = 1j * k1, 1j * k3, cmath.exp(1j * k3 * spec.a)
    big_a = params.a_scale

    d_scaled = (s0.bi_prime - big_a * p1 * s0.bi) * (sa.ai_prime + big_a * p2 * sa.ai) - delta * delta * (
        s0.ai_prime - big_a * p1 * s0.ai
    ) * (sa.bi_prime + big_a * p2 * sa.bi)
    if abs(d_scaled) < 1e-300:
        raise SingularSystemError(f"open-barrier denominator vanishes for {spec.as_ev()}")

    matrix = [
        [delta * s0.ai, s0.bi, -1.0, 0.0],
        [sa.ai, delta * sa.bi, 0.0, -p3],
        [delta * s0.ai_prime, s0.bi_prime, -big_a * p1, 0.0],
        [sa.ai_prime, delta * sa.bi_prime, 0.0, big_a * p2 * p3],
    ]
    rhs = [1.0, 0.0, -big_a * p1, 0.0]
    try:
        u1, u2, r, t = solve_dense(matrix, rhs)
    except SingularSystemError as exc:
        raise SingularSystemError(f"{exc} for {spec.as_ev()}") from exc
    return OpenBarrierSolution(
        r=complex(r),
        t=complex(t),
        p1=p1,
        p2=p2,
        p3=p3,
        u1=complex(u1),
        u2=complex(u2),
        d_scaled=complex(d_scaled),
        zeta_0=zeta_0,
        zeta_a=zeta_a,
        airy=params,
        k1=k1,
        k3=k3,
    )


def transmission_probability(spec: BarrierSpec, constants: PhysicalConstants = CODATA2018) -> float:
    """``T T*`` from the solved transmission coefficient."""
    return solve_open_barrier(spec, constants).transmission


def boundary_residuals(spec: BarrierSpec, c1, c2, r, t, constants: PhysicalConstants = CODATA2018) -> list[float]:
    """Relative residuals of the four matching equations for given coefficients.

    Uses unscaled Airy values, so the barrier arguments must be <= 100.
    """
    params = airy_params_barrier(spec, constants)
    f0 = airy_all(params.argument(0.0))
    fa = airy_all(params.argument(spec.a))
    k1 = wavevector_k1(spec.energy, constants)
    k3 = wavevector_k3(spec, constants)
    ap1 = params.a_scale * 1j * k1
    ap2 = params.a_scale * 1j * k3
    p3 = cmath.exp(1j * k3 * spec.a)
    rows = [
        (c1 * f0.ai, c2 * f0.bi, -r, -1.0),
        (c1 * fa.ai, c2 * fa.bi, -p3 * t),
        (c1 * f0.ai_prime, c2 * f0.bi_prime, -ap1 * r, ap1),
        (c1 * fa.ai_prime, c2 * fa.bi_prime, ap2 * p3 * t),
    ]
    out = []
    for terms in rows:
        scale = sum(abs(v) for v in terms)
        out.append(abs(sum(terms)) / scale)
    return out


def closed_form_coefficients(spec: BarrierSpec, constants: PhysicalConstants = CODATA2018) -> dict[str, complex]:
    """``C1, C2, R, T, D`` from the explicit formulas (unscaled Airy values).

    Only usable while the barrier Airy arguments stay <= 100.
    """
    params = airy_params_barrier(spec, constants)
    f0 = airy_all(params.argument(0.0))
    fa = airy_all(params.argument(spec.a))
    big_a = params.a_scale
    p1 = 1j * wavevector_k1(spec.energy, constants)
    p2 = 1j * wavevector_k3(spec, constants)
    p3 = cmath.exp(1j * p2.imag * spec.a)
    d = (f0.bi_prime - big_a * p1 * f0.bi) * (fa.ai_prime + big_a * p2 * fa.ai) - (
        f0.ai_prime - big_a * p1 * f0.ai
    ) * (fa.bi_prime + big_a * p2 * fa.bi)
    bracket_1 = fa.bi_prime + big_a * p2 * fa.bi
    bracket_2 = -big_a * p2 * fa.ai - fa.ai_prime
    c1 = 2 * big_a * p1 / d * bracket_1
    c2 = 2 * big_a * p1 / d * bracket_2
    r = c1 * f0.ai + c2 * f0.bi - 1
    t = 2 * big_a * p1 / (p3 * d) * (bracket_1 * fa.ai + bracket_2 * fa.bi)
    return {"c1": c1, "c2": c2, "r": r, "t": t, "d": d}


def tunneling_probability_closed_form(spec: BarrierSpec, constants: PhysicalConstants = CODATA2018) -> float:
    """``|T|^2 = 4 A^2 |P1|^2 W^2 / (|P3|^2 |D|^2)`` with ``W = Ai Bi' - Ai' Bi``.

    ``W`` is evaluated at the exit face ``(B - a)/A``.  Works in scaled form,
    so it is valid for any barrier the solver accepts.
    """
    sol = solve_open_barrier(spec, constants)
    _, _, _, _, sa = _face_values(spec, constants)
    w = sa.wronskian()
    delta = math.exp(-sol.d_exponent)
    num = 4 * sol.airy.a_scale**2 * abs(sol.p1) ** 2 * w * w * delta * delta
    return num / (abs(sol.p3) ** 2 * abs(sol.d_scaled) ** 2)


def printed_tunneling_probability(spec: BarrierSpec, constants: PhysicalConstants = CODATA2018) -> complex:
    """The tunneling formula exactly as usually printed: ``4A^2 W^2 / (P3^2 D D*)``.

    It lacks the ``|P1|^2`` factor and uses ``P3^2`` where ``|P3|^2`` belongs;
    kept only to quantify that discrepancy.
    """
    sol = solve_open_barrier(spec, constants)
    _, _, _, _, sa = _face_values(spec, constants)
    w = sa.wronskian()
    delta = math.exp(-sol.d_exponent)
    return 4 * sol.airy.a_scale**2 * w * w * delta * delta / (sol.p3**2 * abs(sol.d_scaled) ** 2)


def wavefunction_open(spec: BarrierSpec, solution: OpenBarrierSolution, x: float) -> WaveSample:
    """psi and dpsi/dx at ``x`` (m); Airy form on the closed interval ``[0, a]``."""
    x = float(x)
    if x < 0:
        k1 = solution.k1
        inc = cmath.exp(1j * k1 * x)
        ref = solution.r / inc
        return WaveSample(x, inc + ref, 1j * k1 * (inc - ref))
    if x > spec.a:
        psi = solution.t * cmath.exp(1j * solution.k3 * x)
        return WaveSample(x, psi, 1j * solution.k3 * psi)
    return barrier_wavefunction(solution, x)


def barrier_wavefunction(solution: OpenBarrierSolution, x: float) -> WaveSample:
    """The Airy combination ``C1 Ai + C2 Bi`` at any ``x``, ignoring region limits.

    Useful for finite-difference stencils that straddle the barrier faces.
    """
    x = float(x)
    params = solution.airy
    z = params.argument(x)
    f = airy_scaled(z)
    zeta = airy_scale_exponent(z)
    wa = solution.u1 * math.exp(solution.zeta_a - zeta)
    wb = solution.u2 * math.exp(zeta - solution.zeta_0)
    psi = wa * f.ai + wb * f.bi
    dpsi = -(wa * f.ai_prime + wb * f.bi_prime) / params.a_scale
    return WaveSample(x, psi, dpsi)


def current_density(sample: WaveSample, constants: PhysicalConstants = CODATA2018) -> float:
    """Electrical current density ``(-i e hbar / 2m)(psi psi*' - psi* psi')``."""
    psi, dpsi = sample.psi, sample.dpsi_dx
    bracket = psi * dpsi.conjugate() - psi.conjugate() * dpsi
    j = -1j * constants.e_charge * constants.hbar / (2.0 * constants.m_e) * bracket
    if abs(j.imag) > 1e-12 * abs(j) + 1e-300:
        raise NumericalConsistencyError(f"current density has imaginary part {j.imag!r} at x={sample.x!r}")
    return j.real


def static_current_density(spec: BarrierSpec, constants: PhysicalConstants = CODATA2018) -> float:
    """Current density of the open-barrier state, evaluated at the exit face."""
    sol = solve_open_barrier(spec, constants)
    return current_density(barrier_wavefunction(sol, spec.a), constants)
