"""Closed-loop circuit: free pre-barrier, Airy barrier, Airy battery.

Coordinates: Region 1 (free, ``-S < x < 0``), Region 2 (barrier,
``0 < x < a``) and Region 3 (battery, its own copy of ``-S <= x <= a``).
Wavefunction and derivative are matched at x = 0 (1|2), x = a (2|3) and
x = -S (3|1), giving a homogeneous 6x6 system in C1..C6.

Three descriptions of the same system are kept apart on purpose:

* :func:`boundary_matrix` - the complex matrix exactly as the six matching
  equations are written (columns C1..C6).
* :func:`standing_wave_matrix` - the same rows with the Region-1 unknowns
  rewritten as ``psi_1 = alpha cos(k1 x) + beta sin(k1 x)``.  Every entry is
  real, so ``det M = 2i det M_real`` and null vectors are real.
* :func:`loop_residual` - ``det(Phi_path - Phi_battery)`` with 2x2 transfer
  matrices from x = -S to x = a.  Zero exactly where the 6x6 system is
  singular; used by the eigenvalue search.

:func:`determinant_residual` evaluates the three-product expression obtained
by keeping only the cyclic permutation products of the 6x6 determinant.  The
full determinant has 80 non-vanishing permutation products, so this
expression does not locate singular points of the boundary system; it is
kept for comparison and selectable in the search via
``residual="three_product"``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, NotAnEigenvalueError, RootNotFoundError, SingularSystemError
from .linalg import solve_dense
from .model import (
    CODATA2018,
    AiryParams,
    BarrierSpec,
    ClosedLoopSpec,
    PhysicalConstants,
    airy_params_barrier,
    battery_params,
    joule_to_ev,
    m_to_nm,
    wavevector_k1,
)
from .open_barrier import WaveSample, current_density
from .specfun import AirySet, airy_all, airy_scale_exponent, airy_scaled

__all__ = [
    "BoundaryMatrix",
    "ClosedLoopSolution",
    "CurrentProfile",
    "boundary_matrix",
    "assemble_boundary_matrix",
    "standing_wave_matrix",
    "determinant_residual",
    "three_product_residual",
    "loop_residual",
    "prebarrier_length",
    "find_energy_eigenvalue",
    "solve_coefficients",
    "equation_residuals",
    "wavefunction_closed",
    "continuity_defect",
    "loop_current_density",
    "effective_resistance",
    "check_mode_ordering",
]

log = logging.getLogger(__name__)

SCAN_POINTS = 512
ROOT_TOL_EV = 1e-12
CONTINUITY_TOL = 1e-8


@dataclass(frozen=True)
class _LoopAiry:
    """Airy maps and the 12 boundary Airy evaluations for one (E, S)."""

    k1: float
    barrier: AiryParams
    battery: AiryParams
    at_0: AirySet  # barrier, x = 0
    at_a: AirySet  # barrier, x = a
    batt_a: AirySet  # battery, x = a
    batt_s: AirySet  # battery, x = -S


def _loop_airy(spec: BarrierSpec, s: float, constants: PhysicalConstants) -> _LoopAiry:
    k1 = wavevector_k1(spec.energy, constants)
    p2 = airy_params_barrier(spec, constants)
    p3 = battery_params(spec, s, constants)
    try:
        return _LoopAiry(
            k1,
            p2,
            p3,
            airy_all(p2.argument(0.0)),
            airy_all(p2.argument(spec.a)),
            airy_all(p3.argument(spec.a)),
            airy_all(p3.argument(-s)),
        )
    except DomainError as exc:
        raise DomainError(f"{exc} (boundary Airy evaluation, S={s!r} m, {spec.as_ev()})") from exc


@dataclass(frozen=True)
class BoundaryMatrix:
    """The 6x6 complex matching matrix; rows are the six boundary equations."""

    entries: np.ndarray
    k1: float
    s: float
    a2: float
    a3: float

    @property
    def prefactor(self) -> complex:
        """Common factor ``-i k1 / (A2 A3)`` of the three cyclic products."""
        return -1j * self.k1 / (self.a2 * self.a3)

    def determinant(self) -> complex:
        return complex(np.linalg.det(self.entries))

    def normalized_determinant(self) -> complex:
        return self.determinant() / self.prefactor

    def three_product_sum(self) -> complex:
        m = self.entries
        return (
            m[0, 0] * m[1, 1] * m[2, 2] * m[3, 3] * m[4, 4] * m[5, 5]
            + m[0, 1] * m[1, 2] * m[2, 3] * m[3, 4] * m[4, 5] * m[5, 0]
            + m[0, 2] * m[1, 3] * m[2, 4] * m[3, 5] * m[4, 0] * m[5, 1]
        )

    def nonzero_pattern(self) -> np.ndarray:
        return self.entries != 0


def boundary_matrix(spec: BarrierSpec, s: float, constants: PhysicalConstants = CODATA2018) -> BoundaryMatrix:
    """Matching matrix for any pre-barrier length ``s`` (quantized or not)."""
    la = _loop_airy(spec, s, constants)
    k = la.k1
    a2, a3 = la.barrier.a_scale, la.battery.a_scale
    e = complex(math.cos(k * s), math.sin(k * s))
    ei = e.conjugate()
    b0, ba, ga, gs = la.at_0, la.at_a, la.batt_a, la.batt_s
    m = np.array(
        [
            [1, 1, -b0.ai, -b0.bi, 0, 0],
            [1j * k, -1j * k, -b0.ai_prime / a2, -b0.bi_prime / a2, 0, 0],
            [0, 0, ba.ai, ba.bi, -ga.ai, -ga.bi],
            [0, 0, ba.ai_prime / a2, ba.bi_prime / a2, -ga.ai_prime / a3, -ga.bi_prime / a3],
            [e, ei, 0, 0, -gs.ai, -gs.bi],
            [1j * k * e, -1j * k * ei, 0, 0, -gs.ai_prime / a3, -gs.bi_prime / a3],
        ],
        dtype=complex,
    )
    return BoundaryMatrix(m, k, s, a2, a3)


def assemble_boundary_matrix(spec: ClosedLoopSpec) -> BoundaryMatrix:
    return boundary_matrix(spec.barrier, spec.s, spec.constants)


def standing_wave_matrix(spec: BarrierSpec, s: float, constants: PhysicalConstants = CODATA2018) -> np.ndarray:
    """Real form of the matching matrix in unknowns ``(alpha, beta, C3..C6)``.

    ``C1 = (alpha + i beta)/2`` and ``C2 = (alpha - i beta)/2``.
    """
    la = _loop_airy(spec, s, constants)
    k = la.k1
    a2, a3 = la.barrier.a_scale, la.battery.a_scale
    c, sn = math.cos(k * s), math.sin(k * s)
    b0, ba, ga, gs = la.at_0, la.at_a, la.batt_a, la.batt_s
    return np.array(
        [
            [1.0, 0.0, -b0.ai, -b0.bi, 0.0, 0.0],
            [0.0, -k, -b0.ai_prime / a2, -b0.bi_prime / a2, 0.0, 0.0],
            [0.0, 0.0, ba.ai, ba.bi, -ga.ai, -ga.bi],
            [0.0, 0.0, ba.ai_prime / a2, ba.bi_prime / a2, -ga.ai_prime / a3, -ga.bi_prime / a3],
            [c, -sn, 0.0, 0.0, -gs.ai, -gs.bi],
            [-k * sn, -k * c, 0.0, 0.0, -gs.ai_prime / a3, -gs.bi_prime / a3],
        ]
    )


def three_product_residual(spec: BarrierSpec, s: float, constants: PhysicalConstants = CODATA2018) -> complex:
    """Sum of the three cyclic products divided by ``-i k1 / (A2 A3)``.

    Equals ``t1 + t2 + t3 e^{i k1 S}``; real only when ``k1 S`` is a multiple of pi.
    """
    la = _loop_airy(spec, s, constants)
    b0, ba, ga, gs = la.at_0, la.at_a, la.batt_a, la.batt_s
    t1 = ba.ai * ba.bi_prime * gs.ai * gs.bi_prime
    t2 = b0.ai * b0.bi_prime * ga.ai * ga.bi_prime
    t3 = b0.ai_prime * ba.bi * ga.ai_prime * gs.bi
    ks = la.k1 * s
    return t1 + t2 + t3 * complex(math.cos(ks), math.sin(ks))


def determinant_residual(spec: ClosedLoopSpec) -> float:
    """Three-product residual at ``k1 S = n pi``: ``t1 + t2 + (-1)^n t3``."""
    la = _loop_airy(spec.barrier, spec.s, spec.constants)
    b0, ba, ga, gs = la.at_0, la.at_a, la.batt_a, la.batt_s
    t1 = ba.ai * ba.bi_prime * gs.ai * gs.bi_prime
    t2 = b0.ai * b0.bi_prime * ga.ai * ga.bi_prime
    t3 = b0.ai_prime * ba.bi * ga.ai_prime * gs.bi
    return t1 + t2 + t3 if spec.n % 2 == 0 else t1 + t2 - t3


def _airy_transfer(params: AiryParams, x_start: float, x_end: float) -> np.ndarray:
    # F(x) = [[Ai, Bi], [-Ai'/A, -Bi'/A]] at z = (B - x)/A;  Phi = F(end) F(start)^-1
    z_s, z_e = params.argument(x_start), params.argument(x_end)
    fs, fe = airy_scaled(z_s), airy_scaled(z_e)
    # Ai carries e^{-zeta}, Bi e^{+zeta}: cross terms pick up e^{+-(zeta_s - zeta_e)}
    w = airy_scale_exponent(z_s) - airy_scale_exponent(z_e)
    up, dn = math.exp(w), math.exp(-w)
    big_a = params.a_scale
    return math.pi * np.array(
        [
            [fe.ai * fs.bi_prime * up - fe.bi * fs.ai_prime * dn, big_a * (fe.ai * fs.bi * up - fe.bi * fs.ai * dn)],
            [
                (fe.bi_prime * fs.ai_prime * dn - fe.ai_prime * fs.bi_prime * up) / big_a,
                fe.bi_prime * fs.ai * dn - fe.ai_prime * fs.bi * up,
            ],
        ]
    )


def loop_residual(spec: BarrierSpec, s: float, constants: PhysicalConstants = CODATA2018) -> float:
    """``det(Phi_path - Phi_battery)`` from x = -S to x = a (dimensionless, real)."""
    k = wavevector_k1(spec.energy, constants)
    c, sn = math.cos(k * s), math.sin(k * s)
    free = np.array([[c, sn / k], [-k * sn, c]])
    path = _airy_transfer(airy_params_barrier(spec, constants), 0.0, spec.a) @ free
    battery = _airy_transfer(battery_params(spec, s, constants), -s, spec.a)
    diff = path - battery
    return float(diff[0, 0] * diff[1, 1] - diff[0, 1] * diff[1, 0])


def prebarrier_length(energy: float, n: int, constants: PhysicalConstants = CODATA2018) -> float:
    """``S = n pi / k1`` (n half de Broglie wavelengths), energy in J."""
    if int(n) != n or n < 1:
        raise DomainError(f"mode index n must be a positive integer, got {n!r}")
    return n * math.pi / wavevector_k1(energy, constants)


# ---------------------------------------------------------------------------
# coefficients and profiles


def equation_residuals(spec: ClosedLoopSpec, coefficients) -> np.ndarray:
    """Relative residual of each boundary equation: ``|sum_j M_ij c_j| / sum_j |M_ij c_j|``."""
    m = assemble_boundary_matrix(spec).entries
    c = np.asarray(coefficients, dtype=complex)
    terms = m * c[None, :]
    scale = np.abs(terms).sum(axis=1)
    scale[scale == 0] = 1.0
    return np.abs(terms.sum(axis=1)) / scale


def solve_coefficients(spec: ClosedLoopSpec, *, separation: float = 1e3) -> np.ndarray:
    """Null vector ``C1..C6`` of the boundary system at an eigenvalue.

    Works on the real standing-wave form: the largest column is fixed to 1,
    each row is dropped in turn and the remaining 5x5 system solved by
    elimination; the choice whose dropped equation is best satisfied wins.
    The result is scaled so the largest-magnitude coefficient equals 1.

    Raises
    ------
    NotAnEigenvalueError
        If the smallest singular value of the equilibrated matrix is not
        ``separation`` times below the next one, or the recovered vector
        leaves any boundary equation with relative residual above 1e-8.
    """
    real = standing_wave_matrix(spec.barrier, spec.s, spec.constants)
    real = real / np.abs(real).max(axis=1, keepdims=True)
    col_scale = np.abs(real).max(axis=0)
    sv = np.linalg.svd(real / col_scale, compute_uv=False)
    if sv[-1] * separation > sv[-2]:
        raise NotAnEigenvalueError(
            f"E={joule_to_ev(spec.barrier.energy)!r} eV, n={spec.n}: singular values "
            f"{sv[-2]:.3e}, {sv[-1]:.3e} are not separated by {separation:g}"
        )
    fixed = int(np.argmax(np.linalg.norm(real, axis=0)))
    free_cols = [j for j in range(6) if j != fixed]
    best = None
    for dropped in range(6):
        rows = [i for i in range(6) if i != dropped]
        try:
            sub = solve_dense(real[np.ix_(rows, free_cols)], -real[rows, fixed])
        except SingularSystemError:
            continue
        v = np.empty(6)
        v[fixed] = 1.0
        v[free_cols] = sub
        terms = real[dropped] * v
        res = abs(terms.sum()) / (np.abs(terms).sum() or 1.0)
        if best is None or res < best[0]:
            best = (res, v)
    if best is None:
        raise NotAnEigenvalueError("every 5x5 subsystem is singular")
    alpha, beta = best[1][0], best[1][1]
    c = np.array([0.5 * complex(alpha, beta), 0.5 * complex(alpha, -beta), *best[1][2:]], dtype=complex)
    c = c / c[int(np.argmax(np.abs(c)))]
    worst = float(equation_residuals(spec, c).max())
    if worst > CONTINUITY_TOL:
        raise NotAnEigenvalueError(
            f"E={joule_to_ev(spec.barrier.energy)!r} eV, n={spec.n}: boundary residual {worst:.3e} > {CONTINUITY_TOL:g}"
        )
    return c


def wavefunction_closed(spec: ClosedLoopSpec, coefficients, x: float, region: int | None = None) -> WaveSample:
    """psi at ``x`` on the loop.

    ``region=None`` follows the circuit path (Region 1 for ``x < 0``,
    Region 2 for ``0 <= x <= a``); ``region=3`` evaluates the battery segment.
    """
    x = float(x)
    barrier = spec.barrier
    if not (-spec.s <= x <= barrier.a):
        raise DomainError(f"x={x!r} m outside the loop span [-S, a] = [{-spec.s!r}, {barrier.a!r}]")
    c = coefficients
    if region is None:
        region = 1 if x < 0 else 2
    if region == 1:
        if x > 0:
            raise DomainError(f"Region 1 covers [-S, 0], got x={x!r}")
        k = spec.k1
        back = complex(math.cos(k * x), -math.sin(k * x))
        fwd = back.conjugate()
        return WaveSample(x, c[0] * back + c[1] * fwd, -1j * k * c[0] * back + 1j * k * c[1] * fwd)
    if region == 2:
        if x < 0:
            raise DomainError(f"Region 2 covers [0, a], got x={x!r}")
        params = airy_params_barrier(barrier, spec.constants)
        ca, cb = c[2], c[3]
    elif region == 3:
        params = battery_params(barrier, spec.s, spec.constants)
        ca, cb = c[4], c[5]
    else:
        raise DomainError(f"region must be 1, 2 or 3, got {region!r}")
    f = airy_all(params.argument(x))
    psi = ca * f.ai + cb * f.bi
    dpsi = -(ca * f.ai_prime + cb * f.bi_prime) / params.a_scale
    return WaveSample(x, complex(psi), complex(dpsi))


def continuity_defect(spec: ClosedLoopSpec, coefficients) -> float:
    """Largest relative mismatch of psi or dpsi/dx across the three junctions."""
    a, s = spec.barrier.a, spec.s
    pairs = [
        (wavefunction_closed(spec, coefficients, 0.0, 1), wavefunction_closed(spec, coefficients, 0.0, 2)),
        (wavefunction_closed(spec, coefficients, a, 2), wavefunction_closed(spec, coefficients, a, 3)),
        (wavefunction_closed(spec, coefficients, -s, 1), wavefunction_closed(spec, coefficients, -s, 3)),
    ]
    psi_scale = max(max(abs(p.psi), abs(q.psi)) for p, q in pairs) or 1.0
    der_scale = max(max(abs(p.dpsi_dx), abs(q.dpsi_dx)) for p, q in pairs) or 1.0
    return max(
        max(abs(p.psi - q.psi) / psi_scale, abs(p.dpsi_dx - q.dpsi_dx) / der_scale) for p, q in pairs
    )


@dataclass(frozen=True)
class CurrentProfile:
    x: np.ndarray
    region: np.ndarray
    j: np.ndarray
    floor: float

    @property
    def spread(self) -> float:
        return float(self.j.max() - self.j.min())

    def is_uniform(self, rtol: float = 1e-8) -> bool:
        return self.spread <= rtol * max(float(np.abs(self.j).max()), self.floor)


def loop_current_density(
    spec: ClosedLoopSpec, coefficients, samples: int = 1000, constants: PhysicalConstants | None = None
) -> CurrentProfile:
    """Current density sampled over Regions 1, 2 and 3.

    ``floor`` is 1e-20 of the plane-wave scale ``e hbar k1 max|C|^2 / m``.
    """
    constants = constants or spec.constants
    a, s = spec.barrier.a, spec.s
    per = max(samples // 3, 2)
    xs, regions, js = [], [], []
    for region, lo, hi in ((1, -s, 0.0), (2, 0.0, a), (3, -s, a)):
        grid = np.linspace(lo, hi, per + (samples - 3 * per if region == 3 else 0))
        if region == 1:
            grid = grid[grid < 0] if len(grid) > 1 else grid
        for x in grid:
            sample = wavefunction_closed(spec, coefficients, float(x), region)
            xs.append(float(x))
            regions.append(region)
            js.append(current_density(sample, constants))
    c_max = float(np.abs(np.asarray(coefficients)).max())
    plane = constants.e_charge * constants.hbar * spec.k1 / constants.m_e * c_max**2
    return CurrentProfile(np.array(xs), np.array(regions), np.array(js), 1e-20 * plane)


def effective_resistance(voltage_drop: float, current_density: float, area: float) -> float:
    """``R = V / (J A)``; returns ``inf`` when the current vanishes."""
    if not area > 0:
        raise DomainError(f"area must be > 0, got {area!r} m^2")
    current = current_density * area
    if current == 0:
        return math.inf
    return voltage_drop / current


# ---------------------------------------------------------------------------
# eigenvalue search


@dataclass(frozen=True)
class ClosedLoopSolution:
    energy: float
    s: float
    n: int
    coefficients: tuple[complex, ...]
    residual: float
    continuity_defect: float
    three_product_residual: float
    residual_kind: str
    spec: ClosedLoopSpec = field(repr=False)

    @property
    def energy_ev(self) -> float:
        return joule_to_ev(self.energy)

    @property
    def s_nm(self) -> float:
        return m_to_nm(self.s)

    def to_dict(self) -> dict:
        return {
            "energy_ev": self.energy_ev,
            "s_nm": self.s_nm,
            "n": self.n,
            "residual": self.residual,
            "residual_kind": self.residual_kind,
            "three_product_residual": self.three_product_residual,
            "continuity_defect": self.continuity_defect,
            "coefficients": [[c.real, c.imag] for c in self.coefficients],
        }


def _residual_function(kind: str, phi: float, u0: float, a: float, n: int, constants: PhysicalConstants):
    if kind not in ("transfer", "three_product"):
        raise DomainError(f"residual must be 'transfer' or 'three_product', got {kind!r}")

    def f(energy_ev: float) -> float:
        spec = BarrierSpec.from_ev(phi, u0, a, energy_ev)
        s = prebarrier_length(spec.energy, n, constants)
        if kind == "transfer":
            return loop_residual(spec, s, constants)
        return determinant_residual(ClosedLoopSpec(spec, s, n, constants))

    return f


def find_energy_eigenvalue(
    phi: float,
    u0: float,
    a: float,
    n: int,
    bracket: tuple[float, float],
    *,
    scan_points: int = SCAN_POINTS,
    tol_ev: float = ROOT_TOL_EV,
    residual: str = "transfer",
    constants: PhysicalConstants = CODATA2018,
) -> list[ClosedLoopSolution]:
    """All energy eigenvalues of mode ``n`` inside ``bracket``, ordered by E.

    ``phi``, ``u0`` and the bracket are in eV, ``a`` in nm.  S is recomputed
    from E at every iterate.  The bracket is scanned on ``scan_points``
    points and each sign change bisected to ``tol_ev``.

    Raises
    ------
    RootNotFoundError
        No sign change in the bracket; carries the scan extrema.
    """
    e_min, e_max = map(float, bracket)
    if not (0 < e_min < e_max < phi - u0):
        raise DomainError(f"bracket must satisfy 0 < E_min < E_max < phi - U0 = {phi - u0!r} eV, got {bracket!r}")
    if int(n) != n or n < 1:
        raise DomainError(f"mode index n must be a positive integer, got {n!r}")
    if scan_points < 2:
        raise DomainError("scan_points must be >= 2")
    f = _residual_function(residual, phi, u0, a, int(n), constants)
    grid = np.linspace(e_min, e_max, scan_points)
    values = np.array([f(float(e)) for e in grid])
    scan_max = float(np.abs(values).max())

    roots = []
    for i in range(scan_points - 1):
        lo, hi, f_lo, f_hi = float(grid[i]), float(grid[i + 1]), values[i], values[i + 1]
        if f_lo == 0.0:
            roots.append(lo)
            continue
        if f_lo * f_hi >= 0:
            if i == scan_points - 2 and f_hi == 0.0:
                roots.append(hi)
            continue
        while hi - lo > tol_ev:
            mid = 0.5 * (lo + hi)
            f_mid = f(mid)
            if f_mid == 0.0:
                lo = hi = mid
                break
            if (f_mid < 0) == (f_lo < 0):
                lo, f_lo = mid, f_mid
            else:
                hi, f_hi = mid, f_mid
        mid = 0.5 * (lo + hi)
        roots.append(min((lo, hi, mid), key=lambda e: abs(f(e))))

    if not roots:
        raise RootNotFoundError(
            f"no sign change of the {residual} residual for n={n} in [{e_min}, {e_max}] eV "
            f"(scan min {values.min():.6g}, max {values.max():.6g})",
            (float(values.min()), float(values.max())),
        )

    out = []
    for e_ev in roots:
        spec = ClosedLoopSpec.for_mode(BarrierSpec.from_ev(phi, u0, a, e_ev), int(n), constants)
        coeffs = solve_coefficients(spec)
        out.append(
            ClosedLoopSolution(
                energy=spec.barrier.energy,
                s=spec.s,
                n=int(n),
                coefficients=tuple(complex(c) for c in coeffs),
                residual=float(f(e_ev)),
                continuity_defect=continuity_defect(spec, coeffs),
                three_product_residual=float(determinant_residual(spec)),
                residual_kind=residual,
                spec=spec,
            )
        )
    log.debug("n=%d: %d root(s), scan max |residual| %.3e", n, len(out), scan_max)
    return out


def check_mode_ordering(lowest_by_mode: dict[int, float]) -> list[str]:
    """Warn (never fail) when the lowest eigenvalue does not increase with n."""
    notes = []
    modes = sorted(lowest_by_mode)
    for lo, hi in zip(modes, modes[1:]):
        if not lowest_by_mode[hi] > lowest_by_mode[lo]:
            msg = f"lowest eigenvalue for n={hi} ({lowest_by_mode[hi]!r}) is not above n={lo} ({lowest_by_mode[lo]!r})"
            log.warning(msg)
            notes.append(msg)
    return notes
