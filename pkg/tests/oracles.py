"""Independent reference computations used by the test suite.

Nothing here calls into the solvers under test except to obtain the raw
matching matrix or the static current map being probed.
"""

from __future__ import annotations

import itertools
import math

import numpy as np
from scipy.optimize import brentq

from tunnelcircuit.closed_loop import boundary_matrix, prebarrier_length
from tunnelcircuit.model import CODATA2018, BarrierSpec, ev_to_joule
from tunnelcircuit.open_barrier import static_current_density

HBAR = CODATA2018.hbar
M_E = CODATA2018.m_e
Q_E = CODATA2018.e_charge


def rectangular_transmission(height_ev: float, energy_ev: float, width_nm: float) -> float:
    """|T|^2 for a square barrier of the given height above the zero of energy."""
    e = energy_ev * Q_E
    v = height_ev * Q_E
    k = math.sqrt(2 * M_E * e) / HBAR
    kappa = math.sqrt(2 * M_E * (v - e)) / HBAR
    s = math.sinh(kappa * width_nm * 1e-9)
    return 1.0 / (1.0 + (k * k + kappa * kappa) ** 2 * s * s / (4 * k * k * kappa * kappa))


def wkb_exponent(phi_ev: float, u0_ev: float, a_nm: float, energy_ev: float) -> float:
    """2 * integral of kappa over the classically forbidden part of the slope."""
    a = a_nm * 1e-9
    phi, u0, e = phi_ev * Q_E, u0_ev * Q_E, energy_ev * Q_E
    top = min(a, (phi - e) * a / u0)
    # kappa = sqrt(2m(phi - u0 x/a - E))/hbar; integrate analytically
    c = 2 * M_E / HBAR**2
    f = lambda x: -(2.0 / 3.0) * (a / u0) * (c * (phi - u0 * x / a - e)) ** 1.5 / c
    return 2.0 * (f(top) - f(0.0))


def leibniz_terms(m: np.ndarray) -> list[tuple[tuple[int, ...], complex]]:
    """All non-vanishing signed permutation products of a square matrix."""
    n = m.shape[0]
    out = []
    for perm in itertools.permutations(range(n)):
        prod = 1.0 + 0j
        for i, j in enumerate(perm):
            prod *= m[i, j]
            if prod == 0:
                break
        if prod == 0:
            continue
        inversions = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        out.append((perm, -prod if inversions % 2 else prod))
    return out


def normalized_full_determinant(phi, u0, a, n, energy_ev) -> float:
    """Real part of det(M) / (-i k1 / (A2 A3)) with det by numpy's LU."""
    spec = BarrierSpec.from_ev(phi, u0, a, energy_ev)
    s = prebarrier_length(spec.energy, n)
    bm = boundary_matrix(spec, s)
    return complex(np.linalg.det(bm.entries) / bm.prefactor).real


def full_determinant_roots(phi, u0, a, n, bracket, points=2048) -> list[float]:
    grid = np.linspace(bracket[0], bracket[1], points)
    vals = [normalized_full_determinant(phi, u0, a, n, float(e)) for e in grid]
    roots = []
    for i in range(points - 1):
        if vals[i] == 0:
            roots.append(float(grid[i]))
        elif vals[i] * vals[i + 1] < 0:
            roots.append(
                brentq(lambda e: normalized_full_determinant(phi, u0, a, n, e), grid[i], grid[i + 1], xtol=1e-14, rtol=1e-15)
            )
    return roots


def fixed_first_coefficient(bm_entries: np.ndarray, dropped_row: int) -> np.ndarray:
    """Null vector with C1 = 1: solve the 5x5 system left after dropping one row."""
    rows = [i for i in range(6) if i != dropped_row]
    sub = bm_entries[np.ix_(rows, range(1, 6))]
    rhs = -bm_entries[rows, 0]
    return np.concatenate(([1.0 + 0j], np.linalg.solve(sub, rhs)))


def current_derivatives(phi, a, energy, u0, h=2e-3, order=4):
    """Taylor coefficients J^(m)(u0)/m! (J vs bias in eV) by central differences."""

    def j(u):
        return static_current_density(BarrierSpec.from_ev(phi, u, a, energy))

    pts = {k: j(u0 + k * h) for k in range(-3, 4)}
    d1 = (pts[1] - pts[-1]) / (2 * h) - (pts[2] - 2 * pts[1] + 2 * pts[-1] - pts[-2]) / (12 * h)
    d2 = (pts[1] - 2 * pts[0] + pts[-1]) / h**2 - (
        pts[2] - 4 * pts[1] + 6 * pts[0] - 4 * pts[-1] + pts[-2]
    ) / (12 * h**2)
    d3 = (pts[2] - 2 * pts[1] + 2 * pts[-1] - pts[-2]) / (2 * h**3)
    d4 = (pts[2] - 4 * pts[1] + 6 * pts[0] - 4 * pts[-1] + pts[-2]) / h**4
    coeffs = [pts[0], d1, d2 / 2, d3 / 6, d4 / 24]
    return coeffs[: order + 1]


def taylor_two_sided_bins(coeffs, tones_ev) -> dict[tuple[int, ...], complex]:
    """Two-sided spectral lines of sum_m c_m (sum_k A_k cos th_k)^m.

    Keys are integer multiples (m_1, m_2, ...) of the tone phases.
    """
    lines: dict[tuple[int, ...], complex] = {}
    ntone = len(tones_ev)
    # each cos = (e^{i th} + e^{-i th}) / 2; expand the power as a sum over sign choices
    for power, c in enumerate(coeffs):
        for picks in itertools.product(range(ntone), repeat=power):
            for signs in itertools.product((1, -1), repeat=power):
                key = [0] * ntone
                amp = c
                for tone, sgn in zip(picks, signs):
                    key[tone] += sgn
                    amp *= tones_ev[tone] / 2
                lines[tuple(key)] = lines.get(tuple(key), 0.0) + amp
    return lines


def gauss_chebyshev_mean(phi, a, energy, u0, u1) -> float:
    """Two-node Gauss-Chebyshev estimate of the period mean of J(u0 + u1 cos th)."""
    nodes = (u0 + u1 / math.sqrt(2.0), u0 - u1 / math.sqrt(2.0))
    return 0.5 * sum(static_current_density(BarrierSpec.from_ev(phi, u, a, energy)) for u in nodes)


def ev(value: float) -> float:
    return ev_to_joule(value)
