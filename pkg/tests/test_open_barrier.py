import cmath
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from strategies import barrier_specs
from tunnelcircuit.model import CODATA2018, BarrierSpec, nm_to_m, wavevector_k1
from tunnelcircuit.open_barrier import (
    WaveSample,
    boundary_residuals,
    closed_form_coefficients,
    current_density,
    printed_tunneling_probability,
    solve_open_barrier,
    static_current_density,
    transmission_probability,
    tunneling_probability_closed_form,
    wavefunction_open,
)
from tunnelcircuit.specfun import airy_all

REFERENCE = BarrierSpec.from_ev(5.0, 2.0, 0.4, 1.0)


@given(barrier_specs())
def test_boundary_system_satisfied(spec):
    s = solve_open_barrier(spec)
    assert max(boundary_residuals(spec, s.c1, s.c2, s.r, s.t)) <= 1e-10


@given(barrier_specs(max_entry_argument=math.inf))
def test_flux_conservation(spec):
    s = solve_open_barrier(spec)
    assert abs(s.k1 * (1 - s.reflection) - s.k3 * s.transmission) <= 1e-8 * s.k1


@given(barrier_specs(max_entry_argument=math.inf))
def test_p3_is_a_phase(spec):
    assert abs(abs(solve_open_barrier(spec).p3) - 1.0) <= 1e-12


@given(barrier_specs())
def test_closed_forms_match_elimination(spec):
    s = solve_open_barrier(spec)
    cf = closed_form_coefficients(spec)
    for key, value in (("c1", s.c1), ("c2", s.c2), ("r", s.r), ("t", s.t), ("d", s.d)):
        assert abs(cf[key] - value) <= 1e-10 * abs(value)


@given(barrier_specs(max_entry_argument=math.inf))
def test_transmission_in_unit_interval(spec):
    tt = transmission_probability(spec)
    assert 0.0 < tt < 1.0
    assert tt == solve_open_barrier(spec).transmission


@given(barrier_specs(max_entry_argument=math.inf))
def test_corrected_closed_form_probability(spec):
    assert tunneling_probability_closed_form(spec) == pytest.approx(transmission_probability(spec), rel=1e-10)


def test_printed_probability_lacks_incident_wavevector_factor():
    # the printed expression differs from the solved |T|^2 by exactly |P1|^2 = k1^2
    printed = printed_tunneling_probability(REFERENCE)
    k1 = wavevector_k1(REFERENCE.energy)
    solved = transmission_probability(REFERENCE)
    assert abs(printed) * k1**2 == pytest.approx(solved, rel=1e-10)
    assert abs(printed) / solved < 1e-18


@pytest.mark.parametrize("u0, tol", [(1e-3, 1e-2), (1e-4, 1e-3)])
def test_rectangular_limit(u0, tol):
    spec = BarrierSpec.from_ev(5.0, u0, 0.4, 1.0)
    tt = transmission_probability(spec)
    # a square barrier of height phi is the U0 -> 0 limit of the slope
    ref = oracles.rectangular_transmission(5.0, 1.0, 0.4)
    assert ref == pytest.approx(7e-4, rel=0.01)
    assert abs(tt - ref) <= tol * ref


def test_thick_barrier_near_top_is_opaque():
    # WKB order of magnitude for a = 2 nm, phi = 5 eV, U0 = 0.5 eV, E just below phi - U0
    tt = transmission_probability(BarrierSpec.from_ev(5.0, 0.5, 2.0, 4.4))
    exponent = oracles.wkb_exponent(5.0, 0.5, 2.0, 4.4)
    assert tt < 1e-3
    assert abs(math.log(tt) + exponent) < 3.0


def test_wider_barrier_transmits_less():
    widths = [0.2, 0.4, 0.8, 1.6, 3.2]
    tts = [transmission_probability(BarrierSpec.from_ev(5.0, 0.5, a, 1.0)) for a in widths]
    exps = [oracles.wkb_exponent(5.0, 0.5, a, 1.0) for a in widths]
    assert all(x > y for x, y in zip(tts, tts[1:]))
    assert all(x < y for x, y in zip(exps, exps[1:]))


def test_exit_face_wronskian():
    s = solve_open_barrier(REFERENCE)
    f = airy_all(s.airy.argument(REFERENCE.a))
    assert abs(f.wronskian() - 1 / math.pi) <= 1e-10


@given(barrier_specs(max_entry_argument=math.inf))
def test_wavefunction_continuity(spec):
    s = solve_open_barrier(spec)
    eps = spec.a * 1e-12
    for x0 in (0.0, spec.a):
        left = wavefunction_open(spec, s, x0 - eps)
        right = wavefunction_open(spec, s, x0 + eps)
        for u, v in ((left.psi, right.psi), (left.dpsi_dx, right.dpsi_dx)):
            assert abs(u - v) <= 1e-10 * max(abs(u), abs(v)) + 1e-9 * abs(eps * right.dpsi_dx)


def test_region_one_closed_form():
    s = solve_open_barrier(REFERENCE)
    x = nm_to_m(-5.0)
    w = wavefunction_open(REFERENCE, s, x)
    direct = cmath.exp(1j * s.k1 * x) + s.r * cmath.exp(-1j * s.k1 * x)
    assert abs(w.psi - direct) <= 1e-13


def test_current_of_real_sample_is_zero():
    assert current_density(WaveSample(0.0, 0.7 + 0j, -3.1 + 0j)) == 0.0


def test_current_of_plane_wave():
    k = 3.2e9
    x = 1.3e-10
    psi = cmath.exp(1j * k * x)
    j = current_density(WaveSample(x, psi, 1j * k * psi))
    c = CODATA2018
    assert j == pytest.approx(-c.e_charge * c.hbar * k / c.m_e, rel=1e-14)


def _current_spread(spec):
    s = solve_open_barrier(spec)
    xs = [-nm_to_m(1.0), 0.25 * spec.a, 0.5 * spec.a, 0.9 * spec.a, spec.a + nm_to_m(1.0)]
    js = [current_density(wavefunction_open(spec, s, x)) for x in xs]
    return s, (max(js) - min(js)) / max(abs(j) for j in js)


def test_current_uniform_reference_points():
    _, spread = _current_spread(REFERENCE)
    assert spread <= 1e-8


@given(barrier_specs(max_entry_argument=math.inf))
def test_current_uniform_in_x(spec):
    s, spread = _current_spread(spec)
    # incident-side current is k1 (1 - |R|^2): cancellation costs ~eps / |T|^2
    floor = 1e-15 * s.k1 / (s.k3 * s.transmission)
    assert spread <= max(1e-8, floor)
    if s.transmission >= 1e-6:
        assert spread <= 1e-8


def test_static_current_matches_transmitted_flux():
    s = solve_open_barrier(REFERENCE)
    c = CODATA2018
    expected = -c.e_charge * c.hbar * s.k3 * s.transmission / c.m_e
    assert static_current_density(REFERENCE) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("u0", [1e-5, 1e-7])
def test_nearly_flat_barrier_stays_finite(u0):
    spec = BarrierSpec.from_ev(5.0, u0, 0.4, 1.0)
    s = solve_open_barrier(spec)
    assert np.isfinite(s.transmission)
    assert abs(s.k1 * (1 - s.reflection) - s.k3 * s.transmission) <= 1e-8 * s.k1
