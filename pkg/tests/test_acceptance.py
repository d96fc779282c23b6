"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s``.
"""

import math

import numpy as np
import pytest

import oracles
from oracles import ev
from strategies import random_barrier
from tunnelcircuit.cli import main
from tunnelcircuit.closed_loop import (
    boundary_matrix,
    continuity_defect,
    find_energy_eigenvalue,
    loop_current_density,
)
from tunnelcircuit.model import BarrierSpec, wavevector_k1
from tunnelcircuit.open_barrier import (
    boundary_residuals,
    closed_form_coefficients,
    solve_open_barrier,
    transmission_probability,
)
from tunnelcircuit.quasistatic import DriveSpec, harmonic_spectrum, quasistatic_waveform
from tunnelcircuit.specfun import AIRY_SWITCH, _airy_asymptotic_branch, _airy_series_branch, airy_all, bessel_jn
from tunnelcircuit.tien_gordon import (
    identity_check,
    implicit_potential,
    reconstructed_potential,
    tg_current_time_independence,
)


@pytest.fixture
def verdict(capsys):
    def emit(number, checks):
        ok = all(passed for _, passed in checks)
        detail = "; ".join(f"{label} [{'ok' if passed else 'FAIL'}]" for label, passed in checks)
        with capsys.disabled():
            print(f"\nCRITERION {number}: {'PASS' if ok else 'FAIL'} - {detail}")
        assert ok, detail

    return emit


def test_criterion_1_special_functions(verdict):
    xs = np.linspace(-20.0, 20.0, 10_000)
    wronskian = max(abs(airy_all(float(x)).wronskian() - 1 / math.pi) for x in xs)
    seam = 0.0
    for x in (AIRY_SWITCH, -AIRY_SWITCH):
        s, a = _airy_series_branch(x), _airy_asymptotic_branch(x)
        for u, v in zip((s.ai, s.ai_prime, s.bi, s.bi_prime), (a.ai, a.ai_prime, a.bi, a.bi_prime)):
            seam = max(seam, abs(u - v) / max(abs(u), abs(v), 1e-3))
    norm = max(
        abs(math.fsum(bessel_jn(n, alpha) ** 2 for n in range(-80, 81)) - 1.0) for alpha in (0.5, 2.0, 7.3, 25.0)
    )
    verdict(
        1,
        [
            (f"Wronskian max error {wronskian:.2e} <= 1e-10", wronskian <= 1e-10),
            (f"seam mismatch {seam:.2e} <= 1e-10", seam <= 1e-10),
            (f"Bessel normalization error {norm:.2e} <= 1e-12", norm <= 1e-12),
        ],
    )


def test_criterion_2_open_barrier(verdict):
    rng = np.random.default_rng(20240601)
    worst_res = worst_flux = worst_cf = 0.0
    for _ in range(1000):
        spec = random_barrier(rng)
        s = solve_open_barrier(spec)
        worst_res = max(worst_res, *boundary_residuals(spec, s.c1, s.c2, s.r, s.t))
        worst_flux = max(worst_flux, abs(s.k1 * (1 - s.reflection) - s.k3 * s.transmission) / s.k1)
        cf = closed_form_coefficients(spec)
        for key, value in (("c1", s.c1), ("c2", s.c2), ("r", s.r), ("t", s.t), ("d", s.d)):
            worst_cf = max(worst_cf, abs(cf[key] - value) / abs(value))
    verdict(
        2,
        [
            (f"boundary residual {worst_res:.2e} <= 1e-10", worst_res <= 1e-10),
            (f"flux defect {worst_flux:.2e} <= 1e-8", worst_flux <= 1e-8),
            (f"closed forms vs elimination {worst_cf:.2e} <= 1e-10", worst_cf <= 1e-10),
        ],
    )


def test_criterion_3_rectangular_limit(verdict):
    ref = oracles.rectangular_transmission(5.0, 1.0, 0.4)
    checks = [(f"rectangular |T|^2 = {ref:.4e} ~ 7e-4", abs(ref - 7e-4) <= 0.01 * 7e-4)]
    for u0, tol in ((1e-3, 1e-2), (1e-4, 1e-3)):
        tt = transmission_probability(BarrierSpec.from_ev(5.0, u0, 0.4, 1.0))
        rel = abs(tt - ref) / ref
        checks.append((f"U0={u0:g} eV relative gap {rel:.2e} <= {tol:g}", rel <= tol))
    verdict(3, checks)


def test_criterion_4_closed_loop_structure(verdict):
    rng = np.random.default_rng(7)
    worst_gap = 0.0
    worst_real = 0.0
    smallest_half = math.inf
    for _ in range(40):
        energy = float(rng.uniform(0.1, 2.9))
        spec = BarrierSpec.from_ev(5.0, 2.0, 0.4, energy)
        k1 = wavevector_k1(spec.energy)
        s_free = float(rng.uniform(0.2, 3.0)) * 1e-9
        bm = boundary_matrix(spec, s_free)
        det = bm.determinant()
        worst_gap = max(worst_gap, abs(det - bm.three_product_sum()) / abs(det))
        for n in (1, 2, 3):
            d = boundary_matrix(spec, n * math.pi / k1).normalized_determinant()
            worst_real = max(worst_real, abs(d.imag) / abs(d))
            h = boundary_matrix(spec, (n + 0.5) * math.pi / k1).normalized_determinant()
            smallest_half = min(smallest_half, abs(h.imag) / abs(h))
    verdict(
        4,
        [
            (f"expanded det vs three-product sum relative gap {worst_gap:.2e} <= 1e-10", worst_gap <= 1e-10),
            (f"normalized det at k1 S = n pi: max |Im|/|det| {worst_real:.2e} <= 1e-10", worst_real <= 1e-10),
            (
                f"normalized det at k1 S = (n+1/2) pi: min |Im|/|det| {smallest_half:.2e} > 1e-10",
                smallest_half > 1e-10,
            ),
        ],
    )


def test_criterion_5_eigenvalue_pipeline(verdict):
    checks = []
    for n in (1, 2):
        expected = oracles.full_determinant_roots(5.0, 2.0, 0.4, n, (0.1, 2.9))
        sols = find_energy_eigenvalue(5.0, 2.0, 0.4, n, (0.1, 2.9))
        got = [s.energy_ev for s in sols]
        gap = max(abs(g - e) for g, e in zip(got, expected)) if len(got) == len(expected) else math.inf
        checks.append((f"n={n}: {len(got)} roots vs oracle {len(expected)}, max gap {gap:.2e} eV <= 1e-9", gap <= 1e-9))
        defect = max(continuity_defect(s.spec, s.coefficients) for s in sols)
        checks.append((f"n={n}: continuity defect {defect:.2e} <= 1e-8", defect <= 1e-8))
        uniform = all(loop_current_density(s.spec, s.coefficients).is_uniform(1e-8) for s in sols)
        checks.append((f"n={n}: loop current uniform within 1e-8 or floor", uniform))
    verdict(5, checks)


def test_criterion_6_tien_gordon(verdict):
    rng = np.random.default_rng(11)
    ident = max(
        identity_check(alpha, float(beta), math.ceil(alpha + 30))
        for alpha in (0.0, 0.5, 1.0, 2.0, 5.0, 7.5, 10.0)
        for beta in rng.uniform(-math.pi, math.pi, 32)
    )
    spec = BarrierSpec.from_ev(5.0, 1.0, 0.4, 1.0)
    drift = 0.0
    for omega in (1e12, 1e15):
        ts = np.linspace(0.0, 20 * math.pi / omega, 41)
        drift = max(drift, tg_current_time_independence(spec, 0.3, omega, ts))
    recon = 0.0
    for x_frac, t in zip(rng.uniform(0, 1, 50), rng.uniform(0, 1e-12, 50)):
        x = float(x_frac) * spec.a
        v = implicit_potential(x, float(t), spec, 0.3, 2e13)
        r = reconstructed_potential(x, float(t), spec, 0.3, 2e13)
        recon = max(recon, abs(r - v) / abs(v))
    verdict(
        6,
        [
            (f"identity error {ident:.2e} <= 1e-10", ident <= 1e-10),
            (f"time-dependent vs static current {drift:.2e} <= 1e-12", drift <= 1e-12),
            (f"potential reconstruction {recon:.2e} <= 1e-6", recon <= 1e-6),
        ],
    )


def test_criterion_7_quasistatic(verdict):
    spec = BarrierSpec.from_ev(5.0, 1.0, 0.4, 1.0)
    single = harmonic_spectrum(quasistatic_waveform(spec, DriveSpec.single(ev(1.0), ev(0.2), 1e12)))
    fund = single.magnitude(1e12)
    r2, r3 = single.magnitude(2e12) / fund, single.magnitude(3e12) / fund

    two = DriveSpec(ev(1.0), ((ev(0.1), 3e12), (ev(0.1), 5e12)), samples_per_period=128)
    mix = harmonic_spectrum(quasistatic_waveform(spec, two))
    carrier = mix.magnitude(3e12)
    products = {w: mix.magnitude(w) / carrier for w in (2e12, 8e12, 1e12, 6e12, 10e12)}

    fund_s, second_s = [], []
    for u1 in (1e-4, 2e-4, 4e-4):
        sp = harmonic_spectrum(quasistatic_waveform(spec, DriveSpec.single(ev(1.0), ev(u1), 1e12)))
        fund_s.append(sp.magnitude(1e12))
        second_s.append(sp.magnitude(2e12))
    lin = max(abs(b / a - 2.0) / 2.0 for a, b in zip(fund_s, fund_s[1:]))
    quad = max(abs(b / a - 4.0) / 4.0 for a, b in zip(second_s, second_s[1:]))
    verdict(
        7,
        [
            (f"2w/1w {r2:.2e}, 3w/1w {r3:.2e} > 1e-10", r2 > 1e-10 and r3 > 1e-10),
            (
                "mixing bins |w1-w2|, w1+w2, 2w1-w2, 2w1, 2w2 relative to carrier "
                + ", ".join(f"{v:.1e}" for v in products.values()),
                all(v > 1e-10 for v in products.values()),
            ),
            (f"fundamental doubling error {lin:.2e} <= 1e-2", lin <= 1e-2),
            (f"2w quadrupling error {quad:.2e} <= 1e-2", quad <= 1e-2),
        ],
    )


CLI_RUNS = [
    ["closed-loop", "--phi", "5", "--u0", "2", "--a", "0.4", "--n", "1,2", "--bracket", "0.1:2.9"],
    ["open-barrier", "--phi", "5", "--u0", "2", "--a", "0.4", "--energy", "1", "--sweep", "E:0.2:2.8:27"],
    ["quasistatic", "--phi", "5", "--u0", "1", "--a", "0.4", "--energy", "1", "--u1", "0.2", "--omega", "1e12",
     "--sweep", "u1:0.05:0.4:8"],
    ["tien-gordon", "--v1", "0.01", "--omega", "1e13", "--sweep", "v1:0.001:0.02:5"],
]


def test_criterion_8_determinism(verdict, tmp_path):
    checks = []
    for argv in CLI_RUNS:
        blobs = []
        for i, workers in enumerate(("1", "1", "3", "8")):
            path = tmp_path / f"{argv[0]}-{i}.out"
            code = main(argv + ["--workers", workers, "--out", str(path)])
            blobs.append(path.read_bytes() if code == 0 else None)
        same = blobs[0] is not None and all(b == blobs[0] for b in blobs)
        checks.append((f"{argv[0]} identical over 2 runs and 1/3/8 workers", same))
    verdict(8, checks)
