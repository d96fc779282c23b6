"""Quasistatic drive of the open barrier and the resulting current spectrum.

The bias is replaced by ``U(t) = U0 + sum_k U_k cos(w_k t)`` and the static
current density is recomputed at every sample.  Tones must share a common
period so the sampled record holds an integer number of periods and every
harmonic or mixing product lands exactly on a DFT bin.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import DomainError, RegimeViolationError
from .model import CODATA2018, BarrierSpec, PhysicalConstants, joule_to_ev
from .open_barrier import static_current_density

__all__ = [
    "DriveSpec",
    "Waveform",
    "Spectrum",
    "fundamental_frequency",
    "quasistatic_waveform",
    "harmonic_spectrum",
    "rc_load_division",
]

MAX_RATIO_DENOMINATOR = 1000
RATIO_TOL = 1e-12


@dataclass(frozen=True)
class DriveSpec:
    """DC bias ``u0`` (J) plus cosine tones ``(amplitude J, omega rad/s)``.

    ``samples_per_period`` and ``periods`` count the common period of all
    tones.  ``common_omega`` forces that fundamental for tone sets whose
    ratio is not recognised as rational.
    """

    u0: float
    tones: tuple[tuple[float, float], ...]
    samples_per_period: int = 64
    periods: int = 1
    common_omega: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "tones", tuple((float(a), float(w)) for a, w in self.tones))
        if not self.tones:
            raise DomainError("drive needs at least one tone")
        for amp, omega in self.tones:
            if not (math.isfinite(amp) and math.isfinite(omega) and omega > 0):
                raise DomainError(f"tone ({amp!r} J, {omega!r} rad/s) needs finite amplitude and omega > 0")
        if int(self.samples_per_period) != self.samples_per_period or self.samples_per_period < 2:
            raise DomainError(f"samples_per_period must be an integer >= 2, got {self.samples_per_period!r}")
        if int(self.periods) != self.periods or self.periods < 1:
            raise DomainError(f"periods must be an integer >= 1, got {self.periods!r}")
        if self.common_omega is not None and not self.common_omega > 0:
            raise DomainError(f"common_omega must be > 0, got {self.common_omega!r}")

    @classmethod
    def single(cls, u0: float, u1: float, omega: float, samples_per_period: int = 64, periods: int = 1):
        return cls(u0, ((u1, omega),), samples_per_period, periods)

    @property
    def fundamental(self) -> float:
        return fundamental_frequency(self)

    @property
    def sample_count(self) -> int:
        return int(self.samples_per_period * self.periods)

    @property
    def dt(self) -> float:
        return 2.0 * math.pi / self.fundamental / self.samples_per_period

    def potential(self, t: float) -> float:
        return self.u0 + math.fsum(a * math.cos(w * t) for a, w in self.tones)


def fundamental_frequency(drive: DriveSpec) -> float:
    """Largest ``w0`` of which every tone is an integer multiple.

    Raises
    ------
    DomainError
        When a tone ratio is not a fraction with denominator <= 1000 and no
        ``common_omega`` override is given, or the override is not a common
        divisor of the tones.
    """
    if drive.common_omega is not None:
        w0 = drive.common_omega
        for _, w in drive.tones:
            m = w / w0
            if abs(m - round(m)) > 1e-9 * max(m, 1.0):
                raise DomainError(f"tone {w!r} rad/s is not an integer multiple of common_omega {w0!r}")
        return w0
    base = drive.tones[0][1]
    ratios = []
    for _, w in drive.tones:
        r = Fraction(w / base).limit_denominator(MAX_RATIO_DENOMINATOR)
        if abs(float(r) - w / base) > RATIO_TOL * (w / base):
            raise DomainError(
                f"tones {base!r} and {w!r} rad/s are incommensurate (ratio {w / base!r}); "
                "spectra need an integer number of common periods, so pass common_omega"
            )
        ratios.append(r)
    lcm_den = math.lcm(*(r.denominator for r in ratios))
    multiples = [r.numerator * lcm_den // r.denominator for r in ratios]
    return base * math.gcd(*multiples) / lcm_den


@dataclass(frozen=True)
class Waveform:
    t: np.ndarray
    u: np.ndarray
    j: np.ndarray
    drive: DriveSpec
    clamped: tuple[int, ...] = field(default=())

    @property
    def dt(self) -> float:
        return self.drive.dt


def _regime_bounds(spec: BarrierSpec) -> tuple[float, float]:
    return 2.0 * spec.margin, spec.phi - spec.energy - 2.0 * spec.margin


def quasistatic_waveform(
    spec: BarrierSpec,
    drive: DriveSpec,
    *,
    clamp: bool = False,
    workers: int | None = None,
    constants: PhysicalConstants = CODATA2018,
) -> Waveform:
    """Static current density at ``U(t_k)`` for ``t_k = k dt``.

    ``spec`` supplies phi, a and E; its bias is replaced by the drive.  With
    ``clamp`` the bias is held at the nearest regime edge instead of raising.
    ``workers`` > 1 evaluates samples on a thread pool; results keep sample
    order.
    """
    n = drive.sample_count
    dt = drive.dt
    t = np.arange(n) * dt
    u = np.array([drive.potential(float(tk)) for tk in t])
    lo, hi = _regime_bounds(spec)
    bad = [k for k in range(n) if not (lo <= u[k] <= hi)]
    if bad and not clamp:
        k = bad[0]
        tk, uk = float(t[k]), float(u[k])
        raise RegimeViolationError(
            f"bias leaves the tunneling regime at t={tk!r} s: U={joule_to_ev(uk)!r} eV "
            f"(allowed {joule_to_ev(lo)!r}..{joule_to_ev(hi)!r} eV); {len(bad)} of {n} samples violate"
        )
    if bad:
        u = np.clip(u, lo, hi)

    def one(uk: float) -> float:
        return static_current_density(spec.replace(u0=float(uk)), constants)

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            j = list(pool.map(one, u))
    else:
        j = [one(uk) for uk in u]
    return Waveform(t, u, np.array(j), drive, tuple(bad))


@dataclass(frozen=True)
class Spectrum:
    """Two-sided DFT ``X_k = (1/N) sum_n x_n e^{-2 pi i k n / N}``.

    ``frequencies`` are signed (rad/s); ``resolution`` is the bin spacing.
    """

    frequencies: np.ndarray
    amplitudes: np.ndarray
    resolution: float

    def index(self, omega: float) -> int:
        k = omega / self.resolution
        kr = round(k)
        if abs(k - kr) > 1e-6:
            raise DomainError(f"{omega!r} rad/s is not on the bin grid (spacing {self.resolution!r})")
        return int(kr) % len(self.amplitudes)

    def at(self, omega: float) -> complex:
        return complex(self.amplitudes[self.index(omega)])

    def magnitude(self, omega: float) -> float:
        return abs(self.at(omega))

    def power(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    def one_sided(self) -> tuple[np.ndarray, np.ndarray]:
        keep = self.frequencies >= 0
        return self.frequencies[keep], self.amplitudes[keep]


def harmonic_spectrum(waveform: Waveform, drive: DriveSpec | None = None) -> Spectrum:
    drive = drive or waveform.drive
    n = len(waveform.j)
    if n != drive.sample_count:
        raise DomainError(f"waveform has {n} samples, drive expects {drive.sample_count}")
    amps = np.fft.fft(waveform.j) / n
    resolution = drive.fundamental / drive.periods
    freqs = np.fft.fftfreq(n, d=1.0 / n) * resolution
    return Spectrum(freqs, amps, resolution)


def rc_load_division(spectrum: Spectrum, r_load: float, c_shunt: float) -> Spectrum:
    """Load-current share of each bin: ``X / (1 + i w R C)``."""
    if not r_load > 0:
        raise DomainError(f"r_load must be > 0, got {r_load!r} ohm")
    if not c_shunt >= 0:
        raise DomainError(f"c_shunt must be >= 0, got {c_shunt!r} F")
    factor = 1.0 + 1j * spectrum.frequencies * r_load * c_shunt
    return Spectrum(spectrum.frequencies, spectrum.amplitudes / factor, spectrum.resolution)
