"""Airy functions of real argument and Bessel functions of integer order.

Two regimes are used for the Airy functions:

* ``|x| <= 8``: power series.  The Maclaurin series is summed once, at
  import time, in 60-digit decimal arithmetic on an anchor grid of spacing
  0.25.  A call then takes a short Taylor step from the nearest anchor using
  the recurrence implied by ``y'' = x y``.  Summing the Maclaurin series
  directly in double precision loses up to 13 digits to cancellation near
  ``|x| = 8`` (Ai for x > 0, both functions for x < 0), which is what the
  anchors avoid.
* ``|x| > 8``: the classical asymptotic expansions in
  ``zeta = (2/3)|x|**1.5``; exponential for x > 0, oscillatory for x < 0.

The scaled variants ``airy_scaled`` return ``Ai e^{zeta}``, ``Bi e^{-zeta}``
(and derivatives) for x > 0 so that barrier problems far outside the
double-precision range of Bi can still be solved.

Bessel functions J_n use Miller's downward recurrence normalized with
``J_0 + 2 sum J_2k = 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal, localcontext

from .errors import DomainError, EvaluationError

__all__ = [
    "AirySet",
    "airy_all",
    "airy_scaled",
    "airy_scale_exponent",
    "bessel_jn",
    "bessel_jn_sequence",
    "AIRY_SWITCH",
    "AIRY_MIN_X",
    "AIRY_MAX_X",
    "BESSEL_MAX_ORDER",
]

AIRY_SWITCH = 8.0
AIRY_MIN_X = -200.0
# Bi(x) overflows a double just above x = 104.
AIRY_MAX_X = 100.0
AIRY_SCALED_MAX_X = 1.0e6
BESSEL_MAX_ORDER = 512

_ANCHOR_STEP = 0.25
_SQRT_PI = math.sqrt(math.pi)

# Ai(0) and -Ai'(0) to 50 digits.
_AI0 = "0.35502805388781723926006318600418317639797917419918"
_MAI1 = "0.25881940379280679840518356018920396347909113835493"


@dataclass(frozen=True)
class AirySet:
    """Ai, Ai', Bi, Bi' at one real argument ``x``."""

    x: float
    ai: float
    ai_prime: float
    bi: float
    bi_prime: float

    def wronskian(self) -> float:
        """``Ai Bi' - Ai' Bi``; equals 1/pi exactly (scaling cancels)."""
        return self.ai * self.bi_prime - self.ai_prime * self.bi


# ---------------------------------------------------------------------------
# power-series branch


def _maclaurin_decimal(x: Decimal) -> tuple[float, float, float, float]:
    with localcontext() as ctx:
        ctx.prec = 60
        c1 = Decimal(_AI0)
        c2 = Decimal(_MAI1)
        sqrt3 = Decimal(3).sqrt()
        x3 = x * x * x
        tiny = Decimal("1e-58")

        # f = sum x^3k/..., g = sum x^(3k+1)/..., and their x-derivatives
        tf, tg, tfp, tgp = Decimal(1), x, Decimal(0), Decimal(1)
        f, g, fp, gp = tf, tg, tfp, tgp
        tfp = x * x / 2
        fp = tfp
        k = 1
        while True:
            tf = tf * x3 / ((3 * k - 1) * (3 * k))
            tg = tg * x3 / ((3 * k) * (3 * k + 1))
            tgp = tgp * x3 / ((3 * k - 2) * (3 * k))
            if k > 1:
                tfp = tfp * x3 / ((3 * k - 1) * (3 * k - 3))
                fp += tfp
            f += tf
            g += tg
            gp += tgp
            k += 1
            if k > 4 and max(abs(tf), abs(tg), abs(tfp), abs(tgp)) < tiny:
                break
        ai = c1 * f - c2 * g
        aip = c1 * fp - c2 * gp
        bi = sqrt3 * (c1 * f + c2 * g)
        bip = sqrt3 * (c1 * fp + c2 * gp)
        return float(ai), float(aip), float(bi), float(bip)


def _build_anchors() -> tuple[tuple[float, ...], tuple[tuple[float, float, float, float], ...]]:
    count = int(round(2 * AIRY_SWITCH / _ANCHOR_STEP))
    xs = []
    values = []
    for j in range(count + 1):
        x = -AIRY_SWITCH + j * _ANCHOR_STEP
        xs.append(x)
        values.append(_maclaurin_decimal(Decimal(x)))
    return tuple(xs), tuple(values)


_ANCHOR_X, _ANCHOR_VALUES = _build_anchors()


def _taylor_step(x0: float, y0: float, dy0: float, h: float) -> tuple[float, float]:
    # y'' = x y about x0: a_{k+2} = (x0 a_k + a_{k-1}) / ((k+1)(k+2)), a_{-1} = 0
    if h == 0.0:
        return y0, dy0
    a_km1, a_k, a_kp1 = 0.0, y0, dy0
    y = y0 + dy0 * h
    dy = dy0
    hk1 = h  # h**(k+1)
    quiet = 0
    for k in range(80):
        a_k2 = (x0 * a_k + a_km1) / ((k + 1) * (k + 2))
        d_term = (k + 2) * a_k2 * hk1
        hk1 *= h
        y_term = a_k2 * hk1
        y += y_term
        dy += d_term
        a_km1, a_k, a_kp1 = a_k, a_kp1, a_k2
        if abs(y_term) <= 1e-18 * abs(y) and abs(d_term) <= 1e-18 * abs(dy):
            quiet += 1
            if quiet == 3:
                return y, dy
        else:
            quiet = 0
    raise EvaluationError(f"Airy Taylor step did not converge at x={x0 + h!r} (series branch)")


def _airy_series_branch(x: float) -> AirySet:
    j = int(round((x + AIRY_SWITCH) / _ANCHOR_STEP))
    j = min(max(j, 0), len(_ANCHOR_X) - 1)
    x0 = _ANCHOR_X[j]
    ai0, aip0, bi0, bip0 = _ANCHOR_VALUES[j]
    h = x - x0
    ai, aip = _taylor_step(x0, ai0, aip0, h)
    bi, bip = _taylor_step(x0, bi0, bip0, h)
    return AirySet(x, ai, aip, bi, bip)


# ---------------------------------------------------------------------------
# asymptotic branch


def _asymptotic_coefficients(count: int) -> tuple[tuple[float, ...], tuple[float, ...]]:
    u = [1.0]
    v = [1.0]
    for k in range(1, count):
        uk = u[-1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216 * k)
        u.append(uk)
        v.append(-(6 * k + 1) / (6 * k - 1) * uk)
    return tuple(u), tuple(v)


_U, _V = _asymptotic_coefficients(60)


def _asymptotic_sums(zeta: float, alternating: bool) -> tuple[float, float]:
    su = sv = 0.0
    inv = 1.0 / zeta
    p = 1.0
    last = math.inf
    for k in range(len(_U)):
        sign = -1.0 if (alternating and k % 2) else 1.0
        tu = sign * _U[k] * p
        tv = sign * _V[k] * p
        mag = max(abs(tu), abs(tv))
        if mag > last:
            break
        su += tu
        sv += tv
        if mag < 1e-17:
            break
        last = mag
        p *= inv
    return su, sv


def _oscillatory_sums(zeta: float) -> tuple[float, float, float, float]:
    pu = qu = pv = qv = 0.0
    inv = 1.0 / zeta
    p = 1.0
    last = math.inf
    for k in range(len(_U)):
        # even k feeds P, odd k feeds Q; sign alternates every two orders
        sign = -1.0 if (k // 2) % 2 else 1.0
        tu = sign * _U[k] * p
        tv = sign * _V[k] * p
        mag = max(abs(tu), abs(tv))
        if mag > last:
            break
        if k % 2 == 0:
            pu += tu
            pv += tv
        else:
            qu += tu
            qv += tv
        if mag < 1e-17:
            break
        last = mag
        p *= inv
    return pu, qu, pv, qv


def _airy_asymptotic_scaled(x: float) -> AirySet:
    """Asymptotic values; scaled by e^{+-zeta} when x > 0."""
    if x > 0:
        zeta = 2.0 / 3.0 * x * math.sqrt(x)
        q = math.sqrt(math.sqrt(x))
        s_u, s_v = _asymptotic_sums(zeta, alternating=True)
        t_u, t_v = _asymptotic_sums(zeta, alternating=False)
        return AirySet(
            x,
            s_u / (2.0 * _SQRT_PI * q),
            -q * s_v / (2.0 * _SQRT_PI),
            t_u / (_SQRT_PI * q),
            q * t_v / _SQRT_PI,
        )
    z = -x
    zeta = 2.0 / 3.0 * z * math.sqrt(z)
    q = math.sqrt(math.sqrt(z))
    theta = zeta - math.pi / 4.0
    c, s = math.cos(theta), math.sin(theta)
    pu, qu, pv, qv = _oscillatory_sums(zeta)
    return AirySet(
        x,
        (c * pu + s * qu) / (_SQRT_PI * q),
        q * (s * pv - c * qv) / _SQRT_PI,
        (-s * pu + c * qu) / (_SQRT_PI * q),
        q * (c * pv + s * qv) / _SQRT_PI,
    )


def _airy_asymptotic_branch(x: float) -> AirySet:
    r = _airy_asymptotic_scaled(x)
    if x <= 0:
        return r
    zeta = airy_scale_exponent(x)
    dn, up = math.exp(-zeta), math.exp(zeta)
    return AirySet(x, r.ai * dn, r.ai_prime * dn, r.bi * up, r.bi_prime * up)


# ---------------------------------------------------------------------------
# public Airy API


def airy_scale_exponent(x: float) -> float:
    """Exponent ``zeta`` used by :func:`airy_scaled`: (2/3)x^1.5 for x > 0, else 0."""
    if x <= 0:
        return 0.0
    return 2.0 / 3.0 * x * math.sqrt(x)


def _check_argument(x: float, upper: float) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"Airy argument must be finite, got {x!r}")
    if x < AIRY_MIN_X or x > upper:
        raise DomainError(f"Airy argument {x!r} outside [{AIRY_MIN_X}, {upper}]")
    return x


def _finite(r: AirySet, branch: str) -> AirySet:
    if not all(math.isfinite(v) for v in (r.ai, r.ai_prime, r.bi, r.bi_prime)):
        raise EvaluationError(f"non-finite Airy value at x={r.x!r} ({branch} branch)")
    return r


def airy_all(x: float) -> AirySet:
    """Ai, Ai', Bi, Bi' at real ``x``.

    Parameters
    ----------
    x : float
        Argument in ``[-200, 100]``; Bi overflows a double above ~104.

    Raises
    ------
    DomainError
        If ``x`` is not finite or outside the supported interval.
    """
    x = _check_argument(x, AIRY_MAX_X)
    if abs(x) <= AIRY_SWITCH:
        return _finite(_airy_series_branch(x), "series")
    return _finite(_airy_asymptotic_branch(x), "asymptotic")


def airy_scaled(x: float) -> AirySet:
    """Exponentially scaled Airy functions.

    For ``x > 0`` returns ``Ai e^z, Ai' e^z, Bi e^-z, Bi' e^-z`` with
    ``z = airy_scale_exponent(x)``; for ``x <= 0`` the plain values.  Valid
    up to ``x = 1e6``.
    """
    x = _check_argument(x, AIRY_SCALED_MAX_X)
    if abs(x) <= AIRY_SWITCH:
        r = _airy_series_branch(x)
        if x > 0:
            zeta = airy_scale_exponent(x)
            up, dn = math.exp(zeta), math.exp(-zeta)
            r = AirySet(x, r.ai * up, r.ai_prime * up, r.bi * dn, r.bi_prime * dn)
        return _finite(r, "series")
    return _finite(_airy_asymptotic_scaled(x), "asymptotic")


# ---------------------------------------------------------------------------
# Bessel J_n


def bessel_jn_sequence(n_max: int, alpha: float) -> list[float]:
    """``[J_0(alpha), ..., J_{n_max}(alpha)]`` by Miller's downward recurrence."""
    n_max = int(n_max)
    if n_max < 0 or n_max > BESSEL_MAX_ORDER:
        raise DomainError(f"Bessel order {n_max} outside [0, {BESSEL_MAX_ORDER}]")
    alpha = float(alpha)
    if not math.isfinite(alpha):
        raise DomainError(f"Bessel argument must be finite, got {alpha!r}")
    ax = abs(alpha)
    if ax < 1e-6:
        out = _bessel_small(n_max, ax)
    else:
        out = _bessel_miller(n_max, ax)
    if alpha < 0:
        out = [v if n % 2 == 0 else -v for n, v in enumerate(out)]
    return out


def _bessel_small(n_max: int, x: float) -> list[float]:
    h = 0.5 * x
    h2 = h * h
    out = []
    lead = 1.0
    for n in range(n_max + 1):
        if n > 0:
            lead = lead * h / n
        out.append(lead * (1.0 - h2 / (n + 1) + h2 * h2 / (2.0 * (n + 1) * (n + 2))))
    return out


def _bessel_miller(n_max: int, x: float) -> list[float]:
    top = max(n_max, math.ceil(x))
    m = top + int(math.sqrt(160.0 * (top + 1))) + 20
    m += m % 2
    vals = [0.0] * (m + 2)
    j_next, j_cur = 0.0, 1e-30
    vals[m] = j_cur
    norm = 0.0
    two_over_x = 2.0 / x
    for k in range(m, 0, -1):
        j_prev = k * two_over_x * j_cur - j_next
        vals[k - 1] = j_prev
        if (k - 1) % 2 == 0 and k - 1 > 0:
            norm += 2.0 * j_prev
        j_next, j_cur = j_cur, j_prev
        if abs(j_cur) > 1e250:
            for i in range(k - 1, m + 1):
                vals[i] *= 1e-250
            norm *= 1e-250
            j_next *= 1e-250
            j_cur *= 1e-250
    norm += vals[0]
    if norm == 0.0 or not math.isfinite(norm):
        raise EvaluationError(f"Bessel normalization failed for alpha={x!r}")
    return [v / norm for v in vals[: n_max + 1]]


def bessel_jn(n: int, alpha: float) -> float:
    """Bessel function ``J_n(alpha)`` of integer order ``|n| <= 512``."""
    n = int(n)
    if abs(n) > BESSEL_MAX_ORDER:
        raise DomainError(f"Bessel order {n} exceeds cap {BESSEL_MAX_ORDER}")
    value = bessel_jn_sequence(abs(n), alpha)[abs(n)]
    if n < 0 and n % 2:
        value = -value
    return value
