"""Airy functions, Airy zeros and the modified Bessel function K of real order.

Airy functions use the Maclaurin series for ``|x| <= AIRY_SERIES_SWITCH`` and
the classical asymptotic expansions beyond.  The series is summed in decimal
arithmetic with :data:`_SERIES_DIGITS` significant digits: the alternating and
exponentially growing partial terms lose up to ~25 digits to cancellation at
the switch point, which double precision cannot absorb.

Bessel K is computed from ``K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt``
with tanh-sinh quadrature on a truncated, peak-centred interval, carried in
log-scaled form so that ratios never overflow.
"""

from __future__ import annotations

import math
from decimal import Decimal, localcontext
from functools import lru_cache
from typing import NamedTuple

import numpy as np
from scipy.optimize import bisect

from .errors import SpecialFunctionRangeError

__all__ = [
    "AIRY_SERIES_SWITCH",
    "AIRY_MAX_ARG",
    "AiryPair",
    "airy_ai",
    "airy_bi",
    "airy_ai_logderiv",
    "airy_zeros",
    "airy_zero_count_above",
    "bessel_k",
    "bessel_k_logderiv",
]

#: Series is used for |x| <= this; asymptotic expansions beyond.  Chosen from
#: the overlap test (tests/test_specfun.py::test_series_asymptotic_overlap):
#: both branches agree to ~1e-15 on [8, 12] on either side of the origin.
AIRY_SERIES_SWITCH = 10.0
AIRY_MAX_ARG = 100.0
AIRY_MAX_ZEROS = 50

_SERIES_DIGITS = 60

# Ai(0), -Ai'(0) and sqrt(3) to 66 digits.
_AI0 = Decimal("0.355028053887817239260063186004183176397979174199177240583326510300")
_MAIP0 = Decimal("0.258819403792806798405183560189203963479091138354934582210001813856")
_SQRT3 = Decimal("1.73205080756887729352744634150587236694280525381038062805580697945")

_SQRT_PI = math.sqrt(math.pi)


class AiryPair(NamedTuple):
    value: float
    derivative: float


# -------------------------------------------------------------------- Airy


def _airy_series(x: float) -> tuple[float, float, float, float]:
    """Ai, Ai', Bi, Bi' from the Maclaurin series, summed to 60 digits."""
    with localcontext() as ctx:
        ctx.prec = _SERIES_DIGITS
        X = Decimal(x)
        x3 = X * X * X
        # f, g: the two power series solutions; fp, gp: their derivatives.
        tf, tg, tfp, tgp = Decimal(1), X, X * X / 2, Decimal(1)
        f, g, fp, gp = tf, tg, tfp, tgp
        biggest = max(abs(tf), abs(tg), abs(tfp), abs(tgp))
        eps = Decimal(10) ** (-_SERIES_DIGITS)
        k = 1
        while True:
            k3 = 3 * k
            tf = tf * x3 / ((k3 - 1) * k3)
            tg = tg * x3 / (k3 * (k3 + 1))
            tgp = tgp * x3 / (k3 * (k3 - 2))
            if k >= 2:
                tfp = tfp * x3 / ((k3 - 3) * (k3 - 1))
                fp += tfp
            f += tf
            g += tg
            gp += tgp
            size = max(abs(tf), abs(tg), abs(tfp), abs(tgp))
            biggest = max(biggest, size)
            if size <= eps * biggest:
                break
            k += 1
        ai = _AI0 * f - _MAIP0 * g
        aip = _AI0 * fp - _MAIP0 * gp
        bi = _SQRT3 * (_AI0 * f + _MAIP0 * g)
        bip = _SQRT3 * (_AI0 * fp + _MAIP0 * gp)
        return float(ai), float(aip), float(bi), float(bip)


def _asymptotic_sums(zeta: float) -> tuple[list[float], list[float]]:
    """Terms u_k/zeta^k and v_k/zeta^k up to the smallest one (optimal truncation)."""
    us, vs = [1.0], [1.0]
    u = 1.0
    k = 1
    while True:
        u *= (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216.0 * k * zeta)
        v = -(6 * k + 1) / (6 * k - 1) * u
        if abs(u) >= abs(us[-1]) or abs(u) < 1e-18:
            break
        us.append(u)
        vs.append(v)
        k += 1
    return us, vs


def _airy_asymptotic(x: float) -> tuple[float, float, float, float]:
    ax = abs(x)
    zeta = 2.0 / 3.0 * ax * math.sqrt(ax)
    x14 = ax ** 0.25
    us, vs = _asymptotic_sums(zeta)
    if x > 0:
        su_alt = sum(t * (-1) ** k for k, t in enumerate(us))
        sv_alt = sum(t * (-1) ** k for k, t in enumerate(vs))
        su, sv = sum(us), sum(vs)
        decay = math.exp(-zeta)
        grow = math.exp(zeta)
        ai = decay / (2.0 * _SQRT_PI * x14) * su_alt
        aip = -x14 * decay / (2.0 * _SQRT_PI) * sv_alt
        bi = grow / (_SQRT_PI * x14) * su
        bip = x14 * grow / _SQRT_PI * sv
        return ai, aip, bi, bip
    ue = sum(t * (-1) ** (k // 2) for k, t in enumerate(us) if k % 2 == 0)
    uo = sum(t * (-1) ** (k // 2) for k, t in enumerate(us) if k % 2 == 1)
    ve = sum(t * (-1) ** (k // 2) for k, t in enumerate(vs) if k % 2 == 0)
    vo = sum(t * (-1) ** (k // 2) for k, t in enumerate(vs) if k % 2 == 1)
    c, s = math.cos(zeta - math.pi / 4), math.sin(zeta - math.pi / 4)
    ai = (c * ue + s * uo) / (_SQRT_PI * x14)
    aip = x14 * (s * ve - c * vo) / _SQRT_PI
    bi = (-s * ue + c * uo) / (_SQRT_PI * x14)
    bip = x14 * (c * ve + s * vo) / _SQRT_PI
    return ai, aip, bi, bip


def _airy_all(x: float) -> tuple[float, float, float, float]:
    if abs(x) <= AIRY_SERIES_SWITCH:
        return _airy_series(x)
    return _airy_asymptotic(x)


def _check_airy_arg(x: float) -> float:
    x = float(x)
    if not math.isfinite(x) or abs(x) > AIRY_MAX_ARG:
        raise SpecialFunctionRangeError(
            f"Airy argument {x!r} outside supported range |x| <= {AIRY_MAX_ARG}"
        )
    return x


def airy_ai(x: float) -> AiryPair:
    """Ai(x) and Ai'(x) for |x| <= 100.

    >>> round(airy_ai(0.0).value, 12)
    0.355028053888
    """
    ai, aip, _, _ = _airy_all(_check_airy_arg(x))
    return AiryPair(ai, aip)


def airy_bi(x: float) -> AiryPair:
    """Bi(x) and Bi'(x) for |x| <= 100."""
    _, _, bi, bip = _airy_all(_check_airy_arg(x))
    return AiryPair(bi, bip)


def airy_ai_logderiv(x: float) -> float:
    """Ai'(x)/Ai(x) for any finite x.

    Beyond |x| = 100 the ratio is formed from the asymptotic sums directly, so
    neither the exponential prefactor nor its underflow enters.  Returns
    ``-inf``/``inf`` only if Ai(x) is exactly zero in floating point.
    """
    x = float(x)
    if not math.isfinite(x):
        raise SpecialFunctionRangeError(f"non-finite Airy argument {x!r}")
    if abs(x) <= AIRY_MAX_ARG:
        ai, aip, _, _ = _airy_all(x)
        if ai == 0.0:
            return math.copysign(math.inf, aip)
        return aip / ai
    zeta = 2.0 / 3.0 * abs(x) ** 1.5
    us, vs = _asymptotic_sums(zeta)
    if x > 0:
        su = sum(t * (-1) ** k for k, t in enumerate(us))
        sv = sum(t * (-1) ** k for k, t in enumerate(vs))
        return -math.sqrt(x) * sv / su
    ai, aip, _, _ = _airy_asymptotic(x)
    return aip / ai


# -------------------------------------------------------------- Airy zeros


def _zero_guess(k: int) -> float:
    t = 3.0 * math.pi * (4 * k - 1) / 8.0
    return -(t ** (2.0 / 3.0)) * (1 + 5.0 / 48.0 / t**2 - 5.0 / 36.0 / t**4)


@lru_cache(maxsize=None)
def _airy_zero(k: int) -> float:
    guess = _zero_guess(k)
    width = 0.05
    f = lambda x: _airy_all(x)[0]
    while True:
        lo, hi = guess - width, guess + width
        if f(lo) * f(hi) < 0:
            break
        width *= 2.0
        if width > 1.0:
            raise RuntimeError(f"could not bracket Airy zero {k}")
    return bisect(f, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps, maxiter=200)


def airy_zeros(n: int) -> list[float]:
    """First ``n`` zeros a_1 > a_2 > ... of Ai (1 <= n <= 50), bisected to 1e-12 or better."""
    if not 1 <= int(n) <= AIRY_MAX_ZEROS or int(n) != n:
        raise SpecialFunctionRangeError(f"number of Airy zeros must be in [1, {AIRY_MAX_ZEROS}], got {n!r}")
    return [_airy_zero(k) for k in range(1, int(n) + 1)]


def airy_zero_count_above(x: float) -> int:
    """Number of zeros of Ai strictly greater than ``x``.

    Near a zero the side is decided from the sign of Ai(x), so the count is
    consistent with the sign pattern of the function itself.
    """
    if x >= _airy_zero(1) + 1e-8:
        return 0
    k = 1
    while _airy_zero(k) > x + 1e-8:
        k += 1
    # _airy_zero(k) is the first zero not clearly above x.
    zk = _airy_zero(k)
    if abs(zk - x) <= 1e-8:
        ai = _airy_all(x)[0]
        # Ai'(a_k) has sign (-1)^(k-1); Ai(x) shares it just above a_k.
        above = ai != 0.0 and (ai > 0) == (k % 2 == 1)
        return k - 1 if (above or ai == 0.0) else k
    return k - 1


# ----------------------------------------------------------------- Bessel K

_K_NU_MAX = 60.0
_K_X_MIN = 1e-8
_K_X_MAX = 700.0
_K_TAIL = 60.0  # integrand cut where it has fallen by e^-60 from its peak


def _tanh_sinh(f, lo: float, hi: float, rtol: float = 1e-14, max_level: int = 12) -> float:
    """Integrate a smooth vectorised ``f`` over [lo, hi] by tanh-sinh quadrature."""
    half = 0.5 * (hi - lo)
    u_max = 4.0

    def level_sum(u: np.ndarray) -> float:
        s = 0.5 * math.pi * np.sinh(u)
        w = 0.5 * math.pi * np.cosh(u) / np.cosh(s) ** 2
        # distance from the nearer endpoint, computed without cancellation
        d = half * 2.0 / (np.exp(2.0 * s) + 1.0)
        return float(np.sum(w * (f(lo + d) + f(hi - d))))

    h = 1.0
    u = np.arange(1, int(u_max / h) + 1) * h
    total = half * h * (0.5 * math.pi * float(f(np.array([lo + half]))[0]) + level_sum(u))
    for _ in range(max_level):
        h *= 0.5
        u = np.arange(1, int(u_max / h) + 1, 2) * h
        new = 0.5 * total + half * h * level_sum(u)
        if abs(new - total) <= rtol * abs(new):
            return new
        total = new
    return total


def _k_scaled(nu: float, x: float) -> tuple[float, float]:
    """Return (log_scale, integral) with K_nu(x) = exp(log_scale) * integral."""
    t_peak = math.asinh(nu / x) if nu > 0 else 0.0
    g_peak = -x * math.sqrt(1.0 + (nu / x) ** 2) + nu * t_peak

    def drop(t: float) -> float:
        return -x * math.cosh(t) + nu * t - g_peak

    step = 1.0
    while drop(t_peak + step) > -_K_TAIL:
        step *= 2.0
    hi = bisect(lambda t: drop(t) + _K_TAIL, t_peak, t_peak + step, xtol=1e-6)
    lo = 0.0
    if t_peak > 0 and drop(0.0) < -_K_TAIL:
        lo = bisect(lambda t: drop(t) + _K_TAIL, 0.0, t_peak, xtol=1e-6)

    def integrand(t: np.ndarray) -> np.ndarray:
        return np.exp(-x * np.cosh(t) + nu * t - g_peak) * 0.5 * (1.0 + np.exp(-2.0 * nu * t))

    return g_peak, _tanh_sinh(integrand, lo, hi)


def _check_k_args(nu: float, x: float) -> tuple[float, float]:
    nu, x = float(nu), float(x)
    if not (0.0 <= nu <= _K_NU_MAX):
        raise SpecialFunctionRangeError(f"Bessel order nu={nu!r} outside [0, {_K_NU_MAX}]")
    if not (_K_X_MIN <= x <= _K_X_MAX):
        raise SpecialFunctionRangeError(f"Bessel argument x={x!r} outside [{_K_X_MIN}, {_K_X_MAX}]")
    return nu, x


def _from_scaled(log_scale: float, integral: float, what: str) -> float:
    log_value = log_scale + math.log(integral)
    if log_value > 709.0:
        raise SpecialFunctionRangeError(f"{what} overflows double precision")
    return math.exp(log_value)


def bessel_k(nu: float, x: float) -> tuple[float, float]:
    """K_nu(x) and dK_nu/dx for 0 <= nu <= 60, 1e-8 <= x <= 700.

    Raises :class:`SpecialFunctionRangeError` when the arguments are out of
    range or the value itself is not representable as a double (large order
    at tiny argument).
    """
    nu, x = _check_k_args(nu, x)
    value = _from_scaled(*_k_scaled(nu, x), what=f"K_{nu}({x})")
    lower = _from_scaled(*_k_scaled(abs(nu - 1.0), x), what="K_{nu-1}")
    upper = _from_scaled(*_k_scaled(nu + 1.0, x), what="K_{nu+1}")
    return value, -0.5 * (lower + upper)


def bessel_k_logderiv(nu: float, x: float) -> float:
    """K_nu'(x)/K_nu(x), free of overflow for all arguments in range."""
    nu, x = _check_k_args(nu, x)
    g0, i0 = _k_scaled(nu, x)
    gm, im = _k_scaled(abs(nu - 1.0), x)
    gp, ip = _k_scaled(nu + 1.0, x)
    return -0.5 * (im / i0 * math.exp(gm - g0) + ip / i0 * math.exp(gp - g0))
