"""Both sides of the matching condition at the interface.

On q > 0 the reduced equation reads ``phi'' = (delta + w(q)) phi`` with
``w(q) = 2 (u_R(q) - a)`` equal to ``q``, ``2 q^2`` or ``2 b e^q``.  The right
log-derivative ``R(delta) = phi_R'(0)/phi_R(0)`` of the decaying solution is
obtained in closed form (Airy, Bessel K) or by integrating the Riccati
equation ``s' = delta + w(q) - s^2`` inward from deep in the forbidden region.

Besides ``R`` every evaluator exposes a continuous *phase*

    Theta(delta) = arccot R(delta) - pi * N(delta),

where ``N`` counts the nodes of ``phi_R`` on (0, inf).  ``R`` jumps from -inf
to +inf at each pole while ``N`` drops by one, so Theta is continuous and
increasing; poles sit at ``Theta = -k pi``.  The root finder brackets on it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np
from scipy.integrate import quad, solve_ivp

from .errors import InvalidParameterError, NotBoundStateError, PoleError
from .specfun import (
    AIRY_MAX_ARG,
    airy_ai,
    airy_ai_logderiv,
    airy_zero_count_above,
    _airy_zero,
    _k_scaled,
    bessel_k_logderiv,
)
from .units import DimensionlessModel, ProfileKind

__all__ = [
    "Method",
    "RightProfile",
    "LogDerivativeEvaluator",
    "alpha",
    "right_logderiv",
    "arccot",
]

# Riccati variable switching: s -> 1/s once |s| exceeds _S_HI, back once |s| < _S_LO.
_S_HI = 4.0
_S_LO = 1.0
_POLE_T = 1e-12  # |phi/phi'| at q=0 below which we report a pole
_AIRY_POLE_DISTANCE = 1e-10
_MAX_SEGMENTS = 100_000


class Method(str, Enum):
    AIRY = "airy-closed-form"
    BESSEL = "bessel-closed-form"
    INTEGRATE = "inward-integration"


def arccot(r: float) -> float:
    """Branch of arccot with values in [0, pi]; arccot(+inf) = 0, arccot(-inf) = pi."""
    return 0.5 * math.pi - math.atan(r)


def alpha(delta: float, gamma: float) -> float:
    """Left decay rate sqrt(delta + gamma) of phi_L(q) = phi(0) exp(alpha q)."""
    arg = delta + gamma
    if not arg > 0:
        raise NotBoundStateError(
            f"delta + gamma = {arg!r} <= 0: the left tail does not decay"
        )
    return math.sqrt(arg)


@dataclass(frozen=True)
class RightProfile:
    """Graded potential on q > 0 in reduced units."""

    kind: ProfileKind
    a: float = 0.0
    b: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", ProfileKind.parse(self.kind))
        if self.kind is ProfileKind.EXPONENTIAL and not (self.b is not None and self.b > 0):
            raise InvalidParameterError("exponential profile needs b > 0")

    @classmethod
    def from_model(cls, model: DimensionlessModel) -> "RightProfile":
        return cls(model.kind, model.a, model.b)

    def u(self, q: float) -> float:
        return self.a + 0.5 * self.excess(q)

    def excess(self, q):
        """w(q) = 2 (u_R(q) - a); accepts scalars or arrays."""
        if self.kind is ProfileKind.LINEAR:
            return q
        if self.kind is ProfileKind.PARABOLIC:
            return 2.0 * q * q
        return 2.0 * self.b * np.exp(q)

    def depth_point(self, delta: float, depth: float) -> float:
        """Smallest q >= 0 where delta + w(q) >= depth."""
        need = depth - delta
        if self.kind is ProfileKind.LINEAR:
            q = need
        elif self.kind is ProfileKind.PARABOLIC:
            q = math.sqrt(need / 2.0) if need > 0 else 0.0
        else:
            q = math.log(need / (2.0 * self.b)) if need > 0 else 0.0
        return max(q, 0.0)


def _default_method(kind: ProfileKind) -> Method:
    return Method.AIRY if kind is ProfileKind.LINEAR else Method.INTEGRATE


@dataclass(frozen=True)
class LogDerivativeEvaluator:
    """Right log-derivative R(delta) for one profile.

    ``wkb_depth`` is the minimum of ``u_R(q_max) - eps`` at the start of the
    inward integration; ``q_extra`` further pushes the start point outward.
    ``q_max`` overrides the automatic choice when given.
    """

    profile: RightProfile
    method: Method | None = None
    rtol: float = 1e-10
    atol: float = 1e-12
    wkb_depth: float = 25.0
    q_extra: float = 2.0
    q_max: float | None = None

    def __post_init__(self) -> None:
        method = Method(self.method) if self.method is not None else _default_method(self.profile.kind)
        object.__setattr__(self, "method", method)
        if method is Method.AIRY and self.profile.kind is not ProfileKind.LINEAR:
            raise InvalidParameterError("airy-closed-form requires the linear profile")
        if method is Method.BESSEL and self.profile.kind is not ProfileKind.EXPONENTIAL:
            raise InvalidParameterError("bessel-closed-form requires the exponential profile")
        if not (self.rtol > 0 and self.atol > 0 and self.wkb_depth > 0):
            raise InvalidParameterError("tolerances and wkb_depth must be positive")

    @classmethod
    def for_model(cls, model: DimensionlessModel, method: Method | str | None = None, **kw) -> "LogDerivativeEvaluator":
        return cls(RightProfile.from_model(model), None if method is None else Method(method), **kw)

    # ----------------------------------------------------------- dispatch

    def _route(self, delta: float) -> Method:
        if self.method is Method.BESSEL and delta <= 0:
            return Method.INTEGRATE
        return self.method

    def start_point(self, delta: float) -> float:
        if self.q_max is not None:
            return self.q_max
        return self.profile.depth_point(delta, 2.0 * self.wkb_depth) + self.q_extra

    def logderiv(self, delta: float) -> float:
        """R(delta) = phi_R'(0)/phi_R(0); raises PoleError at a pole."""
        delta = float(delta)
        method = self._route(delta)
        if method is Method.AIRY:
            return self._airy_logderiv(delta)
        if method is Method.BESSEL:
            z0 = 2.0 * math.sqrt(2.0 * self.profile.b)
            return 0.5 * z0 * bessel_k_logderiv(2.0 * math.sqrt(delta), z0)
        form, value, _ = self._riccati(delta)
        if form == "s":
            return value
        if abs(value) < _POLE_T:
            raise PoleError(f"delta={delta!r} is at a pole of R (phi_R(0)/phi_R'(0) = {value:.3e})",
                            (delta - 1e-9, delta + 1e-9))
        return 1.0 / value

    def _airy_logderiv(self, delta: float) -> float:
        if delta < 0 and delta >= -AIRY_MAX_ARG:
            k = airy_zero_count_above(delta)
            for j in (k, k + 1):
                if j >= 1:
                    z = _airy_zero(j)
                    if abs(delta - z) <= _AIRY_POLE_DISTANCE:
                        raise PoleError(f"delta={delta!r} is within {_AIRY_POLE_DISTANCE} of Airy zero a_{j}={z!r}",
                                        (z - _AIRY_POLE_DISTANCE, z + _AIRY_POLE_DISTANCE))
        return airy_ai_logderiv(delta)

    def node_count(self, delta: float) -> int:
        """Nodes of the decaying right solution on (0, inf) = poles of R above delta."""
        delta = float(delta)
        method = self._route(delta)
        if method is Method.AIRY:
            return airy_zero_count_above(delta)
        if method is Method.BESSEL:
            return 0
        return self._riccati(delta)[2]

    def phase(self, delta: float) -> float:
        """Continuous increasing phase arccot(R) - pi*N; poles at -k*pi, k = 0, 1, ..."""
        delta = float(delta)
        method = self._route(delta)
        if method is Method.AIRY:
            n = airy_zero_count_above(delta)
            if abs(delta) <= AIRY_MAX_ARG:
                ai = airy_ai(delta)
                theta = math.atan2(ai.value, ai.derivative) % math.pi
            else:
                theta = arccot(airy_ai_logderiv(delta))
            return theta - math.pi * n
        if method is Method.BESSEL:
            return arccot(self.logderiv(delta))
        form, value, n = self._riccati(delta)
        theta = arccot(value) if form == "s" else math.atan(value) % math.pi
        return theta - math.pi * n

    # -------------------------------------------------------- integration

    def _riccati(self, delta: float) -> tuple[str, float, int]:
        """Integrate s = phi'/phi inward from q_max to 0.

        Returns (form, value, nodes): form "s" gives s(0); form "t" gives
        t(0) = 1/s(0).  ``nodes`` counts sign changes of phi on (0, q_max).
        """
        w = self.profile.excess
        q = self.start_point(delta)
        kappa2 = delta + w(q)
        if kappa2 <= 0:
            raise InvalidParameterError(f"start point q_max={q} is not in the forbidden region")
        s = -math.sqrt(kappa2)
        form, y = ("s", s) if abs(s) <= _S_HI else ("t", 1.0 / s)
        nodes = 0

        def rhs_s(x, v):
            return [delta + w(x) - v[0] * v[0]]

        def rhs_t(x, v):
            return [1.0 - (delta + w(x)) * v[0] * v[0]]

        def leave_s(x, v):
            return abs(v[0]) - _S_HI

        def leave_t(x, v):
            return abs(v[0]) - 1.0 / _S_LO

        def node(x, v):
            return v[0]

        leave_s.terminal = True
        leave_s.direction = 1
        leave_t.terminal = True
        leave_t.direction = 1

        for _ in range(_MAX_SEGMENTS):
            if form == "s":
                sol = solve_ivp(rhs_s, (q, 0.0), [y], method="DOP853", rtol=self.rtol,
                                atol=self.atol, events=[leave_s])
            else:
                sol = solve_ivp(rhs_t, (q, 0.0), [y], method="DOP853", rtol=self.rtol,
                                atol=self.atol, events=[leave_t, node])
                nodes += len(sol.t_events[1])
            if not sol.success:
                raise RuntimeError(f"Riccati integration failed at delta={delta!r}: {sol.message}")
            if sol.status == 1:  # switching event
                q = float(sol.t_events[0][0])
                y = 1.0 / float(sol.y_events[0][0][0])
                form = "t" if form == "s" else "s"
                continue
            return form, float(sol.y[0, -1]), nodes
        raise RuntimeError(f"too many Riccati segments at delta={delta!r}")

    # ---------------------------------------------------- right solution

    def right_solution(self, delta: float) -> Callable[[np.ndarray | float], np.ndarray | float]:
        """Return q -> phi_R(q)/phi_R(0) for q >= 0 (zero beyond the start point)."""
        delta = float(delta)
        method = self._route(delta)
        if method is Method.AIRY:
            return _AiryRatio(delta)
        if method is Method.BESSEL:
            return _BesselRatio(delta, self.profile.b)
        return self._integrated_solution(delta)

    def _integrated_solution(self, delta: float):
        w = self.profile.excess
        q_max = self.start_point(delta)
        kappa = math.sqrt(delta + w(q_max))
        # start small so that phi(0) is O(1): the inward growth is ~exp(int kappa);
        # atol scales with the start value so the error control stays relative
        growth = quad(lambda x: math.sqrt(max(delta + w(x), 0.0)), 0.0, q_max, limit=200)[0]
        phi0 = math.exp(-min(growth, 700.0))
        sol = solve_ivp(lambda x, v: [v[1], (delta + w(x)) * v[0]], (q_max, 0.0),
                        [phi0, -kappa * phi0], method="DOP853", rtol=1e-12, atol=1e-14 * phi0,
                        dense_output=True)
        if not sol.success:
            raise RuntimeError(f"eigenfunction integration failed at delta={delta!r}: {sol.message}")
        at_zero = float(sol.y[0, -1])
        if at_zero == 0.0:
            raise PoleError(f"phi_R(0) vanishes at delta={delta!r}", (delta - 1e-9, delta + 1e-9))
        return _DenseRatio(sol.sol, at_zero, q_max)


def right_logderiv(e: LogDerivativeEvaluator, delta: float) -> float:
    """R(delta) from evaluator ``e``."""
    return e.logderiv(delta)


class _AiryRatio:
    def __init__(self, delta: float):
        self.delta = delta
        self.at_zero = airy_ai(delta).value

    def _one(self, q: float) -> float:
        x = q + self.delta
        if x > AIRY_MAX_ARG:
            return 0.0
        return airy_ai(x).value / self.at_zero

    def __call__(self, q):
        if np.ndim(q) == 0:
            return self._one(float(q))
        return np.array([self._one(float(v)) for v in np.ravel(q)]).reshape(np.shape(q))


class _BesselRatio:
    _Z_MAX = 700.0

    def __init__(self, delta: float, b: float):
        self.nu = 2.0 * math.sqrt(delta)
        self.z0 = 2.0 * math.sqrt(2.0 * b)
        self.g0, self.i0 = _k_scaled(self.nu, self.z0)

    def _one(self, q: float) -> float:
        z = self.z0 * math.exp(0.5 * q)
        if z > self._Z_MAX:
            return 0.0
        g, i = _k_scaled(self.nu, z)
        return math.exp(g - self.g0) * i / self.i0

    def __call__(self, q):
        if np.ndim(q) == 0:
            return self._one(float(q))
        return np.array([self._one(float(v)) for v in np.ravel(q)]).reshape(np.shape(q))


class _DenseRatio:
    def __init__(self, dense, at_zero: float, q_max: float):
        self.dense = dense
        self.at_zero = at_zero
        self.q_max = q_max

    def __call__(self, q):
        qa = np.asarray(q, dtype=float)
        inside = qa <= self.q_max
        out = np.zeros_like(qa)
        if np.any(inside):
            out[inside] = self.dense(qa[inside])[0] / self.at_zero
        return float(out) if np.ndim(q) == 0 else out
