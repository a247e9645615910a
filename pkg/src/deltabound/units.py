"""Reduction of the physical model to its minimal dimensionless form.

With ``q = x/L`` the Schrödinger equation becomes
``phi'' = 2 [v(q) - eps] phi`` where ``v = m L^2 V / hbar^2`` and
``eps = m L^2 E / hbar^2``.  The unit of length ``L`` is picked per profile so
that the right-hand potential has no free slope/curvature coefficient:

========== =========================== =====================
kind       U_R(x)                      u_R(q)
========== =========================== =====================
linear     A + B x                     a + q/2
parabolic  A + B x^2                   a + q^2
exponential A + B exp(beta x)          a + b exp(q)
========== =========================== =====================
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import InvalidParameterError

__all__ = [
    "ProfileKind",
    "PhysicalParameters",
    "DimensionlessModel",
    "length_scale",
    "reduce",
    "restore_energy",
]


class ProfileKind(str, Enum):
    LINEAR = "linear"
    PARABOLIC = "parabolic"
    EXPONENTIAL = "exponential"

    @classmethod
    def parse(cls, value: "str | ProfileKind") -> "ProfileKind":
        try:
            return cls(value)
        except ValueError:
            allowed = ", ".join(k.value for k in cls)
            raise InvalidParameterError(f"unknown profile kind {value!r} (expected one of: {allowed})") from None


def _positive(name: str, value: float) -> float:
    value = float(value)
    if not (math.isfinite(value) and value > 0):
        raise InvalidParameterError(f"{name} must be a finite positive number, got {value!r}")
    return value


def _finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise InvalidParameterError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class PhysicalParameters:
    """Dimensional inputs of the model ``V(x) = U0 delta(x) + U(x)``.

    ``U(x) = UL`` for x < 0 and the graded profile ``U_R`` for x > 0.
    ``beta`` is given for (and only for) the exponential profile.
    """

    kind: ProfileKind
    m: float
    hbar: float
    U0: float
    UL: float
    A: float
    B: float
    beta: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", ProfileKind.parse(self.kind))
        _positive("m", self.m)
        _positive("hbar", self.hbar)
        _positive("B", self.B)
        for name in ("U0", "UL", "A"):
            _finite(name, getattr(self, name))
        if self.kind is ProfileKind.EXPONENTIAL:
            if self.beta is None:
                raise InvalidParameterError("beta is required for the exponential profile")
            _positive("beta", self.beta)
        elif self.beta is not None:
            raise InvalidParameterError(f"beta is only meaningful for the exponential profile, not {self.kind.value}")

    def right_potential(self, x: float) -> float:
        """U_R(x) in energy units, x > 0."""
        if self.kind is ProfileKind.LINEAR:
            return self.A + self.B * x
        if self.kind is ProfileKind.PARABOLIC:
            return self.A + self.B * x * x
        return self.A + self.B * math.exp(self.beta * x)


@dataclass(frozen=True)
class DimensionlessModel:
    """Minimal parameter set of the reduced problem.

    Bound-state roots delta_j depend on ``u0`` and ``gamma`` only (plus ``b``
    for the exponential profile); ``a`` shifts the energies and ``length`` is
    the unit of length that was used (1.0 for models entered directly).
    """

    kind: ProfileKind
    u0: float
    gamma: float
    a: float = 0.0
    b: float | None = None
    length: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", ProfileKind.parse(self.kind))
        _finite("u0", self.u0)
        _finite("gamma", self.gamma)
        _finite("a", self.a)
        _positive("length", self.length)
        if self.kind is ProfileKind.EXPONENTIAL:
            if self.b is None:
                raise InvalidParameterError("b is required for the exponential profile")
            _positive("b", self.b)
        elif self.b is not None:
            raise InvalidParameterError(f"b is only meaningful for the exponential profile, not {self.kind.value}")

    @property
    def u_left(self) -> float:
        """Constant dimensionless potential on q < 0."""
        return self.a + 0.5 * self.gamma

    def u_right(self, q: float) -> float:
        if self.kind is ProfileKind.LINEAR:
            return self.a + 0.5 * q
        if self.kind is ProfileKind.PARABOLIC:
            return self.a + q * q
        return self.a + self.b * math.exp(q)

    def energy(self, delta: float) -> float:
        """Dimensionless energy eps = a - delta/2."""
        return self.a - 0.5 * delta

    def delta(self, energy: float) -> float:
        return 2.0 * (self.a - energy)


def length_scale(p: PhysicalParameters) -> float:
    """Unit of length L for the profile kind of ``p``."""
    if p.kind is ProfileKind.LINEAR:
        return (p.hbar**2 / (2.0 * p.m * p.B)) ** (1.0 / 3.0)
    if p.kind is ProfileKind.PARABOLIC:
        return math.sqrt(p.hbar) / (p.m * p.B) ** 0.25
    return 1.0 / p.beta


def reduce(p: PhysicalParameters) -> DimensionlessModel:
    """Map physical parameters to the dimensionless model."""
    L = length_scale(p)
    scale = p.m * L * L / p.hbar**2  # energy -> dimensionless
    u0 = p.m * L * p.U0 / p.hbar**2
    a = scale * p.A
    gamma = 2.0 * (scale * p.UL - a)
    b = p.m * p.B / (p.hbar**2 * p.beta**2) if p.kind is ProfileKind.EXPONENTIAL else None
    return DimensionlessModel(kind=p.kind, u0=u0, gamma=gamma, a=a, b=b, length=L)


def restore_energy(model: DimensionlessModel, p: PhysicalParameters, eps: float) -> float:
    """Physical energy E = hbar^2 eps / (m L^2)."""
    return p.hbar**2 * eps / (p.m * model.length**2)
