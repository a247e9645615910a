"""Bound states from the quantization condition R(delta) = 2 u0 + sqrt(delta + gamma).

The window (delta_min, delta_max) with delta_min = -gamma + margin is cut
into cells by the poles of R.  On each cell the mismatch
F(delta) = R(delta) - 2 u0 - sqrt(delta + gamma) falls monotonically from
+inf to -inf, so every cell above -gamma holds exactly one root.  Brackets and
root polishing work on the continuous phase form of F (see
:mod:`deltabound.logderiv`), which stays finite at the cell ends.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .errors import InvalidParameterError, PoleError, WindowTooSmallError
from .logderiv import LogDerivativeEvaluator, Method, alpha, arccot
from .specfun import _airy_zero
from .units import DimensionlessModel

__all__ = [
    "QuantizationProblem",
    "BoundState",
    "GraphicalSolutionData",
    "find_roots",
    "find_poles",
    "eigenfunction",
    "derivative_jump",
    "graphical_data",
]

_MAX_WINDOW_EXTENSIONS = 40
_DUPLICATE_ROOT = 1e-10
_POLE_GAP = 1e-3


@dataclass(frozen=True)
class QuantizationProblem:
    model: DimensionlessModel
    evaluator: LogDerivativeEvaluator | None = None
    delta_max: float | None = None
    margin: float = 1e-9
    root_tol: float = 1e-12
    auto_extend: bool = True

    def __post_init__(self) -> None:
        if self.evaluator is None:
            object.__setattr__(self, "evaluator", LogDerivativeEvaluator.for_model(self.model))
        if self.evaluator.profile.kind is not self.model.kind:
            raise InvalidParameterError("evaluator profile does not match the model kind")
        if not (self.margin > 0 and self.root_tol > 0):
            raise InvalidParameterError("margin and root_tol must be positive")
        if self.delta_max is None:
            u0 = self.model.u0
            dmax = max(10.0, 8.0 * u0 * u0 + 2.0)
            if dmax <= self.delta_min:
                dmax = self.delta_min + 10.0
            object.__setattr__(self, "delta_max", dmax)
        if not self.delta_min < self.delta_max:
            raise InvalidParameterError(
                f"empty scan window: delta_min={self.delta_min} >= delta_max={self.delta_max}"
            )

    @property
    def delta_min(self) -> float:
        return -self.model.gamma + self.margin

    def rhs(self, delta: float) -> float:
        """Left side of the matching condition: 2 u0 + alpha(delta)."""
        return 2.0 * self.model.u0 + alpha(delta, self.model.gamma)

    def mismatch(self, delta: float) -> float:
        """F(delta) = R(delta) - 2 u0 - sqrt(delta + gamma)."""
        return self.evaluator.logderiv(delta) - self.rhs(delta)

    def _phase_gap(self, delta: float, m: int) -> float:
        # increasing in delta; zero exactly at the m-th root (m = 0: ground state)
        return self.evaluator.phase(delta) - arccot(self.rhs(delta)) + m * math.pi


@dataclass(frozen=True)
class BoundState:
    """One bound state; call it to evaluate the normalized eigenfunction."""

    index: int
    delta: float
    epsilon: float
    alpha: float
    residual: float
    u0: float
    evaluator: LogDerivativeEvaluator = field(repr=False, compare=False)

    @cached_property
    def right(self):
        """q -> phi_R(q)/phi_R(0) on q >= 0."""
        return self.evaluator.right_solution(self.delta)

    @cached_property
    def normalization(self) -> float:
        """phi(0) such that the integral of phi^2 over the real line is 1."""
        left = quad(lambda q: math.exp(2.0 * self.alpha * q), -np.inf, 0.0, epsabs=0.0, epsrel=1e-13)[0]
        profile = self.evaluator.profile
        turning = profile.depth_point(self.delta, 0.0)
        q_end = self.evaluator.start_point(self.delta)
        points = [turning] if 0.0 < turning < q_end else None
        right = quad(lambda q: float(self.right(q)) ** 2, 0.0, q_end, points=points,
                     limit=500, epsabs=0.0, epsrel=1e-12)[0]
        return 1.0 / math.sqrt(left + right)

    def ratio(self, q):
        """phi(q)/phi(0) for scalar or array q."""
        qa = np.asarray(q, dtype=float)
        out = np.empty_like(qa)
        neg = qa < 0
        out[neg] = np.exp(self.alpha * qa[neg])
        if np.any(~neg):
            out[~neg] = self.right(qa[~neg])
        return float(out) if np.ndim(q) == 0 else out

    def __call__(self, q):
        return self.normalization * self.ratio(q)


@dataclass(frozen=True)
class GraphicalSolutionData:
    delta: np.ndarray
    lhs: np.ndarray  # R(delta), NaN inside pole gaps
    rhs: np.ndarray
    pole_gap: np.ndarray
    poles: list[float]
    intersections: list[tuple[float, float]]


def find_poles(problem: QuantizationProblem, lo: float | None = None, hi: float | None = None) -> list[float]:
    """Poles of R in (lo, hi), in decreasing order."""
    ev = problem.evaluator
    lo = problem.delta_min if lo is None else lo
    hi = problem.delta_max if hi is None else hi
    first = ev.node_count(hi) + 1
    last = ev.node_count(lo)
    poles = []
    upper = hi
    for k in range(first, last + 1):
        if ev.method is Method.AIRY:
            p = _airy_zero(k)
        else:
            target = -(k - 1) * math.pi
            p = brentq(lambda d: ev.phase(d) - target, lo, upper, xtol=problem.root_tol)
        poles.append(p)
        upper = p
    return poles


def _check_window(problem: QuantizationProblem) -> QuantizationProblem:
    for _ in range(_MAX_WINDOW_EXTENSIONS):
        if problem._phase_gap(problem.delta_max, 0) > 0:
            return problem
        suggested = 2.0 * abs(problem.delta_max) + 10.0
        if not problem.auto_extend:
            raise WindowTooSmallError(
                f"ground-state root lies above delta_max={problem.delta_max}; "
                f"try delta_max={suggested}", suggested)
        problem = QuantizationProblem(problem.model, problem.evaluator, suggested, problem.margin,
                                      problem.root_tol, problem.auto_extend)
    raise WindowTooSmallError(f"no upper bracket found up to delta_max={problem.delta_max}",
                              2.0 * problem.delta_max)


def find_roots(problem: QuantizationProblem) -> list[BoundState]:
    """All bound states in the scan window, ground state first (delta descending)."""
    problem = _check_window(problem)
    lo, hi = problem.delta_min, problem.delta_max
    count = (arccot(problem.rhs(lo)) - problem.evaluator.phase(lo)) / math.pi
    n_roots = max(0, math.ceil(count))
    if n_roots == 0:
        return []
    poles = find_poles(problem, lo, hi)
    edges = [hi] + poles  # root m lies in (edges[m+1], edges[m])
    states: list[BoundState] = []
    for m in range(n_roots):
        right = edges[m] if m < len(edges) else lo
        left = edges[m + 1] if m + 1 < len(edges) else lo
        left = max(left, lo)
        delta = brentq(problem._phase_gap, left, right, args=(m,), xtol=problem.root_tol,
                       maxiter=500)
        if states and abs(states[-1].delta - delta) < _DUPLICATE_ROOT:
            continue
        try:
            residual = problem.mismatch(delta)
        except PoleError:
            residual = math.inf
        states.append(BoundState(
            index=len(states) + 1,
            delta=delta,
            epsilon=problem.model.energy(delta),
            alpha=alpha(delta, problem.model.gamma),
            residual=residual,
            u0=problem.model.u0,
            evaluator=problem.evaluator,
        ))
    return states


def eigenfunction(state: BoundState, q):
    """Normalized eigenfunction of ``state`` at q (scalar or array)."""
    return state(q)


def derivative_jump(state: BoundState, h: float = 2e-3) -> float:
    """(phi'(0+) - phi'(0-))/phi(0) from one-sided fourth-order differences."""
    c = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / (12.0 * h)
    k = np.arange(5) * h
    plus = float(np.dot(c, state.ratio(k)))
    minus = -float(np.dot(c, state.ratio(-k)))
    return (plus - minus) / state.ratio(0.0)


def graphical_data(problem: QuantizationProblem, n: int) -> GraphicalSolutionData:
    """Samples of both sides of the quantization condition over the scan window."""
    if n < 2:
        raise InvalidParameterError(f"need at least 2 samples, got {n}")
    problem = _check_window(problem)
    states = find_roots(problem)
    poles = find_poles(problem)
    delta = np.linspace(problem.delta_min, problem.delta_max, int(n))
    lhs = np.empty(n)
    gap = np.zeros(n, dtype=bool)
    pole_arr = np.array(poles)
    for i, d in enumerate(delta):
        if pole_arr.size and np.min(np.abs(pole_arr - d)) < _POLE_GAP:
            gap[i] = True
            lhs[i] = np.nan
            continue
        try:
            lhs[i] = problem.evaluator.logderiv(d)
        except PoleError:
            gap[i] = True
            lhs[i] = np.nan
    rhs = np.array([problem.rhs(d) for d in delta])
    marks = [(s.delta, problem.rhs(s.delta)) for s in states]
    return GraphicalSolutionData(delta, lhs, rhs, gap, poles, marks)
