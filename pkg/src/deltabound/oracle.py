"""Finite-difference eigen-solver used to cross-check the quantization roots.

The operator ``-phi''/2 + v(q) phi`` is discretized with the three-point
second difference on a uniform grid that has q = 0 as a node, Dirichlet walls
at both ends.  The delta interaction enters as ``u0/h`` on the diagonal of the
q = 0 row; integrating that row across the node reproduces
``phi'(0+) - phi'(0-) = 2 u0 phi(0)``.  The regular part of the potential at
the interface node is the mean of its one-sided limits, which removes the
O(h) term the step in v would otherwise leave, so eigenvalues converge as h^2.

Eigenvalues below a cutoff are counted by a Sturm sequence and extracted with
LAPACK's bisection plus inverse iteration (``stebz``/``stein``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import InvalidParameterError, OracleError
from .units import DimensionlessModel, ProfileKind

__all__ = [
    "Grid",
    "OracleSpectrum",
    "assemble",
    "discretize",
    "eigenpairs_below",
    "sturm_count",
    "eigen_below",
    "default_grid",
    "richardson",
    "RichardsonResult",
]

DEFAULT_Q_LEFT = -15.0
DEFAULT_RIGHT_MARGIN = 20.0  # u_R(q_right) >= u_L + this
DEFAULT_RIGHT_EFOLDS = 18.0
LEFT_DECAY_LENGTHS = 12.0
MAX_Q_LEFT = 200.0


@dataclass(frozen=True)
class Grid:
    """Uniform grid on [q_left, q_right] with q = 0 as node ``zero_index``."""

    q_left: float
    q_right: float
    n: int

    def __post_init__(self) -> None:
        if not (self.q_left < 0 < self.q_right):
            raise InvalidParameterError("grid must satisfy q_left < 0 < q_right")
        if self.n < 3:
            raise InvalidParameterError("grid needs at least 3 nodes")
        pos = -self.q_left / self.h
        if abs(pos - round(pos)) > 1e-9 * max(1.0, pos):
            raise InvalidParameterError("q = 0 is not a grid node")

    @classmethod
    def with_spacing(cls, q_left: float, q_right: float, h: float) -> "Grid":
        """Grid of spacing ``h`` whose ends are q_left, q_right snapped outward to multiples of h."""
        if not h > 0:
            raise InvalidParameterError("spacing must be positive")
        n_left = math.ceil(-q_left / h - 1e-9)
        n_right = math.ceil(q_right / h - 1e-9)
        return cls(-n_left * h, n_right * h, n_left + n_right + 1)

    @property
    def h(self) -> float:
        return (self.q_right - self.q_left) / (self.n - 1)

    @property
    def zero_index(self) -> int:
        return int(round(-self.q_left / self.h))

    @property
    def nodes(self) -> np.ndarray:
        return (np.arange(self.n) - self.zero_index) * self.h

    def refined(self) -> "Grid":
        return Grid(self.q_left, self.q_right, 2 * self.n - 1)


@dataclass(frozen=True)
class OracleSpectrum:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # (n_interior, k); sum(v**2) * h = 1; sign fixed by phi(0) > 0
    grid: Grid
    cutoff: float

    @property
    def count(self) -> int:
        return len(self.eigenvalues)

    def interior_nodes(self) -> np.ndarray:
        return self.grid.nodes[1:-1]

    def jump(self, j: int) -> float:
        """(phi'(0+) - phi'(0-))/phi(0) of eigenvector j from one-sided differences."""
        v = self.eigenvectors[:, j]
        i0 = self.grid.zero_index - 1
        h = self.grid.h
        return ((v[i0 + 1] - v[i0]) - (v[i0] - v[i0 - 1])) / h / v[i0]


def _potential(model: DimensionlessModel, q: np.ndarray) -> np.ndarray:
    v = np.empty_like(q)
    left = q < 0
    v[left] = model.u_left
    qr = q[~left]
    if model.kind is ProfileKind.LINEAR:
        v[~left] = model.a + 0.5 * qr
    elif model.kind is ProfileKind.PARABOLIC:
        v[~left] = model.a + qr * qr
    else:
        v[~left] = model.a + model.b * np.exp(qr)
    v[q == 0] = 0.5 * (model.u_left + model.u_right(0.0))
    return v


def discretize(g: Grid, potential: np.ndarray, u0: float) -> tuple[np.ndarray, np.ndarray]:
    """Tridiagonal -phi''/2 + v phi + u0 delta(q) phi on the interior nodes of ``g``.

    ``potential`` holds v at the interior nodes.
    """
    h = g.h
    diag = 1.0 / h**2 + np.asarray(potential, dtype=float)
    diag[g.zero_index - 1] += u0 / h
    off = np.full(len(diag) - 1, -0.5 / h**2)
    return diag, off


def assemble(model: DimensionlessModel, g: Grid) -> tuple[np.ndarray, np.ndarray]:
    """Diagonal and off-diagonal of the model operator on the interior nodes."""
    return discretize(g, _potential(model, g.nodes[1:-1]), model.u0)


def sturm_count(diag: np.ndarray, off: np.ndarray, x: float) -> int:
    """Number of eigenvalues of the symmetric tridiagonal matrix strictly below x."""
    tiny = np.finfo(float).tiny
    count = 0
    d = diag[0] - x
    if d < 0:
        count += 1
    off2 = (off * off).tolist()
    for di, e2 in zip(diag[1:].tolist(), off2):
        if d == 0.0:
            d = tiny
        d = di - x - e2 / d
        if d < 0:
            count += 1
    return count


def eigenpairs_below(diag: np.ndarray, off: np.ndarray, cutoff: float) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues below ``cutoff`` (Sturm count, then bisection + inverse iteration)."""
    k = sturm_count(diag, off, cutoff)
    if k == 0:
        return np.empty(0), np.empty((len(diag), 0))
    try:
        w, v = eigh_tridiagonal(diag, off, select="i", select_range=(0, k - 1),
                                lapack_driver="stebz")
    except np.linalg.LinAlgError as exc:
        raise OracleError(f"tridiagonal eigen-solve failed for {k} eigenvalues below {cutoff}: {exc}") from exc
    if len(w) != k or w[-1] >= cutoff:
        raise OracleError(f"Sturm count {k} disagrees with the extracted spectrum {w}")
    return w, v


def eigen_below(model: DimensionlessModel, g: Grid, cutoff: float | None = None) -> OracleSpectrum:
    """All discrete eigenvalues below ``cutoff`` (default: the left level u_L)."""
    cutoff = model.u_left if cutoff is None else float(cutoff)
    w, v = eigenpairs_below(*assemble(model, g), cutoff)
    v = v / math.sqrt(g.h)
    i0 = g.zero_index - 1
    for j in range(len(w)):
        ref = v[i0, j] if abs(v[i0, j]) > 1e-8 else v[np.argmax(np.abs(v[:, j])), j]
        if ref < 0:
            v[:, j] = -v[:, j]
    return OracleSpectrum(w, v, g, cutoff)


def _wkb_right_end(model: DimensionlessModel, e_folds: float) -> float:
    """Point where the decay exponent at energy u_L, counted from the turning point, reaches e_folds."""
    q, acc, step = 0.0, 0.0, 1e-3
    while acc < e_folds:
        excess = model.u_right(q + 0.5 * step) - model.u_left
        if excess > 0:
            acc += math.sqrt(2.0 * excess) * step
        q += step
        step = min(step * 1.05, 0.05)
    return q


def default_grid(model: DimensionlessModel, h: float = 1e-3, q_left: float | None = None,
                 q_right: float | None = None) -> Grid:
    """Grid sized for the bound states of ``model``.

    q_right: where u_R has risen DEFAULT_RIGHT_MARGIN above u_L, pushed out
    if needed so a state at the u_L cutoff has decayed DEFAULT_RIGHT_EFOLDS
    e-folds at the wall.  q_left: DEFAULT_Q_LEFT, extended to
    LEFT_DECAY_LENGTHS / alpha_min when a coarse pre-solve finds a state whose
    left tail alpha_min = sqrt(2 (u_L - eps)) is too slow for it.
    """
    if q_right is None:
        rise = model.u_left + DEFAULT_RIGHT_MARGIN - model.a
        if model.kind is ProfileKind.LINEAR:
            q_right = 2.0 * rise
        elif model.kind is ProfileKind.PARABOLIC:
            q_right = math.sqrt(max(rise, 0.0))
        else:
            q_right = math.log(max(rise, model.b) / model.b)
        q_right = max(q_right, _wkb_right_end(model, DEFAULT_RIGHT_EFOLDS), 1.0)
    if q_left is None:
        q_left = DEFAULT_Q_LEFT
        coarse = eigen_below(model, Grid.with_spacing(q_left, q_right, 1e-2)).eigenvalues
        if coarse.size:
            slowest = math.sqrt(max(2.0 * (model.u_left - coarse[-1]), 0.0))
            reach = LEFT_DECAY_LENGTHS / slowest if slowest > 0 else MAX_Q_LEFT
            q_left = -min(max(-q_left, reach), MAX_Q_LEFT)
    return Grid.with_spacing(q_left, q_right, h)


@dataclass(frozen=True)
class RichardsonResult:
    coarse: np.ndarray
    fine: np.ndarray
    extrapolated: np.ndarray


def richardson(model: DimensionlessModel, g: Grid, cutoff: float | None = None) -> RichardsonResult:
    """Eigenvalues at h and h/2 and their h^2 extrapolation (4 e(h/2) - e(h))/3."""
    coarse = eigen_below(model, g, cutoff).eigenvalues
    fine = eigen_below(model, g.refined(), cutoff).eigenvalues
    k = min(len(coarse), len(fine))
    if len(coarse) != len(fine):
        # a state right at the cutoff can enter on one grid only; keep the common ones
        coarse, fine = coarse[:k], fine[:k]
    return RichardsonResult(coarse, fine, (4.0 * fine - coarse) / 3.0)
