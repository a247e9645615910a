import math

import numpy as np
import pytest
from scipy.linalg import eigvalsh_tridiagonal

from deltabound import (
    DimensionlessModel,
    Grid,
    InvalidParameterError,
    QuantizationProblem,
    assemble,
    default_grid,
    discretize,
    eigen_below,
    eigenpairs_below,
    find_roots,
    richardson,
    sturm_count,
)

MODELS = [
    DimensionlessModel("linear", 1.0, 10.0),
    DimensionlessModel("parabolic", 1.0, 10.0),
    DimensionlessModel("exponential", 1.0, 10.0, b=1.0),
]


def test_grid_validation():
    g = Grid.with_spacing(-1.0, 2.0, 0.25)
    assert g.nodes[g.zero_index] == 0.0 and g.n == 13
    with pytest.raises(InvalidParameterError):
        Grid(-1.0, 2.0, 11)  # h = 0.3 misses q = 0
    with pytest.raises(InvalidParameterError):
        Grid(0.0, 1.0, 5)
    with pytest.raises(InvalidParameterError):
        Grid(-1.0, 1.0, 2)
    assert g.refined().h == pytest.approx(g.h / 2)


def test_particle_in_a_box():
    # phi'' = -2 eps phi, phi = 0 at the walls of width W  =>  eps_n = n^2 pi^2 / (2 W^2)
    W, h = 2.0, 1e-3
    g = Grid.with_spacing(-1.0, 1.0, h)
    diag, off = discretize(g, np.zeros(g.n - 2), 0.0)
    w, _ = eigenpairs_below(diag, off, 30.0)
    exact = np.pi**2 * np.arange(1, len(w) + 1) ** 2 / (2 * W**2)
    # second-difference error is eps * (n pi h / W)^2 / 12
    assert np.all(np.abs(w - exact) <= exact * (np.arange(1, len(w) + 1) * np.pi * h / W) ** 2 / 10)
    assert len(w) == 4


def test_single_attractive_delta():
    # exact bound state of u0 delta(q): alpha = |u0|, eps = -u0^2/2
    u0 = -1.0
    errs = []
    for h in (2e-3, 1e-3, 5e-4):
        g = Grid.with_spacing(-20.0, 20.0, h)
        w, _ = eigenpairs_below(*discretize(g, np.zeros(g.n - 2), u0), 0.0)
        assert len(w) == 1
        errs.append(abs(w[0] + u0 * u0 / 2))
    assert errs[-1] < 1e-7
    assert errs[0] > errs[1] > errs[2]


def test_three_node_grid():
    model = DimensionlessModel("linear", 1.0, 10.0)
    g = Grid(-0.5, 0.5, 3)
    diag, off = assemble(model, g)
    assert len(diag) == 1 and len(off) == 0
    assert diag[0] == pytest.approx(1 / 0.25 + 0.5 * (model.u_left + model.a) + 1.0 / 0.5)
    spectrum = eigen_below(model, g, cutoff=100.0)
    assert spectrum.eigenvalues[0] == diag[0]


def test_sturm_count_against_dense():
    rng = np.random.default_rng(7)
    diag, off = rng.normal(size=200), rng.normal(size=199)
    w = eigvalsh_tridiagonal(diag, off)
    for x in np.linspace(-4.0, 4.0, 33):
        assert sturm_count(diag, off, x) == np.count_nonzero(w < x)


def test_linear_seven_states_match_published():
    from conftest import PUBLISHED_ROOTS
    spectrum = eigen_below(MODELS[0], Grid.with_spacing(-15.0, 25.0, 1e-3))
    assert spectrum.count == 7
    assert np.max(np.abs(spectrum.eigenvalues + np.array(PUBLISHED_ROOTS) / 2)) < 1e-4
    assert np.all(np.diff(spectrum.eigenvalues) > 0)


def test_eigenvectors_normalized_and_signed():
    spectrum = eigen_below(MODELS[0], default_grid(MODELS[0], h=2e-3))
    h = spectrum.grid.h
    i0 = spectrum.grid.zero_index - 1
    for j in range(spectrum.count):
        v = spectrum.eigenvectors[:, j]
        assert np.sum(v * v) * h == pytest.approx(1.0, rel=1e-12)
        assert v[i0] > 0


@pytest.mark.parametrize("model", MODELS, ids=lambda m: m.kind.value)
def test_second_order_convergence(model):
    g = default_grid(model, h=4e-3)
    e = []
    for _ in range(3):
        e.append(eigen_below(model, g).eigenvalues[0])
        g = g.refined()
    ratio = abs(e[0] - e[1]) / abs(e[1] - e[2])
    assert ratio == pytest.approx(4.0, abs=0.5)


def test_richardson_agreement():
    model = MODELS[0]
    result = richardson(model, Grid.with_spacing(-15.0, 25.0, 1e-3))
    eps = np.array([s.epsilon for s in find_roots(QuantizationProblem(model))])
    assert np.max(np.abs(result.fine - eps)) < 1e-4
    assert np.max(np.abs(result.extrapolated - eps)) < 1e-6
    assert np.max(np.abs(result.extrapolated - eps)) < np.max(np.abs(result.fine - eps))


def test_no_well_no_states():
    model = DimensionlessModel("linear", 0.0, -2.0)
    assert eigen_below(model, Grid.with_spacing(-15.0, 25.0, 1e-2)).count == 0


@pytest.mark.parametrize("model", MODELS, ids=lambda m: m.kind.value)
def test_discrete_jump(model):
    jumps = {}
    for h in (2e-3, 1e-3):
        spectrum = eigen_below(model, default_grid(model, h=h))
        jumps[h] = [spectrum.jump(j) for j in range(spectrum.count)]
        for jmp in jumps[h]:
            assert abs(jmp - 2 * model.u0) < 10 * h
    # O(h): halving h roughly halves the deviation
    for a, b in zip(jumps[2e-3], jumps[1e-3]):
        assert abs(b - 2) < 0.75 * abs(a - 2)


@pytest.mark.parametrize("model", MODELS, ids=lambda m: m.kind.value)
def test_domain_insensitivity(model):
    g = default_grid(model, h=2e-3)
    wide = Grid.with_spacing(1.5 * g.q_left, 1.5 * g.q_right, g.h)
    a = eigen_below(model, g).eigenvalues
    b = eigen_below(model, wide).eigenvalues
    assert len(a) == len(b)
    assert np.max(np.abs(a - b)) < 1e-8


def test_default_grid_left_extension():
    g = default_grid(MODELS[0])
    # slowest left tail alpha ~ 0.496 needs more than 15 units
    assert g.q_left < -15.0
    assert g.q_right >= 2 * (MODELS[0].u_left + 20.0)


def test_deterministic():
    g = Grid.with_spacing(-15.0, 25.0, 2e-3)
    a, b = eigen_below(MODELS[0], g), eigen_below(MODELS[0], g)
    assert np.array_equal(a.eigenvalues, b.eigenvalues)
    assert np.array_equal(a.eigenvectors, b.eigenvectors)
