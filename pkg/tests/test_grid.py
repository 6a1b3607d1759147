import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nlslab import (
    RadialField,
    integrate,
    lp_norm,
    make_spectral_grid,
    make_uniform_grid,
    radial_derivative,
    radial_laplacian,
    rescale,
)
from nlslab.functionals import energy
from nlslab.grid import GridError, sphere_area


# ---------------------------------------------------------------------------
# quadrature


def test_integrate_zero(g3):
    assert integrate(g3.field(np.zeros(g3.n_points))) == 0.0


@pytest.mark.parametrize("make", [make_uniform_grid, make_spectral_grid])
def test_integrate_gaussian_n3(make):
    # int exp(-r^2) dx over R^3 = pi^{3/2}
    g = make(3, 1024, 8.0)
    val = integrate(g.field(np.exp(-g.nodes**2)))
    assert abs(val - math.pi**1.5) < 1e-8


@pytest.mark.parametrize("make", [make_uniform_grid, make_spectral_grid])
def test_integrate_exponential_n3(make):
    # int exp(-r) dx = 4 pi Gamma(3) = 8 pi
    g = make(3, 2048, 40.0)
    val = integrate(g.field(np.exp(-g.nodes)))
    assert abs(val - 8 * math.pi) < 1e-6


def test_integrate_rejects_nonfinite(g3):
    vals = np.ones(g3.n_points)
    field = g3.field(vals)
    object.__setattr__(field, "values", vals * np.nan)
    with pytest.raises(ValueError):
        integrate(field)


def test_weights_sum_to_ball_volume():
    for n in (3, 5):
        g = make_spectral_grid(n, 512, 10.0)
        vol = sphere_area(n) * g.r_max**n / n
        assert abs(g.weights.sum() - vol) / vol < 5.0 / g.n_points


# ---------------------------------------------------------------------------
# lp norms


def test_lp_zero(g3):
    assert lp_norm(g3.zeros(), 2) == 0.0


def test_l2_gaussian(g3):
    # ||e^{-r^2}||_{L^2}: int e^{-2r^2} dx = (pi/2)^{3/2}
    u = g3.field(np.exp(-g3.nodes**2))
    assert abs(lp_norm(u, 2) - (math.pi / 2) ** 0.75) < 1e-8


def test_linf_gaussian(g3):
    u = g3.field(np.exp(-g3.nodes**2))
    assert abs(lp_norm(u, math.inf) - np.exp(-g3.nodes[0] ** 2)) == 0.0
    # with an origin node the supremum of exp(-r^2) is exactly 1
    gu = make_uniform_grid(3, 64, 8.0)
    assert lp_norm(gu.field(np.exp(-gu.nodes**2)), math.inf) == 1.0


def test_lp_invalid_exponent(g3):
    with pytest.raises(ValueError):
        lp_norm(g3.zeros(), 0.5)


# ---------------------------------------------------------------------------
# laplacian


def test_laplacian_constant(g3):
    out = radial_laplacian(g3.field(np.full(g3.n_points, 3.7)))
    assert np.abs(out.values).max() < 1e-10


@pytest.mark.parametrize("make", [make_uniform_grid, make_spectral_grid])
@pytest.mark.parametrize("n", [3, 5])
def test_laplacian_quadratic_exact(make, n):
    g = make(n, 128, 8.0)
    out = radial_laplacian(g.field(g.nodes**2))
    assert np.abs(out.values - 2 * n).max() < 1e-9


def test_laplacian_gaussian_n5():
    # lap e^{-r^2} = (4r^2 - 2n) e^{-r^2}, second-order accurate
    g = make_spectral_grid(5, 512, 12.0)
    r = g.nodes
    out = radial_laplacian(g.field(np.exp(-(r**2))))
    exact = (4 * r**2 - 10) * np.exp(-(r**2))
    h = np.diff(r).max()
    assert np.abs(out.values - exact).max() < 20 * h**2


def test_laplacian_origin_node_symmetric_limit():
    g = make_uniform_grid(4, 64, 4.0)
    out = radial_laplacian(g.field(g.nodes**2))
    assert abs(out.values[0] - 2 * g.dimension) < 1e-10


def test_laplacian_needs_three_nodes():
    with pytest.raises(GridError):
        make_uniform_grid(3, 2, 1.0)


def test_radial_derivative_quadratic(g3):
    out = radial_derivative(g3.field(g3.nodes**2))
    assert np.abs(out.values - 2 * g3.nodes).max() < 1e-9


# ---------------------------------------------------------------------------
# rescale


def test_rescale_identity(g3):
    u = g3.field(np.exp(-g3.nodes**2))
    assert rescale(u, 1.0) is u


@pytest.mark.parametrize("lam", [0.5, 0.8, 1.3, 2.0])
def test_rescale_energy_invariance(lam):
    g = make_spectral_grid(3, 1024, 32.0)
    u = g.field(np.exp(-g.nodes**2))
    k0 = energy(u, 1).kinetic
    k1 = energy(rescale(u, lam), 1).kinetic
    assert abs(k1 - k0) / k0 < 1e-6


@pytest.mark.parametrize("lam", [0.5, 2.0])
def test_rescale_critical_norm_invariance(lam):
    g = make_spectral_grid(3, 1024, 32.0)
    u = g.field(np.exp(-g.nodes**2))
    p = 2.0 * 3 / (3 - 2)
    c0 = lp_norm(u, p)
    c1 = lp_norm(rescale(u, lam), p)
    assert abs(c1 - c0) / c0 < 1e-6


def test_rescale_truncation_warning():
    g = make_spectral_grid(3, 256, 8.0)
    u = g.field(np.exp(-0.5 * g.nodes**2))
    out = rescale(u, 2.5)
    assert any("truncated" in w for w in out.warnings)


def test_rescale_rejects_nonpositive(g3):
    with pytest.raises(ValueError):
        rescale(g3.zeros(), -1.0)


# ---------------------------------------------------------------------------
# invariants


@given(st.floats(min_value=0.6, max_value=1.6))
@settings(max_examples=20, deadline=None)
def test_rescale_l2_scaling_law(lam):
    # ||rescale(u, lam)||_2 = lam ||u||_2 in n = 3  (L^2 is not critical)
    g = make_spectral_grid(3, 256, 16.0)
    u = g.field(np.exp(-g.nodes**2))
    assert abs(lp_norm(rescale(u, lam), 2) - lam * lp_norm(u, 2)) < 1e-4


def test_field_length_mismatch(g3):
    with pytest.raises(GridError):
        RadialField(g3, np.zeros(3))
