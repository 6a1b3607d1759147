import math

import numpy as np
import pytest

from nlslab import (
    dispersive_decay_fit,
    free_evolve,
    gaussian_field,
    get_propagator,
    lp_norm,
    make_spectral_grid,
)
from nlslab.propagator import TimeRangeError


def gaussian_oracle(grid, t, width=1.0, amplitude=1.0):
    """Independent closed form for the free flow of a Gaussian: completing
    the square gives A (1 + 4it/w^2)^{-n/2} exp(-r^2/(w^2 + 4it))."""
    n = grid.dimension
    z = 1.0 + 4.0j * t / width**2
    return amplitude * z ** (-n / 2.0) * np.exp(-grid.nodes**2 / (width**2 * z))


def test_identity_at_zero(g3):
    u = gaussian_field(g3)
    out = free_evolve(u, 0.0)
    assert np.abs(out.values - u.values).max() < 1e-10


@pytest.mark.parametrize("t", [0.1, 0.35, -0.5, 1.0])
def test_l2_unitarity(g3, t):
    u = gaussian_field(g3, amplitude=1.3, width=0.8)
    assert abs(lp_norm(free_evolve(u, t), 2) - lp_norm(u, 2)) < 1e-9


@pytest.mark.parametrize("n", [3, 4, 5])
def test_gaussian_closed_form(n):
    g = make_spectral_grid(n, 512, 24.0)
    u = gaussian_field(g)
    for t in (0.25, 0.5, 1.0):
        out = free_evolve(u, t)
        assert np.abs(out.values - gaussian_oracle(g, t)).max() < 1e-6


def test_group_law(g3):
    u = gaussian_field(g3)
    for s, t in ((0.2, 0.3), (0.5, -0.2), (-0.1, -0.3)):
        two = free_evolve(free_evolve(u, s), t)
        one = free_evolve(u, s + t)
        assert np.abs(two.values - one.values).max() < 1e-8


def test_refuses_beyond_validated_span(g3):
    prop = get_propagator(g3)
    u = gaussian_field(g3)
    with pytest.raises(TimeRangeError):
        prop.evolve(u, 4.0 * prop.validated_t_max)


def test_validated_span_covers_unit_time(g3):
    assert get_propagator(g3).validated_t_max >= 1.0


def dispersive_oracle_slope(n, times, width=1.0):
    """Least-squares slope computed from the closed form alone."""
    times = np.asarray(times)
    sups = (1.0 + (4 * times / width**2) ** 2) ** (-n / 4.0)
    design = np.vstack([np.log(times), np.ones_like(times)]).T
    return float(np.linalg.lstsq(design, np.log(sups), rcond=None)[0][0])


def test_dispersive_slope_n3_example():
    g = make_spectral_grid(3, 768, 96.0)
    u = gaussian_field(g)
    times = np.geomspace(1.0, 4.0, 6)
    fit = dispersive_decay_fit(u, times)
    assert abs(fit.slope - (-1.5)) < 0.05
    # and the measured slope agrees tightly with the closed-form oracle
    assert abs(fit.slope - dispersive_oracle_slope(3, times)) < 5e-3


def test_dispersive_constant_n3():
    g = make_spectral_grid(3, 768, 96.0)
    u = gaussian_field(g)
    fit = dispersive_decay_fit(u, np.geomspace(1.0, 4.0, 6))
    assert fit.constant <= (4 * math.pi) ** (-1.5) * 1.05


def test_dispersive_fit_input_validation(g3):
    u = gaussian_field(g3)
    with pytest.raises(ValueError):
        dispersive_decay_fit(u, [0.5, 1.0])
    with pytest.raises(ValueError):
        dispersive_decay_fit(u, [-1.0, 0.5, 1.0])
