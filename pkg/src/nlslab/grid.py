"""Radial grids, quadrature, finite-difference operators, and rescaling.

All fields here are spherically symmetric samples u(r_i) of a complex field
on R^n, n >= 3.  A grid carries quadrature weights w_i such that

    sum_i w_i f(r_i)  ~  integral over R^n of f,   f radial,

with the angular factor (area of the unit sphere) folded into the weights.
Two node layouts are supported:

* ``bessel``  - nodes at scaled Bessel zeros, the natural collocation points
  of the radial spectral transform (see :mod:`nlslab.transform`).  These
  grids have no node at r = 0 and carry Fourier-Bessel quadrature weights.
* ``uniform`` - equally spaced nodes including r = 0, trapezoid-type weights.
  Convenient for stencil and quadrature unit tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy.interpolate import CubicSpline


class GridError(ValueError):
    """Invalid grid construction or grid/field mismatch."""


def sphere_area(n: int) -> float:
    """Surface area of the unit sphere S^{n-1} in R^n."""
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


@dataclass(frozen=True, eq=False)
class RadialGrid:
    """Radial quadrature grid for spherically symmetric fields on R^n.

    Attributes
    ----------
    dimension : int
        Ambient dimension n >= 3.
    nodes : ndarray
        Strictly increasing radii, first node >= 0.
    weights : ndarray
        Positive quadrature weights for the full n-dimensional volume
        integral of radial functions.
    r_max : float
        Truncation radius of the computational ball.
    kind : str
        Node layout, ``"bessel"`` or ``"uniform"``.
    """

    dimension: int
    nodes: NDArray[np.float64]
    weights: NDArray[np.float64]
    r_max: float
    kind: str = "uniform"

    def __post_init__(self):
        if self.dimension < 3:
            raise GridError(f"dimension must be >= 3, got {self.dimension}")
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if nodes.ndim != 1 or nodes.size < 3:
            raise GridError("grid needs at least 3 nodes")
        if nodes[0] < 0 or np.any(np.diff(nodes) <= 0):
            raise GridError("nodes must be strictly increasing with r_0 >= 0")
        if weights.shape != nodes.shape or np.any(weights <= 0):
            raise GridError("weights must be positive, one per node")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    @property
    def n_points(self) -> int:
        return self.nodes.size

    def ball_volume(self) -> float:
        """Volume of the truncation ball B(0, r_max)."""
        n = self.dimension
        return sphere_area(n) * self.r_max ** n / n

    def field(self, values) -> "RadialField":
        return RadialField(self, np.asarray(values, dtype=complex))

    def zeros(self) -> "RadialField":
        return RadialField(self, np.zeros(self.n_points, dtype=complex))


@dataclass(frozen=True, eq=False)
class RadialField:
    """One complex radial snapshot u(r_i) on a grid.

    ``warnings`` collects non-fatal diagnostics (e.g. support truncation
    during rescaling); they propagate into reports.
    """

    grid: RadialGrid
    values: NDArray[np.complex128]
    warnings: tuple = ()

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.shape != self.grid.nodes.shape:
            raise GridError("field length does not match node count")
        if not np.all(np.isfinite(values)):
            raise GridError("field contains non-finite samples")
        object.__setattr__(self, "values", values)

    def with_values(self, values, extra_warnings=()) -> "RadialField":
        return RadialField(self.grid, values, self.warnings + tuple(extra_warnings))


def make_uniform_grid(dimension: int, n_points: int, r_max: float) -> RadialGrid:
    """Uniform nodes on [0, r_max] with trapezoid weights times the
    sphere-area volume factor.

    The trapezoid rule assigns the origin node zero volume share (the
    radial measure r^{n-1} dr vanishes there); it keeps a denormal-small
    positive weight only to satisfy the all-weights-positive contract.
    """
    if n_points < 3:
        raise GridError("need at least 3 nodes")
    r = np.linspace(0.0, float(r_max), n_points)
    h = r[1] - r[0]
    trap = np.full(n_points, h)
    trap[0] = trap[-1] = h / 2.0
    w = sphere_area(dimension) * trap * r ** (dimension - 1)
    w[0] = float(np.finfo(float).tiny)
    return RadialGrid(dimension, r, w, float(r_max), kind="uniform")


def integrate(f: RadialField) -> float:
    """Quadrature of a real-valued radial field over R^n.

    Rejects complex or non-finite samples; use ``lp_norm`` or integrate
    explicit real quantities like ``abs(u)**2`` for complex fields.
    """
    v = np.asarray(f.values)
    if np.iscomplexobj(v):
        if np.any(v.imag != 0):
            raise ValueError("integrate expects real samples")
        v = v.real
    if not np.all(np.isfinite(v)):
        raise ValueError("integrate rejects non-finite samples")
    return float(np.sum(f.grid.weights * v))


def lp_norm(u: RadialField, p: float) -> float:
    """The L^p(R^n) norm of a radial field, p in [1, inf]."""
    if p < 1:
        raise ValueError(f"invalid exponent p={p}, need p >= 1")
    a = np.abs(u.values)
    if math.isinf(p):
        return float(a.max(initial=0.0))
    return float(np.sum(u.grid.weights * a ** p) ** (1.0 / p))


def _stencil_coeffs(x0: float, x1: float, x2: float):
    """First- and second-derivative weights at x1 for nodes (x0, x1, x2).

    Exact for quadratics at any node spacing.
    """
    hm = x1 - x0
    hp = x2 - x1
    denom = hm * hp * (hm + hp)
    d1 = np.array([-hp * hp, hp * hp - hm * hm, hm * hm]) / denom
    d2 = 2.0 * np.array([hp, -(hm + hp), hm]) / denom
    return d1, d2


def _one_sided_coeffs(x0: float, x1: float, x2: float):
    """Derivative weights at x2 for the quadratic through (x0, x1, x2)."""
    hm = x1 - x0
    hp = x2 - x1
    denom = hm * hp * (hm + hp)
    d1 = np.array([hp * hp, -((hm + hp) ** 2), hm * (hm + 2 * hp)]) / denom
    d2 = 2.0 * np.array([hp, -(hm + hp), hm]) / denom
    return d1, d2


def radial_laplacian(u: RadialField) -> RadialField:
    """Finite-difference Laplacian u_rr + (n-1)/r u_r of a radial field.

    Interior nodes use the three-point stencil on (possibly non-uniform)
    neighbours.  The inner boundary uses the even extension of radial
    fields across r = 0; at an actual r = 0 node this reduces to the
    symmetric limit  lap u(0) = n u_rr(0).  The outer boundary falls back
    to a one-sided stencil (still exact on quadratics).
    """
    g = u.grid
    r = g.nodes
    v = u.values
    if r.size < 3:
        raise GridError("grid too coarse for a Laplacian stencil")
    n = g.dimension
    out = np.empty_like(v)

    for i in range(1, r.size - 1):
        d1, d2 = _stencil_coeffs(r[i - 1], r[i], r[i + 1])
        tri = v[i - 1 : i + 2]
        out[i] = d2 @ tri + (n - 1) / r[i] * (d1 @ tri)

    if r[0] == 0.0:
        # symmetric limit: u_r(0) = 0 and lap u(0) = n u_rr(0)
        u_rr0 = 2.0 * (v[1] - v[0]) / r[1] ** 2
        out[0] = n * u_rr0
    else:
        # mirror ghost node at -r_0 with value u_0 (even extension)
        d1, d2 = _stencil_coeffs(-r[0], r[0], r[1])
        tri = np.array([v[0], v[0], v[1]])
        out[0] = d2 @ tri + (n - 1) / r[0] * (d1 @ tri)

    # one-sided: differentiate the quadratic through the last three nodes
    # at the final node instead of the middle one
    d1e, d2e = _one_sided_coeffs(r[-3], r[-2], r[-1])
    tri = v[-3:]
    out[-1] = d2e @ tri + (n - 1) / r[-1] * (d1e @ tri)
    return u.with_values(out)


def radial_derivative(u: RadialField) -> RadialField:
    """Finite-difference radial derivative u_r (three-point stencils,
    even extension at the inner boundary)."""
    g = u.grid
    r = g.nodes
    v = u.values
    out = np.empty_like(v)
    for i in range(1, r.size - 1):
        d1, _ = _stencil_coeffs(r[i - 1], r[i], r[i + 1])
        out[i] = d1 @ v[i - 1 : i + 2]
    if r[0] == 0.0:
        out[0] = 0.0
    else:
        d1, _ = _stencil_coeffs(-r[0], r[0], r[1])
        out[0] = d1 @ np.array([v[0], v[0], v[1]])
    d1e, _ = _one_sided_coeffs(r[-3], r[-2], r[-1])
    out[-1] = d1e @ v[-3:]
    return u.with_values(out)


# number of mirrored nodes used to enforce evenness of the interpolant at r=0
_MIRROR = 8


def _even_spline(grid: RadialGrid, values) -> CubicSpline:
    r = grid.nodes
    m = min(_MIRROR, r.size - 1)
    if r[0] == 0.0:
        rx = np.concatenate([-r[1 : m + 1][::-1], r])
        vx = np.concatenate([values[1 : m + 1][::-1], values])
    else:
        rx = np.concatenate([-r[:m][::-1], r])
        vx = np.concatenate([values[:m][::-1], values])
    return CubicSpline(rx, vx)


def sample_even(u: RadialField, radii) -> NDArray[np.complex128]:
    """Evaluate a radial field at arbitrary radii by cubic interpolation,
    using the even extension across the origin.  Radii beyond the grid
    return 0."""
    sp = _even_spline(u.grid, u.values)
    radii = np.asarray(radii, dtype=float)
    out = np.where(radii <= u.grid.nodes[-1], sp(radii), 0.0)
    return np.asarray(out, dtype=complex)


def support_radius(u: RadialField, rel_threshold: float = 1e-8) -> float:
    """Largest radius where |u| exceeds rel_threshold * max|u| (0 for the
    zero field)."""
    a = np.abs(u.values)
    peak = a.max(initial=0.0)
    if peak == 0.0:
        return 0.0
    idx = np.nonzero(a > rel_threshold * peak)[0]
    return float(u.grid.nodes[idx[-1]])


def rescale(u: RadialField, lam: float, decay_threshold: float = 1e-8) -> RadialField:
    """Apply the critical scaling  u -> lam^{-(n-2)/2} u(r / lam).

    The scaled profile is resampled onto the original grid by cubic
    interpolation with even extension at the origin.  If the scaled
    support spills past r_max a truncation warning is attached to the
    returned field (recorded, not fatal).
    """
    if lam <= 0:
        raise ValueError("scaling factor must be positive")
    g = u.grid
    n = g.dimension
    warnings = []
    if lam != 1.0 and support_radius(u, decay_threshold) * lam > g.r_max:
        warnings.append(
            f"rescale: support radius {support_radius(u, decay_threshold):.3g} * "
            f"lambda {lam:.3g} exceeds r_max {g.r_max:.3g}; field truncated"
        )
    if lam == 1.0:
        return u
    vals = lam ** (-(n - 2) / 2.0) * sample_even(u, g.nodes / lam)
    return u.with_values(vals, warnings)
