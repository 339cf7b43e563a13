"""Scalar fields on elliptical domains, discrete calculus, and quadrature.

Grid fields live on a uniform (n x n) lattice covering the mapped square
[-1, 1]^2 in the coordinates xi_a = y_a / a_a, so the ellipse becomes the
unit disk and its boundary is the unit circle.  Storing the full square
(not just the disk) keeps centered differences well defined up to the
boundary of the region of interest; integration and solvers apply the disk
mask themselves.

Differential operators carry the chain-rule factors 1/a1, 1/a2 (first
derivatives) and 1/a1^2, 1/a2^2 (the Laplacian) back to physical
coordinates.

Integration over the ellipse uses two routes:

* fields with an attached closed form: a polar tensor rule, Gauss-Legendre
  in radius times a uniform (trapezoid) rule in angle, which is exact for
  polynomial integrands of moderate degree;
* grid-only fields: masked-cell summation where every lattice cell is
  weighted by the exact area of its intersection with the unit disk.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .errors import DomainError, ShapeError
from .geometry import EllipseDomain

_MIN_CELLS = 16


def _broadcast_shape(y1, y2):
    return np.broadcast(np.asarray(y1), np.asarray(y2)).shape


class FieldFunction:
    """Closed-form scalar field of physical coordinates (y1, y2).

    Optional analytic first derivatives and Laplacian may be attached; when
    absent they are approximated by central finite differences with an
    absolute step of 1e-5 times ``scale`` (a representative length of the
    domain of interest).
    """

    def __init__(self, func, grad=None, laplacian=None, scale: float = 1.0):
        self.func = func
        self._grad = grad
        self._laplacian = laplacian
        self.step = 1e-5 * float(scale)

    def __call__(self, y1, y2):
        return self.func(y1, y2)

    def grad(self, y1, y2):
        if self._grad is not None:
            return self._grad(y1, y2)
        d = self.step
        f = self.func
        g1 = (f(y1 + d, y2) - f(y1 - d, y2)) / (2.0 * d)
        g2 = (f(y1, y2 + d) - f(y1, y2 - d)) / (2.0 * d)
        return g1, g2

    def laplacian(self, y1, y2):
        if self._laplacian is not None:
            return self._laplacian(y1, y2)
        d = self.step
        f = self.func
        return (
            f(y1 + d, y2) + f(y1 - d, y2) + f(y1, y2 + d) + f(y1, y2 - d)
            - 4.0 * f(y1, y2)
        ) / (d * d)

    @property
    def has_analytic_derivatives(self) -> bool:
        return self._grad is not None and self._laplacian is not None


def as_field_function(obj, scale: float = 1.0) -> FieldFunction:
    """Coerce a bare callable (or FieldFunction) into a FieldFunction."""
    if isinstance(obj, FieldFunction):
        return obj
    if callable(obj):
        return FieldFunction(obj, scale=scale)
    raise TypeError(f"expected a callable field, got {type(obj).__name__}")


def constant_field(value: float) -> FieldFunction:
    v = float(value)

    def func(y1, y2):
        return np.full(_broadcast_shape(y1, y2), v) if _broadcast_shape(y1, y2) else v

    def grad(y1, y2):
        z = np.zeros(_broadcast_shape(y1, y2))
        return z, z.copy()

    def lap(y1, y2):
        return np.zeros(_broadcast_shape(y1, y2))

    return FieldFunction(func, grad, lap)


def field_sum(a: FieldFunction, b: FieldFunction, ca=1.0, cb=1.0) -> FieldFunction:
    """Linear combination ca*a + cb*b with derivative propagation."""

    def func(y1, y2):
        return ca * a(y1, y2) + cb * b(y1, y2)

    def grad(y1, y2):
        a1, a2 = a.grad(y1, y2)
        b1, b2 = b.grad(y1, y2)
        return ca * a1 + cb * b1, ca * a2 + cb * b2

    def lap(y1, y2):
        return ca * a.laplacian(y1, y2) + cb * b.laplacian(y1, y2)

    return FieldFunction(func, grad, lap, scale=a.step / 1e-5)


def field_product(a: FieldFunction, b: FieldFunction) -> FieldFunction:
    """Pointwise product with product-rule derivatives."""

    def func(y1, y2):
        return a(y1, y2) * b(y1, y2)

    def grad(y1, y2):
        a1, a2 = a.grad(y1, y2)
        b1, b2 = b.grad(y1, y2)
        av, bv = a(y1, y2), b(y1, y2)
        return av * b1 + bv * a1, av * b2 + bv * a2

    def lap(y1, y2):
        a1, a2 = a.grad(y1, y2)
        b1, b2 = b.grad(y1, y2)
        return (
            a(y1, y2) * b.laplacian(y1, y2)
            + b(y1, y2) * a.laplacian(y1, y2)
            + 2.0 * (a1 * b1 + a2 * b2)
        )

    return FieldFunction(func, grad, lap, scale=a.step / 1e-5)


@dataclass(frozen=True)
class ScalarField:
    """Scalar samples on the mapped lattice of an elliptical domain.

    ``values[i, j]`` holds the sample at physical point
    (a1 * xi[i], a2 * xi[j]) where xi is the uniform lattice on [-1, 1].
    When the field came from a closed form, ``func`` keeps it available for
    exact evaluation and high-accuracy quadrature.
    """

    domain: EllipseDomain
    values: np.ndarray
    func: FieldFunction | None = field(default=None, compare=False)

    def __post_init__(self):
        v = self.values
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ShapeError(f"field values must be square, got shape {v.shape}")
        if v.shape[0] < _MIN_CELLS + 1:
            raise DomainError(
                f"grid resolution must be at least {_MIN_CELLS}x{_MIN_CELLS} cells, "
                f"got {v.shape[0] - 1}"
            )
        if not np.all(np.isfinite(v)):
            raise DomainError("field values must be finite")

    @classmethod
    def from_callable(cls, domain: EllipseDomain, func, n_cells: int = 128):
        """Sample a closed-form field on the (n_cells+1)^2 lattice."""
        ff = as_field_function(func, scale=domain.a1)
        xi = np.linspace(-1.0, 1.0, n_cells + 1)
        X1, X2 = np.meshgrid(domain.a1 * xi, domain.a2 * xi, indexing="ij")
        vals = np.asarray(ff(X1, X2), dtype=float)
        vals = np.broadcast_to(vals, X1.shape).copy()
        vals.setflags(write=False)
        return cls(domain, vals, ff)

    @classmethod
    def from_grid(cls, domain: EllipseDomain, values):
        vals = np.ascontiguousarray(values, dtype=float).copy()
        vals.setflags(write=False)
        return cls(domain, vals)

    @property
    def n_cells(self) -> int:
        return self.values.shape[0] - 1

    @property
    def xi(self) -> np.ndarray:
        return np.linspace(-1.0, 1.0, self.values.shape[0])

    @property
    def step(self) -> float:
        return 2.0 / self.n_cells

    def mesh(self):
        """Mapped coordinates (Xi1, Xi2) of the lattice, 'ij' indexed."""
        xi = self.xi
        return np.meshgrid(xi, xi, indexing="ij")

    def physical_mesh(self):
        X1, X2 = self.mesh()
        return self.domain.a1 * X1, self.domain.a2 * X2

    def inside(self, tol: float = 1e-12) -> np.ndarray:
        """Mask of lattice nodes inside the closed unit disk."""
        X1, X2 = self.mesh()
        return X1 * X1 + X2 * X2 <= 1.0 + tol

    def with_values(self, values, func=None) -> "ScalarField":
        vals = np.ascontiguousarray(values, dtype=float).copy()
        vals.setflags(write=False)
        if vals.shape != self.values.shape:
            raise ShapeError(
                f"replacement values shape {vals.shape} does not match "
                f"{self.values.shape}"
            )
        return ScalarField(self.domain, vals, func)

    def interpolator(self, method: str = "cubic"):
        """Interpolating callable of physical coordinates built on the lattice."""
        xi = self.xi
        rgi = RegularGridInterpolator(
            (xi, xi), self.values, method=method, bounds_error=False, fill_value=None
        )
        a1, a2 = self.domain.a1, self.domain.a2

        def func(y1, y2):
            p1 = np.asarray(y1, dtype=float) / a1
            p2 = np.asarray(y2, dtype=float) / a2
            pts = np.stack(np.broadcast_arrays(p1, p2), axis=-1)
            if pts.ndim == 1:
                return float(rgi(pts[None, :])[0])
            return rgi(pts)

        return func

    def as_function(self) -> FieldFunction:
        """Closed form if available, else a cubic interpolant of the samples."""
        if self.func is not None:
            return self.func
        return FieldFunction(self.interpolator(), scale=self.domain.a1)


def _check_same_grid(a: ScalarField, b: ScalarField):
    if a.values.shape != b.values.shape:
        raise ShapeError(
            f"grids do not match: {a.values.shape} vs {b.values.shape}"
        )
    if a.domain != b.domain:
        raise ShapeError(
            f"domains do not match: {a.domain} vs {b.domain}"
        )


def field_gradient(f: ScalarField) -> tuple[ScalarField, ScalarField]:
    """Second-order gradient (d/dy1, d/dy2) on the lattice.

    Centered differences inside, one-sided second-order stencils on the edges
    of the mapped square; exact on quadratics.
    """
    h = f.step
    d1 = np.gradient(f.values, h, axis=0, edge_order=2) / f.domain.a1
    d2 = np.gradient(f.values, h, axis=1, edge_order=2) / f.domain.a2
    return f.with_values(d1), f.with_values(d2)


def _second_diff(values: np.ndarray, h: float, axis: int) -> np.ndarray:
    v = np.moveaxis(values, axis, 0)
    out = np.empty_like(v)
    out[1:-1] = v[2:] - 2.0 * v[1:-1] + v[:-2]
    # one-sided 4-point stencils at the square edges, second-order accurate
    out[0] = 2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]
    out[-1] = 2.0 * v[-1] - 5.0 * v[-2] + 4.0 * v[-3] - v[-4]
    return np.moveaxis(out, 0, axis) / (h * h)


def field_laplacian(f: ScalarField) -> ScalarField:
    """Second-order discrete Laplacian in physical coordinates."""
    h = f.step
    lap = (
        _second_diff(f.values, h, 0) / f.domain.a1**2
        + _second_diff(f.values, h, 1) / f.domain.a2**2
    )
    return f.with_values(lap)


def div_weighted_grad(w: ScalarField, f: ScalarField) -> ScalarField:
    """Divergence-form operator div(w grad f) in product-rule expansion.

    Discretized as grad(w) . grad(f) + w * laplacian(f) on the shared lattice.
    """
    _check_same_grid(w, f)
    w1, w2 = field_gradient(w)
    f1, f2 = field_gradient(f)
    lap = field_laplacian(f)
    vals = w1.values * f1.values + w2.values * f2.values + w.values * lap.values
    return f.with_values(vals)


def flux_divergence(w: ScalarField, f: ScalarField) -> ScalarField:
    """Conservative discretization of div(w grad f).

    Face-averaged weight times centered flux differences; this form telescopes
    under summation, which the sensitivity analysis relies on.  Values on the
    outermost lattice ring (outside the disk) are zero-filled.
    """
    _check_same_grid(w, f)
    h = w.step
    wv, fv = w.values, f.values
    out = np.zeros_like(fv)

    wf1 = 0.5 * (wv[1:, :] + wv[:-1, :])          # faces along axis 0
    flux1 = wf1 * (fv[1:, :] - fv[:-1, :])
    out[1:-1, :] += (flux1[1:, :] - flux1[:-1, :]) / (h * h * f.domain.a1**2)

    wf2 = 0.5 * (wv[:, 1:] + wv[:, :-1])          # faces along axis 1
    flux2 = wf2 * (fv[:, 1:] - fv[:, :-1])
    out[:, 1:-1] += (flux2[:, 1:] - flux2[:, :-1]) / (h * h * f.domain.a2**2)

    return f.with_values(out)


# ---------------------------------------------------------------------------
# quadrature over the ellipse
# ---------------------------------------------------------------------------

def polar_rule(n_r: int, n_t: int):
    """Tensor rule on the unit disk: Gauss-Legendre radius x uniform angle.

    Returns mapped nodes (xi1, xi2) and weights including the polar Jacobian,
    so that sum(w * F(xi)) approximates the integral of F over the unit disk.
    """
    nodes, gl_w = np.polynomial.legendre.leggauss(n_r)
    r = 0.5 * (nodes + 1.0)
    wr = 0.5 * gl_w * r                      # radial weight includes r dr
    t = 2.0 * np.pi * np.arange(n_t) / n_t
    wt = 2.0 * np.pi / n_t
    R, T = np.meshgrid(r, t, indexing="ij")
    W = np.outer(wr, np.full(n_t, wt))
    return R * np.cos(T), R * np.sin(T), W


def integrate_ellipse(f: ScalarField, n_r: int | None = None,
                      n_t: int | None = None) -> float:
    """Integral of the field over its elliptical domain.

    Closed-form fields go through the polar tensor rule (exact for polynomial
    integrands up to the rule degree); grid-only fields are summed cell by
    cell with exact disk-cell intersection areas.
    """
    dom = f.domain
    if f.func is not None:
        n_r = n_r if n_r is not None else max(f.n_cells, 64)
        n_t = n_t if n_t is not None else 2 * n_r
        X1, X2, W = polar_rule(n_r, n_t)
        vals = f.func(dom.a1 * X1, dom.a2 * X2)
        return float(dom.a1 * dom.a2 * np.sum(W * vals))
    cov = disk_cell_coverage(f.xi)
    v = f.values
    cell_mean = 0.25 * (v[:-1, :-1] + v[1:, :-1] + v[:-1, 1:] + v[1:, 1:])
    return float(dom.a1 * dom.a2 * np.sum(cov * cell_mean))


def integrate_callable(domain: EllipseDomain, func, n_r: int = 128,
                       n_t: int | None = None) -> float:
    """Polar-rule integral of a bare callable over an elliptical domain."""
    n_t = n_t if n_t is not None else 2 * n_r
    X1, X2, W = polar_rule(n_r, n_t)
    vals = func(domain.a1 * X1, domain.a2 * X2)
    return float(domain.a1 * domain.a2 * np.sum(W * vals))


def _antiderivative(y):
    """Integral of sqrt(1 - t^2) from 0 to y, for y in [-1, 1]."""
    y = np.clip(y, -1.0, 1.0)
    return 0.5 * (y * np.sqrt(np.maximum(1.0 - y * y, 0.0)) + np.arcsin(y))


def _corner_area_right(a, b):
    """Area of {x >= a, y >= b} inside the unit disk, for a >= 0."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    s = np.sqrt(np.maximum(1.0 - np.minimum(a, 1.0) ** 2, 0.0))
    lo = np.clip(b, -s, s)
    area = (_antiderivative(s) - _antiderivative(lo)) - a * (s - lo)
    return np.where(a >= 1.0, 0.0, np.maximum(area, 0.0))


def disk_corner_area(a, b):
    """Exact area of the region {x >= a, y >= b} inside the unit disk."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    b_cl = np.clip(b, -1.0, 1.0)
    segment_above_b = 2.0 * (_antiderivative(np.ones_like(b_cl)) - _antiderivative(b_cl))
    return np.where(
        a >= 0.0,
        _corner_area_right(np.abs(a), b),
        segment_above_b - _corner_area_right(np.abs(a), b),
    )


def disk_cell_coverage(xi: np.ndarray) -> np.ndarray:
    """Exact unit-disk intersection area of every cell of the xi lattice.

    Cell (i, j) spans [xi[i], xi[i+1]] x [xi[j], xi[j+1]]; the result has
    shape (len(xi)-1, len(xi)-1) and sums to pi up to rounding.
    """
    x0, x1 = xi[:-1], xi[1:]
    X0, Y0 = np.meshgrid(x0, x0, indexing="ij")
    X1, Y1 = np.meshgrid(x1, x1, indexing="ij")
    area = (
        disk_corner_area(X0, Y0)
        - disk_corner_area(X1, Y0)
        - disk_corner_area(X0, Y1)
        + disk_corner_area(X1, Y1)
    )
    return np.maximum(area, 0.0)
