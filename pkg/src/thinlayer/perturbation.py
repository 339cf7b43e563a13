"""Pressure perturbation series for a compressible layer of variable thickness.

In scaled variables the contact condition for the pressure reads

    p + eps psi p - eps^2 c2 lap(p)
      + eps^3 d3 { mu [psi lap(p) + lap(p psi)] - 2 lam div(psi grad p) }
      = (2 mu + lam) / h_star * f,

with f the scaled clearance, c2 = h*^2 lam (lam - mu) / (3 mu (2 mu + lam))
and d3 = h*^2 lam / (2 mu (2 mu + lam)).  A regular perturbation ansatz
p = (2 mu + lam)/h_star * (s0 + eps s1 + eps^2 s2 + eps^3 s3) yields

    s0 = f
    s1 = -psi f
    s2 = psi^2 f + c2 lap(f)
    s3 = -psi^3 f + c2 (grad f . grad psi + psi lap f)
         - h*^2 lam (2 lam + mu) / (6 mu (2 mu + lam)) * f lap(psi),

where s3 is the simplification of the raw order-3 balance through the
product-rule identities; both routes are exposed so they can be checked
against each other.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .fields import (
    FieldFunction,
    ScalarField,
    div_weighted_grad,
    field_laplacian,
)
from .geometry import ParaboloidGap
from .materials import Material
from .thickness import LayerThickness
from .winkler import winkler_contact_region


@dataclass(frozen=True)
class PerturbationSeries:
    """Four coefficient fields of the scaled pressure expansion.

    ``sigma[k]`` multiplies eps^k; ``psi_power_parts[k]`` holds the pure
    thickness-power part (-psi)^k f of each coefficient, whose partial sums
    reproduce the geometric expansion of the spring-model reciprocal
    thickness.  ``prefactor`` is (2 mu + lambda) / h_star.
    """

    sigma: tuple[ScalarField, ScalarField, ScalarField, ScalarField]
    prefactor: float
    eps: float
    psi_power_parts: tuple[ScalarField, ScalarField, ScalarField, ScalarField]


def clearance_function(gap: ParaboloidGap, eps: float) -> FieldFunction:
    """Scaled clearance f(y) = delta0/eps - y1^2/(2 eps R1) - y2^2/(2 eps R2).

    Quadratic, so its derivatives are attached analytically.
    """
    starred = gap.scaled(eps)
    inv_r1 = 1.0 / starred.R1
    inv_r2 = 1.0 / starred.R2

    def func(y1, y2):
        return starred.delta0 - 0.5 * inv_r1 * np.asarray(y1, float) ** 2 \
            - 0.5 * inv_r2 * np.asarray(y2, float) ** 2

    def grad(y1, y2):
        return -inv_r1 * np.asarray(y1, float), -inv_r2 * np.asarray(y2, float)

    def lap(y1, y2):
        shape = np.broadcast(np.asarray(y1), np.asarray(y2)).shape
        return np.full(shape, -(inv_r1 + inv_r2))

    return FieldFunction(func, grad, lap)


def series_from_fields(f: FieldFunction, psi: FieldFunction, material: Material,
                       h_star: float, domain, eps: float,
                       n_cells: int = 128) -> PerturbationSeries:
    """Build the coefficient fields from explicit clearance and variation.

    This is the general constructor; ``perturbation_coefficients`` wraps it
    for the paraboloid-gap problem.
    """
    lam, mu = material.lam, material.mu
    if mu <= 0.0:
        raise DomainError(f"shear modulus must be positive, got mu={mu}")
    M = 2.0 * mu + lam
    c2 = h_star**2 * lam * (lam - mu) / (3.0 * mu * M)
    c3 = h_star**2 * lam * (2.0 * lam + mu) / (6.0 * mu * M)

    def s0(y1, y2):
        return f(y1, y2)

    def s1(y1, y2):
        return -psi(y1, y2) * f(y1, y2)

    def s2(y1, y2):
        return psi(y1, y2) ** 2 * f(y1, y2) + c2 * f.laplacian(y1, y2)

    def s3(y1, y2):
        fv = f(y1, y2)
        pv = psi(y1, y2)
        f1, f2 = f.grad(y1, y2)
        p1, p2 = psi.grad(y1, y2)
        return (
            -(pv**3) * fv
            + c2 * (f1 * p1 + f2 * p2 + pv * f.laplacian(y1, y2))
            - c3 * fv * psi.laplacian(y1, y2)
        )

    def power_part(k):
        def func(y1, y2):
            return (-psi(y1, y2)) ** k * f(y1, y2)
        return func

    scale = domain.a1
    sigma = tuple(
        ScalarField.from_callable(domain, FieldFunction(fn, scale=scale), n_cells)
        for fn in (s0, s1, s2, s3)
    )
    parts = tuple(
        ScalarField.from_callable(domain, FieldFunction(power_part(k), scale=scale),
                                  n_cells)
        for k in range(4)
    )
    return PerturbationSeries(sigma, M / h_star, eps, parts)


def sigma3_product_form(f: FieldFunction, psi: FieldFunction, material: Material,
                        h_star: float):
    """Raw order-3 coefficient before the product-rule simplification.

    s3 = -psi s2 + c2 lap(s1) - d3 { mu [psi lap f + lap(f psi)]
                                     - 2 lam div(psi grad f) },
    assembled directly from the balance at third order.  Used as an
    independent route to cross-check the simplified form.
    """
    lam, mu = material.lam, material.mu
    M = 2.0 * mu + lam
    c2 = h_star**2 * lam * (lam - mu) / (3.0 * mu * M)
    d3 = h_star**2 * lam / (2.0 * mu * M)

    def lap_product(y1, y2):
        # lap(f psi) = psi lap f + f lap psi + 2 grad f . grad psi
        f1, f2 = f.grad(y1, y2)
        p1, p2 = psi.grad(y1, y2)
        return (
            psi(y1, y2) * f.laplacian(y1, y2)
            + f(y1, y2) * psi.laplacian(y1, y2)
            + 2.0 * (f1 * p1 + f2 * p2)
        )

    def div_psi_grad_f(y1, y2):
        f1, f2 = f.grad(y1, y2)
        p1, p2 = psi.grad(y1, y2)
        return p1 * f1 + p2 * f2 + psi(y1, y2) * f.laplacian(y1, y2)

    def lap_s1(y1, y2):
        return -lap_product(y1, y2)

    def func(y1, y2):
        fv, pv = f(y1, y2), psi(y1, y2)
        s2v = pv**2 * fv + c2 * f.laplacian(y1, y2)
        brace = mu * (pv * f.laplacian(y1, y2) + lap_product(y1, y2)) \
            - 2.0 * lam * div_psi_grad_f(y1, y2)
        return -pv * s2v + c2 * lap_s1(y1, y2) - d3 * brace

    return func


def perturbation_coefficients(material: Material, layer: LayerThickness,
                              gap: ParaboloidGap,
                              n_cells: int = 128) -> PerturbationSeries:
    """Coefficient fields for a paraboloid gap over its contact ellipse."""
    domain = winkler_contact_region(gap)
    f = clearance_function(gap, layer.eps)
    return series_from_fields(f, layer.psi_star, material, layer.h_star,
                              domain, layer.eps, n_cells)


def perturbation_pressure(series: PerturbationSeries, y) -> float:
    """Horner evaluation of the truncated pressure series at a point."""
    y1, y2 = y
    funcs = [s.as_function() for s in series.sigma]
    acc = funcs[3](y1, y2)
    for k in (2, 1, 0):
        acc = acc * series.eps + funcs[k](y1, y2)
    return series.prefactor * acc


def _series_pressure_grid(series: PerturbationSeries, domain,
                          n_cells: int) -> np.ndarray:
    xi = np.linspace(-1.0, 1.0, n_cells + 1)
    X1, X2 = np.meshgrid(domain.a1 * xi, domain.a2 * xi, indexing="ij")
    funcs = [s.as_function() for s in series.sigma]
    acc = np.asarray(funcs[3](X1, X2), dtype=float)
    for k in (2, 1, 0):
        acc = acc * series.eps + funcs[k](X1, X2)
    return series.prefactor * np.broadcast_to(acc, X1.shape)


def residual_check(series: PerturbationSeries, material: Material,
                   layer: LayerThickness, gap: ParaboloidGap,
                   n_cells: int = 256, inset: float = 0.1) -> float:
    """Max-norm defect of the contact-condition balance on an interior subgrid.

    The truncated series is substituted back into the scaled contact
    condition with all differential operators evaluated discretely; the
    norm is taken over mapped radii r <= 1 - inset, away from the contour
    where the interior expansion does not apply.  For a four-term series
    the defect scales as eps^4.
    """
    lam, mu = material.lam, material.mu
    M = 2.0 * mu + lam
    h_star, eps = layer.h_star, layer.eps
    c2 = h_star**2 * lam * (lam - mu) / (3.0 * mu * M)
    d3 = h_star**2 * lam / (2.0 * mu * M)

    domain = winkler_contact_region(gap)
    p_vals = _series_pressure_grid(series, domain, n_cells)
    p = ScalarField.from_grid(domain, p_vals)

    xi = np.linspace(-1.0, 1.0, n_cells + 1)
    X1, X2 = np.meshgrid(domain.a1 * xi, domain.a2 * xi, indexing="ij")
    psi_vals = np.broadcast_to(
        np.asarray(layer.psi_star(X1, X2), dtype=float), X1.shape
    )
    psi = ScalarField.from_grid(domain, psi_vals)

    lap_p = field_laplacian(p)
    lap_p_psi = field_laplacian(p.with_values(p.values * psi_vals))
    div_psi_grad_p = div_weighted_grad(psi, p)

    f = clearance_function(gap, eps)
    rhs = (M / h_star) * np.asarray(f(X1, X2), dtype=float)

    lhs = (
        p.values
        + eps * psi_vals * p.values
        - eps**2 * c2 * lap_p.values
        + eps**3 * d3 * (
            mu * (psi_vals * lap_p.values + lap_p_psi.values)
            - 2.0 * lam * div_psi_grad_p.values
        )
    )
    R1, R2 = np.meshgrid(xi, xi, indexing="ij")
    interior = R1 * R1 + R2 * R2 <= (1.0 - inset) ** 2
    return float(np.max(np.abs(lhs[interior] - rhs[interior])))
