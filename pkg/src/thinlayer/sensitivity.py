"""Linearized sensitivity of the incompressible contact model to thickness.

Small per-layer thickness variations Htilde_a perturb the contact pressure
by p_tilde, which solves a Poisson problem on the unperturbed patch:

    lap(p_tilde) = -m * sum_a (3 h_a^2 / E_a) div(Htilde_a grad p_bar),
    p_tilde = 0 on the contour,

with p_bar the unperturbed elliptical pressure.  The induced force change
is the integral of p_tilde; a Green-identity reduction shows it vanishes
exactly when the weighted moments

    sum_a (h_a^2 / E_a) integral( Htilde_a rho )  =  0

do, where rho is a quartic weight vanishing on the contour.  This module
provides the forward solve, the orthogonality functional, the weight
family (rho on the contact patch, rho_star and theta_star on a
characteristic domain) and the analogous gap-variation functional.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import DomainError
from .fields import (
    ScalarField,
    as_field_function,
    flux_divergence,
    integrate_callable,
    integrate_ellipse,
)
from .geometry import EllipseDomain
from .incompressible import EllipticContactSolution, LayerSpec, aggregate_compliance
from .poisson import PoissonSolution, solve_disk_poisson

WEIGHT_KINDS = ("rho", "rho_star", "theta_star", "uniform")


@dataclass(frozen=True)
class WeightFunction:
    """Orthogonality weight on an elliptical domain.

    ``rho`` and ``rho_star`` share the quartic form
    (s y1^2/a1^2 + y2^2/(s a2^2)) (1 - y1^2/a1^2 - y2^2/a2^2), the former
    tied to the contact patch, the latter to a characteristic domain;
    ``theta_star`` is the parabolic bump 1 - y1^2/a1^2 - y2^2/a2^2; and
    ``uniform`` is the constant weight used for the compressible-case
    simple average.
    """

    kind: str
    domain: EllipseDomain

    def __post_init__(self):
        if self.kind not in WEIGHT_KINDS:
            raise DomainError(
                f"unknown weight kind {self.kind!r}; expected one of {WEIGHT_KINDS}"
            )


def weight_eval(w: WeightFunction, y1, y2):
    """Evaluate the selected weight at physical points."""
    a1, a2 = w.domain.a1, w.domain.a2
    y1 = np.asarray(y1, dtype=float)
    y2 = np.asarray(y2, dtype=float)
    theta = 1.0 - (y1 / a1) ** 2 - (y2 / a2) ** 2
    if w.kind in ("rho", "rho_star"):
        s = w.domain.s
        return (s * (y1 / a1) ** 2 + (y2 / a2) ** 2 / s) * theta
    if w.kind == "theta_star":
        return theta
    return np.ones_like(theta)


def weight_field(w: WeightFunction, n_cells: int = 128) -> ScalarField:
    return ScalarField.from_callable(
        w.domain, lambda y1, y2: weight_eval(w, y1, y2), n_cells
    )


def radial_weight_profile(kind: str):
    """Radial factor of the weight in mapped polar coordinates.

    Every kind separates as g(angle) * profile(r); the profile determines
    where the weight concentrates.
    """
    if kind in ("rho", "rho_star"):
        return lambda r: r**2 * (1.0 - r**2)
    if kind == "theta_star":
        return lambda r: 1.0 - r**2
    if kind == "uniform":
        return lambda r: np.ones_like(np.asarray(r, dtype=float))
    raise DomainError(f"unknown weight kind {kind!r}")


def weight_max_radius(kind: str) -> float:
    """Mapped radius at which the radial weight profile peaks."""
    profile = radial_weight_profile(kind)
    if kind == "uniform":
        return 0.0
    result = minimize_scalar(
        lambda r: -profile(r), bounds=(0.0, 1.0), method="bounded",
        options={"xatol": 1e-12},
    )
    peak = float(result.x)
    return 0.0 if profile(0.0) >= profile(peak) else peak


@dataclass(frozen=True)
class SensitivityProblem:
    """Unperturbed contact solution plus per-layer thickness variations."""

    base: EllipticContactSolution
    layers: tuple[LayerSpec, ...]

    @property
    def m(self) -> float:
        return aggregate_compliance([(l.E, l.h) for l in self.layers])


def _variation_field(layer: LayerSpec, domain: EllipseDomain,
                     n_cells: int) -> ScalarField:
    if layer.H_tilde is None:
        return ScalarField.from_callable(
            domain, lambda y1, y2: np.zeros(np.broadcast(y1, y2).shape), n_cells
        )
    if isinstance(layer.H_tilde, ScalarField):
        if layer.H_tilde.n_cells == n_cells and layer.H_tilde.domain == domain:
            return layer.H_tilde
        return ScalarField.from_callable(
            domain, layer.H_tilde.as_function(), n_cells
        )
    return ScalarField.from_callable(
        domain, as_field_function(layer.H_tilde, scale=domain.a1), n_cells
    )


def sensitivity_rhs(prob: SensitivityProblem, n_cells: int = 256) -> ScalarField:
    """Right-hand side of the pressure-variation Poisson problem.

    Solver convention lap(p_tilde) = rhs with
    rhs = -m * div( W grad p_bar ),  W = sum_a (3 h_a^2 / E_a) Htilde_a,
    discretized in conservative flux form so the divergence-theorem
    structure survives discretization.
    """
    domain = prob.base.domain
    combined = np.zeros((n_cells + 1, n_cells + 1))
    for layer in prob.layers:
        ht = _variation_field(layer, domain, n_cells)
        combined = combined + (3.0 * layer.h**2 / layer.E) * ht.values
    W = ScalarField.from_grid(domain, combined)
    p_bar = prob.base.pressure_field(n_cells)
    div = flux_divergence(W, p_bar)
    return div.with_values(-prob.m * div.values)


def pressure_variation(prob: SensitivityProblem, n_cells: int = 256,
                       **solver_kwargs) -> ScalarField:
    """Solve for the pressure variation p_tilde on the contact patch."""
    return pressure_variation_solution(prob, n_cells, **solver_kwargs).field


def pressure_variation_solution(prob: SensitivityProblem, n_cells: int = 256,
                                **solver_kwargs) -> PoissonSolution:
    rhs = sensitivity_rhs(prob, n_cells)
    return solve_disk_poisson(prob.base.domain, rhs, **solver_kwargs)


def force_variation(p_tilde: ScalarField) -> float:
    """Contact-force change: the integral of the pressure variation."""
    return integrate_ellipse(p_tilde)


def orthogonality_residual(layers: Sequence[LayerSpec],
                           weight: WeightFunction,
                           n_r: int = 256) -> float:
    """Weighted moment sum whose vanishing freezes the total force.

    Returns sum_a (h_a^2 / E_a) * integral over the weight's domain of
    Htilde_a times the weight.  The overall constant relating this to the
    force variation is immaterial for the zero set.
    """
    total = 0.0
    for layer in layers:
        if layer.H_tilde is None:
            continue
        if isinstance(layer.H_tilde, ScalarField):
            product = layer.H_tilde.values * weight_eval(
                weight, *layer.H_tilde.physical_mesh()
            )
            moment = integrate_ellipse(
                ScalarField.from_grid(layer.H_tilde.domain, product)
            )
        else:
            ht = as_field_function(layer.H_tilde, scale=weight.domain.a1)
            moment = integrate_callable(
                weight.domain,
                lambda y1, y2: ht(y1, y2) * weight_eval(weight, y1, y2),
                n_r=n_r,
            )
        total += layer.h**2 / layer.E * moment
    return total


def gap_variation_residual(phi_tilde, domain_star: EllipseDomain,
                           n_r: int = 256) -> float:
    """Moment of a gap variation against the parabolic weight.

    Returns the integral of phi_tilde * theta_star over the characteristic
    domain; gap variations with vanishing moment leave the force unchanged
    to first order.
    """
    w = WeightFunction("theta_star", domain_star)
    if isinstance(phi_tilde, ScalarField):
        product = phi_tilde.values * weight_eval(w, *phi_tilde.physical_mesh())
        return integrate_ellipse(ScalarField.from_grid(phi_tilde.domain, product))
    ft = as_field_function(phi_tilde, scale=domain_star.a1)
    return integrate_callable(
        domain_star, lambda y1, y2: ft(y1, y2) * weight_eval(w, y1, y2), n_r=n_r
    )


def gap_variation_pressure(phi_tilde, domain: EllipseDomain, m: float,
                           n_cells: int = 256, **solver_kwargs) -> ScalarField:
    """Companion solve for a gap variation: lap(p_tilde) = m * phi_tilde."""
    if m <= 0.0:
        raise DomainError(f"aggregate coefficient must be positive, got m={m}")
    if isinstance(phi_tilde, ScalarField):
        rhs = phi_tilde.with_values(m * phi_tilde.values)
    else:
        ft = as_field_function(phi_tilde, scale=domain.a1)
        sampled = ScalarField.from_callable(domain, ft, n_cells)
        rhs = sampled.with_values(m * sampled.values)
    return solve_disk_poisson(domain, rhs, **solver_kwargs).field


def boundary_flux_integral(domain: EllipseDomain, scalar, vector,
                           n_t: int = 512) -> float:
    """Contour integral of scalar * (normal . vector) along the ellipse.

    Used to confirm that line terms weighted by a function vanishing on
    the contour drop out of the Green-identity reduction.
    """
    t = np.linspace(0.0, 2.0 * np.pi, n_t, endpoint=False)
    a1, a2 = domain.a1, domain.a2
    y1, y2 = a1 * np.cos(t), a2 * np.sin(t)
    # outward normal direction of the ellipse, unnormalized: (cos/a1, sin/a2)
    n1, n2 = np.cos(t) / a1, np.sin(t) / a2
    norm = np.hypot(n1, n2)
    n1, n2 = n1 / norm, n2 / norm
    ds = np.hypot(-a1 * np.sin(t), a2 * np.cos(t)) * (2.0 * np.pi / n_t)
    v1, v2 = vector(y1, y2)
    return float(np.sum(scalar(y1, y2) * (n1 * v1 + n2 * v2) * ds))
