"""Through-thickness displacement profiles of the compressible layer.

The recurrence of boundary-value problems in the stretched coordinate
zeta in [0, h_star] has elementary solutions order by order.  With p the
contact pressure, Hts = h_star * psi the scaled thickness variation and
M = 2 mu + lambda:

    w0 = p (h_star - zeta) / M                       (vanishes at the base)
    v0 = 0
    w1 = p Hts / M                                   (constant across depth)
    v1 = Psi(zeta) grad p
    w2 = lap p / (6 mu M^2) * { 3 lam mu h* (zeta^2 - h*^2)
          - lam M (zeta^3 - h*^3) - 3 lam (mu - lam) h*^2 (zeta - h*) }
    v2 = (h* - zeta)/M grad(p Hts) - lam h*/(mu M) Hts grad p

with Psi(zeta) = -(lam+mu)(h*^2 - zeta^2)/(2 mu M) + h*(h* - zeta)/M.

The fourth-order surface value w3(y, 0) = C0(y) is assembled from second
derivatives of p and Hts; two algebraically equivalent expressions for C0
are provided so they can be cross-checked.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError
from .fields import FieldFunction, as_field_function, field_product
from .materials import Material
from .thickness import LayerThickness


@dataclass(frozen=True)
class DisplacementProfile:
    """Order-by-order displacement profiles as callables of (y, zeta).

    Vertical components ``w0..w2`` and in-plane vector components
    ``v0..v2`` take ((y1, y2), zeta); ``w3_surface`` is the fourth-order
    vertical term evaluated at the contact surface, a function of (y1, y2)
    only.  ``Psi`` is the depth profile of the first in-plane correction.
    """

    w0: Callable
    w1: Callable
    w2: Callable
    w3_surface: Callable
    v0: Callable
    v1: Callable
    v2: Callable
    Psi: Callable


def _hts_function(layer: LayerThickness) -> FieldFunction:
    """Scaled variation Hts = h_star * psi with derivative propagation."""
    psi = layer.psi_star
    h_star = layer.h_star

    def func(y1, y2):
        return h_star * psi(y1, y2)

    def grad(y1, y2):
        g1, g2 = psi.grad(y1, y2)
        return h_star * g1, h_star * g2

    def lap(y1, y2):
        return h_star * psi.laplacian(y1, y2)

    return FieldFunction(func, grad, lap)


def c0_divergence_form(material: Material, h_star: float, p: FieldFunction,
                       hts: FieldFunction):
    """Fourth-order surface displacement, divergence-form expression.

    C0 = lam h*^2 / (2 M^2) [Hts lap p + lap(p Hts)]
         - lam^2 h*^2 / (mu M^2) div(Hts grad p).
    """
    lam, mu = material.lam, material.mu
    M = 2.0 * mu + lam
    A = lam * h_star**2 / (2.0 * M**2)
    B = lam**2 * h_star**2 / (mu * M**2)
    product = field_product(p, hts)

    def func(y1, y2):
        lap_p = p.laplacian(y1, y2)
        p1, p2 = p.grad(y1, y2)
        t1, t2 = hts.grad(y1, y2)
        div_term = t1 * p1 + t2 * p2 + hts(y1, y2) * lap_p
        return A * (hts(y1, y2) * lap_p + product.laplacian(y1, y2)) - B * div_term

    return func


def c0_gradient_form(material: Material, h_star: float, p: FieldFunction,
                     hts: FieldFunction):
    """Equivalent expression after expanding the product derivatives.

    C0 = -h*^2 lam (lam - mu) / (mu M^2) [grad Hts . grad p + Hts lap p]
         + h*^2 lam / (2 M^2) p lap(Hts),
    where the bracket equals div(Hts grad p).
    """
    lam, mu = material.lam, material.mu
    M = 2.0 * mu + lam
    A = -h_star**2 * lam * (lam - mu) / (mu * M**2)
    B = h_star**2 * lam / (2.0 * M**2)

    def func(y1, y2):
        p1, p2 = p.grad(y1, y2)
        t1, t2 = hts.grad(y1, y2)
        bracket = t1 * p1 + t2 * p2 + hts(y1, y2) * p.laplacian(y1, y2)
        return A * bracket + B * p(y1, y2) * hts.laplacian(y1, y2)

    return func


def displacement_profiles(material: Material, layer: LayerThickness,
                          pressure_field) -> DisplacementProfile:
    """Assemble all profile callables for a given pressure distribution.

    ``pressure_field`` must provide first and second derivatives (a
    FieldFunction, or a bare callable that falls back to finite
    differences).
    """
    lam, mu = material.lam, material.mu
    if mu <= 0.0:
        raise DomainError(f"shear modulus must be positive, got mu={mu}")
    M = 2.0 * mu + lam
    h_star = layer.h_star
    p = as_field_function(pressure_field)
    hts = _hts_function(layer)

    def Psi(zeta):
        zeta = np.asarray(zeta, dtype=float)
        return (
            -(lam + mu) * (h_star**2 - zeta**2) / (2.0 * mu * M)
            + h_star * (h_star - zeta) / M
        )

    def w0(y, zeta):
        y1, y2 = y
        return p(y1, y2) * (h_star - np.asarray(zeta, float)) / M

    def w1(y, zeta):
        y1, y2 = y
        return p(y1, y2) * hts(y1, y2) / M

    def w2(y, zeta):
        y1, y2 = y
        z = np.asarray(zeta, dtype=float)
        poly = (
            3.0 * lam * mu * h_star * (z**2 - h_star**2)
            - lam * M * (z**3 - h_star**3)
            - 3.0 * lam * (mu - lam) * h_star**2 * (z - h_star)
        )
        return p.laplacian(y1, y2) * poly / (6.0 * mu * M**2)

    def v0(y, zeta):
        y1, y2 = y
        shape = np.broadcast(np.asarray(y1), np.asarray(y2),
                             np.asarray(zeta)).shape
        return np.zeros(shape), np.zeros(shape)

    def v1(y, zeta):
        y1, y2 = y
        g1, g2 = p.grad(y1, y2)
        depth = Psi(zeta)
        return depth * g1, depth * g2

    def v2(y, zeta):
        y1, y2 = y
        z = np.asarray(zeta, dtype=float)
        product = field_product(p, hts)
        q1, q2 = product.grad(y1, y2)
        g1, g2 = p.grad(y1, y2)
        c = lam * h_star / (mu * M) * hts(y1, y2)
        return (h_star - z) / M * q1 - c * g1, (h_star - z) / M * q2 - c * g2

    c0 = c0_divergence_form(material, h_star, p, hts)

    def w3_surface(y):
        y1, y2 = y
        return c0(y1, y2)

    return DisplacementProfile(w0, w1, w2, w3_surface, v0, v1, v2, Psi)


def surface_displacement_expansion(material: Material, layer: LayerThickness,
                                   pressure_field, y) -> float:
    """Four-term normal surface displacement at a point.

    w(y, 0) = eps h* p / M + eps^2 Hts p / M - eps^3 h*^3 A3 lap p
              + eps^4 C0(y),
    with A3 = lam (lam - mu) / (3 mu M^2); this is the physical surface
    settlement of the layer under the given pressure.
    """
    lam, mu = material.lam, material.mu
    M = 2.0 * mu + lam
    eps, h_star = layer.eps, layer.h_star
    p = as_field_function(pressure_field)
    hts = _hts_function(layer)
    c0 = c0_divergence_form(material, h_star, p, hts)
    y1, y2 = y
    a3 = lam * (lam - mu) / (3.0 * mu * M**2)
    return (
        eps * h_star * p(y1, y2) / M
        + eps**2 * hts(y1, y2) * p(y1, y2) / M
        - eps**3 * h_star**3 * a3 * p.laplacian(y1, y2)
        + eps**4 * c0(y1, y2)
    )
