"""Winkler-foundation response of a thin compressible layer.

A bonded thin compressible layer responds at leading order like a bed of
independent springs whose local stiffness is the constrained modulus over
the local thickness, k(y) = (2 mu + lambda) / H(y).  The contact pressure
is k(y) times the positive part of the clearance, the contact patch is the
explicit ellipse where the clearance is positive, and the total force is
its integral.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NoContact
from .fields import FieldFunction, ScalarField, integrate_callable
from .geometry import EllipseDomain, ParaboloidGap
from .materials import Material
from .thickness import LayerThickness


@dataclass(frozen=True)
class WinklerSolution:
    """Pressure field, contact patch, total force and the modulus map."""

    pressure: ScalarField
    contact_ellipse: EllipseDomain
    force: float
    modulus_map: FieldFunction


def winkler_modulus(material: Material, layer: LayerThickness, y):
    """Local foundation modulus k(y) = (2 mu + lambda) / H(y)."""
    y1, y2 = y
    stiff = material.p_wave_modulus  # raises IncompressibleSingularity at nu=1/2
    H = layer.thickness(y1, y2)
    if np.any(H <= 0.0):
        raise DomainError("thickness map is nonpositive at an evaluation point")
    return stiff / H


def winkler_pressure(material: Material, layer: LayerThickness,
                     gap: ParaboloidGap, y):
    """Contact pressure k(y) * (delta0 - phi(y))_+ at a point."""
    y1, y2 = y
    k = winkler_modulus(material, layer, y)
    return k * np.maximum(gap.clearance(y1, y2), 0.0)


def winkler_contact_region(gap: ParaboloidGap) -> EllipseDomain:
    """Contact patch: the ellipse where the clearance is positive.

    Semi-axes a_alpha = sqrt(2 R_alpha delta0).
    """
    if gap.delta0 <= 0.0:
        raise NoContact(f"no indentation: delta0={gap.delta0}")
    return EllipseDomain(
        np.sqrt(2.0 * gap.R1 * gap.delta0),
        np.sqrt(2.0 * gap.R2 * gap.delta0),
    )


def winkler_force(material: Material, layer: LayerThickness,
                  gap: ParaboloidGap, n_r: int = 256) -> float:
    """Total contact force: quadrature of the pressure over the patch."""
    region = winkler_contact_region(gap)

    def integrand(y1, y2):
        return winkler_pressure(material, layer, gap, (y1, y2))

    return integrate_callable(region, integrand, n_r=n_r)


def winkler_solve(material: Material, layer: LayerThickness,
                  gap: ParaboloidGap, n_cells: int = 128) -> WinklerSolution:
    """Assemble the full Winkler solution on a lattice over the patch."""
    region = winkler_contact_region(gap)

    def p_func(y1, y2):
        return winkler_pressure(material, layer, gap, (y1, y2))

    pressure = ScalarField.from_callable(region, p_func, n_cells)
    force = winkler_force(material, layer, gap, n_r=max(n_cells, 256))
    modulus = FieldFunction(
        lambda y1, y2: winkler_modulus(material, layer, (y1, y2)),
        scale=region.a1,
    )
    return WinklerSolution(pressure, region, force, modulus)
