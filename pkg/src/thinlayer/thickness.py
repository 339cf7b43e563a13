"""Layer thickness maps and their thin-layer scaling decomposition.

A variable thickness H(y) is split as H = h + Htilde with a mean value h
and a small variation Htilde, and carries the scaling triple
(eps, h_star, psi_star) defined by

    h = eps * h_star,      Htilde = eps^2 * h_star * psi_star,

so that H = h (1 + eps * psi_star).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .fields import FieldFunction, ScalarField, as_field_function, constant_field
from .geometry import EllipseDomain


@dataclass(frozen=True)
class LayerThickness:
    """Thickness description of a bonded elastic layer.

    The stated smallness bound on psi_star from the scaling argument is
    recorded here but not enforced; only positivity of the physical
    thickness is validated where the map is evaluated.
    """

    h: float
    h_star: float
    eps: float
    psi_star: FieldFunction

    def __post_init__(self):
        if self.h <= 0.0:
            raise DomainError(f"mean thickness must be positive, got h={self.h}")
        if self.eps <= 0.0:
            raise DomainError(f"eps must be positive, got {self.eps}")
        if abs(self.h - self.eps * self.h_star) > 1e-12 * self.h:
            raise DomainError("inconsistent scaling: h must equal eps * h_star")

    @classmethod
    def uniform(cls, h: float, eps: float = 0.1) -> "LayerThickness":
        return cls(h, h / eps, eps, constant_field(0.0))

    @classmethod
    def from_variation(cls, h: float, eps: float, psi_star) -> "LayerThickness":
        return cls(h, h / eps, eps, as_field_function(psi_star))

    def psi(self, y1, y2):
        return self.psi_star(y1, y2)

    def variation(self, y1, y2):
        """Thickness variation Htilde(y) = eps * h * psi_star(y)."""
        return self.eps * self.h * np.asarray(self.psi_star(y1, y2), dtype=float)

    def thickness(self, y1, y2):
        """Physical thickness H(y) = h (1 + eps * psi_star(y))."""
        return self.h + self.variation(y1, y2)

    def variation_starred(self, y1, y2):
        """Scaled variation Htilde_star = h_star * psi_star."""
        return self.h_star * np.asarray(self.psi_star(y1, y2), dtype=float)


def _sample_points(domain: EllipseDomain, n_cells: int):
    xi = np.linspace(-1.0, 1.0, n_cells + 1)
    X1, X2 = np.meshgrid(domain.a1 * xi, domain.a2 * xi, indexing="ij")
    return X1, X2


def thickness_decompose(H_map, h: float, eps: float | None = None, *,
                        domain: EllipseDomain | None = None,
                        n_cells: int = 64) -> LayerThickness:
    """Split a physical thickness map into mean plus scaled variation.

    Parameters
    ----------
    H_map : callable, FieldFunction or ScalarField
        Physical thickness H(y1, y2); must be positive on the domain.
    h : float
        Mean thickness to split about.
    eps : float, optional
        Small parameter.  When omitted it is chosen as max|H - h| / h over
        the sampled domain (the scaling fixes only the ordering, not the
        constant).
    domain : EllipseDomain
        Region over which positivity is checked and the default eps is
        measured.  Required unless H_map is a ScalarField.
    """
    if isinstance(H_map, ScalarField):
        domain = H_map.domain
        samples = H_map.values
        H_func = H_map.as_function()
    else:
        if domain is None:
            raise DomainError("domain is required for a callable thickness map")
        H_func = as_field_function(H_map, scale=domain.a1)
        X1, X2 = _sample_points(domain, n_cells)
        samples = np.asarray(H_func(X1, X2), dtype=float)

    if np.min(samples) <= 0.0:
        raise DomainError(
            f"thickness map must stay positive; min sampled value "
            f"{np.min(samples):.3e}"
        )
    if h <= 0.0:
        raise DomainError(f"mean thickness must be positive, got h={h}")

    if eps is None:
        spread = float(np.max(np.abs(samples - h)))
        if spread == 0.0:
            eps = 0.1
        else:
            eps = spread / h
    if eps <= 0.0:
        raise DomainError(f"eps must be positive, got {eps}")

    scale = 1.0 / (eps * h)

    def psi_func(y1, y2):
        return (H_func(y1, y2) - h) * scale

    def psi_grad(y1, y2):
        g1, g2 = H_func.grad(y1, y2)
        return g1 * scale, g2 * scale

    def psi_lap(y1, y2):
        return H_func.laplacian(y1, y2) * scale

    psi = FieldFunction(psi_func, psi_grad, psi_lap, scale=domain.a1)
    return LayerThickness(h, h / eps, eps, psi)
