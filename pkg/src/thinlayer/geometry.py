"""Contact geometry: paraboloid gap functions and elliptical regions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class ParaboloidGap:
    """Initial gap between the contacting surfaces, an elliptic paraboloid.

    phi(y) = y1^2 / (2 R1) + y2^2 / (2 R2), together with the rigid approach
    delta0 of the indenting body.
    """

    R1: float
    R2: float
    delta0: float = 0.0

    def __post_init__(self):
        if self.R1 <= 0.0 or self.R2 <= 0.0:
            raise DomainError(
                f"curvature radii must be positive, got R1={self.R1}, R2={self.R2}"
            )

    def height(self, y1, y2):
        """Gap height phi(y), nonnegative and zero only at the origin."""
        y1 = np.asarray(y1, dtype=float)
        y2 = np.asarray(y2, dtype=float)
        return y1 * y1 / (2.0 * self.R1) + y2 * y2 / (2.0 * self.R2)

    def clearance(self, y1, y2):
        """Signed clearance delta0 - phi(y); positive where contact can occur."""
        return self.delta0 - self.height(y1, y2)

    def scaled(self, eps: float) -> "ParaboloidGap":
        """Gap in thin-layer scaled variables: R -> eps R, delta0 -> delta0/eps."""
        if eps <= 0.0:
            raise DomainError(f"scaling parameter must be positive, got eps={eps}")
        return ParaboloidGap(eps * self.R1, eps * self.R2, self.delta0 / eps)


def gap_eval(gap: ParaboloidGap, y) -> float:
    """Evaluate the gap height at a point y = (y1, y2)."""
    y1, y2 = y
    return gap.height(y1, y2)


@dataclass(frozen=True)
class EllipseDomain:
    """Elliptical region with semi-axes a1, a2 and aspect ratio s = a2/a1."""

    a1: float
    a2: float

    def __post_init__(self):
        if self.a1 <= 0.0 or self.a2 <= 0.0:
            raise DomainError(
                f"semi-axes must be positive, got a1={self.a1}, a2={self.a2}"
            )

    @property
    def s(self) -> float:
        return self.a2 / self.a1

    @property
    def area(self) -> float:
        return np.pi * self.a1 * self.a2

    def contains(self, y1, y2):
        """Membership test y1^2/a1^2 + y2^2/a2^2 <= 1 (closed region)."""
        y1 = np.asarray(y1, dtype=float)
        y2 = np.asarray(y2, dtype=float)
        return (y1 / self.a1) ** 2 + (y2 / self.a2) ** 2 <= 1.0

    def scaled(self, kappa: float) -> "EllipseDomain":
        """Concentric rescaling of both semi-axes by kappa > 0."""
        if kappa <= 0.0:
            raise DomainError(f"scale factor must be positive, got kappa={kappa}")
        return EllipseDomain(kappa * self.a1, kappa * self.a2)

    def boundary_points(self, n: int = 256):
        """n points on the contour, parametrized by the elliptic angle."""
        t = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
        return self.a1 * np.cos(t), self.a2 * np.sin(t)
