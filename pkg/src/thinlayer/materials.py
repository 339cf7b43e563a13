"""Isotropic elastic constants and conversions between representations."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DomainError, IncompressibleSingularity


def lame_from_engineering(E: float, nu: float) -> tuple[float, float]:
    """Convert Young's modulus and Poisson's ratio to the Lame pair (lambda, mu).

    lambda = E nu / ((1+nu)(1-2nu)),  mu = E / (2(1+nu)).

    Raises IncompressibleSingularity at nu = 1/2, where lambda diverges, and
    DomainError for moduli or ratios outside the physically admissible range.
    """
    if E <= 0.0:
        raise DomainError(f"Young's modulus must be positive, got E={E}")
    if nu == 0.5:
        raise IncompressibleSingularity(
            "lambda diverges at nu = 1/2; use the incompressible model instead"
        )
    if not -1.0 < nu < 0.5:
        raise DomainError(f"Poisson's ratio must lie in (-1, 1/2), got nu={nu}")
    lam = E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu))
    mu = E / (2.0 * (1.0 + nu))
    return lam, mu


def engineering_from_lame(lam: float, mu: float) -> tuple[float, float]:
    """Invert lame_from_engineering.

    E = mu (3 lambda + 2 mu) / (lambda + mu),  nu = lambda / (2 (lambda + mu)).
    """
    if mu <= 0.0:
        raise DomainError(f"shear modulus must be positive, got mu={mu}")
    if lam + mu <= 0.0:
        raise DomainError("lambda + mu must be positive for an isotropic solid")
    E = mu * (3.0 * lam + 2.0 * mu) / (lam + mu)
    nu = lam / (2.0 * (lam + mu))
    return E, nu


@dataclass(frozen=True)
class Material:
    """Homogeneous isotropic elastic material.

    Stores the engineering constants; the Lame pair is derived on access so
    that nu = 1/2 remains representable for the incompressible model (where
    only E is ever used).  Accessing ``lam`` or ``p_wave_modulus`` at
    nu = 1/2 raises IncompressibleSingularity.
    """

    E: float
    nu: float

    def __post_init__(self):
        if self.E <= 0.0:
            raise DomainError(f"Young's modulus must be positive, got E={self.E}")
        if not -1.0 < self.nu <= 0.5:
            raise DomainError(
                f"Poisson's ratio must lie in (-1, 1/2], got nu={self.nu}"
            )

    @property
    def mu(self) -> float:
        """Shear modulus, finite for every admissible nu."""
        return self.E / (2.0 * (1.0 + self.nu))

    @property
    def lam(self) -> float:
        """First Lame parameter; undefined at nu = 1/2."""
        lam, _ = lame_from_engineering(self.E, self.nu)
        return lam

    @property
    def p_wave_modulus(self) -> float:
        """Constrained (P-wave) modulus 2 mu + lambda."""
        return 2.0 * self.mu + self.lam

    @property
    def incompressible(self) -> bool:
        return self.nu == 0.5
