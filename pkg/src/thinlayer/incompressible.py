"""Elliptical contact of thin incompressible layers.

For incompressible layers the local spring picture breaks down and the
leading-order contact model becomes a Poisson-type relation: the pressure
satisfies  -m^-1 lap(p) = delta0 - phi(y)  on the patch with p and its
normal derivative vanishing on the contour, where m aggregates the two
layers' stiffnesses, m = (h1^3/E1 + h2^3/E2)^-1.

For a paraboloid gap the exact pressure is p0 (1 - y1^2/a1^2 - y2^2/a2^2)^2.
Substituting that ansatz and equating the constant, y1^2 and y2^2
coefficients gives three matching conditions

    4 p0 S / m = delta0,
    4 p0 (S + 2/a1^2) / (m a1^2) = 1/(2 R1),
    4 p0 (S + 2/a2^2) / (m a2^2) = 1/(2 R2),        S = 1/a1^2 + 1/a2^2,

which this module reduces to a single scalar equation in the aspect ratio
s = a2/a1 and solves with safeguarded root finding.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, NoContact, ShapeError, SolverError
from .fields import (
    FieldFunction,
    ScalarField,
    as_field_function,
    field_laplacian,
    flux_divergence,
)
from .geometry import EllipseDomain, ParaboloidGap
from .materials import Material

_ASPECT_LIMIT = 1e3
_MATCH_TOL = 1e-12


@dataclass(frozen=True)
class LayerSpec:
    """One incompressible layer: modulus, mean thickness, optional variation."""

    E: float
    h: float
    H_tilde: object | None = None

    def __post_init__(self):
        if self.E <= 0.0:
            raise DomainError(f"layer modulus must be positive, got E={self.E}")
        if self.h < 0.0:
            raise DomainError(f"layer thickness must be nonnegative, got h={self.h}")


@dataclass(frozen=True)
class BilayerConfig:
    """Two bonded incompressible layers and their aggregate coefficient."""

    layers: tuple[LayerSpec, LayerSpec]

    def __post_init__(self):
        if all(layer.h == 0.0 for layer in self.layers):
            raise DomainError("at least one layer must have positive thickness")

    @property
    def m(self) -> float:
        return aggregate_compliance([(l.E, l.h) for l in self.layers])


def aggregate_compliance(layers) -> float:
    """Aggregate stiffness coefficient m = (sum_a h_a^3 / E_a)^-1."""
    total = 0.0
    any_thickness = False
    for E, h in layers:
        if E <= 0.0:
            raise DomainError(f"layer modulus must be positive, got E={E}")
        if h < 0.0:
            raise DomainError(f"layer thickness must be nonnegative, got h={h}")
        if h > 0.0:
            any_thickness = True
        total += h**3 / E
    if not any_thickness:
        raise DomainError("all layer thicknesses are zero")
    return 1.0 / total


@dataclass(frozen=True)
class EllipticContactSolution:
    """Contact parameters of the incompressible elliptical solution."""

    p0: float
    domain: EllipseDomain
    force: float
    M_P: float
    s: float

    def pressure(self, y1, y2):
        """Pressure field: the double-root ansatz inside, zero outside."""
        y1 = np.asarray(y1, dtype=float)
        y2 = np.asarray(y2, dtype=float)
        theta = 1.0 - (y1 / self.domain.a1) ** 2 - (y2 / self.domain.a2) ** 2
        return self.p0 * np.maximum(theta, 0.0) ** 2

    def pressure_smooth(self, y1, y2):
        """Polynomial continuation of the pressure (no clamping)."""
        theta = 1.0 - (y1 / self.domain.a1) ** 2 - (y2 / self.domain.a2) ** 2
        return self.p0 * theta * theta

    def pressure_gradient(self, y1, y2):
        a1, a2 = self.domain.a1, self.domain.a2
        theta = 1.0 - (y1 / a1) ** 2 - (y2 / a2) ** 2
        c = -4.0 * self.p0 * theta
        return c * y1 / a1**2, c * y2 / a2**2

    def pressure_laplacian(self, y1, y2):
        a1, a2 = self.domain.a1, self.domain.a2
        theta = 1.0 - (y1 / a1) ** 2 - (y2 / a2) ** 2
        S = 1.0 / a1**2 + 1.0 / a2**2
        return -4.0 * self.p0 * theta * S + 8.0 * self.p0 * (
            y1**2 / a1**4 + y2**2 / a2**4
        )

    def pressure_function(self) -> FieldFunction:
        """Smooth continuation with analytic derivatives attached."""
        return FieldFunction(
            self.pressure_smooth,
            self.pressure_gradient,
            self.pressure_laplacian,
            scale=self.domain.a1,
        )

    def pressure_field(self, n_cells: int = 128) -> ScalarField:
        return ScalarField.from_callable(
            self.domain, self.pressure_function(), n_cells
        )


def _aspect_equation(s: float, R1: float, R2: float) -> float:
    """Eliminant of the matching system; its positive root is a2/a1."""
    s2 = s * s
    return 3.0 * R1 * s2 * s2 + (R1 - R2) * s2 - 3.0 * R2


def _matching_residuals(m, gap, p0, a1, a2):
    S = 1.0 / a1**2 + 1.0 / a2**2
    r0 = 4.0 * p0 * S / m - gap.delta0
    r1 = 4.0 * p0 * (S + 2.0 / a1**2) / (m * a1**2) - 1.0 / (2.0 * gap.R1)
    r2 = 4.0 * p0 * (S + 2.0 / a2**2) / (m * a2**2) - 1.0 / (2.0 * gap.R2)
    return r0, r1, r2


def elliptic_contact_solve(m: float, gap: ParaboloidGap) -> EllipticContactSolution:
    """Determine (p0, a1, a2) from the aggregate coefficient and the gap.

    The three matching conditions are reduced by the substitutions
    t = a1^2, u = s^2 t to a single polynomial equation in s, bracketed and
    solved by safeguarded root finding, after which p0 and a1 follow in
    closed form.  The matched coefficients are verified to 1e-12 relative.
    """
    if m <= 0.0:
        raise DomainError(f"aggregate coefficient must be positive, got m={m}")
    if gap.delta0 <= 0.0:
        raise NoContact(f"no indentation: delta0={gap.delta0}")
    ratio = gap.R1 / gap.R2
    if not (1.0 / _ASPECT_LIMIT <= ratio <= _ASPECT_LIMIT):
        raise DomainError(
            f"unsupported aspect ratio R1/R2={ratio:.3e}; "
            f"supported range is [1e-3, 1e3]"
        )

    r = gap.R2 / gap.R1
    lo = 0.1 * min(r, 1.0) ** 0.5
    hi = 10.0 * max(r, 1.0) ** 0.5
    f_lo = _aspect_equation(lo, gap.R1, gap.R2)
    f_hi = _aspect_equation(hi, gap.R1, gap.R2)
    if f_lo * f_hi > 0.0:
        raise SolverError(
            f"aspect-ratio bracket [{lo:.3e}, {hi:.3e}] does not change sign: "
            f"f(lo)={f_lo:.3e}, f(hi)={f_hi:.3e}"
        )
    try:
        s = brentq(_aspect_equation, lo, hi, args=(gap.R1, gap.R2),
                   xtol=1e-15, rtol=4.0 * np.finfo(float).eps, maxiter=200)
    except RuntimeError as exc:
        raise SolverError(f"aspect-ratio root finding failed: {exc}") from exc

    # Newton polish on the quartic eliminant
    for _ in range(3):
        f = _aspect_equation(s, gap.R1, gap.R2)
        df = 12.0 * gap.R1 * s**3 + 2.0 * (gap.R1 - gap.R2) * s
        if df == 0.0:
            break
        step = f / df
        if s - step <= 0.0:
            break
        s -= step

    s2 = s * s
    t = 2.0 * gap.R1 * gap.delta0 * (3.0 * s2 + 1.0) / (1.0 + s2)  # a1^2
    a1 = np.sqrt(t)
    a2 = s * a1
    S = 1.0 / t + 1.0 / (s2 * t)
    p0 = m * gap.delta0 / (4.0 * S)

    res = _matching_residuals(m, gap, p0, a1, a2)
    scales = (gap.delta0, 1.0 / (2.0 * gap.R1), 1.0 / (2.0 * gap.R2))
    worst = max(abs(r_) / sc for r_, sc in zip(res, scales))
    if worst > _MATCH_TOL:
        raise SolverError(
            f"matching conditions not satisfied: worst relative residual "
            f"{worst:.3e} (residuals {res})"
        )

    domain = EllipseDomain(a1, a2)
    force = np.pi * a1 * a2 * p0 / 3.0
    M_P = 3.0 * force / (np.pi * m * gap.R1 * gap.R2 * gap.delta0**3)
    return EllipticContactSolution(p0, domain, force, M_P, s)


def elliptic_pressure_eval(sol: EllipticContactSolution, y):
    """Pressure at a point: the ansatz inside the patch, zero outside."""
    y1, y2 = y
    return sol.pressure(y1, y2)


def contact_force_and_MP(sol: EllipticContactSolution, m: float,
                         gap: ParaboloidGap) -> tuple[float, float]:
    """Exact force P = pi a1 a2 p0 / 3 and the dimensionless factor.

    M_P is defined operationally as 3 P / (pi m R1 R2 delta0^3).
    """
    force = np.pi * sol.domain.a1 * sol.domain.a2 * sol.p0 / 3.0
    M_P = 3.0 * force / (np.pi * m * gap.R1 * gap.R2 * gap.delta0**3)
    return force, M_P


def refined_surface_displacement(E: float, h: float, p: ScalarField,
                                 H_tilde: ScalarField) -> ScalarField:
    """Surface settlement of one incompressible layer under pressure p.

    u3 = -(h^3/E) lap(p) - (3 h^2/E) div(Htilde grad p); with Htilde = 0 the
    first term alone reproduces the aggregate model kernel.  Analytic
    derivatives of p are used when the field carries a closed form,
    otherwise discrete operators.
    """
    if E <= 0.0 or h < 0.0:
        raise DomainError(f"invalid layer constants E={E}, h={h}")
    if H_tilde.values.shape != p.values.shape or H_tilde.domain != p.domain:
        raise ShapeError("pressure and variation fields live on different grids")

    if p.func is not None and p.func.has_analytic_derivatives:
        X1, X2 = p.physical_mesh()
        lap_p = np.asarray(p.func.laplacian(X1, X2), dtype=float)
        g1, g2 = p.func.grad(X1, X2)
        ht = H_tilde.as_function()
        if ht.has_analytic_derivatives:
            h1, h2 = ht.grad(X1, X2)
            div_term = h1 * g1 + h2 * g2 + H_tilde.values * lap_p
        else:
            # conservative fallback mixing analytic lap(p) with discrete fluxes
            div_term = flux_divergence(H_tilde, p).values
    else:
        lap_p = field_laplacian(p).values
        div_term = flux_divergence(H_tilde, p).values

    u3 = -(h**3 / E) * lap_p - (3.0 * h**2 / E) * div_term
    return p.with_values(u3)


def bilayer_surface_displacement(layers, p: ScalarField) -> ScalarField:
    """Total mutual approach field of a stack of layers under pressure p."""
    total = None
    for layer in layers:
        if layer.H_tilde is None:
            ht = ScalarField.from_callable(
                p.domain, lambda y1, y2: np.zeros(np.broadcast(y1, y2).shape),
                p.n_cells,
            )
        elif isinstance(layer.H_tilde, ScalarField):
            ht = layer.H_tilde
        else:
            ht = ScalarField.from_callable(
                p.domain, as_field_function(layer.H_tilde, scale=p.domain.a1),
                p.n_cells,
            )
        u = refined_surface_displacement(layer.E, layer.h, p, ht)
        total = u if total is None else total.with_values(total.values + u.values)
    return total


def incompressible_limit_coefficients(material: Material) -> tuple[float, float, float]:
    """Elastic combinations that stay finite in the incompressible limit.

    Returns, evaluated through the engineering constants,

        A = lam (lam - mu) / (mu (2 mu + lam)^2) = nu(1+nu)(4nu-1)/(E(1-nu)^2)
        B = lam / (2 mu + lam)^2               = nu(1+nu)(1-2nu)/(E(1-nu)^2)
        C = lam^2 / (mu (2 mu + lam)^2)        = 2 nu^2 (1+nu)/(E(1-nu)^2)

    At nu = 1/2 these tend to (3/E, 0, 3/E).
    """
    E, nu = material.E, material.nu
    if not 0.0 < nu <= 0.5:
        raise DomainError(f"limit coefficients expect nu in (0, 1/2], got {nu}")
    denom = E * (1.0 - nu) ** 2
    coeff_a = nu * (1.0 + nu) * (4.0 * nu - 1.0) / denom
    coeff_b = nu * (1.0 + nu) * (1.0 - 2.0 * nu) / denom
    coeff_c = 2.0 * nu**2 * (1.0 + nu) / denom
    return coeff_a, coeff_b, coeff_c
