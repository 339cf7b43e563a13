import numpy as np
import pytest

from thinlayer.errors import DomainError
from thinlayer.fields import ScalarField, constant_field, integrate_ellipse
from thinlayer.geometry import EllipseDomain, ParaboloidGap
from thinlayer.incompressible import (
    LayerSpec,
    aggregate_compliance,
    elliptic_contact_solve,
)
from thinlayer.sensitivity import (
    SensitivityProblem,
    WeightFunction,
    boundary_flux_integral,
    force_variation,
    gap_variation_pressure,
    gap_variation_residual,
    orthogonality_residual,
    pressure_variation,
    sensitivity_rhs,
    weight_eval,
    weight_field,
    weight_max_radius,
)


def base_solution():
    m = aggregate_compliance([(1.0, 0.1), (0.8, 0.12)])
    return elliptic_contact_solve(m, ParaboloidGap(1.0, 0.7, 0.03))


SOL = base_solution()
LAYERS_ZERO = (LayerSpec(1.0, 0.1), LayerSpec(0.8, 0.12))


def theta(dom, y1, y2):
    return 1.0 - (y1 / dom.a1) ** 2 - (y2 / dom.a2) ** 2


# --- weights --------------------------------------------------------------------

def test_weight_values():
    dom = EllipseDomain(1.0, 1.0)
    rho = WeightFunction("rho", dom)
    assert weight_eval(rho, 0.0, 0.0) == 0.0
    t = np.linspace(0, 2 * np.pi, 9)
    assert np.max(np.abs(weight_eval(rho, np.cos(t), np.sin(t)))) < 1e-15
    # circular: rho = r^2 (1 - r^2), maximum 1/4 at r = 1/sqrt(2)
    r = 1 / np.sqrt(2)
    assert weight_eval(rho, r, 0.0) == pytest.approx(0.25, rel=1e-12)
    th = WeightFunction("theta_star", dom)
    assert weight_eval(th, 0.0, 0.0) == 1.0
    assert abs(weight_eval(th, 1.0, 0.0)) < 1e-15


def test_weight_nonnegative_inside():
    dom = EllipseDomain(1.4, 0.6)
    w = weight_field(WeightFunction("rho_star", dom), 64)
    assert np.min(w.values[w.inside()]) >= -1e-15


def test_weight_max_radii():
    assert weight_max_radius("rho_star") == pytest.approx(1 / np.sqrt(2),
                                                          abs=1e-6)
    assert weight_max_radius("theta_star") == 0.0
    assert weight_max_radius("uniform") == 0.0


def test_unknown_weight_kind():
    with pytest.raises(DomainError):
        WeightFunction("gaussian", EllipseDomain(1.0, 1.0))


# --- forward sensitivity ---------------------------------------------------------

def test_zero_variation_gives_zero_everything():
    prob = SensitivityProblem(SOL, LAYERS_ZERO)
    rhs = sensitivity_rhs(prob, 64)
    assert np.all(rhs.values == 0.0)
    p_tilde = pressure_variation(prob, 64)
    assert np.all(p_tilde.values == 0.0)
    assert force_variation(p_tilde) == 0.0


def test_rhs_constant_weight_factors_out():
    c = 0.004
    layers = (LayerSpec(1.0, 0.1, constant_field(c)), LayerSpec(0.8, 0.12))
    prob = SensitivityProblem(SOL, layers)
    rhs = sensitivity_rhs(prob, 96)
    # rhs = -m c (3 h^2 / E) lap(p_bar) where the discrete flux form has the
    # same interior stencil as the plain Laplacian for a constant weight
    X1, X2 = rhs.physical_mesh()
    lap = SOL.pressure_laplacian(X1, X2)
    expected = -prob.m * c * (3 * 0.1**2 / 1.0) * lap
    inner = rhs.inside(-0.05)
    assert np.max(np.abs(rhs.values[inner] - expected[inner])) < 2e-4 * np.max(
        np.abs(expected))


def test_uniform_thinning_raises_pressure_everywhere():
    c = -0.005
    layers = (LayerSpec(1.0, 0.1, constant_field(c)),
              LayerSpec(0.8, 0.12, constant_field(0.0)))
    prob = SensitivityProblem(SOL, layers)
    p_tilde = pressure_variation(prob, 96)
    inside = p_tilde.inside(-1e-12)
    assert np.min(p_tilde.values[inside]) > 0.0


def test_constant_variation_matches_linearized_solution():
    # exact linearization: p_tilde = -m * (sum 3 h_a^2 c_a / E_a) * p_bar
    c1, c2 = -0.004, 0.003
    layers = (LayerSpec(1.0, 0.1, constant_field(c1)),
              LayerSpec(0.8, 0.12, constant_field(c2)))
    prob = SensitivityProblem(SOL, layers)
    p_tilde = pressure_variation(prob, 128)
    coeff = 3 * 0.1**2 / 1.0 * c1 + 3 * 0.12**2 / 0.8 * c2
    X1, X2 = p_tilde.physical_mesh()
    expected = -prob.m * coeff * SOL.pressure(X1, X2)
    mask = p_tilde.inside(-1e-12)
    err = np.max(np.abs(p_tilde.values[mask] - expected[mask]))
    assert err < 1e-4 * np.max(np.abs(expected))


def test_force_variation_of_parabolic_bump():
    dom = SOL.domain
    p = ScalarField.from_callable(dom, lambda y1, y2: theta(dom, y1, y2), 64)
    assert force_variation(p) == pytest.approx(np.pi * dom.a1 * dom.a2 / 2,
                                               rel=1e-12)


def test_force_variation_odd_field_vanishes():
    dom = SOL.domain
    p = ScalarField.from_callable(dom, lambda y1, y2: y1 * theta(dom, y1, y2),
                                  64)
    assert abs(force_variation(p)) < 1e-15


# --- orthogonality functional ----------------------------------------------------

def test_orthogonality_zero_and_parity():
    rho = WeightFunction("rho", SOL.domain)
    assert orthogonality_residual(LAYERS_ZERO, rho) == 0.0
    odd = (LayerSpec(1.0, 0.1, lambda y1, y2: y1 * np.ones_like(y2)),)
    assert abs(orthogonality_residual(odd, rho)) < 1e-15


def test_orthogonality_closed_form():
    # single unit layer with the parabolic bump variation over the patch
    dom = SOL.domain
    rho = WeightFunction("rho", dom)
    layers = (LayerSpec(1.0, 1.0, lambda y1, y2: theta(dom, y1, y2)),)
    s = dom.s
    expected = np.pi * dom.a1 * dom.a2 * (s + 1 / s) / 24.0
    assert orthogonality_residual(layers, rho) == pytest.approx(expected,
                                                                rel=1e-12)


def test_green_identity_chain_randomized():
    # the force variation equals a fixed multiple of the weighted moment:
    # the Green-identity reduction, checked quantitatively
    rng = np.random.default_rng(11)
    dom = SOL.domain
    rho = WeightFunction("rho", dom)
    K = -12.0 * SensitivityProblem(SOL, LAYERS_ZERO).m * SOL.p0 \
        * dom.a1 * dom.a2 / (dom.a1**2 + dom.a2**2)
    worst = 0.0
    scale = 0.0
    for _ in range(20):
        c = rng.normal(size=6) * 0.01
        def h1(y1, y2, c=c):
            return c[0] + c[1] * y1 + c[2] * y2**2 + c[3] * np.sin(2 * y1)
        def h2(y1, y2, c=c):
            return c[4] * np.cos(y2) + c[5] * y1 * y2
        layers = (LayerSpec(1.0, 0.1, h1), LayerSpec(0.8, 0.12, h2))
        p_tilde = pressure_variation(SensitivityProblem(SOL, layers), 64)
        fv = force_variation(p_tilde)
        moment = orthogonality_residual(layers, rho)
        worst = max(worst, abs(fv - K * moment))
        scale = max(scale, abs(fv))
    assert worst < 5e-3 * scale


# --- gap variation ----------------------------------------------------------------

def test_gap_variation_zero():
    assert gap_variation_residual(lambda y1, y2: np.zeros_like(y1),
                                  SOL.domain) == 0.0


def test_gap_variation_nonorthogonal_bump():
    dom = SOL.domain
    value = gap_variation_residual(lambda y1, y2: theta(dom, y1, y2), dom)
    assert value == pytest.approx(np.pi * dom.a1 * dom.a2 / 3.0, rel=1e-12)


def test_orthogonal_gap_variation_freezes_force():
    dom = SOL.domain
    m = 100.0
    # theta - 2/3 has zero moment against theta over the patch
    def phi_t(y1, y2):
        return theta(dom, y1, y2) - 2.0 / 3.0

    assert abs(gap_variation_residual(phi_t, dom)) < 1e-14
    p_tilde = gap_variation_pressure(phi_t, dom, m, n_cells=128)
    total = integrate_ellipse(p_tilde)
    scale = integrate_ellipse(
        ScalarField.from_grid(dom, np.abs(p_tilde.values)))
    assert abs(total) < 5e-3 * scale


def test_boundary_term_vanishes_with_contour_weight():
    dom = SOL.domain

    def theta_fn(y1, y2):
        return theta(dom, y1, y2)

    value = boundary_flux_integral(dom, theta_fn, SOL.pressure_gradient)
    assert abs(value) < 1e-10


def test_solution_symmetry_transfers_to_variation():
    # even variation on a symmetric contact keeps the variation even
    m = aggregate_compliance([(1.0, 0.1)])
    sol = elliptic_contact_solve(m, ParaboloidGap(1.0, 0.7, 0.03))
    layers = (LayerSpec(1.0, 0.1, lambda y1, y2: 0.01 * np.cos(3 * y1) *
                        np.exp(-y2**2)),)
    p_tilde = pressure_variation(SensitivityProblem(sol, layers), 64)
    v = p_tilde.values
    assert np.max(np.abs(v - v[::-1, :])) < 1e-10
    assert np.max(np.abs(v - v[:, ::-1])) < 1e-10
