import numpy as np
import pytest

from thinlayer.fields import FieldFunction
from thinlayer.materials import Material
from thinlayer.profiles import (
    c0_divergence_form,
    c0_gradient_form,
    displacement_profiles,
    surface_displacement_expansion,
    _hts_function,
)
from thinlayer.thickness import LayerThickness

MAT = Material(1.0, 0.3)
LAM, MU = MAT.lam, MAT.mu
M = 2 * MU + LAM


def quadratic_pressure():
    return FieldFunction(
        lambda y1, y2: 1.0 + 0.4 * y1**2 - 0.7 * y2**2 + 0.2 * y1 * y2,
        lambda y1, y2: (0.8 * y1 + 0.2 * y2, -1.4 * y2 + 0.2 * y1),
        lambda y1, y2: np.full(np.broadcast(np.asarray(y1),
                                            np.asarray(y2)).shape, -0.6),
    )


def varied_layer():
    psi = FieldFunction(
        lambda y1, y2: 0.2 * y1 + 0.1 * y2**2,
        lambda y1, y2: (0.2 + 0.0 * np.asarray(y1), 0.2 * np.asarray(y2)),
        lambda y1, y2: np.full(np.broadcast(np.asarray(y1),
                                            np.asarray(y2)).shape, 0.2),
    )
    return LayerThickness.from_variation(0.1, 0.1, psi)


POINTS = [(0.3, -0.2), (0.0, 0.5), (-0.7, 0.1), (0.0, 0.0)]


def test_base_conditions_hold():
    layer = varied_layer()
    prof = displacement_profiles(MAT, layer, quadratic_pressure())
    h_star = layer.h_star
    for y in POINTS:
        assert prof.w0(y, h_star) == pytest.approx(0.0, abs=1e-15)
        assert prof.w2(y, h_star) == pytest.approx(0.0, abs=1e-15)
        v1a, v1b = prof.v1(y, h_star)
        assert abs(v1a) < 1e-15 and abs(v1b) < 1e-15
        v0a, v0b = prof.v0(y, h_star)
        assert np.all(v0a == 0.0) and np.all(v0b == 0.0)


def test_leading_profile_is_linear_in_depth():
    layer = varied_layer()
    p = quadratic_pressure()
    prof = displacement_profiles(MAT, layer, p)
    y = (0.3, -0.2)
    h_star = layer.h_star
    zeta = 0.4 * h_star
    assert prof.w0(y, zeta) == pytest.approx(p(*y) * (h_star - zeta) / M)


def test_depth_profile_value_at_surface():
    layer = varied_layer()
    prof = displacement_profiles(MAT, layer, quadratic_pressure())
    h_star = layer.h_star
    expected = -(LAM + MU) * h_star**2 / (2 * MU * M) + h_star**2 / M
    assert prof.Psi(0.0) == pytest.approx(expected, rel=1e-14)
    assert prof.Psi(h_star) == pytest.approx(0.0, abs=1e-16)


def test_surface_slip_condition():
    # d(v1)/dzeta at the surface equals minus the surface gradient of w0
    layer = varied_layer()
    p = quadratic_pressure()
    prof = displacement_profiles(MAT, layer, p)
    h_star = layer.h_star
    d = 1e-6
    for y in POINTS:
        up = prof.v1(y, d)
        dn = prof.v1(y, -d)
        dv1 = ((up[0] - dn[0]) / (2 * d), (up[1] - dn[1]) / (2 * d))
        g1, g2 = p.grad(*y)
        grad_w0 = (g1 * h_star / M, g2 * h_star / M)
        assert dv1[0] == pytest.approx(-grad_w0[0], rel=1e-8, abs=1e-12)
        assert dv1[1] == pytest.approx(-grad_w0[1], rel=1e-8, abs=1e-12)


def test_second_vertical_profile_solves_its_equation():
    layer = varied_layer()
    p = quadratic_pressure()
    prof = displacement_profiles(MAT, layer, p)
    h_star = layer.h_star
    y = (0.4, 0.3)
    for zeta in (0.2 * h_star, 0.6 * h_star):
        d = 1e-4 * h_star
        num = (prof.w2(y, zeta + d) - 2 * prof.w2(y, zeta)
               + prof.w2(y, zeta - d)) / d**2
        rhs = -LAM * p.laplacian(*y) * (M * zeta - MU * h_star) / (MU * M**2)
        assert num == pytest.approx(rhs, rel=1e-5)


def test_in_plane_correction_boundary_values():
    layer = varied_layer()
    p = quadratic_pressure()
    prof = displacement_profiles(MAT, layer, p)
    h_star = layer.h_star
    hts = _hts_function(layer)
    for y in POINTS:
        va, vb = prof.v2(y, h_star)
        g1, g2 = p.grad(*y)
        c = -LAM * h_star / (MU * M) * hts(*y)
        assert va == pytest.approx(c * g1, rel=1e-12, abs=1e-15)
        assert vb == pytest.approx(c * g2, rel=1e-12, abs=1e-15)


def test_c0_forms_agree_on_quartics():
    p = FieldFunction(
        lambda y1, y2: 1 + y1**2 - 0.5 * y2**2 + 0.3 * y1 * y2**3 + 0.1 * y1**4,
        lambda y1, y2: (2 * y1 + 0.3 * y2**3 + 0.4 * y1**3,
                        -y2 + 0.9 * y1 * y2**2),
        lambda y1, y2: 1.0 + 1.8 * y1 * y2 + 1.2 * y1**2,
    )
    hts = FieldFunction(
        lambda y1, y2: 0.2 * y1 + 0.1 * y2**2 - 0.05 * y1**2 * y2**2,
        lambda y1, y2: (0.2 - 0.1 * y1 * y2**2, 0.2 * y2 - 0.1 * y1**2 * y2),
        lambda y1, y2: 0.2 - 0.1 * (y1**2 + y2**2),
    )
    a = c0_divergence_form(MAT, 1.0, p, hts)
    b = c0_gradient_form(MAT, 1.0, p, hts)
    Y1, Y2 = np.meshgrid(np.linspace(-1, 1, 15), np.linspace(-1, 1, 15),
                         indexing="ij")
    va, vb = a(Y1, Y2), b(Y1, Y2)
    assert np.max(np.abs(va - vb)) <= 1e-10 * np.max(np.abs(va))


def test_c0_incompressible_limit_form():
    # approaching nu = 1/2 the surface term collapses to the pure
    # divergence expression with coefficient 3/E
    E = 1.0
    mat = Material(E, 0.499999)
    p = quadratic_pressure()
    layer = varied_layer()
    hts = _hts_function(layer)
    h_star = layer.h_star
    c0 = c0_divergence_form(mat, h_star, p, hts)
    y = (0.3, 0.2)
    p1, p2 = p.grad(*y)
    t1, t2 = hts.grad(*y)
    div_term = t1 * p1 + t2 * p2 + hts(*y) * p.laplacian(*y)
    limit = -(3 * h_star**2 / E) * div_term
    assert c0(*y) == pytest.approx(limit, rel=1e-4)


def test_expansion_uniform_layer_drops_variation_terms():
    layer = LayerThickness.uniform(0.1)
    p = quadratic_pressure()
    y = (0.3, 0.2)
    w = surface_displacement_expansion(MAT, layer, p, y)
    a3 = LAM * (LAM - MU) / (3 * MU * M**2)
    expected = (layer.eps * layer.h_star * p(*y) / M
                - layer.eps**3 * layer.h_star**3 * a3 * p.laplacian(*y))
    assert w == pytest.approx(expected, rel=1e-14)


def test_expansion_harmonic_pressure_reduces_to_first_term():
    layer = LayerThickness.uniform(0.1)
    p = FieldFunction(
        lambda y1, y2: y1**2 - y2**2,
        lambda y1, y2: (2 * y1, -2 * y2),
        lambda y1, y2: np.zeros(np.broadcast(np.asarray(y1),
                                             np.asarray(y2)).shape),
    )
    y = (0.4, 0.1)
    w = surface_displacement_expansion(MAT, layer, p, y)
    assert w == pytest.approx(layer.eps * layer.h_star * p(*y) / M, rel=1e-14)


def test_expansion_constant_pressure_leaves_curvature_of_variation():
    layer = varied_layer()
    p = FieldFunction(
        lambda y1, y2: 2.0 + 0.0 * np.asarray(y1),
        lambda y1, y2: (np.zeros(np.broadcast(np.asarray(y1),
                                              np.asarray(y2)).shape),) * 2,
        lambda y1, y2: np.zeros(np.broadcast(np.asarray(y1),
                                             np.asarray(y2)).shape),
    )
    hts = _hts_function(layer)
    y = (0.3, -0.4)
    w = surface_displacement_expansion(MAT, layer, p, y)
    eps, h_star = layer.eps, layer.h_star
    # only the depth-pressure product and the pure curvature term survive
    expected = (eps * h_star * p(*y) / M
                + eps**2 * hts(*y) * p(*y) / M
                + eps**4 * LAM * h_star**2 / (2 * M**2) * p(*y)
                * hts.laplacian(*y))
    assert w == pytest.approx(expected, rel=1e-13)
