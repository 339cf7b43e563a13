import numpy as np
import pytest
from hypothesis import given, strategies as st

from thinlayer.errors import DomainError
from thinlayer.geometry import EllipseDomain, ParaboloidGap, gap_eval
from thinlayer.thickness import LayerThickness, thickness_decompose


def test_gap_vertex():
    assert gap_eval(ParaboloidGap(1.0, 1.0), (0.0, 0.0)) == 0.0


def test_gap_values():
    assert gap_eval(ParaboloidGap(2.0, 1.0), (2.0, 0.0)) == pytest.approx(1.0)
    assert gap_eval(ParaboloidGap(1.0, 0.5), (0.0, 1.0)) == pytest.approx(1.0)


@given(
    R1=st.floats(0.1, 10.0),
    R2=st.floats(0.1, 10.0),
    y1=st.floats(-5.0, 5.0),
    y2=st.floats(-5.0, 5.0),
)
def test_gap_nonnegative_quadratic(R1, R2, y1, y2):
    gap = ParaboloidGap(R1, R2)
    value = gap_eval(gap, (y1, y2))
    assert value >= 0.0
    # exactly quadratic: doubling the point quadruples the height
    assert gap_eval(gap, (2 * y1, 2 * y2)) == pytest.approx(4 * value, rel=1e-12)


def test_gap_validation():
    with pytest.raises(DomainError):
        ParaboloidGap(0.0, 1.0)
    with pytest.raises(DomainError):
        ParaboloidGap(1.0, -2.0)


def test_gap_scaling_round_trip():
    gap = ParaboloidGap(3.0, 1.5, 0.2)
    starred = gap.scaled(0.1)
    assert starred.R1 == pytest.approx(0.3)
    assert starred.delta0 == pytest.approx(2.0)
    back = starred.scaled(10.0)
    assert back.R1 == pytest.approx(gap.R1)
    assert back.delta0 == pytest.approx(gap.delta0)


def test_ellipse_membership_and_aspect():
    dom = EllipseDomain(2.0, 1.0)
    assert dom.s == 0.5
    assert dom.contains(2.0, 0.0)
    assert dom.contains(0.0, 1.0)
    assert not dom.contains(2.0, 0.5)
    assert dom.area == pytest.approx(2.0 * np.pi)


def test_ellipse_scaling():
    dom = EllipseDomain(2.0, 1.0).scaled(0.5)
    assert dom.a1 == 1.0 and dom.a2 == 0.5
    with pytest.raises(DomainError):
        EllipseDomain(2.0, 1.0).scaled(0.0)


# --- thickness decomposition -------------------------------------------------

def test_uniform_map_decomposes_to_zero_variation():
    dom = EllipseDomain(1.0, 1.0)
    layer = thickness_decompose(lambda y1, y2: 0.1 * np.ones_like(y1), 0.1,
                                eps=0.1, domain=dom)
    X = np.linspace(-0.9, 0.9, 5)
    assert np.max(np.abs(layer.psi(X, X))) == 0.0
    assert np.max(np.abs(layer.variation(X, X))) == 0.0


def test_sinusoidal_map_inverts_scaling():
    # H = h (1 + 0.1 sin y1) split with eps = 0.1 gives psi = sin y1
    dom = EllipseDomain(1.0, 1.0)
    h = 0.1
    layer = thickness_decompose(
        lambda y1, y2: h * (1.0 + 0.1 * np.sin(y1)), h, eps=0.1, domain=dom
    )
    X = np.linspace(-0.9, 0.9, 7)
    assert np.allclose(layer.psi(X, 0.0 * X), np.sin(X), atol=1e-12)
    assert layer.h_star == pytest.approx(1.0)


def test_reconstruction_is_identity():
    dom = EllipseDomain(1.0, 0.8)
    def H(y1, y2):
        return 0.1 * (1.0 + 0.05 * y1 - 0.03 * y2**2)
    layer = thickness_decompose(H, 0.1, eps=0.07, domain=dom)
    X1, X2 = np.meshgrid(np.linspace(-1, 1, 9), np.linspace(-0.8, 0.8, 9))
    assert np.allclose(layer.thickness(X1, X2), H(X1, X2), rtol=1e-14)


def test_default_eps_from_spread():
    dom = EllipseDomain(1.0, 1.0)
    layer = thickness_decompose(
        lambda y1, y2: 0.1 + 0.02 * np.ones_like(y1), 0.1, domain=dom
    )
    assert layer.eps == pytest.approx(0.2)
    assert layer.h_star == pytest.approx(0.5)


def test_degenerate_layer_rejected():
    dom = EllipseDomain(1.0, 1.0)
    with pytest.raises(DomainError):
        thickness_decompose(lambda y1, y2: 0.1 * y1, 0.1, eps=0.1, domain=dom)


def test_layer_thickness_consistency_check():
    with pytest.raises(DomainError):
        LayerThickness(0.1, 2.0, 0.1, lambda y1, y2: 0.0)
