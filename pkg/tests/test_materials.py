import pytest
from hypothesis import given, strategies as st

from thinlayer.errors import DomainError, IncompressibleSingularity
from thinlayer.materials import (
    Material,
    engineering_from_lame,
    lame_from_engineering,
)


def test_zero_poisson_ratio_zeroes_lambda():
    lam, mu = lame_from_engineering(1.0, 0.0)
    assert lam == 0.0
    assert mu == 0.5


def test_quarter_poisson_ratio():
    lam, mu = lame_from_engineering(1.0, 0.25)
    assert lam == pytest.approx(0.4, abs=1e-15)
    assert mu == pytest.approx(0.4, abs=1e-15)


def test_incompressible_raises():
    with pytest.raises(IncompressibleSingularity):
        lame_from_engineering(1.0, 0.5)


@pytest.mark.parametrize("nu", [-1.0, -1.5, 0.6, 1.0])
def test_out_of_range_poisson_ratio(nu):
    with pytest.raises(DomainError):
        lame_from_engineering(1.0, nu)


def test_nonpositive_modulus():
    with pytest.raises(DomainError):
        lame_from_engineering(0.0, 0.3)
    with pytest.raises(DomainError):
        lame_from_engineering(-2.0, 0.3)


@given(
    E=st.floats(0.01, 1e3),
    nu=st.floats(-0.9, 0.499),
)
def test_lame_round_trip(E, nu):
    lam, mu = lame_from_engineering(E, nu)
    E2, nu2 = engineering_from_lame(lam, mu)
    assert abs(E2 / E - 1.0) < 1e-12
    assert abs(nu2 - nu) < 1e-12 * max(1.0, abs(nu))


def test_material_properties_consistent():
    mat = Material(2.0, 0.3)
    lam, mu = lame_from_engineering(2.0, 0.3)
    assert mat.lam == lam
    assert mat.mu == mu
    assert mat.p_wave_modulus == 2 * mu + lam
    assert not mat.incompressible


def test_incompressible_material_representable():
    mat = Material(1.0, 0.5)
    assert mat.incompressible
    assert mat.mu == pytest.approx(1.0 / 3.0)
    with pytest.raises(IncompressibleSingularity):
        mat.lam


def test_material_validation():
    with pytest.raises(DomainError):
        Material(-1.0, 0.3)
    with pytest.raises(DomainError):
        Material(1.0, 0.7)
