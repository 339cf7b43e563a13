import numpy as np
import pytest

from thinlayer.config import (
    GriddedMap,
    compile_expression,
    load_config,
    read_map_csv,
    validate_grid,
    write_map_csv,
)
from thinlayer.errors import ConfigError, ShapeError
from thinlayer.geometry import EllipseDomain


def test_expression_values_and_derivatives():
    f = compile_expression("y1**2 + 2*y2 - sin(y1)")
    assert f(0.5, 1.0) == pytest.approx(0.25 + 2.0 - np.sin(0.5))
    g1, g2 = f.grad(0.5, 1.0)
    assert g1 == pytest.approx(1.0 - np.cos(0.5), rel=1e-12)
    assert g2 == pytest.approx(2.0, rel=1e-12)
    assert f.laplacian(0.5, 1.0) == pytest.approx(2.0 + np.sin(0.5), rel=1e-12)


def test_expression_broadcasts():
    f = compile_expression("0.1")
    arr = f(np.zeros((3, 4)), np.zeros((3, 4)))
    assert arr.shape == (3, 4)
    assert np.all(arr == 0.1)
    f2 = compile_expression("exp(-2*(y1*y1 + y2*y2))")
    vals = f2(np.array([0.0, 1.0]), np.array([0.0, 0.0]))
    assert vals == pytest.approx([1.0, np.exp(-2.0)])


@pytest.mark.parametrize("bad", [
    "__import__('os')",
    "y1.__class__",
    "open('x')",
    "lambda: 1",
    "y3 + 1",
    "sin(y1, y2)",
    "[1, 2]",
    "tan(y1)",
])
def test_disallowed_expressions_rejected(bad):
    with pytest.raises(ConfigError):
        compile_expression(bad)


def test_grid_validation():
    assert validate_grid(64) == 64
    for bad in (16, 48, 100, 2048):
        with pytest.raises(ConfigError):
            validate_grid(bad)


def test_map_round_trip(tmp_path):
    axis1 = np.linspace(-1.0, 1.0, 9)
    axis2 = np.linspace(-0.5, 0.5, 7)
    values = np.outer(np.sin(axis1) + 2.0, np.cos(axis2))
    path = tmp_path / "map.csv"
    write_map_csv(path, axis1, axis2, values)
    grid = read_map_csv(path)
    assert np.allclose(grid.y1_axis, axis1)
    assert np.allclose(grid.y2_axis, axis2)
    assert np.allclose(grid.values, values, rtol=1e-11)


def test_map_interpolation_accuracy(tmp_path):
    axis = np.linspace(-1.2, 1.2, 49)
    Y1, Y2 = np.meshgrid(axis, axis, indexing="ij")
    values = 0.1 * (1 + 0.2 * np.exp(-3 * (Y1**2 + Y2**2)))
    path = tmp_path / "map.csv"
    write_map_csv(path, axis, axis, values)
    fn = read_map_csv(path).as_function()
    pts = np.array([[0.13, -0.27], [0.51, 0.08], [0.0, 0.0]])
    for y1, y2 in pts:
        exact = 0.1 * (1 + 0.2 * np.exp(-3 * (y1**2 + y2**2)))
        assert fn(y1, y2) == pytest.approx(exact, rel=1e-6)


def test_sample_map_resource():
    grid = read_map_csv("@sample")
    assert grid.values.shape == (65, 65)
    assert np.all(grid.values > 0.0)
    assert grid.covers(EllipseDomain(1.0, 1.0))


def test_map_coverage_check():
    grid = read_map_csv("@sample")
    with pytest.raises(ShapeError):
        grid.require_covers(EllipseDomain(2.0, 1.0))


def test_missing_map_file():
    with pytest.raises(ConfigError):
        read_map_csv("/nonexistent/map.csv")


def test_malformed_maps(tmp_path):
    bad_header = tmp_path / "a.csv"
    bad_header.write_text("x,y,z\n0,0,1\n")
    with pytest.raises(ConfigError):
        read_map_csv(bad_header)

    ragged = tmp_path / "b.csv"
    ragged.write_text("y1,y2,H\n0,0,1\n0,1,1\n1,0,1\n")
    with pytest.raises(ConfigError):
        read_map_csv(ragged)

    garbage = tmp_path / "c.csv"
    garbage.write_text("y1,y2,H\n0,0,oops\n")
    with pytest.raises(ConfigError):
        read_map_csv(garbage)


def test_config_parsing(tmp_path):
    path = tmp_path / "run.ini"
    path.write_text(
        "[geometry]\nR1 = 1.0\nR2 = 0.5\ndelta0 = 0.1\n"
        "[solver]\ngrid = 64\n"
    )
    cfg = load_config(path)
    assert cfg.get_float("geometry", "R1", positive=True) == 1.0
    assert cfg.get_grid() == 64
    with pytest.raises(ConfigError):
        cfg.get_float("geometry", "missing")
    assert cfg.get_float("solver", "tol", 1e-10) == 1e-10


def test_config_diagnostics_carry_section_and_field(tmp_path):
    path = tmp_path / "run.ini"
    path.write_text("[geometry]\nR1 = fast\n")
    cfg = load_config(path)
    with pytest.raises(ConfigError, match=r"\[geometry\] R1"):
        cfg.get_float("geometry", "R1")
    path2 = tmp_path / "run2.ini"
    path2.write_text("[geometry]\nR1 = -2\n")
    cfg2 = load_config(path2)
    with pytest.raises(ConfigError, match="positive"):
        cfg2.get_float("geometry", "R1", positive=True)


def test_missing_config_file():
    with pytest.raises(ConfigError):
        load_config("/nonexistent/run.ini")
