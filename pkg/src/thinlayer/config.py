"""Run configuration: declarative config files, field expressions, CSV maps.

Configs are INI-style key = value sections.  Closed-form maps are written
as expressions in y1 and y2 drawn from a small whitelisted grammar
(arithmetic, powers, sin, cos, exp), validated on the Python AST before
they are handed to sympy for analytic differentiation; arbitrary code
never executes.  Gridded maps are ingested from CSV files with header
``y1,y2,H`` listing a rectangular lattice row-major (y1 outer, y2 inner).
"""

from __future__ import annotations

import ast
import configparser
import csv
import io
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np
import sympy as sp
from scipy.interpolate import RegularGridInterpolator

from .errors import ConfigError, ShapeError
from .fields import FieldFunction
from .geometry import EllipseDomain

_ALLOWED_CALLS = ("sin", "cos", "exp")
_ALLOWED_NAMES = ("y1", "y2") + _ALLOWED_CALLS
_GRID_RANGE = (32, 1024)
SAMPLE_MAP_TOKEN = "@sample"


def _check_expression_ast(text: str):
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise ConfigError(f"cannot parse expression {text!r}: {exc}") from exc
    for node in ast.walk(tree):
        if isinstance(node, (ast.Expression, ast.Load)):
            continue
        if isinstance(node, ast.BinOp) and isinstance(
            node.op, (ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow)
        ):
            continue
        if isinstance(node, ast.UnaryOp) and isinstance(
            node.op, (ast.UAdd, ast.USub)
        ):
            continue
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            continue
        if isinstance(node, ast.Name) and node.id in _ALLOWED_NAMES:
            continue
        if (
            isinstance(node, ast.Call)
            and isinstance(node.func, ast.Name)
            and node.func.id in _ALLOWED_CALLS
            and len(node.args) == 1
            and not node.keywords
        ):
            continue
        if isinstance(node, (ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow,
                             ast.UAdd, ast.USub)):
            continue
        raise ConfigError(
            f"expression {text!r} uses disallowed syntax "
            f"({type(node).__name__}); allowed: +-*/** numbers, y1, y2, "
            f"{', '.join(_ALLOWED_CALLS)}"
        )


def _vectorize(fn):
    def wrapped(y1, y2):
        a1 = np.asarray(y1, dtype=float)
        a2 = np.asarray(y2, dtype=float)
        out = np.asarray(fn(a1, a2), dtype=float)
        shape = np.broadcast(a1, a2).shape
        if out.shape != shape:
            out = np.broadcast_to(out, shape).copy()
        return out if shape else float(out)

    return wrapped


def compile_expression(text: str, scale: float = 1.0) -> FieldFunction:
    """Compile a whitelisted expression into a field with exact derivatives."""
    _check_expression_ast(text)
    y1s, y2s = sp.symbols("y1 y2")
    local = {"y1": y1s, "y2": y2s, "sin": sp.sin, "cos": sp.cos, "exp": sp.exp}
    try:
        expr = sp.sympify(text, locals=local)
    except (sp.SympifyError, TypeError) as exc:
        raise ConfigError(f"cannot interpret expression {text!r}: {exc}") from exc
    fn = _vectorize(sp.lambdify((y1s, y2s), expr, modules="numpy"))
    g1 = sp.lambdify((y1s, y2s), sp.diff(expr, y1s), modules="numpy")
    g2 = sp.lambdify((y1s, y2s), sp.diff(expr, y2s), modules="numpy")
    lap = sp.lambdify(
        (y1s, y2s), sp.diff(expr, y1s, 2) + sp.diff(expr, y2s, 2),
        modules="numpy",
    )
    g1v, g2v, lapv = _vectorize(g1), _vectorize(g2), _vectorize(lap)
    return FieldFunction(
        fn, lambda a, b: (g1v(a, b), g2v(a, b)), lapv, scale=scale
    )


@dataclass(frozen=True)
class GriddedMap:
    """Rectangular lattice samples of a thickness-like map."""

    y1_axis: np.ndarray
    y2_axis: np.ndarray
    values: np.ndarray

    def covers(self, domain: EllipseDomain) -> bool:
        # allow the 12-digit rounding of dumped lattices at the edges
        tol1 = 1e-9 * domain.a1
        tol2 = 1e-9 * domain.a2
        return (
            self.y1_axis[0] <= -domain.a1 + tol1
            and self.y1_axis[-1] >= domain.a1 - tol1
            and self.y2_axis[0] <= -domain.a2 + tol2
            and self.y2_axis[-1] >= domain.a2 - tol2
        )

    def require_covers(self, domain: EllipseDomain):
        if not self.covers(domain):
            raise ShapeError(
                f"map lattice [{self.y1_axis[0]:g}, {self.y1_axis[-1]:g}] x "
                f"[{self.y2_axis[0]:g}, {self.y2_axis[-1]:g}] does not cover "
                f"the domain with semi-axes ({domain.a1:g}, {domain.a2:g})"
            )

    def as_function(self, scale: float = 1.0) -> FieldFunction:
        method = "cubic" if min(len(self.y1_axis), len(self.y2_axis)) >= 4 \
            else "linear"
        rgi = RegularGridInterpolator(
            (self.y1_axis, self.y2_axis), self.values, method=method,
            bounds_error=False, fill_value=None,
        )

        def func(y1, y2):
            p1 = np.asarray(y1, dtype=float)
            p2 = np.asarray(y2, dtype=float)
            pts = np.stack(np.broadcast_arrays(p1, p2), axis=-1)
            if pts.ndim == 1:
                return float(rgi(pts[None, :])[0])
            return rgi(pts)

        return FieldFunction(func, scale=scale)


def read_map_csv(source) -> GriddedMap:
    """Read a ``y1,y2,H`` rectangular-lattice CSV into a GriddedMap.

    ``source`` is a filesystem path or the token ``@sample`` for the map
    shipped with the package.  Malformed or incomplete lattices raise
    ConfigError.
    """
    if source == SAMPLE_MAP_TOKEN:
        text = resources.files("thinlayer").joinpath(
            "data/sample_thickness.csv").read_text()
        handle = io.StringIO(text)
        name = SAMPLE_MAP_TOKEN
    else:
        path = Path(source)
        if not path.exists():
            raise ConfigError(f"map file not found: {path}")
        handle = open(path, newline="")
        name = str(path)
    try:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None or [c.strip() for c in header] != ["y1", "y2", "H"]:
            raise ConfigError(
                f"{name}: expected header 'y1,y2,H', got {header}"
            )
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                rows.append(tuple(float(c) for c in row))
            except ValueError as exc:
                raise ConfigError(f"{name}:{lineno}: bad row {row}") from exc
            if len(rows[-1]) != 3:
                raise ConfigError(f"{name}:{lineno}: expected 3 columns")
    finally:
        handle.close()
    if not rows:
        raise ConfigError(f"{name}: no data rows")

    data = np.asarray(rows, dtype=float)
    y1_axis = np.unique(data[:, 0])
    y2_axis = np.unique(data[:, 1])
    if len(y1_axis) * len(y2_axis) != len(data):
        raise ConfigError(
            f"{name}: rows do not form a rectangular lattice "
            f"({len(y1_axis)} x {len(y2_axis)} != {len(data)})"
        )
    if not np.all(np.isfinite(data)):
        raise ConfigError(f"{name}: non-finite values in map")
    order = np.lexsort((data[:, 1], data[:, 0]))
    values = data[order, 2].reshape(len(y1_axis), len(y2_axis))
    return GriddedMap(y1_axis, y2_axis, values)


def write_map_csv(path, y1_axis, y2_axis, values):
    """Write a rectangular-lattice map CSV (y1 outer, y2 inner)."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["y1", "y2", "H"])
        for i, a in enumerate(y1_axis):
            for j, b in enumerate(y2_axis):
                writer.writerow(
                    [f"{a:.12g}", f"{b:.12g}", f"{values[i, j]:.12g}"]
                )


# ---------------------------------------------------------------------------
# config parsing
# ---------------------------------------------------------------------------

@dataclass
class RunConfig:
    """Parsed configuration with the config file's directory for paths."""

    parser: configparser.ConfigParser
    base_dir: Path
    path: Path

    def has(self, section: str, option: str) -> bool:
        return self.parser.has_option(section, option)

    def get_float(self, section: str, option: str,
                  default: float | None = None, *, positive: bool = False,
                  nonnegative: bool = False) -> float:
        if not self.parser.has_option(section, option):
            if default is not None:
                return default
            raise ConfigError(f"[{section}] {option}: missing required value")
        raw = self.parser.get(section, option)
        try:
            value = float(raw)
        except ValueError as exc:
            raise ConfigError(
                f"[{section}] {option}: not a number: {raw!r}"
            ) from exc
        if positive and value <= 0.0:
            raise ConfigError(f"[{section}] {option}: must be positive, got {value}")
        if nonnegative and value < 0.0:
            raise ConfigError(
                f"[{section}] {option}: must be nonnegative, got {value}"
            )
        return value

    def get_str(self, section: str, option: str,
                default: str | None = None) -> str:
        if not self.parser.has_option(section, option):
            if default is not None:
                return default
            raise ConfigError(f"[{section}] {option}: missing required value")
        return self.parser.get(section, option).strip()

    def get_grid(self, section: str = "solver", option: str = "grid",
                 default: int = 256) -> int:
        if not self.parser.has_option(section, option):
            return validate_grid(default)
        raw = self.parser.get(section, option)
        try:
            n = int(raw)
        except ValueError as exc:
            raise ConfigError(f"[{section}] {option}: not an integer: {raw!r}") \
                from exc
        return validate_grid(n)

    def resolve_path(self, value: str) -> str:
        if value == SAMPLE_MAP_TOKEN:
            return value
        p = Path(value)
        return str(p if p.is_absolute() else self.base_dir / p)

    def get_map(self, section: str, name: str, scale: float = 1.0):
        """Field from either an expression option or a ``<name>_map`` CSV.

        Returns (FieldFunction, GriddedMap or None), or (None, None) when
        neither option is present.
        """
        expr_present = self.parser.has_option(section, name)
        csv_present = self.parser.has_option(section, f"{name}_map")
        if expr_present and csv_present:
            raise ConfigError(
                f"[{section}] give either {name} or {name}_map, not both"
            )
        if expr_present:
            return compile_expression(
                self.parser.get(section, name), scale=scale), None
        if csv_present:
            grid = read_map_csv(
                self.resolve_path(self.parser.get(section, f"{name}_map"))
            )
            return grid.as_function(scale=scale), grid
        return None, None


def validate_grid(n: int) -> int:
    lo, hi = _GRID_RANGE
    if not (lo <= n <= hi) or n & (n - 1) != 0:
        raise ConfigError(
            f"grid resolution must be a power of two in [{lo}, {hi}], got {n}"
        )
    return n


def load_config(path) -> RunConfig:
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {p}")
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        with open(p) as handle:
            parser.read_file(handle)
    except configparser.Error as exc:
        raise ConfigError(f"{p}: {exc}") from exc
    return RunConfig(parser, p.parent.resolve(), p.resolve())
