"""Command-line front end.

    thinlayer <winkler|elliptic|sensitivity|optimize|validate>
              --config <path> [--out <dir>] [--grid N]

Reports are JSON with a fixed field order and floats rendered at 12
significant digits, so identical configs produce byte-identical output;
field dumps are CSV on the solver lattice in physical coordinates.  Exit
codes: 0 success, 1 validation failure, 2 configuration or input error,
3 solver failure.  The environment variable THINLAYER_THREADS caps the
thread pools of the underlying linear algebra.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from .config import (
    GriddedMap,
    RunConfig,
    load_config,
    read_map_csv,
    validate_grid,
    write_map_csv,
)
from .effective import compare_weights, effective_thickness, orthogonalize_variation
from .errors import (
    ConfigError,
    DomainError,
    IncompressibleSingularity,
    NoContact,
    ShapeError,
    SolverError,
    ThinLayerError,
)
from .fields import ScalarField, integrate_ellipse
from .geometry import ParaboloidGap
from .incompressible import LayerSpec, aggregate_compliance, elliptic_contact_solve
from .materials import Material
from .sensitivity import (
    SensitivityProblem,
    WeightFunction,
    orthogonality_residual,
    pressure_variation_solution,
)
from .thickness import LayerThickness, thickness_decompose
from .validate import SAMPLE_MAP, run_all
from .winkler import winkler_solve

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_CONFIG = 2
EXIT_SOLVER = 3


def _apply_thread_cap():
    raw = os.environ.get("THINLAYER_THREADS")
    if not raw:
        return
    try:
        cap = max(1, int(raw))
    except ValueError:
        raise ConfigError(f"THINLAYER_THREADS must be an integer, got {raw!r}")
    try:
        from threadpoolctl import threadpool_limits
        threadpool_limits(limits=cap)
    except ImportError:
        os.environ.setdefault("OMP_NUM_THREADS", str(cap))


def _fmt(value):
    if isinstance(value, float):
        return float(f"{value:.12g}")
    return value


def _json_text(obj, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = ",\n".join(
            f'{pad}  "{k}": {_json_text(v, indent + 1)}' for k, v in obj.items()
        )
        return "{\n" + items + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = ",\n".join(
            f"{pad}  {_json_text(v, indent + 1)}" for v in obj
        )
        return "[\n" + items + "\n" + pad + "]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, float):
        return repr(_fmt(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if obj is None:
        return "null"
    return '"' + str(obj).replace("\\", "\\\\").replace('"', '\\"') + '"'


def _write_report(out_dir: Path, name: str, payload: dict) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / name
    path.write_text(_json_text(payload) + "\n")
    return path


def _dump_field(out_dir: Path, name: str, fld: ScalarField) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / name
    X1, X2 = fld.physical_mesh()
    with open(path, "w", newline="") as handle:
        handle.write("y1,y2,value\n")
        for i in range(fld.values.shape[0]):
            for j in range(fld.values.shape[1]):
                handle.write(
                    f"{X1[i, j]:.12g},{X2[i, j]:.12g},{fld.values[i, j]:.12g}\n"
                )
    return path


def _read_geometry(cfg: RunConfig) -> ParaboloidGap:
    return ParaboloidGap(
        cfg.get_float("geometry", "R1", positive=True),
        cfg.get_float("geometry", "R2", positive=True),
        cfg.get_float("geometry", "delta0"),
    )


def _read_grid(cfg: RunConfig, override: int | None) -> int:
    if override is not None:
        return validate_grid(override)
    return cfg.get_grid()


def _read_winkler_layer(cfg: RunConfig, gap: ParaboloidGap) -> LayerThickness:
    h = cfg.get_float("layer", "h", positive=True)
    eps = cfg.get_float("layer", "eps", 0.1, positive=True)
    region = None
    try:
        from .winkler import winkler_contact_region
        region = winkler_contact_region(gap)
    except NoContact:
        region = None
    H_func, grid_map = cfg.get_map("layer", "H", scale=1.0)
    if grid_map is not None and region is not None:
        grid_map.require_covers(region)
    if H_func is not None:
        if region is None:
            raise ConfigError("[layer] H map requires positive delta0")
        return thickness_decompose(H_func, h, eps=None, domain=region)
    psi_func, psi_map = cfg.get_map("layer", "psi", scale=1.0)
    if psi_map is not None and region is not None:
        psi_map.require_covers(region)
    if psi_func is not None:
        return LayerThickness.from_variation(h, eps, psi_func)
    return LayerThickness.uniform(h, eps)


def cmd_winkler(cfg: RunConfig, out_dir: Path, grid: int | None) -> int:
    material = Material(
        cfg.get_float("material", "E", positive=True),
        cfg.get_float("material", "nu"),
    )
    gap = _read_geometry(cfg)
    n = _read_grid(cfg, grid)
    layer = _read_winkler_layer(cfg, gap)
    solution = winkler_solve(material, layer, gap, n_cells=n)
    report = {
        "command": "winkler",
        "contact_semi_axes": {
            "a1": solution.contact_ellipse.a1,
            "a2": solution.contact_ellipse.a2,
        },
        "force": solution.force,
        "peak_pressure": float(np.max(solution.pressure.values)),
        "grid": n,
    }
    _write_report(out_dir, "winkler_report.json", report)
    _dump_field(out_dir, "winkler_pressure.csv", solution.pressure)
    return EXIT_OK


def _read_layers(cfg: RunConfig, section: str = "layers"):
    pairs = []
    for index in ("1", "2"):
        if cfg.has(section, f"E{index}") or cfg.has(section, f"h{index}"):
            pairs.append((
                cfg.get_float(section, f"E{index}", positive=True),
                cfg.get_float(section, f"h{index}", nonnegative=True),
            ))
    if not pairs:
        raise ConfigError(f"[{section}] needs at least E1 and h1")
    return pairs


def cmd_elliptic(cfg: RunConfig, out_dir: Path, grid: int | None) -> int:
    pairs = _read_layers(cfg)
    m = aggregate_compliance(pairs)
    gap = _read_geometry(cfg)
    n = _read_grid(cfg, grid)
    sol = elliptic_contact_solve(m, gap)
    report = {
        "command": "elliptic",
        "m": m,
        "p0": sol.p0,
        "a1": sol.domain.a1,
        "a2": sol.domain.a2,
        "s": sol.s,
        "P": sol.force,
        "M_P": sol.M_P,
        "grid": n,
    }
    _write_report(out_dir, "elliptic_report.json", report)
    _dump_field(out_dir, "elliptic_pressure.csv", sol.pressure_field(n))
    return EXIT_OK


def _read_variations(cfg: RunConfig, pairs, domain):
    layers = []
    for index, (E, h) in zip(("1", "2"), pairs):
        func, grid_map = cfg.get_map("variation", f"H{index}", scale=domain.a1)
        if grid_map is not None:
            grid_map.require_covers(domain)
        layers.append(LayerSpec(E, h, func))
    return tuple(layers)


def cmd_sensitivity(cfg: RunConfig, out_dir: Path, grid: int | None) -> int:
    pairs = _read_layers(cfg)
    m = aggregate_compliance(pairs)
    gap = _read_geometry(cfg)
    n = _read_grid(cfg, grid)
    sol = elliptic_contact_solve(m, gap)
    layers = _read_variations(cfg, pairs, sol.domain)
    prob = SensitivityProblem(sol, layers)
    poisson = pressure_variation_solution(prob, n_cells=n)
    p_tilde = poisson.field
    force_var = integrate_ellipse(p_tilde)
    abs_total = integrate_ellipse(
        ScalarField.from_grid(sol.domain, np.abs(p_tilde.values))
    )
    orth = orthogonality_residual(layers, WeightFunction("rho", sol.domain))
    report = {
        "command": "sensitivity",
        "force_variation": force_var,
        "force_variation_ratio": force_var / abs_total if abs_total > 0 else 0.0,
        "orthogonality_residual": orth,
        "grid": n,
        "solver_iterations": poisson.iterations,
        "solver_residual": poisson.residual,
    }
    _write_report(out_dir, "sensitivity_report.json", report)
    _dump_field(out_dir, "pressure_variation.csv", p_tilde)
    return EXIT_OK


def cmd_optimize(cfg: RunConfig, out_dir: Path, grid: int | None) -> int:
    pairs = _read_layers(cfg)
    m = aggregate_compliance(pairs)
    gap = _read_geometry(cfg)
    n = _read_grid(cfg, grid)
    sol = elliptic_contact_solve(m, gap)
    kappa = cfg.get_float("domain", "kappa", 1.0)
    if not 0.0 < kappa <= 1.0:
        raise DomainError(f"[domain] kappa must lie in (0, 1], got {kappa}")
    star = sol.domain.scaled(kappa)

    report = {"command": "optimize", "kappa": kappa,
              "a1_star": star.a1, "a2_star": star.a2, "grid": n, "layers": []}
    for index, (E, h) in zip(("1", "2"), pairs):
        func, grid_map = cfg.get_map("thickness", f"H{index}", scale=star.a1)
        if func is None:
            continue
        if grid_map is not None:
            grid_map.require_covers(star)
        comparison = compare_weights(func, star, kappa=1.0, n_r=max(n, 256))
        entry = {"layer": int(index), "E": E, "h": h, "weights": {}}
        for kind, result in comparison.results.items():
            entry["weights"][kind] = {
                "h_eff": result.h_eff,
                "criterion": result.criterion,
                "weight_max_radius": comparison.max_radius[kind],
            }
        h_eff = comparison.results["rho_star"].h_eff
        variation = orthogonalize_variation(func, h_eff, star, n_cells=n)
        X1, X2 = variation.physical_mesh()
        write_map_csv(
            out_dir / f"orthogonal_variation_H{index}.csv",
            X1[:, 0], X2[0, :], variation.values,
        )
        entry["orthogonal_variation_map"] = f"orthogonal_variation_H{index}.csv"
        report["layers"].append(entry)
    if not report["layers"]:
        raise ConfigError("[thickness] no H1/H2 maps given to optimize")
    _write_report(out_dir, "optimize_report.json", report)
    return EXIT_OK


def cmd_validate(cfg: RunConfig | None, out_dir: Path, grid: int | None) -> int:
    n = 256
    map_source = SAMPLE_MAP
    if cfg is not None:
        n = _read_grid(cfg, grid)
        if cfg.has("validate", "map"):
            map_source = cfg.resolve_path(cfg.get_str("validate", "map"))
    elif grid is not None:
        n = validate_grid(grid)
    results = run_all(grid=n, map_source=map_source)
    rows = []
    all_passed = True
    print(f"{'':4s}{'criterion':52s}{'worst check':38s}{'measured':>12s}"
          f"{'threshold':>12s}")
    for r in results:
        label, measured, threshold = r.worst()
        status = "PASS" if r.passed else "FAIL"
        all_passed &= r.passed
        print(f"{status:4s}{r.name:52s}{label:38s}{measured:12.3e}"
              f"{threshold:12.3e}")
        rows.append({
            "index": r.index,
            "name": r.name,
            "passed": r.passed,
            "checks": [
                {"label": lbl, "measured": m, "threshold": t}
                for lbl, m, t in r.checks
            ],
        })
    report = {"command": "validate", "grid": n,
              "passed": all_passed, "criteria": rows}
    _write_report(out_dir, "validate_report.json", report)
    return EXIT_OK if all_passed else EXIT_VALIDATION


_COMMANDS = {
    "winkler": cmd_winkler,
    "elliptic": cmd_elliptic,
    "sensitivity": cmd_sensitivity,
    "optimize": cmd_optimize,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="thinlayer",
        description="Thin-layer contact models: spring-foundation and "
                    "incompressible elliptical contact, thickness sensitivity, "
                    "and effective-thickness optimization.",
    )
    parser.add_argument("command",
                        choices=sorted(_COMMANDS) + ["validate"])
    parser.add_argument("--config", help="path to the run configuration file")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--grid", type=int, default=None,
                        help="override the solver grid resolution")
    args = parser.parse_args(argv)

    out_dir = Path(args.out)
    try:
        _apply_thread_cap()
        if args.command == "validate":
            cfg = load_config(args.config) if args.config else None
            return cmd_validate(cfg, out_dir, args.grid)
        if not args.config:
            raise ConfigError(f"--config is required for '{args.command}'")
        cfg = load_config(args.config)
        return _COMMANDS[args.command](cfg, out_dir, args.grid)
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (ConfigError, DomainError, ShapeError, NoContact,
            IncompressibleSingularity, OSError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ThinLayerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
