"""Command-line driver for reproducible density, simulation, and capacity runs.

Subcommands:

  density    analytic arrival-density grid (2D/3D, any drift) as CSV
  simulate   Monte Carlo first-passage run: sample CSV + config sidecar
  capacity   closed-form capacity for a channel/dispersion level, as JSON
  maxent     constrained max-entropy exponent and profile grid
  verify     the full invariant suite, one pass/fail line per check
  table1     capacity table CSV/JSON plus gnuplot-ready curve files

Every file-writing run records a manifest (subcommand, resolved parameters,
seed, version, outputs, duration) next to its outputs; re-running the argv
stored in a manifest reproduces the primary outputs byte for byte.  Worker
count is capped by the FAPLAB_THREADS environment variable and never
affects results.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .capacity import (
    ConstraintSpec,
    InfeasibleError,
    capacity_closed_form,
    capacity_table,
    maxent_profile,
    write_capacity_table_csv,
    write_capacity_table_json,
    write_curve_files,
)
from .fap import ChannelGeometry, DriftVector, density_grid, write_density_grid_csv
from .sim import SimConfig, simulate_first_arrival, write_config_json, write_samples_csv

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_INFEASIBLE = 3


def _geometry_args(parser: argparse.ArgumentParser, with_drift: bool = True) -> None:
    parser.add_argument("-n", "--dimension", type=int, default=2, choices=(2, 3))
    parser.add_argument("--lambda", dest="lam", type=float, default=1.0,
                        help="transmission distance (default 1)")
    parser.add_argument("--sigma2", type=float, default=1.0,
                        help="microscopic diffusion coefficient (default 1)")
    if with_drift:
        parser.add_argument("--vx", type=float, default=0.0,
                            help="transverse drift component")
        parser.add_argument("--vy", type=float, default=0.0,
                            help="second transverse (3D) or traversal (2D) component")
        parser.add_argument("--vz", type=float, default=0.0,
                            help="traversal drift component (3D); positive points away from the receiver")


def _drift_from_args(args) -> DriftVector:
    if args.dimension == 2:
        return DriftVector(args.vx, args.vy)
    return DriftVector(args.vx, args.vy, args.vz)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="faplab",
        description="First-arrival-position channel densities, simulation, and capacity",
    )
    parser.add_argument("--version", action="version", version=f"faplab {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p_density = sub.add_parser("density", help="emit an analytic density grid as CSV")
    _geometry_args(p_density)
    p_density.add_argument("--x1", type=float, default=0.0)
    p_density.add_argument("--x2", type=float, default=0.0)
    p_density.add_argument("--ymin", type=float, default=-10.0)
    p_density.add_argument("--ymax", type=float, default=10.0)
    p_density.add_argument("--points", type=int, default=201)
    p_density.add_argument("--format", choices=("csv", "json"), default="csv")
    p_density.add_argument("--out", type=Path, required=True)

    p_sim = sub.add_parser("simulate", help="run the first-passage Monte Carlo")
    _geometry_args(p_sim)
    p_sim.add_argument("--x1", type=float, default=0.0)
    p_sim.add_argument("--x2", type=float, default=0.0)
    p_sim.add_argument("--dt", type=float, default=1e-4)
    p_sim.add_argument("--particles", type=int, default=100_000)
    p_sim.add_argument("--max-steps", type=int, default=10_000_000)
    p_sim.add_argument("--seed", type=int, default=42)
    p_sim.add_argument("--stepper", choices=("block_bridge", "per_step"),
                       default="block_bridge")
    p_sim.add_argument("--out", type=Path, required=True)

    p_cap = sub.add_parser("capacity", help="closed-form capacity as JSON")
    p_cap.add_argument("--channel", choices=("fap2d", "fap3d", "gaussian"),
                       required=True)
    p_cap.add_argument("--A", dest="A", type=float, required=True,
                       help="output dispersion level")
    p_cap.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p_cap.add_argument("--sigma", type=float, default=1.0,
                       help="noise standard deviation for the Gaussian baseline")
    p_cap.add_argument("--out", type=Path, default=None)

    p_max = sub.add_parser("maxent", help="constrained max-entropy profile")
    p_max.add_argument("--p", type=int, default=1, choices=(1, 2))
    p_max.add_argument("--k", type=float, default=1.0)
    p_max.add_argument("--c", type=float, default=None,
                       help="override the log-moment target (default: dimension constant)")
    p_max.add_argument("--grid-points", type=int, default=33)
    p_max.add_argument("--out", type=Path, default=None)

    p_ver = sub.add_parser("verify", help="run the invariant suite")
    p_ver.add_argument("--quick", action="store_true",
                       help="reduced sample sizes (interactive runtimes)")
    p_ver.add_argument("--only", type=str, default=None,
                       help="run only checks whose name contains this substring")

    p_tab = sub.add_parser("table1", help="capacity table and curve files")
    p_tab.add_argument("--a-min", type=float, default=1.0)
    p_tab.add_argument("--a-max", type=float, default=8.0)
    p_tab.add_argument("--a-count", type=int, default=29)
    p_tab.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p_tab.add_argument("--sigma", type=float, default=1.0)
    p_tab.add_argument("--out", type=Path, required=True)

    return parser


def _write_manifest(out_dir: Path, subcommand: str, argv: Sequence[str], params: dict,
                    outputs: Sequence[str], started: float, seed: Optional[int] = None) -> None:
    manifest = {
        "tool": "faplab",
        "version": __version__,
        "subcommand": subcommand,
        "argv": list(argv),
        "params": params,
        "seed": seed,
        "outputs": sorted(str(o) for o in outputs),
        "duration_s": time.time() - started,
    }
    with open(out_dir / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def rerun_from_manifest(manifest_path, out_dir=None) -> int:
    """Re-run the argv recorded in a manifest, optionally redirecting --out."""
    with open(manifest_path) as fh:
        manifest = json.load(fh)
    argv = list(manifest["argv"])
    if out_dir is not None:
        for i, tok in enumerate(argv):
            if tok == "--out" and i + 1 < len(argv):
                argv[i + 1] = str(out_dir)
    return run(argv)


def _cmd_density(args, argv) -> int:
    started = time.time()
    g = ChannelGeometry(args.dimension, args.lam, args.sigma2)
    v = _drift_from_args(args)
    x = (args.x1,) if args.dimension == 2 else (args.x1, args.x2)
    cols, rows = density_grid(g, v, x, args.ymin, args.ymax, args.points)
    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    if args.format == "csv":
        path = out / "density.csv"
        write_density_grid_csv(path, cols, rows)
    else:
        path = out / "density.json"
        payload = [dict(zip(cols, (float(c) for c in row))) for row in rows]
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
    _write_manifest(out, "density", argv, {
        "dimension": args.dimension, "lam": args.lam, "sigma2": args.sigma2,
        "drift": list(v.components), "x": list(x),
        "ymin": args.ymin, "ymax": args.ymax, "points": args.points,
        "format": args.format,
    }, [path.name], started)
    print(f"wrote {path}")
    return EXIT_OK


def _cmd_simulate(args, argv) -> int:
    started = time.time()
    g = ChannelGeometry(args.dimension, args.lam, args.sigma2)
    v = _drift_from_args(args)
    cfg = SimConfig(
        geometry=g, drift=v, dt=args.dt, n_particles=args.particles,
        max_steps=args.max_steps, seed=args.seed, stepper=args.stepper,
    )
    x = (args.x1,) if args.dimension == 2 else (args.x1, args.x2)
    result = simulate_first_arrival(cfg, x_in=np.asarray(x))
    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "samples.csv"
    cfg_path = out / "simulate_config.json"
    write_samples_csv(result, csv_path)
    write_config_json(cfg, cfg_path, version=__version__, x_in=x)
    _write_manifest(out, "simulate", argv, cfg.to_dict() | {"x_in": list(x)},
                    [csv_path.name, cfg_path.name], started, seed=args.seed)
    print(
        f"wrote {csv_path} ({len(result.hit_times)} hits, "
        f"{result.censored_count} censored)"
    )
    return EXIT_OK


def _cmd_capacity(args, argv) -> int:
    started = time.time()
    floor = args.sigma if args.channel == "gaussian" else args.lam
    try:
        result = capacity_closed_form(args.channel, args.A, floor)
    except InfeasibleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    payload = json.dumps(result.to_dict(), indent=2, sort_keys=True)
    print(payload)
    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
        path = args.out / "capacity.json"
        path.write_text(payload + "\n")
        _write_manifest(args.out, "capacity", argv, result.to_dict(), [path.name], started)
    return EXIT_OK


def _cmd_maxent(args, argv) -> int:
    started = time.time()
    spec = ConstraintSpec(args.p, target=args.c)
    profile = maxent_profile(spec, args.k)
    ys, fs = profile.grid(num=args.grid_points)
    payload = {
        "p": profile.p,
        "k": profile.k,
        "target": profile.target,
        "mu": profile.mu,
        "entropy_nats": profile.entropy_closed_form(),
        "grid": [[float(y), float(f)] for y, f in zip(ys, fs)],
    }
    text = json.dumps(payload, indent=2, sort_keys=True)
    print(text)
    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
        path = args.out / "maxent.json"
        path.write_text(text + "\n")
        _write_manifest(args.out, "maxent", argv,
                        {k: payload[k] for k in ("p", "k", "target", "mu")},
                        [path.name], started)
    return EXIT_OK


def _cmd_verify(args, argv) -> int:
    from .verify import run_checks

    def report(result):
        tag = "PASS" if result.passed else "FAIL"
        print(f"[{tag}] {result.name}: {result.detail}")
        sys.stdout.flush()

    results = run_checks(only=args.only, quick=args.quick, progress=report)
    if not results:
        print(f"no checks match --only {args.only!r}", file=sys.stderr)
        return EXIT_USAGE
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return EXIT_CHECK_FAILED if failed else EXIT_OK


def _cmd_table1(args, argv) -> int:
    started = time.time()
    if args.a_min < args.lam or args.a_min < args.sigma:
        print(
            f"error: dispersion levels start at {args.a_min}, below the noise "
            f"floor max(lambda={args.lam}, sigma={args.sigma})",
            file=sys.stderr,
        )
        return EXIT_INFEASIBLE
    a_values = np.linspace(args.a_min, args.a_max, args.a_count)
    rows = capacity_table(a_values, lam=args.lam, sigma=args.sigma)
    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "table.csv"
    json_path = out / "table.json"
    write_capacity_table_csv(rows, csv_path)
    write_capacity_table_json(rows, json_path)
    curves = write_curve_files(rows, out)
    outputs = [csv_path.name, json_path.name] + [Path(c).name for c in curves]
    _write_manifest(out, "table1", argv, {
        "a_min": args.a_min, "a_max": args.a_max, "a_count": args.a_count,
        "lam": args.lam, "sigma": args.sigma,
    }, outputs, started)
    print(f"wrote {csv_path} and {len(curves)} curve files")
    return EXIT_OK


_COMMANDS = {
    "density": _cmd_density,
    "simulate": _cmd_simulate,
    "capacity": _cmd_capacity,
    "maxent": _cmd_maxent,
    "verify": _cmd_verify,
    "table1": _cmd_table1,
}


def run(argv: Sequence[str]) -> int:
    """Parse and execute; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.subcommand](args, argv)
    except InfeasibleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
