"""Command-line front end: experiment sweeps, single verbose solves, and a
self-check suite. Configuration comes from an optional JSON file with flag
overrides; every run writes a manifest that reproduces it exactly."""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

import numpy as np

from .alternating import solve_alternating
from .channel import build_joint_dictionary, draw_paths, export_paths
from .geometry import FclaConfig, build_grid
from .harness import (METHODS, ExperimentSpec, run_sweep, ucla_baseline,
                      write_manifest, write_results_csv)
from .joint import solve_joint
from .oracle import exhaustive_best
from .pattern import PatternSpec, power_gain
from .precoding import normalize_columns, rzf, sinr

OUT_DIR_ENV = "FCLA_OUT_DIR"

DEFAULT_SWEEPS = {
    "snr": "-6:2:6",
    "grid": "4:2:12",
    "iters": "1:1:10",
}


def _parse_range(text: str) -> list[float]:
    """start:step:stop (inclusive) or a comma-separated list."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"expected start:step:stop, got {text!r}")
        start, step, stop = (float(p) for p in parts)
        if step <= 0:
            raise ValueError("range step must be positive")
        n = int(round((stop - start) / step)) + 1
        return [start + i * step for i in range(n)]
    return [float(p) for p in text.split(",") if p]


def _add_common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="JSON config file; flags override it")
    p.add_argument("--out", type=Path, default=None,
                   help=f"output directory (default ${OUT_DIR_ENV} or '.')")
    p.add_argument("--rings", type=int, help="number of rings (default 4)")
    p.add_argument("--elements", type=int, help="antennas per ring (default 4)")
    p.add_argument("--users", type=int, help="number of users (default 16)")
    p.add_argument("--paths", type=int, help="multipath count per user (default 4)")
    p.add_argument("--freq", type=float, dest="frequency_hz",
                   help="carrier frequency in Hz (default 3e9)")
    p.add_argument("--noise", type=float, dest="noise_power",
                   help="noise power (default 1.0)")
    p.add_argument("--kappa", type=float, help="directional sharpness (default 1)")
    p.add_argument("--omni", action="store_true", help="use the omni pattern")
    p.add_argument("--grid", type=int, dest="grid_size",
                   help="angle and height slots per dimension (default 12)")
    p.add_argument("--dmin", type=float, dest="d_min",
                   help="spacing floor in meters (default half wavelength)")
    p.add_argument("--alpha", help="'mmse' or a fixed regularization value")
    p.add_argument("--iters", type=int, dest="outer_iters",
                   help="alternating solver outer rounds (default 5)")
    p.add_argument("--methods", help="comma list from: " + ",".join(METHODS))
    p.add_argument("--trials", type=int, help="trials per sweep point (default 200)")
    p.add_argument("--seed", type=int, help="base RNG seed (default 1)")
    p.add_argument("--snr", dest="snr_db",
                   help="operating SNR in dB, or start:step:stop for sweep-snr")
    p.add_argument("--jobs", type=int, help="worker processes (default 1)")


def _build_spec(args: argparse.Namespace, sweep_kind: str) -> ExperimentSpec:
    """Resolve config file < flags into a full spec for the given sweep axis."""
    data: dict = {}
    if args.config is not None:
        with open(args.config) as f:
            data.update(json.load(f))
    config_kind = data.get("sweep_kind")

    for key in ("rings", "elements", "users", "paths", "frequency_hz",
                "noise_power", "kappa", "grid_size", "d_min", "outer_iters",
                "trials", "seed", "jobs"):
        value = getattr(args, key, None)
        if value is not None:
            data[key] = value
    if getattr(args, "omni", False):
        data["pattern_kind"] = "omni"
    elif getattr(args, "kappa", None) is not None:
        data["pattern_kind"] = "directional"
    if getattr(args, "alpha", None) is not None:
        data["alpha"] = args.alpha if args.alpha == "mmse" else float(args.alpha)
    if getattr(args, "methods", None):
        data["methods"] = [m.strip() for m in args.methods.split(",") if m.strip()]

    # sweep axis: flag beats config, config applies only for the same axis,
    # otherwise the command's default range
    flag_values = None
    if sweep_kind == "snr" and getattr(args, "snr_db", None):
        flag_values = _parse_range(args.snr_db)
    elif sweep_kind == "grid" and getattr(args, "grid_range", None):
        flag_values = _parse_range(args.grid_range)
    elif sweep_kind == "iters" and getattr(args, "iters_range", None):
        flag_values = _parse_range(args.iters_range)
    if flag_values is not None:
        data["sweep_values"] = flag_values
    elif config_kind != sweep_kind or "sweep_values" not in data:
        data["sweep_values"] = _parse_range(DEFAULT_SWEEPS[sweep_kind])
    data["sweep_kind"] = sweep_kind

    if sweep_kind != "snr" and getattr(args, "snr_db", None) is not None:
        data["snr_db"] = float(args.snr_db)
    return ExperimentSpec.from_dict(data)


def _out_dir(args: argparse.Namespace) -> Path:
    out = args.out if args.out is not None else Path(os.environ.get(OUT_DIR_ENV, "."))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _run_sweep_command(args: argparse.Namespace, sweep_kind: str) -> int:
    spec = _build_spec(args, sweep_kind)
    out = _out_dir(args)
    rows = run_sweep(spec)
    write_results_csv(rows, out / "results.csv")
    write_manifest(spec, out / "manifest.json")
    print(f"wrote {out / 'results.csv'} ({len(rows)} rows) and "
          f"{out / 'manifest.json'}")
    return 0


def _solve_once(args: argparse.Namespace) -> int:
    spec = _build_spec(args, "snr")
    snr_db = spec.sweep_values[0] if getattr(args, "snr_db", None) else spec.snr_db
    out = _out_dir(args)
    methods = spec.methods if not args.method else (args.method,)

    config = spec.config_for_grid(spec.grid_size)
    grid = build_grid(config)
    alpha = spec.alpha_value()
    power = spec.power_for_snr(snr_db)
    sigma2 = spec.noise_power
    paths = draw_paths(spec.users, spec.paths,
                       np.random.SeedSequence([spec.seed, 0, 0]))
    export_paths(paths, out / "paths.json")

    print(f"grid {grid.g_h}x{grid.g_v}, radius {config.radius:.5f} m, "
          f"snr {snr_db:g} dB, alpha {alpha:g}, power {power:g}")
    for method in methods:
        if method == "ucla":
            _, _, report = ucla_baseline(paths, config, alpha, power, sigma2)
            print(f"ucla    sum rate {report.sum_rate:.4f} bits")
        elif method == "fcla-j":
            dictionary = build_joint_dictionary(paths, grid, config)
            sol = solve_joint(dictionary, config, alpha, power=power)
            rate = sinr(sol.H_star, sol.F_star, sigma2).sum_rate
            trace_path = out / "fcla_j_trace.csv"
            with open(trace_path, "w", newline="") as f:
                w = csv.writer(f)
                w.writerow(["iter", "selected_g", "group", "objective"])
                for row in sol.diagnostics["trace"]:
                    w.writerow([row[0], row[1], row[2], repr(row[3])])
            print(f"fcla-j  sum rate {rate:.4f} bits "
                  f"({sol.diagnostics['iterations']} iterations, "
                  f"trace in {trace_path})")
        elif method == "fcla-a":
            sol = solve_alternating(paths, grid, config, alpha,
                                    spec.outer_iters, power=power,
                                    sigma2=sigma2)
            rate = sinr(sol.H_star, sol.F_star, sigma2).sum_rate
            trace_path = out / "fcla_a_trace.csv"
            with open(trace_path, "w", newline="") as f:
                w = csv.writer(f)
                w.writerow(["i", "sum_rate"])
                for i, value in enumerate(sol.diagnostics["sum_rate_trace"], 1):
                    w.writerow([i, repr(value)])
            print(f"fcla-a  sum rate {rate:.4f} bits (trace in {trace_path})")
    write_manifest(spec, out / "manifest.json")
    return 0


def _validate(args: argparse.Namespace) -> int:
    failures = 0

    def report(name: str, ok: bool, detail: str = "") -> None:
        nonlocal failures
        status = "PASS" if ok else "FAIL"
        line = f"{status} {name}"
        if detail:
            line += f" ({detail})"
        print(line)
        if not ok:
            failures += 1

    # directional pattern power integrates to the full sphere
    theta = np.linspace(0.0, np.pi, 1501)
    phi = np.linspace(-np.pi / 2.0, np.pi / 2.0, 1501)
    for kappa in (1.0, 2.0, 3.0):
        spec = PatternSpec.directional(kappa)
        integrand = (power_gain(spec, theta[:, None], phi[None, :])
                     * np.sin(theta)[:, None])
        total = np.trapezoid(np.trapezoid(integrand, phi, axis=1), theta)
        rel = abs(total - 4.0 * np.pi) / (4.0 * np.pi)
        report(f"pattern normalization kappa={kappa:g}", rel < 1e-3,
               f"relative error {rel:.2e}")

    # precoder family limits
    rng = np.random.default_rng(7)
    H = rng.standard_normal((4, 6)) + 1j * rng.standard_normal((4, 6))
    both = [rzf(H, 0.7, gram=g) for g in ("k", "n")]
    report("precoder Gram forms agree",
           bool(np.max(np.abs(both[0] - both[1])) < 1e-10))
    F_zf = rzf(H, 0.0)
    report("zero regularization inverts the channel",
           bool(np.max(np.abs(H @ F_zf - np.eye(4))) < 1e-8))
    F_big = normalize_columns(rzf(H, 1e8), 1.0)
    F_mrt = normalize_columns(H.conj().T, 1.0)
    cosine = np.abs(np.sum(F_big.conj() * F_mrt, axis=0)) / (
        np.linalg.norm(F_big, axis=0) * np.linalg.norm(F_mrt, axis=0))
    report("large regularization matches the matched filter",
           bool(np.all(cosine > 1.0 - 1e-6)))

    # greedy solvers never beat the exhaustive optimum
    worst_violation = 0.0
    ok = True
    for seed in range(5):
        config = FclaConfig.from_grid(m_rings=2, n_elements=2, g_h=3, g_v=3,
                                      d_min=0.05, wavelength=0.1)
        grid = build_grid(config)
        paths = draw_paths(4, 2, np.random.SeedSequence([seed, 0, 0]))
        alpha = 1.0
        best = exhaustive_best(paths, grid, config, alpha)
        dictionary = build_joint_dictionary(paths, grid, config)
        for sol in (solve_joint(dictionary, config, alpha),
                    solve_alternating(paths, grid, config, alpha, 3)):
            gap = sol.diagnostics["final_objective"] - best.objective
            worst_violation = max(worst_violation, -gap)
            if gap < -1e-9:
                ok = False
    report("greedy objective dominated by exhaustive optimum", ok,
           f"worst violation {worst_violation:.2e}")

    print(f"{failures} failure(s)" if failures else "all checks passed")
    return 1 if failures else 0


def _merge_dashed_values(argv):
    """Glue values like "-6:2:6" onto their flag so argparse keeps them."""
    merged = []
    skip = False
    for i, token in enumerate(argv):
        if skip:
            skip = False
            continue
        if (token in ("--snr", "--dmin") and i + 1 < len(argv)
                and argv[i + 1].startswith("-")):
            merged.append(f"{token}={argv[i + 1]}")
            skip = True
        else:
            merged.append(token)
    return merged


def parse_and_dispatch(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    argv = _merge_dashed_values(list(argv))
    parser = argparse.ArgumentParser(
        prog="fcla",
        description="Flexible cylindrical array sum-rate experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_snr = sub.add_parser("sweep-snr", help="sum rate vs operating SNR")
    _add_common_flags(p_snr)

    p_grid = sub.add_parser("sweep-grid", help="sum rate vs grid size")
    _add_common_flags(p_grid)
    p_grid.add_argument("--grid-range", dest="grid_range",
                        help="start:step:stop grid sizes (default 4:2:12)")

    p_iter = sub.add_parser("sweep-iters",
                            help="sum rate vs alternating solver rounds")
    _add_common_flags(p_iter)
    p_iter.add_argument("--iters-range", dest="iters_range",
                        help="start:step:stop rounds (default 1:1:10)")

    p_once = sub.add_parser("solve-once",
                            help="run one trial verbosely with traces")
    _add_common_flags(p_once)
    p_once.add_argument("--method", choices=METHODS,
                        help="run a single method instead of all requested")

    p_val = sub.add_parser("validate", help="run built-in numerical self-checks")
    p_val.add_argument("--out", type=Path, default=None, help=argparse.SUPPRESS)

    args = parser.parse_args(argv)
    try:
        if args.command == "sweep-snr":
            return _run_sweep_command(args, "snr")
        if args.command == "sweep-grid":
            return _run_sweep_command(args, "grid")
        if args.command == "sweep-iters":
            return _run_sweep_command(args, "iters")
        if args.command == "solve-once":
            return _solve_once(args)
        if args.command == "validate":
            return _validate(args)
        parser.error(f"unknown command {args.command!r}")
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


def main() -> None:
    sys.exit(parse_and_dispatch())


if __name__ == "__main__":
    main()
