"""Monte Carlo experiment engine: paired trials of the baseline and the two
placement optimizers over SNR, grid-size, or outer-iteration sweeps."""

from __future__ import annotations

import csv
import dataclasses
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import __version__
from .alternating import solve_alternating
from .channel import build_joint_dictionary, draw_paths, synthesize_channel
from .geometry import SPEED_OF_LIGHT, FclaConfig, build_grid, check_spacing
from .joint import solve_joint
from .pattern import PatternSpec
from .precoding import normalize_columns, rzf, sinr
from .solution import PlacementSolution

METHODS = ("ucla", "fcla-j", "fcla-a")
SWEEP_KINDS = ("snr", "grid", "iters")


@dataclass
class ExperimentSpec:
    """Everything needed to reproduce one experiment."""

    rings: int = 4
    elements: int = 4
    users: int = 16
    paths: int = 4
    frequency_hz: float = 3e9
    noise_power: float = 1.0
    pattern_kind: str = "directional"
    kappa: float = 1.0
    grid_size: int = 12
    d_min: float | None = None  # None means half a wavelength
    alpha: float | str = "mmse"
    outer_iters: int = 5
    methods: tuple = METHODS
    sweep_kind: str = "snr"
    sweep_values: tuple = (-6.0, -4.0, -2.0, 0.0, 2.0, 4.0, 6.0)
    snr_db: float = 0.0  # operating SNR for grid/iters sweeps
    trials: int = 200
    seed: int = 1
    jobs: int = 1

    def __post_init__(self):
        self.methods = tuple(m.lower() for m in self.methods)
        for m in self.methods:
            if m not in METHODS:
                raise ValueError(f"unknown method {m!r}; choose from {METHODS}")
        if self.sweep_kind not in SWEEP_KINDS:
            raise ValueError(
                f"unknown sweep kind {self.sweep_kind!r}; choose from {SWEEP_KINDS}"
            )
        if self.trials < 1:
            raise ValueError("need at least one trial per point")
        if not self.sweep_values:
            raise ValueError("sweep needs at least one point")
        self.sweep_values = tuple(float(v) for v in self.sweep_values)

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.frequency_hz

    @property
    def spacing(self) -> float:
        return self.d_min if self.d_min is not None else self.wavelength / 2.0

    def pattern(self) -> PatternSpec:
        if self.pattern_kind == "omni":
            return PatternSpec.omni()
        return PatternSpec.directional(self.kappa)

    def config_for_grid(self, grid_size: int) -> FclaConfig:
        return FclaConfig.from_grid(
            m_rings=self.rings, n_elements=self.elements,
            g_h=grid_size, g_v=grid_size,
            d_min=self.spacing, wavelength=self.wavelength,
            pattern=self.pattern(),
        )

    def alpha_value(self) -> float:
        if self.alpha == "mmse":
            return self.noise_power
        return float(self.alpha)

    def power_for_snr(self, snr_db: float) -> float:
        return 10.0 ** (snr_db / 10.0) * self.noise_power

    def to_dict(self) -> dict:
        return {
            "rings": self.rings, "elements": self.elements,
            "users": self.users, "paths": self.paths,
            "frequency_hz": self.frequency_hz,
            "noise_power": self.noise_power,
            "pattern_kind": self.pattern_kind, "kappa": self.kappa,
            "grid_size": self.grid_size, "d_min": self.d_min,
            "alpha": self.alpha, "outer_iters": self.outer_iters,
            "methods": list(self.methods),
            "sweep_kind": self.sweep_kind,
            "sweep_values": list(self.sweep_values),
            "snr_db": self.snr_db, "trials": self.trials,
            "seed": self.seed, "jobs": self.jobs,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentSpec":
        known = {f for f in cls.__dataclass_fields__}
        kwargs = {k: v for k, v in data.items() if k in known}
        if "methods" in kwargs:
            kwargs["methods"] = tuple(kwargs["methods"])
        if "sweep_values" in kwargs:
            kwargs["sweep_values"] = tuple(kwargs["sweep_values"])
        return cls(**kwargs)


@dataclass
class SweepRow:
    method: str
    sweep_var: str
    sweep_value: float
    mean_sum_rate: float
    stderr: float
    trials: int


def ucla_radius(config: FclaConfig) -> float:
    """Ring radius of the canonical uniform cylinder: adjacent elements sit at
    the minimum spacing along the circle (chord d_min), like the rings do
    vertically. A single-element ring keeps the flexible track radius."""
    if config.n_elements < 2:
        return config.radius
    return config.d_min / (2.0 * np.sin(np.pi / config.n_elements))


def ucla_config(config: FclaConfig) -> FclaConfig:
    return dataclasses.replace(config, radius=ucla_radius(config))


def ucla_placement(config: FclaConfig):
    """Uniform baseline: N angles spaced 2*pi/N per ring, rings stacked at
    d_min intervals starting from height zero."""
    step = 2.0 * np.pi / config.n_elements
    return [(n * step, m * config.d_min)
            for m in range(config.m_rings) for n in range(config.n_elements)]


def ucla_baseline(paths, config: FclaConfig, alpha: float, power: float,
                  sigma2: float):
    """Channel, normalized precoder and rates for the uniform array.

    The baseline is fixed hardware: it keeps the compact canonical radius
    regardless of how large the flexible candidate region is."""
    compact = ucla_config(config)
    placement = ucla_placement(compact)
    check_spacing(placement, compact)
    H = synthesize_channel(paths, placement, compact)
    F = normalize_columns(rzf(H.entries, alpha), power)
    return H, F, sinr(H.entries, F, sigma2)


def _trial_seed(base_seed: int, point_index: int, trial_index: int):
    return np.random.SeedSequence([base_seed, point_index, trial_index])


def _rate_at_solution(paths, solution: PlacementSolution, config: FclaConfig,
                      power: float, sigma2: float) -> float:
    """Evaluate the solver result on the channel synthesized at its placement."""
    H = synthesize_channel(paths, solution.placement, config)
    F = normalize_columns(solution.F_star, power, allow_zero=True)
    return sinr(H.entries, F, sigma2).sum_rate


def run_trial(spec: ExperimentSpec, point_index: int, trial_index: int,
              grid_size: int | None = None, snr_db: float | None = None,
              n_outer: int | None = None, want_trace: bool = False) -> dict:
    """One paired trial: every requested method on the same channel draw.

    Returns method name -> sum rate; with want_trace the alternating solver's
    per-round sum rates are included under "fcla-a-trace".
    """
    grid_size = grid_size if grid_size is not None else spec.grid_size
    snr_db = snr_db if snr_db is not None else spec.snr_db
    n_outer = n_outer if n_outer is not None else spec.outer_iters
    config = spec.config_for_grid(grid_size)
    grid = build_grid(config)
    alpha = spec.alpha_value()
    power = spec.power_for_snr(snr_db)
    sigma2 = spec.noise_power

    seed = _trial_seed(spec.seed, point_index, trial_index)
    paths = draw_paths(spec.users, spec.paths, seed)

    out: dict = {}
    for method in spec.methods:
        if method == "ucla":
            _, _, report = ucla_baseline(paths, config, alpha, power, sigma2)
            out[method] = report.sum_rate
        elif method == "fcla-j":
            dictionary = build_joint_dictionary(paths, grid, config)
            solution = solve_joint(dictionary, config, alpha, power=power)
            out[method] = _rate_at_solution(paths, solution, config, power, sigma2)
        elif method == "fcla-a":
            solution = solve_alternating(paths, grid, config, alpha, n_outer,
                                         power=power, sigma2=sigma2)
            out[method] = _rate_at_solution(paths, solution, config, power, sigma2)
            if want_trace:
                out["fcla-a-trace"] = list(solution.diagnostics["sum_rate_trace"])
    return out


def _sweep_work(args):
    spec_dict, point_index, trial_index, kwargs = args
    spec = ExperimentSpec.from_dict(spec_dict)
    try:
        return run_trial(spec, point_index, trial_index, **kwargs)
    except Exception as exc:  # reported by the sweep, which keeps going
        exc.trial_context = (point_index, trial_index)
        return exc


def _map_trials(spec: ExperimentSpec, work_items):
    """Evaluate trial work items, in order, optionally on a process pool."""
    args = [(spec.to_dict(),) + item for item in work_items]
    if spec.jobs > 1:
        with ProcessPoolExecutor(max_workers=spec.jobs) as pool:
            return list(pool.map(_sweep_work, args))
    return [_sweep_work(a) for a in args]


def _mean_stderr(values: np.ndarray):
    mean = float(values.mean())
    if len(values) > 1:
        stderr = float(values.std(ddof=1) / np.sqrt(len(values)))
    else:
        stderr = 0.0
    return mean, stderr


def run_sweep(spec: ExperimentSpec) -> list[SweepRow]:
    """Paired-trial means and standard errors per (method, sweep point).

    SNR and grid sweeps reseed channels per point. The iteration sweep holds
    the channel set fixed across points and reads the alternating solver's
    convergence trace, so the comparison across iteration counts is paired;
    methods that ignore the iteration count appear as constant rows.
    """
    # structural problems (infeasible grids, bad sizes) abort up front;
    # only per-trial numerical failures are tolerated below
    if spec.sweep_kind == "grid":
        for value in spec.sweep_values:
            spec.config_for_grid(int(value))
    else:
        spec.config_for_grid(spec.grid_size)

    if spec.sweep_kind == "iters":
        return _run_iters_sweep(spec)

    rows: list[SweepRow] = []
    failures: list[tuple] = []
    for point_index, value in enumerate(spec.sweep_values):
        if spec.sweep_kind == "snr":
            kwargs = {"snr_db": value}
        else:
            kwargs = {"grid_size": int(value)}
        items = [(point_index, t, kwargs) for t in range(spec.trials)]
        per_method: dict[str, list[float]] = {m: [] for m in spec.methods}
        for trial_index, result in enumerate(_map_trials(spec, items)):
            if isinstance(result, Exception):
                failures.append((value, trial_index, result))
                continue
            for m in spec.methods:
                per_method[m].append(result[m])
        for m in spec.methods:
            values = np.array(per_method[m])
            mean, stderr = _mean_stderr(values)
            rows.append(SweepRow(method=m, sweep_var=spec.sweep_kind,
                                 sweep_value=value, mean_sum_rate=mean,
                                 stderr=stderr, trials=len(values)))
    if failures:
        rows_failed = ", ".join(f"point {v} trial {t}: {e}" for v, t, e in failures)
        print(f"warning: {len(failures)} trial(s) failed ({rows_failed})")
    return rows


def _run_iters_sweep(spec: ExperimentSpec) -> list[SweepRow]:
    points = [int(v) for v in spec.sweep_values]
    if min(points) < 1:
        raise ValueError("iteration sweep points must be >= 1")
    if "fcla-a" not in spec.methods:
        raise ValueError("an iteration sweep needs the fcla-a method")
    max_iters = max(points)
    items = [(0, t, {"n_outer": max_iters, "want_trace": True})
             for t in range(spec.trials)]
    results = [r for r in _map_trials(spec, items)
               if not isinstance(r, Exception)]
    if len(results) < spec.trials:
        print(f"warning: {spec.trials - len(results)} trial(s) failed")
    if not results:
        raise RuntimeError("every trial of the iteration sweep failed")

    rows: list[SweepRow] = []
    for m in spec.methods:
        if m == "fcla-a":
            traces = np.array([r["fcla-a-trace"] for r in results])
            for value in points:
                mean, stderr = _mean_stderr(traces[:, value - 1])
                rows.append(SweepRow(method=m, sweep_var="iters",
                                     sweep_value=float(value),
                                     mean_sum_rate=mean, stderr=stderr,
                                     trials=len(results)))
        else:
            values = np.array([r[m] for r in results])
            mean, stderr = _mean_stderr(values)
            for value in points:
                rows.append(SweepRow(method=m, sweep_var="iters",
                                     sweep_value=float(value),
                                     mean_sum_rate=mean, stderr=stderr,
                                     trials=len(results)))
    return rows


def write_results_csv(rows: list[SweepRow], fp) -> None:
    """CSV with one row per (method, sweep point); floats keep full precision."""
    def emit(f):
        writer = csv.writer(f)
        writer.writerow(["method", "sweep_var", "sweep_value",
                         "mean_sum_rate_bits", "stderr", "trials"])
        for row in rows:
            writer.writerow([row.method, row.sweep_var, repr(row.sweep_value),
                             repr(row.mean_sum_rate), repr(row.stderr),
                             row.trials])
    if hasattr(fp, "write"):
        emit(fp)
    else:
        with open(fp, "w", newline="") as f:
            emit(f)


def write_manifest(spec: ExperimentSpec, fp, extra: dict | None = None) -> None:
    """JSON echo of the experiment parameters plus the code version;
    re-usable as a config file."""
    payload = spec.to_dict()
    payload["version"] = __version__
    if extra:
        payload.update(extra)
    if hasattr(fp, "write"):
        json.dump(payload, fp, indent=1, sort_keys=True)
    else:
        with open(fp, "w") as f:
            json.dump(payload, f, indent=1, sort_keys=True)
