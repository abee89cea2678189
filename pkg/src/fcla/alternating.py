"""Alternating placement optimization: per-ring greedy angle selection at
fixed heights, then greedy height selection at fixed angles, repeated for a
fixed number of outer rounds.

In the angle phase all rings match atoms in parallel against the same
residual each inner step, then one joint refit updates the residual. In the
height phase rings choose one height block each, sequentially, refitting
between rings.
"""

from __future__ import annotations

import numpy as np

from .channel import PathSet, build_angle_dictionary, build_height_dictionary
from .geometry import FclaConfig, PositionGrid
from .precoding import normalize_columns, rzf, rzf_objective, sinr
from .solution import PlacementSolution


def initial_heights(grid: PositionGrid, m_rings: int) -> np.ndarray:
    """Evenly spread starting heights, one grid slot per ring."""
    if grid.g_v < m_rings:
        raise ValueError(f"{grid.g_v} height slots cannot host {m_rings} rings")
    span = (grid.g_v - 1) / max(m_rings - 1, 1)
    idx = np.round(np.arange(m_rings) * span).astype(int)
    assert len(set(idx.tolist())) == m_rings
    return grid.z[idx].copy()


def optimize_angles(paths: list[PathSet], heights, grid: PositionGrid,
                    config: FclaConfig, alpha: float):
    """Select each ring's element angles with the ring heights pinned.

    Rings pick one live angle apiece per inner step (lowest index on ties),
    all against the residual from the previous step; the refit and residual
    update then run once over every column selected so far. Returns the (M, N)
    angle array, the final channel and refit precoder, and a diagnostics dict.
    """
    heights = np.asarray(heights, dtype=float)
    m_rings = len(heights)
    n_elem = config.n_elements
    dictionary = build_angle_dictionary(paths, heights, grid, config)
    g_h = dictionary.group_size
    n_users = dictionary.entries.shape[0]

    residual = np.eye(n_users, dtype=complex)
    alive = np.ones((m_rings, g_h), dtype=bool)
    chosen: list[list[int]] = [[] for _ in range(m_rings)]
    support: list[int] = []
    objective_trace = []
    mf_columns = 0
    H_sel = np.zeros((n_users, 0), dtype=complex)
    F_sel = np.zeros((0, n_users), dtype=complex)

    for _ in range(n_elem):
        for m in range(m_rings):
            live = np.flatnonzero(alive[m])
            mf_columns += len(live)
            cols = dictionary.entries[:, m * g_h + live]
            scores = np.sum(np.abs(cols.conj().T @ residual) ** 2, axis=1)
            pick = int(live[np.argmax(scores)])
            chosen[m].append(pick)
            alive[m, pick] = False
            support.append(m * g_h + pick)
        H_sel = dictionary.entries[:, support]
        F_sel = rzf(H_sel, alpha)
        residual = np.eye(n_users) - H_sel @ F_sel
        objective_trace.append(rzf_objective(H_sel, F_sel, alpha))

    angles = np.array([[grid.psi[g] for g in ring] for ring in chosen])
    diag = {
        "objective_trace": objective_trace,
        "support": support,
        "matched_filter_columns": mf_columns,
    }
    return angles, H_sel, F_sel, diag


def optimize_heights(paths: list[PathSet], angles, grid: PositionGrid,
                     config: FclaConfig, alpha: float):
    """Assign one grid height to each ring with its angle set frozen.

    Rings go in order; ring m scores every live height slot by the Frobenius
    norm of its block's matched filter against the current residual, takes the
    best, and the joint refit over all placed rings updates the residual.
    Returns the (M,) height array, final channel and refit precoder, and
    diagnostics.
    """
    angles = np.atleast_2d(np.asarray(angles, dtype=float))
    m_rings, n_elem = angles.shape
    if grid.g_v < m_rings:
        raise ValueError(f"{grid.g_v} height slots cannot host {m_rings} rings")
    dictionary = build_height_dictionary(paths, angles, grid, config)
    g_v = grid.g_v
    n_users = dictionary.entries.shape[0]

    def block(m: int, slot: int) -> np.ndarray:
        start = (m * g_v + slot) * n_elem
        return dictionary.entries[:, start:start + n_elem]

    residual = np.eye(n_users, dtype=complex)
    alive = np.ones(g_v, dtype=bool)
    slots = np.empty(m_rings, dtype=int)
    support: list[int] = []
    objective_trace = []
    mf_columns = 0
    H_sel = np.zeros((n_users, 0), dtype=complex)
    F_sel = np.zeros((0, n_users), dtype=complex)

    for m in range(m_rings):
        live = np.flatnonzero(alive)
        mf_columns += len(live) * n_elem
        scores = [
            float(np.linalg.norm(block(m, s).conj().T @ residual, "fro") ** 2)
            for s in live
        ]
        pick = int(live[int(np.argmax(scores))])
        slots[m] = pick
        alive[pick] = False
        start = (m * g_v + pick) * n_elem
        support.extend(range(start, start + n_elem))
        H_sel = dictionary.entries[:, support]
        F_sel = rzf(H_sel, alpha)
        residual = np.eye(n_users) - H_sel @ F_sel
        objective_trace.append(rzf_objective(H_sel, F_sel, alpha))

    heights = grid.z[slots].copy()
    diag = {
        "objective_trace": objective_trace,
        "slots": slots.tolist(),
        "matched_filter_columns": mf_columns,
    }
    return heights, H_sel, F_sel, diag


def solve_alternating(paths: list[PathSet], grid: PositionGrid,
                      config: FclaConfig, alpha: float, n_outer: int,
                      power: float = 1.0, sigma2: float = 1.0,
                      early_stop_tol: float | None = None) -> PlacementSolution:
    """Run the angle and height phases alternately for n_outer rounds.

    Heights from one round seed the next round's angle phase. The sum rate of
    each round's placement (with the refit precoder normalized to the power
    budget) is recorded as a convergence trace; an optional relative-change
    early stop on that trace is available but off by default.
    """
    if n_outer < 1:
        raise ValueError("need at least one outer round")
    m_rings, n_elem = config.m_rings, config.n_elements
    heights = initial_heights(grid, m_rings)

    sum_rate_trace = []
    phase_objectives = []
    mf_columns = 0
    angles = None
    H_star = None
    F_raw = None
    final_objective = None

    for _ in range(n_outer):
        angles, _, _, diag_a = optimize_angles(paths, heights, grid, config, alpha)
        heights, H_star, F_raw, diag_v = optimize_heights(paths, angles, grid,
                                                          config, alpha)
        mf_columns += diag_a["matched_filter_columns"] + diag_v["matched_filter_columns"]
        phase_objectives.append({
            "angle": diag_a["objective_trace"],
            "height": diag_v["objective_trace"],
        })
        final_objective = diag_v["objective_trace"][-1]
        rate = sinr(H_star, normalize_columns(F_raw, power, allow_zero=True),
                    sigma2).sum_rate
        sum_rate_trace.append(rate)
        if (early_stop_tol is not None and len(sum_rate_trace) >= 2
                and abs(sum_rate_trace[-1] - sum_rate_trace[-2])
                < early_stop_tol * max(abs(sum_rate_trace[-2]), 1e-12)):
            break

    F_star = normalize_columns(F_raw, power, allow_zero=True)
    # column order of the final channel: ring-major blocks of N angles
    placement = [(float(angles[m, n]), float(heights[m]))
                 for m in range(m_rings) for n in range(n_elem)]

    return PlacementSolution(
        heights=heights,
        angles=angles,
        placement=placement,
        H_star=H_star,
        F_star=F_star,
        diagnostics={
            "sum_rate_trace": sum_rate_trace,
            "phase_objectives": phase_objectives,
            "final_objective": final_objective,
            "outer_iterations": len(sum_rate_trace),
            "matched_filter_columns": mf_columns,
        },
    )
