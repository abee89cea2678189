"""Result container shared by the placement solvers."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class PlacementSolution:
    """Optimized array placement plus the matching channel and precoder.

    heights[m] is ring m's height; angles[m] its element angles. placement
    lists (psi, z) per channel column, aligned with H_star's columns and
    F_star's rows. F_star columns are normalized to the requested total power.
    diagnostics carries solver traces (selection order, objective per step,
    sum-rate per outer iteration, matched-filter work counters).
    """

    heights: np.ndarray
    angles: np.ndarray
    placement: list
    H_star: np.ndarray
    F_star: np.ndarray
    diagnostics: dict = field(default_factory=dict)

    @property
    def n_rings(self) -> int:
        return len(self.heights)

    @property
    def n_antennas(self) -> int:
        return len(self.placement)
