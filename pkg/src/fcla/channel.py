"""Multipath channel synthesis and the position dictionaries used by the solvers.

A user's channel entry at a candidate position (psi, z) aggregates L plane-wave
paths: conjugated path gain, element pattern amplitude toward the path, and the
carrier phase accumulated along the direction cosines. Stacking one such entry
per user gives a dictionary column; gathering columns at an actual placement
gives the channel matrix whose rows act as h_k^H in the link equations.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .geometry import FclaConfig, PositionGrid, check_spacing, ring_angle_distance
from .pattern import power_gain

THETA_EL_RANGE = (np.pi / 6.0, 5.0 * np.pi / 6.0)


@dataclass
class PathSet:
    """Per-user multipath parameters: complex gains and arrival angles for L paths.

    Direction cosines (phi_x, phi_y along the ring plane, theta_z along the
    axis) are cached at construction.
    """

    beta: np.ndarray
    theta_el: np.ndarray
    phi_az: np.ndarray
    phi_x: np.ndarray = field(init=False)
    phi_y: np.ndarray = field(init=False)
    theta_z: np.ndarray = field(init=False)

    def __post_init__(self):
        self.beta = np.atleast_1d(np.asarray(self.beta, dtype=complex))
        self.theta_el = np.atleast_1d(np.asarray(self.theta_el, dtype=float))
        self.phi_az = np.atleast_1d(np.asarray(self.phi_az, dtype=float))
        if not (self.beta.shape == self.theta_el.shape == self.phi_az.shape):
            raise ValueError("beta, theta_el and phi_az must have equal length")
        self.phi_x = np.sin(self.theta_el) * np.cos(self.phi_az)
        self.phi_y = np.sin(self.theta_el) * np.sin(self.phi_az)
        self.theta_z = np.cos(self.theta_el)

    @property
    def n_paths(self) -> int:
        return len(self.beta)


def draw_paths(n_users: int, n_paths: int, rng_seed) -> list[PathSet]:
    """Draw one multipath realization per user.

    Gains are i.i.d. circularly symmetric complex Gaussian with unit variance,
    elevations uniform on [pi/6, 5*pi/6], azimuths uniform on [0, 2*pi).
    Deterministic for a given seed.
    """
    if n_users < 1 or n_paths < 1:
        raise ValueError("need at least one user and one path")
    rng = np.random.default_rng(rng_seed)
    beta = (rng.standard_normal((n_users, n_paths))
            + 1j * rng.standard_normal((n_users, n_paths))) / np.sqrt(2.0)
    theta = rng.uniform(*THETA_EL_RANGE, size=(n_users, n_paths))
    phi = rng.uniform(0.0, 2.0 * np.pi, size=(n_users, n_paths))
    return [PathSet(beta[k], theta[k], phi[k]) for k in range(n_users)]


def export_paths(paths: list[PathSet], fp) -> None:
    """Write a drawn path collection as JSON records, one per (user, path)."""
    records = []
    for k, ps in enumerate(paths):
        for l in range(ps.n_paths):
            records.append({
                "user": k,
                "path": l,
                "beta_re": float(ps.beta[l].real),
                "beta_im": float(ps.beta[l].imag),
                "theta_el": float(ps.theta_el[l]),
                "phi_az": float(ps.phi_az[l]),
            })
    if hasattr(fp, "write"):
        json.dump(records, fp, indent=1)
    else:
        with open(fp, "w") as f:
            json.dump(records, f, indent=1)


def _apm_columns(paths: list[PathSet], psi, z, config: FclaConfig) -> np.ndarray:
    """Response of every user at each candidate position, as a K x G matrix.

    Column g holds, per user, (1/sqrt(L)) * sum_l conj(beta_l) * amp_l(psi_g)
    * exp(-j * 2*pi/lambda * (R*phi_x*cos(psi_g) + R*phi_y*sin(psi_g) + z_g*theta_z)).
    """
    psi = np.atleast_1d(np.asarray(psi, dtype=float))
    z = np.atleast_1d(np.asarray(z, dtype=float))
    if psi.shape != z.shape:
        raise ValueError("psi and z must align (one pair per column)")
    beta = np.stack([p.beta for p in paths])          # (K, L)
    phi_x = np.stack([p.phi_x for p in paths])
    phi_y = np.stack([p.phi_y for p in paths])
    theta_z = np.stack([p.theta_z for p in paths])
    n_paths = beta.shape[1]

    wave = 2.0 * np.pi / config.wavelength
    phase = wave * (config.radius * (phi_x[..., None] * np.cos(psi)
                                     + phi_y[..., None] * np.sin(psi))
                    + theta_z[..., None] * z)          # (K, L, G)
    if config.pattern.is_directional:
        theta_el = np.stack([p.theta_el for p in paths])
        phi_az = np.stack([p.phi_az for p in paths])
        gain = power_gain(config.pattern, theta_el[..., None],
                          phi_az[..., None] - psi)
        amp = np.sqrt(gain)
    else:
        amp = 1.0
    terms = np.conj(beta)[..., None] * amp * np.exp(-1j * phase)
    return terms.sum(axis=1) / np.sqrt(n_paths)


def apm_entry(paths_k: PathSet, psi: float, z: float, config: FclaConfig) -> complex:
    """Single user's response at one candidate position."""
    return complex(_apm_columns([paths_k], [psi], [z], config)[0, 0])


@dataclass
class ChannelMatrix:
    """Stacked user responses at an actual placement. Row k acts as h_k^H."""

    entries: np.ndarray
    positions: list  # (psi, z) per column

    @property
    def n_users(self) -> int:
        return self.entries.shape[0]

    @property
    def n_antennas(self) -> int:
        return self.entries.shape[1]


def synthesize_channel(paths: list[PathSet], placement,
                       config: FclaConfig) -> ChannelMatrix:
    """Channel matrix for a concrete placement (one (psi, z) pair per antenna).

    Rejects placements that violate the ring-angle or height spacing floors.
    """
    placement = [(float(p), float(h)) for p, h in placement]
    check_spacing(placement, config)
    psi = np.array([p for p, _ in placement])
    z = np.array([h for _, h in placement])
    return ChannelMatrix(entries=_apm_columns(paths, psi, z, config),
                         positions=placement)


@dataclass
class Dictionary:
    """Candidate-position responses as a dense K x G matrix plus column metadata.

    Columns are grouped: for the joint dictionary a group is a height slot
    holding all ring angles; for the angle dictionary a group is a ring; for
    the height dictionary a group is one (ring, height slot) block of that
    ring's N fixed angles.
    """

    entries: np.ndarray
    psi: np.ndarray
    z: np.ndarray
    group_ids: np.ndarray
    member_ids: np.ndarray
    group_size: int
    kind: str

    @property
    def n_columns(self) -> int:
        return self.entries.shape[1]

    @property
    def n_groups(self) -> int:
        return self.n_columns // self.group_size

    def column_of(self, group: int, member: int) -> int:
        return group * self.group_size + member

    def index_map(self, column: int):
        """(group id, member id, psi, z) of a column."""
        return (int(self.group_ids[column]), int(self.member_ids[column]),
                float(self.psi[column]), float(self.z[column]))


def build_joint_dictionary(paths: list[PathSet], grid: PositionGrid,
                           config: FclaConfig) -> Dictionary:
    """All (angle, height) candidates, height-major: the G_H angle columns of
    height slot 0, then slot 1, and so on."""
    g_h, g_v = grid.g_h, grid.g_v
    psi = np.tile(grid.psi, g_v)
    z = np.repeat(grid.z, g_h)
    entries = _apm_columns(paths, psi, z, config)
    return Dictionary(
        entries=entries, psi=psi, z=z,
        group_ids=np.repeat(np.arange(g_v), g_h),
        member_ids=np.tile(np.arange(g_h), g_v),
        group_size=g_h, kind="joint",
    )


def build_angle_dictionary(paths: list[PathSet], heights, grid: PositionGrid,
                           config: FclaConfig) -> Dictionary:
    """Angle candidates with each ring pinned at a fixed height.

    Block m holds every grid angle at heights[m]. Heights must be pairwise at
    least d_min apart (duplicates rejected).
    """
    heights = np.asarray(heights, dtype=float)
    m_rings = len(heights)
    for i in range(m_rings):
        for j in range(i + 1, m_rings):
            if abs(heights[i] - heights[j]) < config.d_min - 1e-9:
                raise ValueError(
                    f"ring heights {heights[i]} and {heights[j]} are closer "
                    f"than d_min={config.d_min}"
                )
    g_h = grid.g_h
    psi = np.tile(grid.psi, m_rings)
    z = np.repeat(heights, g_h)
    entries = _apm_columns(paths, psi, z, config)
    return Dictionary(
        entries=entries, psi=psi, z=z,
        group_ids=np.repeat(np.arange(m_rings), g_h),
        member_ids=np.tile(np.arange(g_h), m_rings),
        group_size=g_h, kind="angle",
    )


def build_height_dictionary(paths: list[PathSet], angles, grid: PositionGrid,
                            config: FclaConfig) -> Dictionary:
    """Height candidates with each ring's angles already fixed.

    angles is an (M, N) array. For ring m and height slot g the block
    [b(angles[m, 0], z_g), ..., b(angles[m, N-1], z_g)] appears as one group;
    blocks are laid out ring-major, then height slot, then member.
    """
    angles = np.atleast_2d(np.asarray(angles, dtype=float))
    m_rings, n_elem = angles.shape
    psi_min = config.psi_min
    for m in range(m_rings):
        for i in range(n_elem):
            for j in range(i + 1, n_elem):
                if ring_angle_distance(angles[m, i], angles[m, j]) < psi_min - 1e-9:
                    raise ValueError(
                        f"ring {m} angles {angles[m, i]} and {angles[m, j]} are "
                        f"closer than the minimum revolve angle {psi_min}"
                    )
    g_v = grid.g_v
    # ring-major, then height slot, then the ring's N angles
    psi = np.concatenate([np.tile(angles[m], g_v) for m in range(m_rings)])
    z = np.tile(np.repeat(grid.z, n_elem), m_rings)
    entries = _apm_columns(paths, psi, z, config)
    n_blocks = m_rings * g_v
    return Dictionary(
        entries=entries, psi=psi, z=z,
        group_ids=np.repeat(np.arange(n_blocks), n_elem),
        member_ids=np.tile(np.arange(n_elem), n_blocks),
        group_size=n_elem, kind="height",
    )
