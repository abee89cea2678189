"""Regularized zero-forcing precoder family, power normalization, and link rates."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class SingularMatrixError(np.linalg.LinAlgError):
    """The unregularized system is rank deficient."""


# reciprocal-condition floor below which an alpha=0 solve is rejected
_RCOND_FLOOR = 1e-12


def rzf(H: np.ndarray, alpha: float, gram: str = "auto") -> np.ndarray:
    """Regularized zero-forcing precoder H^H (H H^H + alpha I)^-1.

    The same matrix equals (H^H H + alpha I)^-1 H^H, so the solve runs on
    whichever Gram matrix is smaller unless a specific form is forced via
    gram="k" (users) or gram="n" (antennas). alpha=0 requires a full-rank
    system and raises SingularMatrixError otherwise.
    """
    H = np.asarray(H, dtype=complex)
    if H.ndim != 2:
        raise ValueError("H must be a 2-D matrix")
    if alpha < 0.0:
        raise ValueError(f"regularization must be >= 0, got {alpha}")
    n_users, n_ant = H.shape
    if gram == "auto":
        gram = "k" if n_users <= n_ant else "n"
    if gram == "k":
        G = H @ H.conj().T + alpha * np.eye(n_users)
        _require_invertible(G, alpha)
        # (G^-1 H)^H = H^H G^-1 because G is Hermitian
        return np.linalg.solve(G, H).conj().T
    if gram == "n":
        G = H.conj().T @ H + alpha * np.eye(n_ant)
        _require_invertible(G, alpha)
        return np.linalg.solve(G, H.conj().T)
    raise ValueError(f"gram must be 'auto', 'k' or 'n', got {gram!r}")


def _require_invertible(G: np.ndarray, alpha: float) -> None:
    if alpha > 0.0:
        return
    rcond = 1.0 / np.linalg.cond(G)
    if not np.isfinite(rcond) or rcond < _RCOND_FLOOR:
        raise SingularMatrixError(
            f"Gram matrix is singular to working precision (rcond={rcond:.2e}); "
            "use alpha > 0"
        )


def rzf_special(H: np.ndarray, mode: str, sigma2: float | None = None) -> np.ndarray:
    """Named members of the RZF family: 'mrt' (H^H), 'zf' (alpha=0),
    'mmse' (alpha equal to the noise power)."""
    mode = mode.lower()
    if mode == "mrt":
        return np.asarray(H, dtype=complex).conj().T
    if mode == "zf":
        return rzf(H, 0.0)
    if mode == "mmse":
        if sigma2 is None or sigma2 <= 0.0:
            raise ValueError("mmse mode needs a positive noise power")
        return rzf(H, sigma2)
    raise ValueError(f"unknown precoder mode {mode!r}")


def normalize_columns(F: np.ndarray, power: float,
                      allow_zero: bool = False) -> np.ndarray:
    """Scale each precoder column to carry power/K, so the total is exactly power.

    A zero column is an error by default. With allow_zero it is left at zero
    (that user is unservable, e.g. entirely behind every directional element)
    and only the remaining columns are scaled to their power/K share.
    """
    F = np.asarray(F, dtype=complex)
    norms = np.linalg.norm(F, axis=0)
    zero = norms == 0.0
    if np.any(zero) and not allow_zero:
        raise ValueError("cannot normalize a zero precoder column")
    target = np.sqrt(power / F.shape[1])
    scale = np.where(zero, 0.0, target / np.where(zero, 1.0, norms))
    return F * scale


@dataclass
class RateReport:
    """Per-user link quality and the resulting downlink throughput."""

    sinr: np.ndarray
    rates: np.ndarray  # bits per channel use, log2(1 + sinr)
    sum_rate: float


def sinr(H_true: np.ndarray, F: np.ndarray, sigma2: float) -> RateReport:
    """Per-user SINR |h_k^H f_k|^2 / (sum_{i != k} |h_k^H f_i|^2 + sigma2)
    with rows of H_true acting as h_k^H, plus log2 rates and their sum."""
    H_true = np.asarray(H_true, dtype=complex)
    F = np.asarray(F, dtype=complex)
    if sigma2 <= 0.0:
        raise ValueError("noise power must be positive")
    if H_true.shape[1] != F.shape[0] or H_true.shape[0] != F.shape[1]:
        raise ValueError(
            f"shape mismatch: H is {H_true.shape}, F is {F.shape}"
        )
    cross = np.abs(H_true @ F) ** 2  # (k, i): power of stream i at user k
    signal = np.diag(cross)
    interference = cross.sum(axis=1) - signal
    ratio = signal / (interference + sigma2)
    rates = np.log2(1.0 + ratio)
    return RateReport(sinr=ratio, rates=rates, sum_rate=float(rates.sum()))


def rzf_objective(H: np.ndarray, F: np.ndarray, alpha: float) -> float:
    """Regularized interference objective ||I - H F||_F^2 + alpha ||F||_F^2."""
    H = np.asarray(H, dtype=complex)
    F = np.asarray(F, dtype=complex)
    k = H.shape[0]
    mui = np.linalg.norm(np.eye(k) - H @ F, "fro") ** 2
    return float(mui + alpha * np.linalg.norm(F, "fro") ** 2)
