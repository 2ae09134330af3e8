"""Reference cell vectors, fine/coarse grouping and encodings.

A coarse cell of a Paired QW holds ``2k`` samples of a fine scalar field.
Cells here are disjoint windows of ``2k`` consecutive fine samples; the
samples sit at the symmetric offsets ``m * spacing / 2`` around the cell
centre, ``m`` running over the odd integers ``-(2k-1) .. 2k-1`` in the same
order as :func:`delta_vector`.  With fine spacing ``delta`` the coarse pitch
is ``2 * eps`` where ``eps = k * delta``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import DEFAULT_TOL, InfeasibleError, as_vector, complete_unitary, is_unitary

__all__ = [
    "FineField",
    "CoarseGroupedState",
    "Encoding",
    "alpha_vector",
    "delta_vector",
    "delta_norm_sq",
    "odd_offsets",
    "group",
    "ungroup",
    "build_encoding",
]


def _check_k(k) -> int:
    if int(k) != k or k < 1:
        raise ValueError(f"k must be a positive integer, got {k!r}")
    return int(k)


def odd_offsets(k: int) -> np.ndarray:
    """The odd integers ``-(2k-1), ..., -1, 1, ..., 2k-1``."""
    k = _check_k(k)
    return np.arange(-(2 * k - 1), 2 * k, 2, dtype=float)


def alpha_vector(k: int) -> np.ndarray:
    """Constant-field direction: ``2k`` entries equal to ``1/sqrt(2k)``."""
    k = _check_k(k)
    return np.full(2 * k, 1.0 / np.sqrt(2 * k), dtype=np.complex128)


def delta_vector(k: int) -> np.ndarray:
    """Gradient direction: the odd integers scaled by ``1/(k sqrt(2k))``."""
    k = _check_k(k)
    return (odd_offsets(k) / (k * np.sqrt(2 * k))).astype(np.complex128)


def delta_norm_sq(k: int) -> float:
    """Closed form ``(4/3)(1 - 1/(2k)^2)`` of ``||delta||^2``."""
    k = _check_k(k)
    return 4.0 / 3.0 * (1.0 - 1.0 / (2 * k) ** 2)


@dataclass(frozen=True)
class FineField:
    """Complex samples ``psi(origin + i * spacing)``."""

    samples: np.ndarray
    spacing: float = 1.0
    origin: float = 0.0

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=np.complex128)
        if s.ndim != 1:
            raise ValueError("FineField samples must be 1-D")
        if not np.all(np.isfinite(s)):
            raise ValueError("FineField samples must be finite")
        if not self.spacing > 0:
            raise ValueError("spacing must be positive")
        object.__setattr__(self, "samples", s)

    @property
    def positions(self) -> np.ndarray:
        return self.origin + self.spacing * np.arange(self.samples.shape[0])

    def norm(self) -> float:
        """Lattice L2 norm ``sqrt(spacing * sum |psi|^2)``."""
        return float(np.sqrt(self.spacing * np.sum(np.abs(self.samples) ** 2)))


@dataclass(frozen=True)
class CoarseGroupedState:
    """Cells of dimension ``2k`` (array of shape ``(n_cells, 2k)``), pitch ``2*eps``."""

    cells: np.ndarray
    k: int
    pitch: float = 2.0
    origin: float = 0.0  # centre of cell 0

    def __post_init__(self):
        c = np.asarray(self.cells, dtype=np.complex128)
        k = _check_k(self.k)
        if c.ndim != 2 or c.shape[1] != 2 * k:
            raise ValueError(f"cells must have shape (n, {2 * k}), got {c.shape}")
        object.__setattr__(self, "cells", c)

    @property
    def eps(self) -> float:
        return self.pitch / 2.0

    @property
    def centers(self) -> np.ndarray:
        return self.origin + self.pitch * np.arange(self.cells.shape[0])

    def norm(self) -> float:
        """Lattice L2 norm ``sqrt(pitch * sum ||cell||^2)``; equals the fine norm."""
        return float(np.sqrt(self.pitch * np.sum(np.abs(self.cells) ** 2)))


def group(field: FineField, k: int) -> CoarseGroupedState:
    """Group consecutive windows of ``2k`` fine samples into coarse cells.

    Entry ``j`` of a cell is ``psi / sqrt(2k)`` at the ``j``-th sample of the
    window.  The sample count must be a multiple of ``2k``.
    """
    k = _check_k(k)
    n = field.samples.shape[0]
    if n % (2 * k):
        raise ValueError(f"{n} samples cannot be split into cells of {2 * k}")
    cells = field.samples.reshape(-1, 2 * k) / np.sqrt(2 * k)
    pitch = 2 * k * field.spacing
    origin = field.origin + (2 * k - 1) * field.spacing / 2.0
    return CoarseGroupedState(cells, k, pitch, origin)


def ungroup(state: CoarseGroupedState) -> FineField:
    """Inverse of :func:`group`."""
    k = state.k
    spacing = state.pitch / (2 * k)
    samples = (state.cells * np.sqrt(2 * k)).reshape(-1)
    origin = state.origin - (2 * k - 1) * spacing / 2.0
    return FineField(samples, spacing, origin)


@dataclass(frozen=True)
class Encoding:
    """Unitary ``E`` with ``E alpha = alpha_prime`` and ``E delta = delta_prime``."""

    E: np.ndarray
    alpha_prime: np.ndarray
    delta_prime: np.ndarray

    @property
    def k(self) -> int:
        return self.E.shape[0] // 2


def build_encoding(alpha_prime, delta_prime, k: int, tol: float = DEFAULT_TOL) -> Encoding:
    """Complete ``alpha -> alpha_prime``, ``delta -> delta_prime`` to a unitary."""
    k = _check_k(k)
    ap = as_vector(alpha_prime, 2 * k)
    dp = as_vector(delta_prime, 2 * k)
    if abs(np.linalg.norm(ap) - 1.0) > tol:
        raise InfeasibleError("alpha_prime must have unit norm")
    if abs(np.vdot(ap, dp)) > tol:
        raise InfeasibleError("alpha_prime and delta_prime must be orthogonal")
    if abs(np.vdot(dp, dp).real - delta_norm_sq(k)) > tol:
        raise InfeasibleError(
            f"||delta_prime||^2 = {np.vdot(dp, dp).real!r}, expected {delta_norm_sq(k)!r}"
        )
    E = complete_unitary([(alpha_vector(k), ap), (delta_vector(k), dp)], 2 * k, tol=tol)
    assert is_unitary(E, tol)
    return Encoding(E, ap, dp)
