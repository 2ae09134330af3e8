"""Dense complex linear algebra for coin and encoding construction.

Vectors and operators are plain ``numpy`` arrays (complex128).  Builders
never return an operator that fails :func:`is_unitary` at ``DEFAULT_TOL``.
"""
from __future__ import annotations

from collections.abc import Sequence

import numpy as np
from scipy import linalg as sla

__all__ = [
    "DEFAULT_TOL",
    "InfeasibleError",
    "DegenerateInputError",
    "as_vector",
    "is_unitary",
    "complete_unitary",
    "rotate_between",
    "eig_subspace",
]

DEFAULT_TOL = 1e-10
EIG_CLUSTER_TOL = 1e-8


class InfeasibleError(ValueError):
    """Requested constraints admit no unitary (norm / Gram mismatch)."""


class DegenerateInputError(ValueError):
    """Input vectors are rank deficient."""


def as_vector(v, dim: int | None = None) -> np.ndarray:
    """Coerce to a finite 1-D complex128 array, optionally of length ``dim``."""
    arr = np.asarray(v, dtype=np.complex128)
    if arr.ndim != 1:
        raise ValueError(f"expected a 1-D vector, got shape {arr.shape}")
    if dim is not None and arr.shape[0] != dim:
        raise ValueError(f"expected dimension {dim}, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("vector has non-finite entries")
    return arr


def _as_square(M) -> np.ndarray:
    arr = np.asarray(M, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {arr.shape}")
    return arr


def is_unitary(M, tol: float = DEFAULT_TOL) -> bool:
    """True iff ``max |M^dagger M - I| <= tol``.

    Raises ``ValueError`` for non-square input.
    """
    arr = _as_square(M)
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    gram = arr.conj().T @ arr
    gram[np.diag_indices_from(gram)] -= 1.0
    return bool(np.max(np.abs(gram), initial=0.0) <= tol)


def _mgs_extend(basis: list[np.ndarray], candidates, tol: float) -> list[np.ndarray]:
    """Modified Gram-Schmidt (two passes) of ``candidates`` against ``basis``.

    Candidates whose residual norm falls below ``tol`` are skipped.
    """
    out = list(basis)
    for v in candidates:
        w = np.array(v, dtype=np.complex128)
        for _ in range(2):
            for q in out:
                w -= np.vdot(q, w) * q
        nrm = np.linalg.norm(w)
        if nrm > tol:
            out.append(w / nrm)
    return out


def _completed_frame(Q: np.ndarray, dim: int) -> np.ndarray:
    """Extend orthonormal columns ``Q`` to a unitary, canonical basis in index order."""
    basis = [Q[:, j] for j in range(Q.shape[1])]
    eye = np.eye(dim, dtype=np.complex128)
    full = _mgs_extend(basis, (eye[:, i] for i in range(dim)), tol=1e-6)
    if len(full) != dim:  # pragma: no cover - canonical basis always spans
        raise DegenerateInputError("failed to complete orthonormal frame")
    return np.column_stack(full)


def _orthonormal_factor(A: np.ndarray, tol: float) -> tuple[np.ndarray, np.ndarray]:
    """Gram-Schmidt factorisation ``A = Q R`` with R upper triangular."""
    dim, p = A.shape
    Q = np.zeros((dim, p), dtype=np.complex128)
    R = np.zeros((p, p), dtype=np.complex128)
    scale = max(np.max(np.linalg.norm(A, axis=0), initial=0.0), 1.0)
    for j in range(p):
        w = A[:, j].copy()
        for _ in range(2):
            for i in range(j):
                coef = np.vdot(Q[:, i], w)
                R[i, j] += coef
                w -= coef * Q[:, i]
        nrm = np.linalg.norm(w)
        if nrm <= tol * scale:
            raise DegenerateInputError(f"input vector {j} lies in the span of the previous ones")
        R[j, j] = nrm
        Q[:, j] = w / nrm
    return Q, R


def complete_unitary(pairs: Sequence[tuple], dim: int, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Unitary ``U`` with ``U @ inp == out`` for every ``(inp, out)`` pair.

    The inputs need not be normalised, but their Gram matrix must equal that
    of the outputs.  On the orthogonal complement the canonical basis is
    Gram-Schmidt-ed against each span in index order and the i-th complement
    vector on the input side is sent to the i-th one on the output side, so
    identical inputs give bit-identical results.
    """
    if dim < 1:
        raise ValueError("dim must be positive")
    if len(pairs) == 0:
        return np.eye(dim, dtype=np.complex128)
    A_in = np.column_stack([as_vector(p[0], dim) for p in pairs])
    A_out = np.column_stack([as_vector(p[1], dim) for p in pairs])
    G_in = A_in.conj().T @ A_in
    G_out = A_out.conj().T @ A_out
    if np.max(np.abs(G_in - G_out)) > tol * max(1.0, np.max(np.abs(G_in))):
        raise InfeasibleError("input and output Gram matrices differ")
    Q_in, R = _orthonormal_factor(A_in, tol)
    # equal Gram matrices make A_out R^{-1} orthonormal as well
    Q_out = sla.solve_triangular(R.T, A_out.T, lower=True).T
    Q_out, _ = _orthonormal_factor(Q_out, tol)
    F_in = _completed_frame(Q_in, dim)
    F_out = _completed_frame(Q_out, dim)
    return F_out @ F_in.conj().T


def rotate_between(u, v, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Unitary sending ``u`` to ``v``, acting only inside span{u, v}.

    The restriction to the span has unit determinant, which makes
    ``rotate_between(v, u)`` the exact inverse.
    """
    u = as_vector(u)
    v = as_vector(v, u.shape[0])
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu <= tol or nv <= tol:
        raise InfeasibleError("rotate_between needs nonzero vectors")
    if abs(nu - nv) > tol * max(1.0, nu):
        raise InfeasibleError(f"norm mismatch: {nu!r} vs {nv!r}")
    dim = u.shape[0]
    uh, vh = u / nu, v / nv
    gamma = np.vdot(uh, vh)
    perp = vh - gamma * uh
    s = np.linalg.norm(perp)
    U = np.eye(dim, dtype=np.complex128)
    if s <= 1e-14:
        phase = gamma / abs(gamma)
        U += (phase - 1.0) * np.outer(uh, uh.conj())
        return U
    e2 = perp / s
    # restriction in the (uh, e2) basis: [[gamma, -s], [s, conj(gamma)]]
    B = np.column_stack([uh, e2])
    M = np.array([[gamma, -s], [s, np.conj(gamma)]], dtype=np.complex128)
    U += B @ (M - np.eye(2)) @ B.conj().T
    return U


def eig_subspace(U, eigenvalue: complex, tol: float = EIG_CLUSTER_TOL) -> list[np.ndarray]:
    """Orthonormal basis of the eigenspace of a unitary ``U`` for ``eigenvalue``.

    Computed from the complex Schur form, which is diagonal (up to rounding)
    for normal matrices, so degenerate eigenspaces come out orthonormal.
    """
    arr = _as_square(U)
    if abs(abs(eigenvalue) - 1.0) > tol:
        raise ValueError("eigenvalue of a unitary must have unit modulus")
    T, Zs = sla.schur(arr, output="complex")
    sel = np.abs(np.diag(T) - eigenvalue) <= tol
    cols = [Zs[:, j] for j in np.flatnonzero(sel)]
    basis = _mgs_extend([], cols, tol=1e-12)
    out = []
    for b in basis:
        # fix the global phase: largest-modulus entry real positive
        j = int(np.argmax(np.abs(b) > np.max(np.abs(b)) - 1e-12))
        out.append(b * (abs(b[j]) / b[j]))
    return out
