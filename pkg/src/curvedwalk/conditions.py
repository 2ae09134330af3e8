"""Continuum-limit conditions on coins and encodings.

Block convention: components ``0..k-1`` are the ``+1`` eigenspace of
``Z = sigma_z (x) I_k`` and are fed from the right neighbour (``P^-``);
components ``k..2k-1`` are the ``-1`` eigenspace, fed from the left
neighbour (``P^+``).  Hence ``Z v = P^- v - P^+ v``.
"""
from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from .grouping import Encoding
from .linalg import DEFAULT_TOL, as_vector, eig_subspace

__all__ = [
    "CoinSpec",
    "FirstOrderTerms",
    "z_diag",
    "speed_of",
    "check_zeroth",
    "check_first_fixed",
    "check_norm_constraint",
    "speed_candidates",
    "gamma2_residual",
    "gamma1_residual",
    "finite_differences",
    "finite_difference_terms",
    "residual_report",
]


def z_diag(dim: int) -> np.ndarray:
    """Diagonal of ``Z`` for a cell of dimension ``dim = 2k``."""
    if dim % 2:
        raise ValueError("cell dimension must be even")
    k = dim // 2
    return np.concatenate([np.ones(k), -np.ones(k)])


@dataclass(frozen=True)
class CoinSpec:
    """A coin ``C`` together with the encoding and the speed it realises."""

    C: np.ndarray
    encoding: Encoding
    c: float
    k: int

    @property
    def alpha_prime(self) -> np.ndarray:
        return self.encoding.alpha_prime

    @property
    def delta_prime(self) -> np.ndarray:
        return self.encoding.delta_prime


@dataclass(frozen=True)
class FirstOrderTerms:
    m: complex
    n: complex
    s: complex


def speed_of(alpha_prime, tol: float = DEFAULT_TOL) -> float:
    """``<alpha'|Z|alpha'>`` for a unit vector."""
    a = as_vector(alpha_prime)
    if abs(np.linalg.norm(a) - 1.0) > tol:
        raise ValueError("alpha_prime must have unit norm")
    return float(np.sum(z_diag(a.shape[0]) * np.abs(a) ** 2))


def check_zeroth(C, alpha_prime) -> float:
    """``||C alpha' - alpha'||``."""
    a = as_vector(alpha_prime)
    C = np.asarray(C, dtype=np.complex128)
    if C.shape != (a.shape[0], a.shape[0]):
        raise ValueError("dimension mismatch between coin and alpha_prime")
    return float(np.linalg.norm(C @ a - a))


def _fixed_lhs_rhs(C, alpha_prime, delta_prime, c):
    a, d = as_vector(alpha_prime), as_vector(delta_prime)
    z = z_diag(a.shape[0])
    lhs = np.asarray(C).conj().T @ d - d
    rhs = 2.0 * (z * a - c * a)
    return lhs, rhs


def check_first_fixed(spec: CoinSpec) -> float:
    """``||(C^dagger - I) delta' - 2 (Z - c) alpha'||``."""
    lhs, rhs = _fixed_lhs_rhs(spec.C, spec.alpha_prime, spec.delta_prime, spec.c)
    return float(np.linalg.norm(lhs - rhs))


def check_norm_constraint(alpha_prime, delta_prime) -> float:
    """``|Re<delta'|Z|alpha'> + <alpha'|Z Q Z|alpha'>|`` with ``Q = I - |alpha'><alpha'|``."""
    a, d = as_vector(alpha_prime), as_vector(delta_prime, len(alpha_prime))
    za = z_diag(a.shape[0]) * a
    zqz = np.vdot(za, za).real - abs(np.vdot(a, za)) ** 2
    return float(abs(np.vdot(d, za).real + zqz))


def speed_candidates(C, *, restricted: bool = True, tol: float = 1e-8) -> list[float]:
    """Finite set containing every speed the coin ``C`` can realise.

    ``P`` projects onto the fixed space of ``C``.  With ``restricted=True``
    (default) these are the eigenvalues of the Hermitian compression
    ``V^dagger Z V`` (``V`` an orthonormal basis of ``range(P)``); otherwise
    the real eigenvalues of the product ``P Z``, which adds zeros.
    """
    C = np.asarray(C, dtype=np.complex128)
    basis = eig_subspace(C, 1.0, tol)
    if not basis:
        return []
    V = np.column_stack(basis)
    z = z_diag(C.shape[0])
    if restricted:
        vals = np.linalg.eigvalsh(V.conj().T @ (z[:, None] * V))
    else:
        P = V @ V.conj().T
        ev = np.linalg.eigvals(P * z[None, :])
        vals = ev.real[np.abs(ev.imag) <= tol]
    vals = np.sort(vals)
    out: list[float] = []
    for v in vals:
        if not out or v - out[-1] > tol:
            out.append(float(v))
    return out


def _q_project(alpha_prime: np.ndarray, v: np.ndarray) -> np.ndarray:
    return v - np.vdot(alpha_prime, v) * alpha_prime


def gamma2_residual(spec: CoinSpec) -> float:
    """``||C delta' - delta' + 2 Q C Z alpha'||``."""
    a, d = spec.alpha_prime, spec.delta_prime
    C = np.asarray(spec.C)
    za = z_diag(a.shape[0]) * a
    g = C @ d - d + 2.0 * _q_project(a, C @ za)
    return float(np.linalg.norm(g))


def gamma1_residual(
    spec: CoinSpec,
    dt_plus,
    dx,
    mu_x,
    C1=None,
) -> float:
    """Norm of ``Q dt_plus - Q C Z dx - Q C mu_x + Q C1 alpha'``.

    ``dt_plus``, ``dx`` and ``mu_x`` are the finite-difference vectors of
    ``alpha'`` (see :func:`finite_differences`); ``C1`` is the first-order
    part of the coin, ``None`` meaning zero.
    """
    a = spec.alpha_prime
    dim = a.shape[0]
    C0 = np.asarray(spec.C)
    z = z_diag(dim)
    g = as_vector(dt_plus, dim) - C0 @ (z * as_vector(dx, dim)) - C0 @ as_vector(mu_x, dim)
    if C1 is not None:
        g = g + np.asarray(C1) @ a
    return float(np.linalg.norm(_q_project(a, g)))


def _alpha_of(obj) -> np.ndarray:
    for attr in ("alpha_prime",):
        if hasattr(obj, attr):
            return as_vector(getattr(obj, attr))
    return as_vector(obj)


def finite_differences(
    family: Callable[[float, float], object], t: float, x: float, eps: float
) -> dict[str, np.ndarray]:
    """Finite-difference vectors of ``alpha'(t, x)`` with lattice step ``2 eps``.

    ``family(t, x)`` may return an :class:`Encoding`, a :class:`CoinSpec` or
    a bare ``alpha'`` vector.  Returns ``alpha``, ``dt_plus`` (forward in
    time), ``dx`` (centred) and ``mu_x`` (the non-differentiability part).
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    a0 = _alpha_of(family(t, x))
    ap = _alpha_of(family(t, x + 2 * eps))
    am = _alpha_of(family(t, x - 2 * eps))
    at = _alpha_of(family(t + 2 * eps, x))
    return {
        "alpha": a0,
        "dt_plus": (at - a0) / (2 * eps),
        "dx": (ap - am) / (4 * eps),
        "mu_x": (ap + am - 2 * a0) / (4 * eps),
    }


def finite_difference_terms(
    family: Callable[[float, float], object], t: float, x: float, eps: float
) -> FirstOrderTerms:
    """``m = <a|Z|dx a>``, ``n = -<a|dt+ a>``, ``s = <a|mu_x a>``."""
    d = finite_differences(family, t, x, eps)
    a = d["alpha"]
    z = z_diag(a.shape[0])
    m = np.vdot(a, z * d["dx"])
    n = -np.vdot(a, d["dt_plus"])
    s = np.vdot(a, d["mu_x"])
    return FirstOrderTerms(complex(m), complex(n), complex(s))


def residual_report(spec: CoinSpec, label: str | float | int | None = None) -> list[dict]:
    """JSON-ready records ``{condition, k, r_or_c, residual}`` for a coin."""
    tag = spec.c if label is None else label
    rows = [
        ("zeroth", check_zeroth(spec.C, spec.alpha_prime)),
        ("first_fixed", check_first_fixed(spec)),
        ("norm_constraint", check_norm_constraint(spec.alpha_prime, spec.delta_prime)),
        ("gamma2", gamma2_residual(spec)),
    ]
    return [{"condition": n, "k": spec.k, "r_or_c": tag, "residual": float(v)} for n, v in rows]
