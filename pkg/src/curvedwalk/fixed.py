"""Fixed-speed coins: every solution of the zeroth and first-order conditions.

Recipe for a target speed ``c``:

1. ``alpha' = r|0> + l|1>`` with ``Z|0> = |0>``, ``Z|1> = -|1>`` and
   ``|r|^2 - |l|^2 = c``;
2. ``delta'' = (Z - c) alpha'`` (norm ``1 - c^2``);
3. ``delta' = lam delta'' + w`` where ``<delta'|delta''> = f ||delta'||^2``,
   ``Re f`` is forced and ``Im f`` is free inside :func:`f_interval`,
   ``w`` orthogonal to ``alpha'`` and ``delta''``;
4. any unitary ``C`` fixing ``alpha'`` and sending
   ``delta''' = 2 delta'' + delta'`` to ``delta'``.
"""
from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from scipy.stats import unitary_group

from .conditions import CoinSpec, z_diag
from .grouping import build_encoding, delta_norm_sq
from .linalg import DEFAULT_TOL, DegenerateInputError, InfeasibleError, _mgs_extend, rotate_between

__all__ = [
    "FixedBuildOptions",
    "f_interval",
    "build_fixed_coin",
    "build_multispeed_coin",
    "build_pm_coexistence_coin",
    "block_embedding",
]


@dataclass(frozen=True)
class FixedBuildOptions:
    """Inputs of :func:`build_fixed_coin`.

    ``im_f=None`` picks ``0`` when the cell has room for the orthogonal part
    ``w`` and the extremal ``f_tilde`` otherwise (``k == 1``).  ``seed``
    draws ``|0>``, ``|1>`` from the ``U(k) x U(k)`` freedom; ``None`` keeps
    ``|0> = e_0`` and ``|1> = e_k``.
    """

    k: int
    c: float
    im_f: float | None = None
    r_amp: complex | None = None
    l_amp: complex | None = None
    seed: int | None = None

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise ValueError("k must be a positive integer")
        if not -1.0 <= self.c <= 1.0:
            raise ValueError("speed must lie in [-1, 1]")
        if (self.r_amp is None) != (self.l_amp is None):
            raise ValueError("give both r_amp and l_amp or neither")
        if self.r_amp is not None:
            r2, l2 = abs(self.r_amp) ** 2, abs(self.l_amp) ** 2
            if abs(r2 + l2 - 1) > DEFAULT_TOL or abs(r2 - l2 - self.c) > DEFAULT_TOL:
                raise ValueError("amplitudes must satisfy |r|^2+|l|^2=1 and |r|^2-|l|^2=c")


def f_interval(k: int, c: float, delta_sq: float | None = None) -> tuple[float, float]:
    """``(Re f, f_tilde)``: the forced real part and the bound on ``|Im f|``."""
    if not -1.0 <= c <= 1.0:
        raise ValueError("speed must lie in [-1, 1]")
    nd2 = delta_norm_sq(k) if delta_sq is None else delta_sq
    q = (1.0 - c * c) / nd2
    return -q, float(np.sqrt(max(q * (1.0 - q), 0.0)))


def _freedom_basis(k: int, seed: int | None) -> tuple[np.ndarray, np.ndarray]:
    zero = np.zeros(2 * k, dtype=np.complex128)
    one = np.zeros(2 * k, dtype=np.complex128)
    if seed is None:
        zero[0] = 1.0
        one[k] = 1.0
        return zero, one
    rng = np.random.default_rng(seed)
    if k == 1:
        ph = np.exp(2j * np.pi * rng.random(2))
        zero[0], one[1] = ph
        return zero, one
    up = unitary_group.rvs(k, random_state=rng)
    dn = unitary_group.rvs(k, random_state=rng)
    zero[:k] = up[:, 0]
    one[k:] = dn[:, 0]
    return zero, one


def _solve(opts: FixedBuildOptions, delta_sq: float, tol: float):
    """Return ``(alpha', delta', C)`` in dimension ``2k``."""
    k, c = opts.k, float(opts.c)
    dim = 2 * k
    zero, one = _freedom_basis(k, opts.seed)
    if opts.r_amp is None:
        r, l = np.sqrt((1 + c) / 2), np.sqrt((1 - c) / 2)
    else:
        r, l = complex(opts.r_amp), complex(opts.l_amp)
    alpha = r * zero + l * one
    z = z_diag(dim)
    ddp = z * alpha - c * alpha  # delta''
    ddp_sq = np.vdot(ddp, ddp).real
    eye = np.eye(dim, dtype=np.complex128)

    if ddp_sq <= tol:
        # |c| = 1: delta' only has to be a fixed vector of C orthogonal to alpha'
        rest = _mgs_extend([alpha], (eye[:, i] for i in range(dim)), tol=1e-6)
        if len(rest) < 2:
            raise DegenerateInputError("no room for delta' orthogonal to alpha'")
        return alpha, np.sqrt(delta_sq) * rest[1], eye.copy()

    re_f, f_tilde = f_interval(k, c, delta_sq)
    q = ddp_sq / delta_sq
    room = _mgs_extend([alpha / np.linalg.norm(alpha), ddp / np.sqrt(ddp_sq)],
                       (eye[:, i] for i in range(dim)), tol=1e-6)
    has_room = len(room) > 2
    im_f = opts.im_f
    if im_f is None:
        im_f = 0.0 if has_room else f_tilde
    if im_f * im_f > f_tilde * f_tilde + tol:
        raise InfeasibleError(f"|Im f| = {abs(im_f)!r} exceeds f_tilde = {f_tilde!r}")
    f = complex(re_f, im_f)
    lam = np.conj(f) / q
    w_sq = delta_sq * (1.0 - abs(f) ** 2 / q)
    if w_sq > tol:
        if not has_room:
            raise InfeasibleError("delta' needs a component outside span{alpha', delta''} "
                                  "but the cell has none; use Im f = +-f_tilde")
        w = np.sqrt(w_sq) * room[2]
    else:
        w = np.zeros(dim, dtype=np.complex128)
    delta = lam * ddp + w
    d3 = 2.0 * ddp + delta
    if abs(np.linalg.norm(d3) - np.linalg.norm(delta)) > 1e-9:
        raise InfeasibleError("||delta'''|| differs from ||delta'||")  # pragma: no cover
    C = rotate_between(d3, delta)
    return alpha, delta, C


def build_fixed_coin(opts: FixedBuildOptions, tol: float = DEFAULT_TOL) -> CoinSpec:
    """Deterministic fixed-speed coin and encoding for ``opts.c``."""
    alpha, delta, C = _solve(opts, delta_norm_sq(opts.k), tol)
    enc = build_encoding(alpha, delta, opts.k)
    return CoinSpec(C, enc, float(opts.c), opts.k)


def block_embedding(ks: Sequence[int], i: int) -> np.ndarray:
    """Isometry placing a ``2k_i`` cell into block ``i`` of a ``2 sum(k)`` cell.

    The upper (lower) half of the small cell goes to upper (lower) slots, so
    ``Z`` restricts to each block.
    """
    kp = int(sum(ks))
    off = int(sum(ks[:i]))
    ki = int(ks[i])
    J = np.zeros((2 * kp, 2 * ki), dtype=np.complex128)
    for j in range(ki):
        J[off + j, j] = 1.0
        J[kp + off + j, ki + j] = 1.0
    return J


def build_multispeed_coin(specs: Sequence[tuple[float, int]], tol: float = DEFAULT_TOL,
                          seeds: Sequence[int | None] | None = None):
    """One coin realising several speeds, ``C`` block diagonal.

    Returns ``(C, encodings)``; ``encodings[i]`` realises ``specs[i][0]``.
    Each block is solved with the cell size ``k' = sum k_i`` of the full coin.
    """
    if not specs:
        raise ValueError("need at least one (c, k) pair")
    ks = [int(k) for _, k in specs]
    kp = sum(ks)
    nd2 = delta_norm_sq(kp)
    seeds = list(seeds) if seeds is not None else [None] * len(specs)
    C = np.zeros((2 * kp, 2 * kp), dtype=np.complex128)
    encs = []
    for i, ((c, k), seed) in enumerate(zip(specs, seeds)):
        alpha, delta, Ci = _solve(FixedBuildOptions(k, c, seed=seed), nd2, tol)
        J = block_embedding(ks, i)
        C += J @ Ci @ J.conj().T
        encs.append(build_encoding(J @ alpha, J @ delta, kp))
    return C, encs


def build_pm_coexistence_coin(k: int, U=None, seed: int | None = 0):
    """``C = I_2 (+) U`` carrying both ``c = +1`` and ``c = -1``.

    ``alpha'_+ = e_0``, ``alpha'_- = e_k`` and each ``delta'`` points along the
    other ``alpha'``.  ``U`` acts on the remaining ``2k - 2`` components
    (Haar random from ``seed`` when omitted).  Returns ``(C, [spec_plus, spec_minus])``.
    """
    if k < 1:
        raise ValueError("k must be positive")
    dim = 2 * k
    others = [i for i in range(dim) if i not in (0, k)]
    if U is None and others:
        U = unitary_group.rvs(len(others), random_state=np.random.default_rng(seed))
    C = np.eye(dim, dtype=np.complex128)
    if others:
        C[np.ix_(others, others)] = U
    e = np.eye(dim, dtype=np.complex128)
    nd = np.sqrt(delta_norm_sq(k))
    plus = build_encoding(e[0], nd * e[k], k)
    minus = build_encoding(e[k], nd * e[0], k)
    return C, [CoinSpec(C, plus, 1.0, k), CoinSpec(C, minus, -1.0, k)]
