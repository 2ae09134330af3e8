"""Discretized-metric coins built from the two gates ``I`` and ``sigma_x``.

With ``r`` signals in a tile the coin is ``C = C_B (+) I_r``: the first
``2k - r`` components are cyclically shifted by ``k - r`` and the last
``r`` (the signal wires) are left alone.  It realises ``c = r / (2k - r)``.
Negative speeds use the mirrored tile (upper and lower halves exchanged).
"""
from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .conditions import CoinSpec, gamma1_residual, z_diag
from .grouping import build_encoding, delta_norm_sq

__all__ = [
    "TileLayout",
    "SignalField",
    "DensityChoice",
    "tiled_permutation",
    "tiled_coin",
    "tiled_vectors",
    "tiled_alpha",
    "tiled_spec",
    "tile_layout",
    "mirror_spec",
    "speed_from_density",
    "density_from_speed",
    "ASSIGNMENTS",
    "perturbation_pairs",
    "perturbation_generator",
    "perturbation_operator",
    "leading_gamma1_vector",
    "select_assignment",
    "lightlike_gamma1",
    "advect_signals",
]


def _check_kr(k, r) -> tuple[int, int]:
    if int(k) != k or k < 1:
        raise ValueError(f"k must be a positive integer, got {k!r}")
    if int(r) != r or not 0 <= r <= k:
        raise ValueError(f"r must be an integer in [0, {k}], got {r!r}")
    return int(k), int(r)


def tiled_permutation(k: int, r: int) -> np.ndarray:
    """Index map ``out[i] = in[perm[i]]`` of the tiled coin."""
    k, r = _check_kr(k, r)
    nb = 2 * k - r
    return np.concatenate([np.arange(k, nb), np.arange(0, k), np.arange(nb, 2 * k)])


def tiled_coin(k: int, r: int) -> np.ndarray:
    """Permutation matrix ``C_B (+) I_r``."""
    perm = tiled_permutation(k, r)
    C = np.zeros((2 * k, 2 * k), dtype=np.complex128)
    C[np.arange(2 * k), perm] = 1.0
    return C


def tiled_alpha(k: int, r: int) -> np.ndarray:
    """``alpha'``: ``1/sqrt(2k - r)`` on the first ``2k - r`` components."""
    if int(r) != r or not 0 <= r < 2 * k:
        raise ValueError("need 0 <= r < 2k")
    nb = 2 * k - int(r)
    a = np.zeros(2 * k, dtype=np.complex128)
    a[:nb] = 1.0 / np.sqrt(nb)
    return a


def tiled_vectors(k: int, r: int) -> tuple[np.ndarray, np.ndarray]:
    """``(alpha', delta')`` solving both conditions for the tiled coin.

    On the shifted block ``delta'`` is the minimum-norm linear ramp
    ``d + beta * i`` with ``beta = 4 / (2k-r)^{3/2}``; the leftover norm up to
    ``||delta||`` is spread evenly over the signal components.
    """
    k, r = _check_kr(k, r)
    nb = 2 * k - r
    alpha = tiled_alpha(k, r)
    beta = 4.0 / nb**1.5
    d = -beta * (nb - 1) / 2.0
    delta = np.zeros(2 * k, dtype=np.complex128)
    delta[:nb] = d + beta * np.arange(nb)
    if r:
        deficit = delta_norm_sq(k) - np.sum(np.abs(delta[:nb]) ** 2)
        delta[nb:] = np.sqrt(max(deficit, 0.0) / r)
    return alpha, delta


def speed_from_density(k: int, r: int) -> float:
    """``r / (2k - r)``, evaluated exactly."""
    k, r = _check_kr(k, r)
    return float(Fraction(r, 2 * k - r))


class DensityChoice(NamedTuple):
    r: int
    speed: float  # realised speed, sign included
    error: float  # realised minus requested
    mirrored: bool


def density_from_speed(k: int, c: float) -> DensityChoice:
    """Signal count whose tile speed is closest to ``c`` (round half up)."""
    if int(k) != k or k < 1:
        raise ValueError("k must be a positive integer")
    if not -1.0 <= c <= 1.0:
        raise ValueError(f"speed {c!r} outside [-1, 1]")
    mirrored = c < 0
    ac = abs(c)
    r = int(np.floor(2 * k * ac / (1 + ac) + 0.5))
    r = min(max(r, 0), int(k))
    speed = speed_from_density(k, r) * (-1 if mirrored else 1)
    return DensityChoice(r, speed, speed - c, mirrored)


def _swap_halves(v: np.ndarray) -> np.ndarray:
    k = v.shape[0] // 2
    return np.concatenate([v[k:], v[:k]])


def mirror_spec(spec: CoinSpec) -> CoinSpec:
    """Reflect a coin: ``X C X``, ``X alpha'``, ``-X delta'``; speed flips sign."""
    k = spec.k
    perm = np.concatenate([np.arange(k, 2 * k), np.arange(0, k)])
    C = np.asarray(spec.C)[np.ix_(perm, perm)]
    alpha = _swap_halves(spec.alpha_prime)
    delta = -_swap_halves(spec.delta_prime)
    return CoinSpec(C, build_encoding(alpha, delta, k), -spec.c, k)


def tiled_spec(k: int, r: int, mirrored: bool = False) -> CoinSpec:
    """Tiled coin with its encoding; ``mirrored`` gives speed ``-r/(2k-r)``."""
    alpha, delta = tiled_vectors(k, r)
    spec = CoinSpec(tiled_coin(k, r), build_encoding(alpha, delta, k), speed_from_density(k, r), int(k))
    return mirror_spec(spec) if mirrored else spec


@dataclass(frozen=True)
class TileLayout:
    """Which wires carry signals, plus the permutation the tile induces."""

    k: int
    r: int
    signal_wires: tuple[int, ...]
    mirrored: bool = False

    @property
    def permutation(self) -> np.ndarray:
        perm = tiled_permutation(self.k, self.r)
        if not self.mirrored:
            return perm
        k = self.k
        flip = np.concatenate([np.arange(k, 2 * k), np.arange(0, k)])
        return flip[perm[flip]]

    def to_json(self) -> dict:
        return {"k": self.k, "r": self.r, "signal_wires": list(self.signal_wires)}


def tile_layout(k: int, r: int, mirrored: bool = False) -> TileLayout:
    k, r = _check_kr(k, r)
    wires = range(2 * k - r, 2 * k)
    if mirrored:
        wires = [(w + k) % (2 * k) for w in wires]
    return TileLayout(k, r, tuple(sorted(wires)), mirrored)


# --------------------------------------------------------------------------
# border perturbations for a varying, lightlike metric
# --------------------------------------------------------------------------
# A single chain of nearest-neighbour rotations runs through the shifted
# block: down the lower part (sector A, wires 2k-r-1 .. k) and on through the
# upper part (wires k-1 .. 0).  Upper pairs (t, t-1) are indexed by t:
# sector C for t < k-r, the junction D at t = k-r, sector B above it.

_FAMILIES: dict[str, Callable[[int, int, int], float]] = {
    # angle divided by (eps * m)
    "theta1": lambda t, k, r: -t,
    "theta2": lambda t, k, r: (r - k) / k * t,
    "theta3": lambda t, k, r: -(r - k) / k * (1 - k) * t,
    "theta4": lambda t, k, r: -((r - k) ** 2) / k,
}

ASSIGNMENTS: dict[str, dict[str, str]] = {
    # B keeps the printed theta3 family, indexed locally from 1
    "printed": {"A": "theta1", "B": "theta3", "C": "theta2", "D": "theta4"},
    # B continues the theta2 ramp, indexed by the global upper-pair index
    "continued": {"A": "theta1", "B": "theta2", "C": "theta2", "D": "theta4"},
    # families of B and C exchanged
    "swapped": {"A": "theta1", "B": "theta2", "C": "theta3", "D": "theta4"},
}


def perturbation_pairs(k: int, r: int, assignment: str | dict = "continued"):
    """Chain of ``(i, j, phi)``: rotation on wires ``(i, j)`` by ``eps * m * phi``."""
    k, r = _check_kr(k, r)
    table = ASSIGNMENTS[assignment] if isinstance(assignment, str) else dict(assignment)
    nb = 2 * k - r
    out = []
    for t in range(1, k - r + 1):
        out.append((nb - t, nb - t - 1, _FAMILIES[table["A"]](t, k, r)))
    for t in range(k - 1, 0, -1):
        if t < k - r:
            sector, tl = "C", t
        elif t == k - r:
            sector, tl = "D", t
        else:
            sector = "B"
            tl = t if table["B"] == "theta2" else t - (k - r)
        if sector == "C" and table["C"] == "theta3":
            tl = t
        out.append((t, t - 1, _FAMILIES[table[sector]](tl, k, r)))
    return out


def perturbation_generator(k: int, r: int, m: float, assignment: str | dict = "continued") -> np.ndarray:
    """Hermitian ``H`` with ``exp(i eps H) = perturbation_operator(...) + O(eps^2)``."""
    dim = 2 * int(k)
    A = np.zeros((dim, dim))
    for i, j, phi in perturbation_pairs(k, r, assignment):
        A[i, j] += m * phi
        A[j, i] -= m * phi
    return -1j * A


def perturbation_operator(k: int, r: int, m: float, eps: float,
                          assignment: str | dict = "continued") -> np.ndarray:
    """Product of 2x2 rotations ``[[cos, sin], [-sin, cos]]`` along the border chain."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    dim = 2 * int(k)
    P = np.eye(dim, dtype=np.complex128)
    for i, j, phi in perturbation_pairs(k, r, assignment):
        th = eps * m * phi
        cs, sn = np.cos(th), np.sin(th)
        ri, rj = P[i].copy(), P[j].copy()
        P[i] = cs * ri + sn * rj
        P[j] = -sn * ri + cs * rj
    return P


def leading_gamma1_vector(k: int, r: int, m: float) -> np.ndarray:
    """Leading-order (unprojected) ``Gamma_1`` of the unperturbed tiled coin.

    For a lightlike profile the border contributions of the finite
    differences cancel and what remains is ``-2 da/dx`` on the ``k``
    components fed by the right neighbour, with ``da/dx = m a / (1 + c)``.
    """
    k, r = _check_kr(k, r)
    nb = 2 * k - r
    a = 1.0 / np.sqrt(nb)
    c = r / nb
    g = np.zeros(2 * k, dtype=np.complex128)
    g[k - r:nb] = -2.0 * m * a / (1.0 + c)
    return g


def _gamma1_leading(k, r, m, assignment) -> float:
    spec_C = tiled_coin(k, r)
    a = tiled_alpha(k, r)
    H = perturbation_generator(k, r, m, assignment)
    g = leading_gamma1_vector(k, r, m) + 1j * spec_C @ H @ a
    return float(np.linalg.norm(g - np.vdot(a, g) * a))


def select_assignment(k: int, r: int) -> str:
    """Assignment with the smallest leading-order ``Gamma_1`` (first wins ties)."""
    scores = {name: _gamma1_leading(k, r, 1.0, name) for name in ASSIGNMENTS}
    return min(scores, key=lambda n: (scores[n] > min(scores.values()) + 1e-12, list(ASSIGNMENTS).index(n)))


def lightlike_gamma1(k: int, r: int, metric, eps: float, t: float = 0.0,
                     perturbed: bool = True, assignment: str | dict | None = None,
                     linearized: bool = False) -> float:
    """``||Gamma_1||`` of the tiled coin where the lightlike ``metric`` equals ``r/(2k-r)``.

    The finite differences use the regular part of the tiled family
    (amplitude ``a(c(t, x))`` on the ``2k - r`` shifted components); the
    border parts cancel identically for lightlike profiles.  With
    ``perturbed`` the first-order coin is ``C_1 = C_0 (P(eps) - I) / eps``
    with ``P`` the product of border rotations actually applied by the walk
    (``linearized=True`` uses its generator, ``C_1 = i C_0 H``, instead).
    """
    k, r = _check_kr(k, r)
    c0 = speed_from_density(k, r)
    x0 = metric.locate(c0, t)
    nb = 2 * k - r
    mask = np.zeros(2 * k)
    mask[:nb] = 1.0

    def regular(tt, xx):
        return np.sqrt((1.0 + metric.c(tt, xx)) / (2 * k)) * mask

    a0 = regular(t, x0)
    ap, am, at = regular(t, x0 + 2 * eps), regular(t, x0 - 2 * eps), regular(t + 2 * eps, x0)
    dt_plus = (at - a0) / (2 * eps)
    dx = (ap - am) / (4 * eps)
    mu = (ap + am - 2 * a0) / (4 * eps)
    spec = tiled_spec(k, r)
    C1 = None
    if perturbed:
        m = 0.5 * metric.dc_dx(t, x0)
        name = assignment if assignment is not None else select_assignment(k, r)
        if linearized:
            C1 = 1j * spec.C @ perturbation_generator(k, r, m, name)
        else:
            P = perturbation_operator(k, r, m, eps, name)
            C1 = spec.C @ (P - np.eye(2 * k)) / eps
    return gamma1_residual(spec, dt_plus, dx, mu, C1)


@dataclass(frozen=True)
class SignalField:
    """Signal count per coarse site."""

    r: np.ndarray
    k: int
    t_index: int = 0
    mirrored: np.ndarray | None = field(default=None)

    def __post_init__(self):
        r = np.asarray(self.r, dtype=int)
        if np.any(r < 0) or np.any(r > self.k):
            raise ValueError("signal counts must lie in [0, k]")
        object.__setattr__(self, "r", r)
        if self.mirrored is not None:
            object.__setattr__(self, "mirrored", np.asarray(self.mirrored, dtype=bool))

    @property
    def density(self) -> np.ndarray:
        return self.r / self.k

    def rows(self):
        """CSV rows ``(t_index, x_index, r)``."""
        return [(self.t_index, x, int(v)) for x, v in enumerate(self.r)]


def advect_signals(sig: SignalField) -> SignalField:
    """Move every signal one coarse site to the right (periodic)."""
    mir = None if sig.mirrored is None else np.roll(sig.mirrored, 1)
    return SignalField(np.roll(sig.r, 1), sig.k, sig.t_index + 1, mir)
