"""Speed profiles ``c(t, x)`` of ``ds^2 = g(dt^2 - dx^2/c^2)`` metrics."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["MetricProfile", "SPEED_MARGIN"]

SPEED_MARGIN = 1e-9

_KINDS = ("constant", "lightlike", "static")


@dataclass(frozen=True)
class MetricProfile:
    """``c = c0`` (``constant``) or ``c0 + dc * tanh((u - x0)/width)``.

    For ``lightlike`` the argument is ``u = x - t`` (the profile moves
    rightward at unit speed); for ``static`` it is ``u = x``.
    """

    kind: str = "constant"
    c0: float = 0.0
    dc: float = 0.0
    x0: float = 0.0
    width: float = 1.0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown metric kind {self.kind!r}; expected one of {_KINDS}")
        if not self.width > 0:
            raise ValueError("width must be positive")
        bound = abs(self.c0) + (0.0 if self.kind == "constant" else abs(self.dc))
        if bound > 1.0 - SPEED_MARGIN:
            raise ValueError(f"max |c| = {bound!r} must stay below 1")

    @property
    def is_lightlike(self) -> bool:
        return self.kind == "constant" or self.kind == "lightlike" or self.dc == 0

    def _u(self, t, x):
        t = np.asarray(t, dtype=float)
        x = np.asarray(x, dtype=float)
        return (x - t if self.kind == "lightlike" else x) - self.x0

    def c(self, t, x):
        if self.kind == "constant":
            return np.full(np.broadcast(np.asarray(t), np.asarray(x)).shape, self.c0)[()]
        return (self.c0 + self.dc * np.tanh(self._u(t, x) / self.width))[()]

    def dc_dx(self, t, x):
        if self.kind == "constant":
            return np.zeros(np.broadcast(np.asarray(t), np.asarray(x)).shape)[()]
        e = np.exp(-2.0 * np.abs(self._u(t, x) / self.width))
        # sech^2 without overflow
        return (self.dc / self.width * 4.0 * e / (1.0 + e) ** 2)[()]

    def dc_dt(self, t, x):
        if self.kind == "lightlike":
            return -self.dc_dx(t, x)
        return np.zeros(np.broadcast(np.asarray(t), np.asarray(x)).shape)[()]

    def locate(self, value: float, t: float = 0.0) -> float:
        """Position ``x`` where ``c(t, x) == value`` (non-constant profiles only)."""
        if self.kind == "constant" or self.dc == 0:
            raise ValueError("a constant profile has no unique location")
        z = (value - self.c0) / self.dc
        if not -1.0 < z < 1.0:
            raise ValueError(f"speed {value!r} is not attained by this profile")
        u = self.width * np.arctanh(z) + self.x0
        return float(u + t if self.kind == "lightlike" else u)

    def to_json(self) -> dict:
        return {"kind": self.kind, "c0": self.c0, "dc": self.dc, "x0": self.x0, "width": self.width}

    @classmethod
    def from_json(cls, d: dict) -> "MetricProfile":
        return cls(**{k: d[k] for k in ("kind", "c0", "dc", "x0", "width") if k in d})
