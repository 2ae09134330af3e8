"""Time stepping of the encoded walk on the coarse lattice.

One step maps cell ``x`` to ``C(t, x) (P^+ Phi'(x - 1) + P^- Phi'(x + 1))``:
the upper ``k`` components arrive from the right neighbour and the lower
``k`` from the left one.  Boundaries are periodic.  Lattice pitch and time
step are both ``2 eps``.

Coins depend on ``(t, x)`` only through a key: the site for static
profiles, the diagonal ``x - t`` (in sites) for lightlike ones, and nothing
for constant ones.  Each distinct key is built once.

The lattice splits into two sublattices (parity of ``site + step``) that
never mix; both are evolved.
"""
from __future__ import annotations

import csv
import hashlib
import json
import logging
from dataclasses import asdict, dataclass, field

import numpy as np

from .conditions import CoinSpec, residual_report
from .fixed import FixedBuildOptions, build_fixed_coin
from .grouping import FineField, group
from .metric import MetricProfile
from .tiled import (
    DensityChoice,
    density_from_speed,
    speed_from_density,
    perturbation_operator,
    select_assignment,
    tiled_spec,
)

__all__ = [
    "ConfigurationError",
    "SCHEMES",
    "SimConfig",
    "EncodedLatticeState",
    "CoinField",
    "Snapshot",
    "SimResult",
    "walk_step",
    "encode_field",
    "readout",
    "run",
    "write_trajectory_csv",
]

log = logging.getLogger(__name__)

SCHEMES = ("fixed", "tiled", "tiled+perturbation")


class ConfigurationError(ValueError):
    """Simulation settings that cannot be honoured."""


@dataclass(frozen=True)
class SimConfig:
    """Everything that determines a run.

    ``x_min`` is the position of the first fine sample; fine spacing is
    ``eps / k``.  ``snapshot_every = 0`` keeps only the first and last state.
    """

    k: int
    n_cells: int
    steps: int
    eps: float
    scheme: str = "fixed"
    metric: MetricProfile = field(default_factory=MetricProfile)
    x_min: float = 0.0
    snapshot_every: int = 0
    assignment: str | None = None
    r: int | None = None  # uniform signal count for the tiled schemes; overrides the metric

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise ConfigurationError("k must be a positive integer")
        if self.n_cells < 2:
            raise ConfigurationError("need at least two cells")
        if self.steps < 0:
            raise ConfigurationError("steps must be nonnegative")
        if not self.eps > 0:
            raise ConfigurationError("eps must be positive")
        if self.scheme not in SCHEMES:
            raise ConfigurationError(f"unknown scheme {self.scheme!r}; expected one of {SCHEMES}")
        if self.scheme != "fixed" and not self.metric.is_lightlike:
            raise ConfigurationError("tiled schemes need a constant or lightlike metric profile")
        if self.r is not None:
            if self.scheme == "fixed":
                raise ConfigurationError("a signal count only applies to tiled schemes")
            if not 0 <= self.r <= self.k:
                raise ConfigurationError(f"r must lie in [0, {self.k}]")
            if self.metric.kind != "constant":
                raise ConfigurationError("a uniform signal count needs a constant metric")
        if self.snapshot_every < 0:
            raise ConfigurationError("snapshot_every must be nonnegative")

    @property
    def pitch(self) -> float:
        return 2.0 * self.eps

    @property
    def spacing(self) -> float:
        return self.eps / self.k

    @property
    def origin(self) -> float:
        """Centre of cell 0."""
        return self.x_min + (2 * self.k - 1) * self.spacing / 2.0

    @property
    def centers(self) -> np.ndarray:
        return self.origin + self.pitch * np.arange(self.n_cells)

    def to_json(self) -> dict:
        d = asdict(self)
        d["metric"] = self.metric.to_json()
        return d

    @classmethod
    def from_json(cls, d: dict) -> "SimConfig":
        d = dict(d)
        d["metric"] = MetricProfile.from_json(d.get("metric", {}))
        return cls(**d)

    def config_hash(self) -> str:
        blob = json.dumps(self.to_json(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


@dataclass
class EncodedLatticeState:
    """Encoded cells ``Phi'`` (shape ``(n_cells, 2k)``) after ``step`` steps."""

    cells: np.ndarray
    step: int = 0

    @property
    def k(self) -> int:
        return self.cells.shape[1] // 2


def walk_step(cells: np.ndarray, coins: np.ndarray) -> np.ndarray:
    """Shift then coin.  ``coins`` is ``(2k, 2k)`` or one per cell ``(n, 2k, 2k)``."""
    k = cells.shape[1] // 2
    shifted = np.empty_like(cells)
    shifted[:, :k] = np.roll(cells[:, :k], -1, axis=0)
    shifted[:, k:] = np.roll(cells[:, k:], 1, axis=0)
    if coins.ndim == 2:
        return shifted @ coins.T
    return np.einsum("xij,xj->xi", coins, shifted)


class CoinField:
    """Lazily built table of coins and encodings indexed by the key of ``(t, x)``."""

    def __init__(self, config: SimConfig):
        self.config = config
        self._cache: dict[int, tuple] = {}
        self._tiles: dict[tuple[int, bool], CoinSpec] = {}
        self.assignment = config.assignment

    def key(self, step: int) -> np.ndarray:
        n = self.config.n_cells
        m = self.config.metric
        if self.config.r is not None or m.kind == "constant" or m.dc == 0:
            return np.zeros(n, dtype=int)
        if m.kind == "static":
            return np.arange(n)
        return np.arange(n) - step

    def _point(self, key: int) -> tuple[float, float]:
        cfg = self.config
        return 0.0, cfg.origin + cfg.pitch * key

    def _build(self, key: int):
        cfg = self.config
        t, x = self._point(key)
        c = float(cfg.metric.c(t, x))
        if cfg.scheme == "fixed":
            spec = build_fixed_coin(FixedBuildOptions(cfg.k, c))
            return spec.C, spec, c, None
        if cfg.r is not None:
            choice = DensityChoice(cfg.r, speed_from_density(cfg.k, cfg.r), 0.0, False)
        else:
            choice = density_from_speed(cfg.k, c)
        tile = (choice.r, choice.mirrored)
        if tile not in self._tiles:
            self._tiles[tile] = tiled_spec(cfg.k, choice.r, choice.mirrored)
        spec = self._tiles[tile]
        C = spec.C
        if cfg.scheme == "tiled+perturbation":
            if choice.mirrored:
                raise ConfigurationError("border perturbations are only defined for c >= 0")
            m = 0.5 * float(cfg.metric.dc_dx(t, x))
            name = self.assignment or select_assignment(cfg.k, choice.r)
            C = C @ perturbation_operator(cfg.k, choice.r, m, cfg.eps, name)
        return C, spec, choice.speed, choice.r

    def entry(self, key: int):
        key = int(key)
        if key not in self._cache:
            self._cache[key] = self._build(key)
        return self._cache[key]

    def coins(self, step: int) -> np.ndarray:
        keys = self.key(step)
        uniq, inv = np.unique(keys, return_inverse=True)
        table = np.stack([self.entry(u)[0] for u in uniq])
        if uniq.size == 1:
            return table[0]
        return table[inv]

    def alphas(self, step: int) -> np.ndarray:
        return np.stack([self.entry(u)[1].alpha_prime for u in self.key(step)])

    def encodings(self, step: int) -> np.ndarray:
        return np.stack([self.entry(u)[1].encoding.E for u in self.key(step)])

    def realized_speeds(self, step: int = 0) -> np.ndarray:
        return np.array([self.entry(u)[2] for u in self.key(step)])

    def signal_counts(self, step: int = 0) -> np.ndarray | None:
        if self.config.scheme == "fixed":
            return None
        return np.array([self.entry(u)[3] for u in self.key(step)])

    def specs(self) -> list[CoinSpec]:
        """Distinct coin specs in use (one per tile for the tiled schemes)."""
        if self.config.scheme != "fixed":
            return [self._tiles[t] for t in sorted(self._tiles)]
        return [v[1] for _, v in sorted(self._cache.items())]


def encode_field(psi0: FineField, config: SimConfig, coins: CoinField) -> EncodedLatticeState:
    """``Phi'(0, x) = E(0, x) group(psi0)(x)``."""
    if psi0.samples.shape[0] != 2 * config.k * config.n_cells:
        raise ConfigurationError("initial field must have 2k * n_cells samples")
    cells = group(psi0, config.k).cells
    E = coins.encodings(0)
    return EncodedLatticeState(np.einsum("xij,xj->xi", E, cells), 0)


def readout(state: EncodedLatticeState, coins: CoinField) -> np.ndarray:
    """Continuum field at the cell centres: ``psi = <alpha'|Phi'>``."""
    a = coins.alphas(state.step)
    return np.einsum("xi,xi->x", a.conj(), state.cells)


@dataclass(frozen=True)
class Snapshot:
    step: int
    t: float
    psi: np.ndarray
    norm: float


@dataclass
class SimResult:
    config: SimConfig
    final: EncodedLatticeState
    snapshots: list[Snapshot]
    coins: CoinField

    @property
    def x(self) -> np.ndarray:
        return self.config.centers

    def metadata(self) -> dict:
        speeds = self.coins.realized_speeds(0)
        rec = [r for spec in self.coins.specs() for r in residual_report(spec)]
        worst: dict[str, float] = {}
        for r in rec:
            worst[r["condition"]] = max(worst.get(r["condition"], 0.0), r["residual"])
        meta = {
            "config_hash": self.config.config_hash(),
            "config": self.config.to_json(),
            "realized_speeds": {"min": float(speeds.min()), "max": float(speeds.max())},
            "residual_summary": worst,
            "norm_initial": self.snapshots[0].norm,
            "norm_final": self.snapshots[-1].norm,
        }
        sig = self.coins.signal_counts(0)
        if sig is not None:
            meta["signal_counts"] = {"min": int(sig.min()), "max": int(sig.max())}
        return meta


def _snap(state: EncodedLatticeState, cfg: SimConfig, coins: CoinField) -> Snapshot:
    psi = readout(state, coins)
    norm = float(np.sqrt(cfg.pitch * np.sum(np.abs(state.cells) ** 2)))
    return Snapshot(state.step, state.step * cfg.pitch, psi, norm)


def run(config: SimConfig, psi0: FineField, *, coins: CoinField | None = None) -> SimResult:
    """Evolve ``psi0`` for ``config.steps`` steps."""
    coins = coins or CoinField(config)
    state = encode_field(psi0, config, coins)
    snaps = [_snap(state, config, coins)]
    cells = state.cells
    every = config.snapshot_every
    for j in range(config.steps):
        cells = walk_step(cells, coins.coins(j))
        state = EncodedLatticeState(cells, j + 1)
        if (every and (j + 1) % every == 0) or j + 1 == config.steps:
            if snaps[-1].step != j + 1:
                snaps.append(_snap(state, config, coins))
    log.debug("run %s: %d steps, %d coins built", config.config_hash(), config.steps, len(coins._cache))
    return SimResult(config, state, snaps, coins)


def write_trajectory_csv(result: SimResult, path) -> None:
    """Rows ``t,x,re_psi,im_psi,prob`` for every snapshot."""
    x = result.x
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "x", "re_psi", "im_psi", "prob"])
        for s in result.snapshots:
            for xi, p in zip(x, s.psi):
                w.writerow([repr(float(s.t)), repr(float(xi)), repr(float(p.real)),
                            repr(float(p.imag)), repr(float(abs(p) ** 2))])
