"""Reference continuum solutions, observables and convergence sweeps.

The reference equation is ``dt psi = c dx psi + (dx c / 2) psi``.  With
``c > 0`` profiles travel toward ``-x``; :attr:`Observables.fitted_velocity`
therefore reports the transport speed ``-d<x>/dt`` so that it can be
compared with ``c`` directly.
"""
from __future__ import annotations

import csv
import json
import os
import warnings
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .evolution import SimConfig, run
from .grouping import FineField
from .metric import MetricProfile

__all__ = [
    "Observables",
    "ConvergenceResult",
    "ConvergenceWarning",
    "reference_solution",
    "gaussian",
    "gaussian_packet",
    "measure",
    "fit_velocity",
    "track",
    "convergence_order",
    "fit_loglog",
    "write_convergence_report",
    "worker_count",
]


def worker_count(default: int = 1) -> int:
    """Worker cap from ``CURVEDWALK_THREADS`` (at least 1)."""
    raw = os.environ.get("CURVEDWALK_THREADS")
    if raw is None:
        return default
    try:
        return max(1, int(raw))
    except ValueError:
        return default


def gaussian(x0: float, sigma: float, k0: float = 0.0) -> Callable[[np.ndarray], np.ndarray]:
    """Unnormalised ``exp(-(x - x0)^2 / (4 sigma^2) + i k0 x)``."""
    if not sigma > 0:
        raise ValueError("sigma must be positive")

    def f(x):
        x = np.asarray(x, dtype=float)
        return np.exp(-((x - x0) ** 2) / (4 * sigma**2) + 1j * k0 * x)

    return f


def gaussian_packet(x0: float, sigma: float, k0: float = 0.0, *, size: int,
                    spacing: float = 1.0, origin: float = 0.0) -> FineField:
    """Gaussian samples on ``origin + spacing * i``, unit lattice norm."""
    if not np.isfinite(sigma) or sigma > 1e12:
        raise ValueError("sigma must be finite (use a constant field instead)")
    x = origin + spacing * np.arange(size)
    psi = gaussian(x0, sigma, k0)(x)
    nrm = np.sqrt(spacing * np.sum(np.abs(psi) ** 2))
    return FineField(psi / nrm, spacing, origin)


def _rk4_backward(metric: MetricProfile, t: float, x: np.ndarray, n: int):
    """Characteristic foot ``X(0)`` and ``int_0^t dx c / 2`` from ``(t, x)``."""
    h = t / n
    X = np.array(x, dtype=float)
    A = np.zeros_like(X)

    def rhs(s, X):
        # derivative with respect to backward time u = t - s
        return metric.c(s, X), -0.5 * metric.dc_dx(s, X)

    s = t
    for _ in range(n):
        k1x, k1a = rhs(s, X)
        k2x, k2a = rhs(s - h / 2, X + h / 2 * k1x)
        k3x, k3a = rhs(s - h / 2, X + h / 2 * k2x)
        k4x, k4a = rhs(s - h, X + h * k3x)
        X = X + h / 6 * (k1x + 2 * k2x + 2 * k3x + k4x)
        A = A + h / 6 * (k1a + 2 * k2a + 2 * k3a + k4a)
        s -= h
    return X, -A


def reference_solution(metric: MetricProfile, psi0: Callable, t: float, *,
                       period: float | None = None, x_min: float = 0.0,
                       steps: int = 1024, tol: float = 1e-8, max_refine: int = 8):
    """``x -> psi(t, x)`` solving the transport equation by characteristics.

    Characteristics obey ``dX/ds = -c(s, X)``; the amplitude picks up
    ``exp(1/2 int dx c ds)``.  RK4 steps start at ``t / steps`` and are halved
    until two successive answers agree to ``tol``.  With ``period`` the
    initial data is evaluated periodically on ``[x_min, x_min + period)``.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")

    def wrap(X):
        if period is None:
            return X
        return x_min + np.mod(X - x_min, period)

    if metric.kind == "constant" or metric.dc == 0 or t == 0:
        c0 = metric.c0

        def const(x):
            x = np.asarray(x, dtype=float)
            return np.asarray(psi0(wrap(x + c0 * t)), dtype=np.complex128)

        return const

    def solve(x):
        x = np.asarray(x, dtype=float)
        n = steps
        X, A = _rk4_backward(metric, t, x, n)
        val = psi0(wrap(X)) * np.exp(A)
        for _ in range(max_refine):
            n *= 2
            X2, A2 = _rk4_backward(metric, t, x, n)
            val2 = psi0(wrap(X2)) * np.exp(A2)
            err = np.max(np.abs(val2 - val), initial=0.0)
            val = val2
            if err <= tol:
                break
        return np.asarray(val, dtype=np.complex128)

    return solve


@dataclass(frozen=True)
class Observables:
    norm: float
    mean_position: float
    l2_error: float | None = None
    fitted_velocity: float | None = None


def measure(psi, x, weight: float = 1.0, reference=None) -> Observables:
    """Norm (``weight * sum |psi|^2``), mean position and relative L2 error."""
    psi = np.asarray(psi, dtype=np.complex128)
    x = np.asarray(x, dtype=float)
    p = np.abs(psi) ** 2
    total = float(np.sum(p))
    if total == 0.0:
        raise ValueError("mean position undefined for a zero field")
    err = None
    if reference is not None:
        ref = np.asarray(reference, dtype=np.complex128)
        err = float(np.linalg.norm(psi - ref) / np.linalg.norm(ref))
    return Observables(weight * total, float(np.sum(x * p) / total), err)


def fit_velocity(times, means, discard: float = 0.1) -> float:
    """Transport speed ``-slope`` of a least-squares line through ``means(times)``.

    The first ``discard`` fraction of the samples is dropped.
    """
    times = np.asarray(times, dtype=float)
    means = np.asarray(means, dtype=float)
    start = int(np.floor(discard * len(times)))
    tt, mm = times[start:], means[start:]
    if tt.size < 2:
        raise ValueError("need at least two samples after the discarded transient")
    slope = np.polyfit(tt, mm, 1)[0]
    return float(-slope)


def track(result) -> tuple[np.ndarray, np.ndarray, Observables]:
    """Mean positions of every snapshot and the fitted velocity."""
    x = result.x
    w = result.config.pitch
    times = np.array([s.t for s in result.snapshots])
    means = np.array([measure(s.psi, x, w).mean_position for s in result.snapshots])
    last = measure(result.snapshots[-1].psi, x, w)
    obs = replace(last, fitted_velocity=fit_velocity(times, means))
    return times, means, obs


class ConvergenceWarning(UserWarning):
    pass


@dataclass(frozen=True)
class ConvergenceResult:
    eps: tuple[float, ...]
    errors: tuple[float, ...]
    slope: float
    r_squared: float
    monotone: bool
    good_fit: bool

    def to_json(self) -> dict:
        return {"slope": self.slope, "r_squared": self.r_squared,
                "monotone": self.monotone, "good_fit": self.good_fit}


def fit_loglog(eps: Sequence[float], errors: Sequence[float]) -> tuple[float, float]:
    """Least-squares slope of ``log(error)`` against ``log(eps)`` and its ``R^2``."""
    le, lr = np.log(np.asarray(eps, dtype=float)), np.log(np.asarray(errors, dtype=float))
    slope, icpt = np.polyfit(le, lr, 1)
    pred = slope * le + icpt
    ss_res = float(np.sum((lr - pred) ** 2))
    ss_tot = float(np.sum((lr - lr.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 0.0
    return float(slope), float(r2)


def _one_error(template: SimConfig, eps: float, length: float, horizon: float, psi0, ref_kwargs):
    n_cells = int(round(length / (2 * eps)))
    steps = int(round(horizon / (2 * eps)))
    if abs(n_cells * 2 * eps - length) > 1e-9 * length or abs(steps * 2 * eps - horizon) > 1e-9 * max(horizon, 1):
        raise ValueError(f"eps={eps!r} does not divide the domain length and horizon into whole steps")
    cfg = replace(template, eps=eps, n_cells=n_cells, steps=steps, snapshot_every=0)
    spacing = eps / cfg.k
    xs = cfg.x_min + spacing * np.arange(2 * cfg.k * n_cells)
    field = FineField(psi0(xs), spacing, cfg.x_min)
    res = run(cfg, field)
    t_end = steps * 2 * eps
    ref = reference_solution(cfg.metric, psi0, t_end, period=length, x_min=cfg.x_min, **ref_kwargs)(cfg.centers)
    return float(np.linalg.norm(res.snapshots[-1].psi - ref) / np.linalg.norm(ref))


def convergence_order(template: SimConfig, eps_list: Sequence[float], *, length: float,
                      horizon: float, psi0: Callable, workers: int | None = None,
                      ref_kwargs: dict | None = None) -> ConvergenceResult:
    """Walk-vs-reference relative L2 error at ``horizon`` for each ``eps``.

    The domain ``[template.x_min, template.x_min + length)`` is periodic and
    the cell count scales as ``1/eps``.  Non-monotone errors or a poor fit
    emit :class:`ConvergenceWarning` and clear ``good_fit``.
    """
    eps_list = [float(e) for e in eps_list]
    if len(eps_list) < 3:
        raise ValueError("need at least three eps values")
    if any(e <= 0 for e in eps_list) or any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise ValueError("eps values must be positive and decreasing")
    ref_kwargs = ref_kwargs or {}
    workers = workers or worker_count()
    with ThreadPoolExecutor(max_workers=workers) as pool:
        errors = list(pool.map(lambda e: _one_error(template, e, length, horizon, psi0, ref_kwargs), eps_list))
    floor = 1e-12
    if min(errors) <= floor:
        errs = [max(e, floor) for e in errors]
    else:
        errs = errors
    slope, r2 = fit_loglog(eps_list, errs)
    monotone = all(b < a for a, b in zip(errors, errors[1:]))
    good = monotone and r2 >= 0.9 and min(errors) > floor
    if not good:
        warnings.warn(f"convergence fit is unreliable (monotone={monotone}, r2={r2:.3f})",
                      ConvergenceWarning, stacklevel=2)
    return ConvergenceResult(tuple(eps_list), tuple(errors), slope, r2, monotone, good)


def write_convergence_report(result: ConvergenceResult, out_dir) -> None:
    """``convergence.csv`` (``eps,l2_error``) and ``convergence.json``."""
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "convergence.csv"), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["eps", "l2_error"])
        for e, err in zip(result.eps, result.errors):
            w.writerow([repr(e), repr(err)])
    with open(os.path.join(out_dir, "convergence.json"), "w") as fh:
        json.dump(result.to_json(), fh, indent=2, sort_keys=True)
        fh.write("\n")
