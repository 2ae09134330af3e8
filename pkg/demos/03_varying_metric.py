"""Varying speed and border rotations
===================================

For a lightlike profile ``c = 0.2 + 0.1 tanh(x - t)`` the tiled coin alone
leaves a first-order residual that does not shrink with ``eps``.  Adding
the border rotations makes it decrease linearly.  We then run the walk on
the same profile and compare with the characteristic solution.
"""
import numpy as np

from curvedwalk.analysis import gaussian, reference_solution
from curvedwalk.evolution import SimConfig, run
from curvedwalk.grouping import FineField
from curvedwalk.metric import MetricProfile
from curvedwalk.tiled import lightlike_gamma1

met = MetricProfile("lightlike", 0.2, 0.1, 0.0, 1.0)
print(" eps       no rotations   with rotations")
for eps in (1 / 16, 1 / 32, 1 / 64, 1 / 128):
    print(f" {eps:<9.5f} {lightlike_gamma1(5, 2, met, eps, perturbed=False):.3e}      "
          f"{lightlike_gamma1(5, 2, met, eps):.3e}")

# %% Walk against the reference solution.
met = MetricProfile("lightlike", 0.2, 0.1, 4.0, 1.0)
psi0 = gaussian(4.0, 0.5)
for scheme in ("tiled", "tiled+perturbation"):
    eps = 1 / 128
    cfg = SimConfig(k=5, n_cells=int(8 / (2 * eps)), steps=int(2 / (2 * eps)), eps=eps, scheme=scheme, metric=met)
    xs = cfg.x_min + cfg.spacing * np.arange(2 * cfg.k * cfg.n_cells)
    res = run(cfg, FineField(psi0(xs), cfg.spacing, cfg.x_min))
    ref = reference_solution(met, psi0, cfg.steps * cfg.pitch, period=8.0)(cfg.centers)
    err = np.linalg.norm(res.snapshots[-1].psi - ref) / np.linalg.norm(ref)
    print(f"{scheme:>20}: relative L2 error {err:.3e}")
