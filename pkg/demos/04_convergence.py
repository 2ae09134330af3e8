"""Convergence order
=================

Walk-vs-reference error at a fixed horizon for a constant speed.
"""
from curvedwalk.analysis import convergence_order, gaussian
from curvedwalk.evolution import SimConfig
from curvedwalk.metric import MetricProfile

tmpl = SimConfig(k=5, n_cells=4, steps=0, eps=1.0, scheme="tiled", metric=MetricProfile("constant", 0.25))
res = convergence_order(tmpl, [1 / 64, 1 / 128, 1 / 256], length=8.0, horizon=2.0, psi0=gaussian(4.0, 0.5))
for e, err in zip(res.eps, res.errors):
    print(f"eps = {e:.6f}  error = {err:.3e}")
print(f"slope {res.slope:.3f}, R^2 {res.r_squared:.5f}")
