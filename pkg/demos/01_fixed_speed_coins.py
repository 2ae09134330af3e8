"""Fixed-speed coins
=================

Build coins for a handful of speeds, explore the free parameter ``Im f``
and check that a single coin can host several speeds at once.
"""
import numpy as np

from curvedwalk.conditions import residual_report, speed_candidates, speed_of
from curvedwalk.fixed import FixedBuildOptions, build_fixed_coin, build_multispeed_coin, f_interval

# %% One coin per speed.  Every residual should sit at rounding level.
for c in (-0.7, 0.0, 0.3, 1.0):
    spec = build_fixed_coin(FixedBuildOptions(k=2, c=c))
    worst = max(r["residual"] for r in residual_report(spec))
    print(f"c = {c:+.2f}  speed_of(alpha') = {speed_of(spec.alpha_prime):+.12f}  worst residual {worst:.1e}")

# %% Im f ranges over [-f_tilde, f_tilde]; each value gives a different coin.
re_f, f_tilde = f_interval(3, 0.4)
print(f"\nk=3, c=0.4: Re f = {re_f:.4f}, |Im f| <= {f_tilde:.4f}")
for frac in (-1.0, 0.0, 0.5, 1.0):
    spec = build_fixed_coin(FixedBuildOptions(3, 0.4, im_f=frac * f_tilde))
    print(f"  Im f = {frac * f_tilde:+.4f}: candidates {np.round(speed_candidates(spec.C), 4)}")

# %% Two speeds in one coin.
C, encodings = build_multispeed_coin([(0.25, 2), (-0.5, 2)])
print("\nmultispeed coin candidates:", np.round(speed_candidates(C), 6))
for enc in encodings:
    print("  encoded speed", round(speed_of(enc.alpha_prime), 12))
