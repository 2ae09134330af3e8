"""Tiled coins from two gates
===========================

A tile with ``r`` signals realises ``c = r / (2k - r)``.  Here we list the
reachable speeds for a small tile and measure one of them by simulation.
"""
from curvedwalk.analysis import gaussian_packet, track
from curvedwalk.evolution import SimConfig, run
from curvedwalk.tiled import density_from_speed, speed_from_density, tile_layout

k = 5
print("reachable speeds for k = 5:", [round(speed_from_density(k, r), 4) for r in range(k + 1)])
print("closest tile to c = 0.3:", density_from_speed(k, 0.3))
print("layout for r = 2:", tile_layout(k, 2).to_json())

# %% Measure the propagation speed of a Gaussian packet.
cfg = SimConfig(k=k, n_cells=1024, steps=256, eps=0.5, scheme="tiled", r=2, snapshot_every=1)
psi0 = gaussian_packet(cfg.centers[700], 32 * cfg.pitch, size=2 * k * cfg.n_cells,
                       spacing=cfg.spacing, origin=cfg.x_min)
times, means, obs = track(run(cfg, psi0))
print(f"fitted velocity {obs.fitted_velocity:.6f} (expected {speed_from_density(k, 2)})")
