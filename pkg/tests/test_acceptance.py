"""Acceptance criteria, one test per criterion.

Tolerances are the contract values; runtimes are asserted as well.
"""
import time

import numpy as np
import pytest

from conftest import random_unitary_with_fixed_space, search_realizable_speeds
from curvedwalk.analysis import convergence_order, gaussian, gaussian_packet, track
from curvedwalk.conditions import (
    check_first_fixed,
    check_norm_constraint,
    check_zeroth,
    finite_difference_terms,
    gamma2_residual,
    speed_candidates,
    speed_of,
)
from curvedwalk.evolution import SimConfig, run
from curvedwalk.fixed import FixedBuildOptions, build_fixed_coin, build_pm_coexistence_coin
from curvedwalk.grouping import FineField
from curvedwalk.linalg import eig_subspace, is_unitary
from curvedwalk.metric import MetricProfile
from curvedwalk.tiled import density_from_speed, lightlike_gamma1, tiled_alpha, tiled_coin, tiled_vectors
from curvedwalk.conditions import CoinSpec
from curvedwalk.grouping import build_encoding

TOL = 1e-10


def _suite(spec):
    return [
        check_zeroth(spec.C, spec.alpha_prime),
        check_first_fixed(spec),
        check_norm_constraint(spec.alpha_prime, spec.delta_prime),
        gamma2_residual(spec),
    ]


def test_criterion_1_tiled_condition_suite():
    t0 = time.perf_counter()
    worst = 0.0
    for k in (1, 2, 4, 8, 16):
        for r in range(k + 1):
            a, d = tiled_vectors(k, r)
            spec = CoinSpec(tiled_coin(k, r), build_encoding(a, d, k), r / (2 * k - r), k)
            worst = max(worst, *_suite(spec))
    assert worst <= TOL
    assert time.perf_counter() - t0 < 10


def test_criterion_2_fixed_builder_suite():
    t0 = time.perf_counter()
    for c in (-0.9, -0.5, 0.0, 0.3, 0.7, 1.0):
        for k in (1, 2, 4, 8):
            for seed in range(20):
                spec = build_fixed_coin(FixedBuildOptions(k, c, seed=seed))
                assert max(_suite(spec)) <= TOL, (c, k, seed)
                assert abs(speed_of(spec.alpha_prime) - c) <= 1e-12
    assert time.perf_counter() - t0 < 30


def test_criterion_3_speed_count_bound():
    t0 = time.perf_counter()
    rng = np.random.default_rng(20240)
    hits = 0
    for dim in (4, 8):
        for _ in range(100):
            C = random_unitary_with_fixed_space(dim, int(rng.integers(1, dim)), rng)
            cands = speed_candidates(C)
            assert len(cands) <= len(eig_subspace(C, 1.0))
            for c in search_realizable_speeds(C, rng, starts=8):
                hits += 1
                assert min(abs(c - x) for x in cands) <= 1e-8
    assert hits > 0
    assert time.perf_counter() - t0 < 120




def test_criterion_4_measured_speed():
    t0 = time.perf_counter()
    for k, r in [(5, 2), (3, 1), (4, 4), (8, 3)]:
        c = r / (2 * k - r)
        cfg = SimConfig(k=k, n_cells=1024, steps=256, eps=0.5, scheme="tiled", r=r, snapshot_every=1)
        psi0 = gaussian_packet(cfg.centers[700], 32 * cfg.pitch, size=2 * k * 1024,
                               spacing=cfg.spacing, origin=cfg.x_min)
        _, _, obs = track(run(cfg, psi0))
        assert abs(obs.fitted_velocity - c) <= 0.02 * c, (k, r, obs.fitted_velocity)
    assert time.perf_counter() - t0 < 60


def test_criterion_5_convergence_order():
    t0 = time.perf_counter()
    tmpl = SimConfig(k=5, n_cells=4, steps=0, eps=1.0, scheme="tiled", metric=MetricProfile("constant", 0.25))
    res = convergence_order(tmpl, [1 / 64, 1 / 128, 1 / 256], length=8.0, horizon=2.0, psi0=gaussian(4.0, 0.5))
    assert res.monotone
    assert res.slope >= 0.8, res
    assert time.perf_counter() - t0 < 300


def test_criterion_6_extra_terms():
    t0 = time.perf_counter()
    met = MetricProfile("lightlike", 0.2, 0.1, 0.0, 1.0)
    k = 2**16
    t, x = 0.0, 0.3
    c, cx = float(met.c(t, x)), float(met.dc_dx(t, x))

    def family(tt, xx):
        return tiled_alpha(k, density_from_speed(k, float(met.c(tt, xx))).r)

    T = finite_difference_terms(family, t, x, 1 / 128)
    targets = {"s": -cx / (2 * (1 + c)), "n": cx / (2 * (1 + c)), "m": cx / 2}
    for name, want in targets.items():
        got = getattr(T, name).real
        assert abs(got - want) <= 0.05 * abs(want), (name, got, want)
    tot = (T.m + T.n + T.s).real
    assert abs(tot - cx / 2) <= 0.05 * cx / 2
    assert time.perf_counter() - t0 < 60


def test_criterion_7_perturbation_fix():
    t0 = time.perf_counter()
    met = MetricProfile("lightlike", 0.2, 0.1, 0.0, 1.0)
    on = [lightlike_gamma1(5, 2, met, e) for e in (1 / 32, 1 / 64, 1 / 128)]
    off = [lightlike_gamma1(5, 2, met, e, perturbed=False) for e in (1 / 32, 1 / 64, 1 / 128)]
    for a, b in zip(on, on[1:]):
        assert 0.9 * 2 <= a / b <= 1.1 * 2, on
    for a, b in zip(off, off[1:]):
        assert b >= a, off
    assert time.perf_counter() - t0 < 60


def test_criterion_8_unitarity_and_causality():
    t0 = time.perf_counter()
    # norm drift over 1e4 steps, varying metric with perturbations
    met = MetricProfile("lightlike", 0.2, 0.1, 16.0, 4.0)
    cfg = SimConfig(k=3, n_cells=64, steps=10_000, eps=0.5, scheme="tiled+perturbation", metric=met)
    psi0 = gaussian_packet(cfg.centers[32], 4 * cfg.pitch, size=6 * 64, spacing=cfg.spacing, origin=cfg.x_min)
    res = run(cfg, psi0)
    assert abs(res.snapshots[-1].norm - res.snapshots[0].norm) <= 1e-8

    # light cone and sublattices, with a generic fixed coin
    spec = build_fixed_coin(FixedBuildOptions(2, 0.3, seed=4))
    n = 64
    cells = np.zeros((n, 4), dtype=complex)
    cells[n // 2] = np.array([0.3, 0.1j, -0.5, 0.2])
    from curvedwalk.evolution import walk_step

    for j in range(1, 25):
        cells = walk_step(cells, spec.C)
        support = np.flatnonzero(np.linalg.norm(cells, axis=1) > 0)
        assert support.min() >= n // 2 - j and support.max() <= n // 2 + j
        # only sites with site + step of the initial parity are ever occupied
        assert np.all((support - n // 2 + j) % 2 == 0)
    assert time.perf_counter() - t0 < 120


def test_criterion_9_plus_minus_coexistence():
    t0 = time.perf_counter()
    for k in (1, 2, 3, 5):
        C, specs = build_pm_coexistence_coin(k, seed=k)
        assert is_unitary(C)
        for spec, c in zip(specs, (1.0, -1.0)):
            assert spec.c == c and abs(speed_of(spec.alpha_prime) - c) <= 1e-12
            assert max(_suite(spec)) <= TOL
    assert time.perf_counter() - t0 < 1
