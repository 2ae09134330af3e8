import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvedwalk.conditions import (
    CoinSpec,
    check_first_fixed,
    check_norm_constraint,
    check_zeroth,
    finite_difference_terms,
    gamma1_residual,
    gamma2_residual,
    residual_report,
    speed_candidates,
    speed_of,
    z_diag,
)
from curvedwalk.fixed import FixedBuildOptions, build_fixed_coin
from curvedwalk.grouping import alpha_vector, build_encoding, delta_norm_sq
from curvedwalk.tiled import tiled_coin, tiled_spec, tiled_alpha


def test_speed_of_examples():
    e0 = np.array([1, 0])
    assert speed_of(e0) == 1.0
    assert abs(speed_of(alpha_vector(3))) < 1e-15
    assert np.isclose(speed_of(tiled_alpha(5, 2)), 0.25, atol=1e-15)
    with pytest.raises(ValueError):
        speed_of(np.array([1.0, 1.0]))


def test_check_zeroth_examples():
    a = tiled_alpha(5, 2)
    assert check_zeroth(np.eye(10), a) == 0.0
    assert check_zeroth(tiled_coin(5, 2), a) <= 1e-14
    assert np.isclose(check_zeroth(tiled_coin(1, 0), np.array([1, 0])), np.sqrt(2))


def test_check_first_fixed_identity_is_positive():
    spec = build_fixed_coin(FixedBuildOptions(2, 0.4))
    bad = CoinSpec(np.eye(4), spec.encoding, 0.4, 2)
    z = z_diag(4)
    expected = 2 * np.linalg.norm(z * spec.alpha_prime - 0.4 * spec.alpha_prime)
    assert np.isclose(check_first_fixed(bad), expected)
    assert expected > 0


def test_norm_constraint_hand_example():
    a = np.array([1, 0], dtype=complex)
    d = -np.array([0, 1], dtype=complex) * np.sqrt(delta_norm_sq(1))
    assert check_norm_constraint(a, d) == 0.0


def test_norm_constraint_negative_control(rng):
    a = rng.standard_normal(6) + 1j * rng.standard_normal(6)
    a /= np.linalg.norm(a)
    d = rng.standard_normal(6) + 0j
    assert check_norm_constraint(a, d) > 1e-6


def test_speed_candidates_examples():
    assert speed_candidates(np.eye(2)) == [-1.0, 1.0]
    assert np.allclose(speed_candidates(tiled_coin(1, 0)), [0.0], atol=1e-12)
    assert any(abs(c - 0.25) < 1e-8 for c in speed_candidates(tiled_coin(5, 2)))
    assert speed_candidates(np.array([[0, 1], [-1, 0]], dtype=complex)) == []


def test_speed_candidates_unrestricted_flag():
    C = tiled_coin(3, 1)
    r = speed_candidates(C)
    u = speed_candidates(C, restricted=False)
    # the product P Z has the same nonzero spectrum plus zeros
    assert all(any(abs(x - y) < 1e-8 for y in u) for x in r if abs(x) > 1e-8)


def test_gamma2_tiled_fixed_and_negative_control():
    for k, r in [(1, 0), (3, 1), (5, 2), (4, 4)]:
        assert gamma2_residual(tiled_spec(k, r)) <= 1e-10
    spec = build_fixed_coin(FixedBuildOptions(3, 0.3))
    assert gamma2_residual(spec) <= 1e-10
    flipped = CoinSpec(spec.C, build_encoding(spec.alpha_prime, -spec.delta_prime, 3), spec.c, 3)
    assert gamma2_residual(flipped) > 1e-3


def test_gamma1_fixed_speed_case_is_zero():
    spec = tiled_spec(5, 2)
    z = np.zeros(10)
    assert gamma1_residual(spec, z, z, z) == 0.0


def test_finite_difference_terms_constant_family():
    spec = tiled_spec(4, 1)
    T = finite_difference_terms(lambda t, x: spec.encoding, 0.0, 0.0, 0.01)
    assert T.m == 0 and T.n == 0 and T.s == 0
    with pytest.raises(ValueError):
        finite_difference_terms(lambda t, x: spec.encoding, 0.0, 0.0, 0.0)


def _smooth_fixed_family(k):
    def fam(t, x):
        return build_fixed_coin(FixedBuildOptions(k, 0.2 + 0.1 * np.tanh(x - t))).encoding
    return fam


@settings(max_examples=10, deadline=None)
@given(st.sampled_from([1, 2, 3]), st.floats(-2, 2))
def test_n_plus_conjugate_vanishes_at_first_order(k, x):
    fam = _smooth_fixed_family(k)
    vals = []
    for eps in (1e-2, 5e-3):
        T = finite_difference_terms(fam, 0.0, x, eps)
        vals.append(abs(T.n + np.conj(T.n)))
    # O(eps): halving eps halves it (or it is already at rounding level)
    assert vals[1] <= 0.6 * vals[0] + 1e-9


def test_residual_report_shape():
    rows = residual_report(tiled_spec(2, 1), label=1)
    assert {r["condition"] for r in rows} == {"zeroth", "first_fixed", "norm_constraint", "gamma2"}
    assert all(r["k"] == 2 and r["r_or_c"] == 1 for r in rows)
