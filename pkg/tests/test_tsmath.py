"""Autocovariances, stationarity, partial autocorrelations, sample variance."""

import numpy as np
import pytest

from arr2 import tsmath
from arr2.dgp import AR_PROFILES, ArDgp, simulate_ar


def test_yule_walker_ar1_closed_form():
    gamma = tsmath.yule_walker(np.array([0.6]), 1.0, 3)
    assert gamma[0] == pytest.approx(1.0 / (1.0 - 0.36), rel=1e-12)
    assert gamma[1] == pytest.approx(0.6 * gamma[0], rel=1e-12)
    assert gamma[2] == pytest.approx(0.36 * gamma[0], rel=1e-12)


def test_yule_walker_white_noise():
    gamma = tsmath.yule_walker(np.array([0.0]), 2.0, 4)
    assert gamma[0] == pytest.approx(2.0)
    np.testing.assert_allclose(gamma[1:], 0.0, atol=1e-14)


def test_yule_walker_rejects_nonstationary():
    with pytest.raises(ValueError, match="root"):
        tsmath.yule_walker(np.array([1.01]), 1.0, 2)


def test_yule_walker_matches_long_simulation():
    phi = AR_PROFILES["oscillation"]
    gamma = tsmath.yule_walker(phi, 1.0, 8)
    data = simulate_ar(ArDgp(phi=phi, n_obs=2_000_000), np.random.default_rng(0))
    y = data.y
    emp = np.array([np.dot(y[: y.size - k], y[k:]) / (y.size - k) for k in range(9)])
    np.testing.assert_allclose(emp, gamma, rtol=0.02)


def test_yule_walker_recursion_invariant():
    rng = np.random.default_rng(1)
    for _ in range(20):
        phi = rng.uniform(-0.4, 0.4, size=4)
        if not tsmath.stationarity(phi).is_stationary:
            continue
        gamma = tsmath.yule_walker(phi, 1.3, 10)
        for h in range(1, 11):
            lhs = gamma[h]
            rhs = sum(phi[i] * gamma[abs(h - i - 1)] for i in range(4))
            assert abs(lhs - rhs) < 1e-10 * max(1.0, abs(lhs))


def test_yule_walker_round_trip_recovers_coefficients():
    phi = AR_PROFILES["minnesota"]
    gamma = tsmath.yule_walker(phi, 1.0, 8)
    toeplitz = np.array([[gamma[abs(i - j)] for j in range(8)] for i in range(8)])
    recovered = np.linalg.solve(toeplitz, gamma[1:9])
    np.testing.assert_allclose(recovered, phi, atol=1e-10)


def test_stationarity_simple_cases():
    rep = tsmath.stationarity(np.array([0.5]))
    assert rep.is_stationary
    assert rep.roots[0] == pytest.approx(2.0)
    assert rep.max_inverse_modulus == pytest.approx(0.5)

    boundary = tsmath.stationarity(np.array([1.0]))
    assert not boundary.is_stationary

    zero = tsmath.stationarity(np.zeros(3))
    assert zero.is_stationary
    assert zero.roots.size == 0
    assert zero.max_inverse_modulus == 0.0


def test_table_profiles_are_stationary():
    for name, phi in AR_PROFILES.items():
        rep = tsmath.stationarity(phi)
        assert rep.is_stationary, name
        # cross-check: a long simulated path stays bounded
        data = simulate_ar(ArDgp(phi=phi, n_obs=100_000), np.random.default_rng(3))
        assert np.all(np.isfinite(data.y))
        assert np.max(np.abs(data.y)) < 100


def test_stationarity_agrees_with_polynomial_roots():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        p = rng.integers(1, 6)
        phi = rng.uniform(-1.2, 1.2, size=p)
        rep = tsmath.stationarity(phi)
        # independent check: roots of 1 - phi_1 u - ... - phi_p u^p
        coefs = np.concatenate([[1.0], -phi])[::-1]
        if np.allclose(phi, 0.0):
            alt = True
        else:
            roots = np.roots(coefs)
            roots = roots[np.abs(roots) > 1e-10]
            alt = bool(np.all(np.abs(roots) > 1.0 + 1e-10)) if roots.size else True
        boundary_gap = abs(rep.max_inverse_modulus - 1.0)
        if boundary_gap > 1e-6:  # away from the boundary the two must agree
            assert rep.is_stationary == alt, phi


def test_periods_reported_for_complex_roots():
    rep = tsmath.stationarity(np.array([0.0, -0.25]))  # roots +-2i
    assert rep.is_stationary
    assert rep.periods.size == 2
    np.testing.assert_allclose(rep.periods, 4.0, rtol=1e-9)

    real_only = tsmath.stationarity(np.array([0.5]))
    assert real_only.periods.size == 0


def test_pacf_ar1_cutoff():
    gamma = tsmath.yule_walker(np.array([0.6]), 1.0, 5)
    pacf = tsmath.partial_autocorrelations(gamma)
    assert pacf[0] == pytest.approx(0.6, abs=1e-12)
    np.testing.assert_allclose(pacf[1:], 0.0, atol=1e-12)


def test_pacf_white_noise():
    pacf = tsmath.partial_autocorrelations(np.array([1.0, 0.0, 0.0, 0.0]))
    np.testing.assert_allclose(pacf, 0.0, atol=1e-14)


def test_pacf_ar8_cutoff():
    gamma = tsmath.yule_walker(AR_PROFILES["minnesota"], 1.0, 12)
    pacf = tsmath.partial_autocorrelations(gamma)
    np.testing.assert_allclose(pacf[8:], 0.0, atol=1e-10)
    assert abs(pacf[0]) > 0.1


def test_pacf_values_stay_in_unit_interval():
    rng = np.random.default_rng(11)
    for _ in range(50):
        phi = rng.uniform(-0.35, 0.35, size=5)
        if not tsmath.stationarity(phi).is_stationary:
            continue
        gamma = tsmath.yule_walker(phi, 1.0, 8)
        pacf = tsmath.partial_autocorrelations(gamma)
        assert np.all(np.abs(pacf) <= 1.0 + 1e-12)


def test_pacf_degenerate_raises():
    with pytest.raises(ValueError):
        tsmath.partial_autocorrelations(np.array([0.0, 0.0]))
    with pytest.raises(ValueError):
        tsmath.partial_autocorrelations(np.array([1.0, 1.0, 1.0, 1.0]))


def test_sample_variance_values():
    assert tsmath.sample_variance([0.0, 2.0]) == pytest.approx(2.0)
    assert tsmath.sample_variance([3.0, 3.0, 3.0]) == 0.0
    assert tsmath.sample_variance([1.0, 2.0, 3.0, 4.0]) == pytest.approx(5.0 / 3.0)
    with pytest.raises(ValueError):
        tsmath.sample_variance([1.0])
