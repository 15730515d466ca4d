"""Constrained/unconstrained transform round trips and Jacobians."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from arr2 import ModelSpec, TimeSeriesData
from arr2.priors import Arr2Config, GaussianConfig, MinnesotaConfig, RhsConfig
from arr2.inference.transforms import TransformMap, _stick_forward, _stick_inverse


def _tmap(spec, n=40, m=0, seed=0):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, m)) if m else None
    data = TimeSeriesData(rng.standard_normal(n), x)
    return TransformMap(spec, n, data.stats())


def test_unit_interval_block_values():
    # AR(1) layout: phi (1), psi (1-simplex, no free coordinate), r2, sigma
    tmap = _tmap(ModelSpec("ar", p=1, prior=Arr2Config()))
    assert tmap.dim == 3
    params, logj = tmap.constrain(np.zeros(3))
    assert params["r2"] == pytest.approx(0.5)  # logit 0 -> 0.5
    assert params["sigma"] == pytest.approx(1.0)
    np.testing.assert_allclose(params["psi"], [1.0])
    u2, logj2 = tmap.unconstrain(params)
    np.testing.assert_allclose(u2, 0.0, atol=1e-12)
    assert logj == pytest.approx(logj2)
    # r2 at 0.5 contributes the logistic derivative log(1/4), sigma=1 adds 0,
    # and the whitened phi block adds log of its prior sd
    sd_phi = math.sqrt(1.0 / tmap.stats.var_y * 1.0 * 1.0)  # tau2=1 at r2=0.5
    assert logj == pytest.approx(math.log(0.25) + math.log(sd_phi))


def test_positive_block_jacobian():
    tmap = _tmap(ModelSpec("ar", p=1, prior=GaussianConfig()))
    params, logj = tmap.constrain(np.array([0.3, math.log(2.0)]))
    assert params["sigma"] == pytest.approx(2.0)
    assert logj == pytest.approx(math.log(2.0))
    u, logj2 = tmap.unconstrain({"phi": np.array([0.3]), "sigma": 2.0})
    assert u[1] == pytest.approx(math.log(2.0))
    assert logj2 == pytest.approx(math.log(2.0))


def test_simplex_round_trip_exact():
    psi = np.array([1 / 3, 1 / 3, 1 / 3])
    seg, _ = _stick_inverse(psi)
    back, _ = _stick_forward(seg, 3)
    np.testing.assert_allclose(back, psi, atol=1e-14)
    assert back.sum() == pytest.approx(1.0, abs=1e-15)


def test_simplex_uniform_at_zero():
    psi, _ = _stick_forward(np.zeros(3), 4)
    np.testing.assert_allclose(psi, 0.25, atol=1e-14)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(min_value=0.01, max_value=10.0), min_size=2, max_size=8))
def test_simplex_round_trip_random(weights):
    psi = np.asarray(weights) / np.sum(weights)
    seg, lj = _stick_inverse(psi)
    back, lj2 = _stick_forward(seg, psi.size)
    np.testing.assert_allclose(back, psi, atol=1e-12)
    assert lj == pytest.approx(lj2, abs=1e-9)


def test_boundary_values_raise():
    tmap = _tmap(ModelSpec("ar", p=2, prior=Arr2Config()))
    good = {"phi": np.zeros(2), "psi": np.array([0.5, 0.5]), "r2": 0.5, "sigma": 1.0}
    tmap.unconstrain(good)
    with pytest.raises(ValueError):
        tmap.unconstrain({**good, "r2": 1.0})
    with pytest.raises(ValueError):
        tmap.unconstrain({**good, "r2": 0.0})
    with pytest.raises(ValueError):
        tmap.unconstrain({**good, "psi": np.array([1.0, 0.0])})
    with pytest.raises(ValueError):
        tmap.unconstrain({**good, "sigma": -1.0})


@pytest.mark.parametrize(
    "spec,m",
    [
        (ModelSpec("ar", p=3, prior=Arr2Config()), 0),
        (ModelSpec("ar", p=3, prior=Arr2Config(concentration="minnesota")), 0),
        (ModelSpec("arx", p=2, m=3, prior=Arr2Config()), 3),
        (ModelSpec("ma", q=2, prior=Arr2Config()), 0),
        (ModelSpec("arma", p=2, q=1, prior=Arr2Config()), 0),
        (ModelSpec("ardl", p=1, m=2, g=2, prior=Arr2Config()), 2),
        (ModelSpec("ardl", p=1, m=2, g=2, prior=Arr2Config(group_weights="minnesota")), 2),
        (ModelSpec("ltx", m=4, prior=Arr2Config()), 4),
        (ModelSpec("ltx", m=4, g=2, prior=Arr2Config(group_weights="flat")), 4),
        (ModelSpec("ar", p=3, prior=MinnesotaConfig()), 0),
        (ModelSpec("arx", p=2, m=3, prior=MinnesotaConfig()), 3),
        (ModelSpec("ar", p=4, prior=RhsConfig()), 0),
        (ModelSpec("ltx", m=4, prior=RhsConfig()), 4),
        (ModelSpec("ar", p=3, prior=GaussianConfig()), 0),
        (ModelSpec("ltx", m=4, prior=GaussianConfig()), 4),
    ],
)
def test_round_trip_all_families(spec, m):
    tmap = _tmap(spec, n=30, m=m)
    rng = np.random.default_rng(5)
    for _ in range(40):
        u = rng.uniform(-1.5, 1.5, size=tmap.dim)
        params, logj = tmap.constrain(u)
        u2, logj2 = tmap.unconstrain(params)
        assert np.max(np.abs(u - u2)) < 1e-10
        assert logj == pytest.approx(logj2, abs=1e-8)


def test_column_names_ar2():
    tmap = _tmap(ModelSpec("ar", p=2, prior=Arr2Config()))
    assert tmap.column_names() == ["phi.1", "phi.2", "psi.1", "psi.2", "r2", "sigma"]


def test_column_names_ltx():
    spec = ModelSpec("ltx", m=2, prior=Arr2Config())
    tmap = _tmap(spec, n=5, m=2)
    names = tmap.column_names()
    assert names[:6] == ["beta.1", "beta.2", "psi.1", "psi.2", "psi.3", "r2"]
    assert names[6] == "sigma"
    assert names[7] == "phi_state"
    assert names[8:] == [f"delta.{t}" for t in range(6)]


def test_column_names_ardl_two_level():
    spec = ModelSpec("ardl", p=1, m=2, g=2, prior=GaussianConfig())
    tmap = _tmap(spec, n=20, m=2)
    assert tmap.column_names() == ["phi.1", "beta.1.1", "beta.1.2", "beta.2.1", "beta.2.2", "sigma"]
