"""Data container validation, centring, and slicing."""

import numpy as np
import pytest

from arr2 import ModelSpec, TimeSeriesData, priors


def test_rejects_bad_shapes_and_values():
    with pytest.raises(ValueError):
        TimeSeriesData(np.empty(0))
    with pytest.raises(ValueError):
        TimeSeriesData(np.array([1.0, np.nan]))
    with pytest.raises(ValueError):
        TimeSeriesData(np.ones(5), np.ones((4, 2)))
    with pytest.raises(ValueError):
        TimeSeriesData(np.ones(3), np.array([[1.0], [np.inf], [0.0]]))


def test_centering_records_shift():
    data = TimeSeriesData(np.array([1.0, 2.0, 3.0])).centered()
    assert data.y_shift == pytest.approx(2.0)
    assert data.y.mean() == pytest.approx(0.0)
    again = data.centered()
    assert again.y_shift == pytest.approx(2.0)


def test_head_slices_consistently():
    rng = np.random.default_rng(0)
    data = TimeSeriesData(rng.standard_normal(10), rng.standard_normal((10, 2)))
    head = data.head(6)
    assert head.n == 6
    np.testing.assert_array_equal(head.y, data.y[:6])
    np.testing.assert_array_equal(head.x, data.x[:6])
    with pytest.raises(ValueError):
        data.head(0)
    with pytest.raises(ValueError):
        data.head(11)


def test_stats_cached_and_correct():
    rng = np.random.default_rng(1)
    data = TimeSeriesData(rng.standard_normal(50), rng.standard_normal((50, 3)))
    stats = data.stats()
    assert stats.n_obs == 50
    assert stats.var_y == pytest.approx(np.var(data.y, ddof=1))
    assert stats.var_x.shape == (3,)
    assert data.stats() is stats


def test_arr2_prior_rejects_white_noise_model():
    with pytest.raises(ValueError, match="variance component"):
        ModelSpec("ar", p=0, prior=priors.Arr2Config())


def test_spec_order_validation():
    with pytest.raises(ValueError):
        ModelSpec("arma", p=0, q=2, prior=priors.GaussianConfig())
    with pytest.raises(ValueError):
        ModelSpec("ardl", p=1, m=2, g=0, prior=priors.GaussianConfig())
    with pytest.raises(ValueError):
        ModelSpec("ltx", m=5, g=2, prior=priors.GaussianConfig())  # 5 % 2 != 0
    with pytest.raises(ValueError):
        ModelSpec("nope", prior=priors.GaussianConfig())
