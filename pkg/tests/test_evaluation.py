"""RMSE, leave-future-out bookkeeping, aggregation, R2 decompositions."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import norm

from arr2 import ModelSpec, TimeSeriesData, evaluation, models, priors
from arr2.dgp import ArDgp, simulate_ar
from arr2.distributions import HalfNormal
from arr2.inference.nuts import SamplerConfig

from helpers import frozen_draws

GAUSS = priors.GaussianConfig(sigma_prior=HalfNormal(1.0))


def test_rmse_values():
    assert evaluation.rmse([1.0, 2.0], [1.0, 2.0]) == 0.0
    assert evaluation.rmse([1.0, 1.0], [0.0, 0.0]) == pytest.approx(1.0)
    assert evaluation.rmse([0.5], [0.0]) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        evaluation.rmse([1.0], [1.0, 2.0])


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=2, max_size=8), st.randoms())
def test_rmse_permutation_invariant(values, rnd):
    est = np.asarray(values)
    truth = est + 0.5
    order = list(range(est.size))
    rnd.shuffle(order)
    assert evaluation.rmse(est, truth) == pytest.approx(
        evaluation.rmse(est[order], truth[order])
    )


def test_lfo_bookkeeping_with_frozen_posterior():
    y = np.array([0.3, -0.2, 0.0, 0.0, 0.0, 0.0])
    data = TimeSeriesData(y)
    spec = ModelSpec("ar", p=0, prior=GAUSS)
    draws = frozen_draws([("sigma", 1)], [{"sigma": 1.0}])
    cfg = SamplerConfig(chains=1, warmup=10, samples=10, seed=0)
    result = evaluation.elpd_lfo(spec, data, cfg, start=3, refit=False, draws=draws)
    # folds score y[4], y[5], y[6] -> indices 3..5, all zero under N(0,1)
    expected_per_fold = float(norm.logpdf(0.0))
    assert result.fold_index == [3, 4, 5]
    np.testing.assert_allclose(result.fold_scores, expected_per_fold, rtol=1e-12)
    assert result.elpd == pytest.approx(3 * expected_per_fold, rel=1e-12)
    assert result.mlpd == result.elpd / 3
    assert result.n_failed == 0


def test_lfo_totals_are_sums():
    rng = np.random.default_rng(0)
    data = TimeSeriesData(rng.standard_normal(12))
    spec = ModelSpec("ar", p=1, prior=GAUSS)
    draws = frozen_draws(
        [("phi", 1), ("sigma", 1)], [{"phi": np.array([0.4]), "sigma": 1.1}]
    )
    cfg = SamplerConfig(chains=1, warmup=10, samples=10, seed=0)
    result = evaluation.elpd_lfo(spec, data, cfg, start=6, refit=False, draws=draws)
    manual = [
        models.posterior_predictive_logdensity(
            spec, draws, data, models.PredictiveQuery(cut=i, horizon=1)
        )
        for i in range(6, 12)
    ]
    assert result.elpd == pytest.approx(float(np.sum(manual)), abs=1e-12)
    assert result.mlpd == pytest.approx(result.elpd / len(manual), abs=1e-15)


def test_lfo_oracle_parameters_approach_entropy_bound():
    data = simulate_ar(ArDgp(phi=np.array([0.6]), n_obs=4000), np.random.default_rng(5))
    spec = ModelSpec("ar", p=1, prior=GAUSS)
    draws = frozen_draws(
        [("phi", 1), ("sigma", 1)], [{"phi": np.array([0.6]), "sigma": 1.0}]
    )
    cfg = SamplerConfig(chains=1, warmup=10, samples=10, seed=0)
    result = evaluation.elpd_lfo(spec, data, cfg, refit=False, draws=draws)
    # the entropy bound of the unit-variance innovations: -(1/2) log(2*pi*e)
    assert result.mlpd == pytest.approx(norm.logpdf(0.0) - 0.5, abs=0.02)


def test_lfo_rejects_fixed_fit_for_latent_states():
    data = TimeSeriesData(np.zeros(10), np.ones((10, 1)))
    spec = ModelSpec("ltx", m=1, prior=GAUSS)
    cfg = SamplerConfig(chains=1, warmup=10, samples=10, seed=0)
    with pytest.raises(ValueError, match="latent"):
        evaluation.elpd_lfo(spec, data, cfg, refit=False)


def test_conditional_r2_shares_identity():
    phi = np.array([0.6, 0.0, 0.0])
    shares, total = evaluation.conditional_r2_shares(phi)
    np.testing.assert_allclose(shares, phi**2, atol=1e-8)
    assert total == pytest.approx(0.36, abs=1e-8)


def test_r2_decomposition_single_component_equals_bayes_r2():
    rng = np.random.default_rng(1)
    data = TimeSeriesData(rng.standard_normal(80))
    spec = ModelSpec("ar", p=1, prior=GAUSS)
    draws = frozen_draws(
        [("phi", 1), ("sigma", 1)], [{"phi": np.array([0.5]), "sigma": 1.0}]
    )
    dec = evaluation.r2_decomposition(spec, draws, data)
    assert dec.share_scaled[0, 0] == pytest.approx(dec.bayes_r2[0], abs=1e-12)


def test_r2_decomposition_zero_coefficient_gets_zero_share():
    rng = np.random.default_rng(2)
    data = TimeSeriesData(rng.standard_normal(60))
    spec = ModelSpec("ar", p=2, prior=GAUSS)
    draws = frozen_draws(
        [("phi", 2), ("sigma", 1)], [{"phi": np.array([0.5, 0.0]), "sigma": 1.0}]
    )
    dec = evaluation.r2_decomposition(spec, draws, data)
    assert dec.share_of_variance[0, 1] == 0.0
    assert dec.share_scaled[0, 1] == 0.0


def test_r2_decomposition_ar1_on_long_series():
    data = simulate_ar(ArDgp(phi=np.array([0.6]), n_obs=100_000), np.random.default_rng(3))
    spec = ModelSpec("ar", p=1, prior=GAUSS)
    draws = frozen_draws(
        [("phi", 1), ("sigma", 1)], [{"phi": np.array([0.6]), "sigma": 1.0}]
    )
    dec = evaluation.r2_decomposition(spec, draws, data)
    assert dec.share_of_variance[0, 0] == pytest.approx(0.36, abs=0.02)


def test_r2_decomposition_shares_sum_to_bayes_r2():
    rng = np.random.default_rng(4)
    data = TimeSeriesData(rng.standard_normal(70))
    spec = ModelSpec("ar", p=3, prior=GAUSS)
    param_draws = [
        {"phi": rng.uniform(-0.4, 0.4, 3), "sigma": float(rng.uniform(0.8, 1.4))}
        for _ in range(20)
    ]
    draws = frozen_draws([("phi", 3), ("sigma", 1)], param_draws)
    dec = evaluation.r2_decomposition(spec, draws, data)
    assert np.all(dec.share_of_variance >= 0)
    np.testing.assert_allclose(dec.share_scaled.sum(axis=1), dec.bayes_r2, atol=1e-8)


def test_posterior_state_sd_for_both_prior_kinds():
    spec_arr2 = ModelSpec("ltx", m=1, prior=priors.Arr2Config())
    blocks = [("beta", 1), ("psi", 2), ("r2", 1), ("sigma", 1), ("phi_state", 1), ("delta", 3)]
    draws = frozen_draws(
        blocks,
        [{
            "beta": np.array([0.0]), "psi": np.array([0.5, 0.5]), "r2": 0.5,
            "sigma": 2.0, "phi_state": 0.0, "delta": np.zeros(3),
        }],
    )
    got = evaluation.posterior_state_sd(spec_arr2, draws)[0]
    assert got == pytest.approx(2.0 * np.sqrt(1.0 * 0.5), rel=1e-12)

    spec_base = ModelSpec("ltx", m=1, prior=GAUSS)
    blocks = [("beta", 1), ("sigma", 1), ("phi_state", 1), ("sigma_delta", 1), ("delta", 3)]
    draws = frozen_draws(
        blocks,
        [{
            "beta": np.array([0.0]), "sigma": 1.0, "phi_state": 0.2,
            "sigma_delta": 0.7, "delta": np.zeros(3),
        }],
    )
    assert evaluation.posterior_state_sd(spec_base, draws)[0] == pytest.approx(0.7)


def test_aggregate_basics():
    rows = [
        {"prior": "a", "metric_x": 1.0},
        {"prior": "a", "metric_x": 3.0},
        {"prior": "b", "metric_x": 5.0},
    ]
    out = evaluation.aggregate(rows, ["prior"], ["metric_x"])
    by_prior = {r["prior"]: r for r in out}
    assert by_prior["a"]["mean"] == pytest.approx(2.0)
    assert by_prior["a"]["se"] == pytest.approx(1.0)
    assert by_prior["a"]["n"] == 2
    assert by_prior["b"]["se"] == 0.0
    assert by_prior["b"]["n"] == 1


def test_aggregate_matches_direct_computation():
    rng = np.random.default_rng(6)
    rows = [{"g": "only", "v": float(x)} for x in rng.standard_normal(25)]
    out = evaluation.aggregate(rows, ["g"], ["v"])[0]
    vals = np.array([r["v"] for r in rows])
    assert out["mean"] == pytest.approx(vals.mean())
    assert out["se"] == pytest.approx(vals.std(ddof=1) / np.sqrt(25))
    assert out["n"] == 25


def test_lfo_refit_per_fold_runs_and_sums():
    data = simulate_ar(ArDgp(phi=np.array([0.5]), n_obs=24), np.random.default_rng(7))
    spec = ModelSpec("ar", p=1, prior=priors.Arr2Config())
    cfg = SamplerConfig(chains=1, warmup=80, samples=60, seed=2)
    result = evaluation.elpd_lfo(
        spec, data, cfg, start=20, refit=True,
        fold_budget=dict(chains=1, warmup=80, samples=60),
    )
    assert result.fold_index == [20, 21, 22, 23]
    assert result.elpd == pytest.approx(sum(result.fold_scores))
    assert result.mlpd == result.elpd / 4
    assert result.n_failed == 0
