"""Scoring of fitted models: parameter RMSE, leave-future-out predictive
density, posterior explained-variance summaries and decompositions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import models, priors
from .data import TimeSeriesData
from .inference.nuts import SamplerConfig, nuts_sample
from .tsmath import sample_variance, yule_walker

# reduced per-fold sampler budget keeps refitted leave-future-out runs at
# desk scale; full fits use the caller's configuration
LFO_REFIT_BUDGET = dict(chains=2, warmup=500, samples=500)


def rmse(estimate, truth) -> float:
    """Root mean squared deviation between two equally long vectors."""
    estimate = np.atleast_1d(np.asarray(estimate, dtype=float))
    truth = np.atleast_1d(np.asarray(truth, dtype=float))
    if estimate.shape != truth.shape:
        raise ValueError(f"length mismatch: {estimate.shape} vs {truth.shape}")
    if estimate.size == 0:
        raise ValueError("need at least one component")
    return float(np.sqrt(np.mean((estimate - truth) ** 2)))


@dataclass
class LfoResult:
    """Per-fold one-step-ahead log scores and their aggregates.

    ``mlpd`` is the total divided by the number of scored folds; failed
    folds are excluded from both and counted in ``n_failed``.
    """

    fold_index: list
    fold_scores: list
    elpd: float
    mlpd: float
    n_failed: int = 0
    failures: list = field(default_factory=list)


def elpd_lfo(
    spec: models.ModelSpec,
    data: TimeSeriesData,
    sampler_cfg: SamplerConfig,
    start: Optional[int] = None,
    horizon: int = 1,
    refit: bool = True,
    draws: Optional[object] = None,
    rng=None,
    fold_budget: Optional[dict] = None,
) -> LfoResult:
    """Leave-future-out expected log predictive density.

    Folds run from ``start`` (default: half the series) to ``T - horizon``;
    fold ``i`` scores the predictive density of ``y[i+1 : i+horizon]`` given
    ``y[1:i]``.  With ``refit`` each fold refits the posterior on its own
    window at a reduced sampler budget; otherwise a single posterior (either
    ``draws`` or one fit on the first ``start`` points) scores every fold,
    which is only valid for observation-driven families.
    """
    n = data.n
    if start is None:
        start = n // 2
    if not (spec.conditioning_horizon < start <= n - horizon):
        raise ValueError(f"start {start} outside ({spec.conditioning_horizon}, {n - horizon}]")
    if not refit and spec.family == "ltx":
        raise ValueError("fixed-fit scoring cannot advance latent states; use refit=True")

    budget = dict(LFO_REFIT_BUDGET if fold_budget is None else fold_budget)
    folds = list(range(start, n - horizon + 1))
    fixed_draws = draws
    if not refit and fixed_draws is None:
        fold_cfg = SamplerConfig(
            seed=sampler_cfg.seed,
            target_accept=sampler_cfg.target_accept,
            max_treedepth=sampler_cfg.max_treedepth,
            **budget,
        )
        fixed_draws, _ = nuts_sample(spec, data.head(start), fold_cfg)

    scores = []
    kept = []
    failures = []
    for i in folds:
        query = models.PredictiveQuery(cut=i, horizon=horizon)
        try:
            if refit:
                fold_cfg = SamplerConfig(
                    seed=sampler_cfg.seed + i,
                    target_accept=sampler_cfg.target_accept,
                    max_treedepth=sampler_cfg.max_treedepth,
                    **budget,
                )
                fold_draws, _ = nuts_sample(spec, data.head(i), fold_cfg)
            else:
                fold_draws = fixed_draws
            score = models.posterior_predictive_logdensity(spec, fold_draws, data, query, rng=rng)
        except Exception as exc:  # noqa: BLE001 - fold failures are data, not crashes
            failures.append((i, f"{type(exc).__name__}: {exc}"))
            continue
        scores.append(score)
        kept.append(i)
    if not scores:
        raise RuntimeError("every leave-future-out fold failed")
    total = float(np.sum(scores))
    return LfoResult(
        fold_index=kept,
        fold_scores=scores,
        elpd=total,
        mlpd=total / len(scores),
        n_failed=len(failures),
        failures=failures,
    )


def conditional_r2_shares(phi, sigma2: float = 1.0):
    """Per-lag explained-variance shares of a fixed stationary coefficient
    vector, computed with the shared stationary variance.

    Both the component variance and the total use the same ``gamma(0)``, so
    the share of lag ``i`` reduces to the squared coefficient; the total is
    their sum.
    """
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    gamma0 = yule_walker(phi, sigma2, 0)[0] if np.any(phi != 0.0) else sigma2
    shares = (phi**2 * gamma0) / gamma0
    return shares, float(shares.sum())


@dataclass
class R2Decomposition:
    component_names: list
    share_of_variance: np.ndarray  # (n_draws, n_components), vs target variance
    share_scaled: np.ndarray  # rescaled so components sum to the draw's R2
    bayes_r2: np.ndarray  # (n_draws,)


def r2_decomposition(spec: models.ModelSpec, draws, data: TimeSeriesData) -> R2Decomposition:
    """Split each draw's explained variance across model components.

    Components are the realised in-sample series of each model term (one
    per lag/covariate coefficient, plus the latent trend).  Two scalings
    are reported: raw variance shares against the sample variance of the
    target, and shares rescaled to sum to the draw's posterior R2.
    """
    if draws.n_draws == 0:
        raise ValueError("empty draws")
    h = spec.conditioning_horizon
    y_c = data.y[h:]
    if y_c.size < 2:
        raise ValueError("need at least two usable time points")
    var_y = sample_variance(y_c)
    if var_y == 0:
        raise ValueError("target series has zero variance")

    names = []
    fam = spec.family
    if spec.p > 0:
        names += [f"phi.{i + 1}" for i in range(spec.p)]
    if fam in ("ma", "arma") and spec.q > 0:
        names += [f"varpi.{j + 1}" for j in range(spec.q)]
    if fam == "arx":
        names += [f"beta.{j + 1}" for j in range(spec.m)]
    elif fam == "ardl":
        names += [f"beta.{l + 1}.{j + 1}" for l in range(spec.m) for j in range(1, spec.g + 1)]
    elif fam == "ltx":
        names += ["trend"] + [f"beta.{j + 1}" for j in range(spec.m)]

    bayes = models.bayes_r2_draws(spec, draws, data)
    raw = np.zeros((draws.n_draws, len(names)))
    for s, params in enumerate(draws.iter_params()):
        series = _component_series(spec, params, data)
        raw[s] = [sample_variance(c) / var_y if c.size >= 2 else 0.0 for c in series]
    totals = raw.sum(axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        scaled = np.where(totals[:, None] > 0, raw / totals[:, None] * bayes[:, None], 0.0)
    return R2Decomposition(names, raw, scaled, bayes)


def _component_series(spec, params, data):
    """Realised in-sample series of each additive model component."""
    y, x = data.y, data.x
    h = spec.conditioning_horizon
    t_idx = np.arange(h, y.size)
    out = []
    if spec.p > 0:
        lagged = data.lag_matrix(spec.p, h)
        out += [params["phi"][i] * lagged[:, i] for i in range(spec.p)]
    if spec.family in ("ma", "arma") and spec.q > 0:
        resid = np.asarray(models.residuals(spec, params, data), dtype=float)
        mu_err = np.zeros((t_idx.size, spec.q))
        for k, t in enumerate(t_idx):
            for j in range(1, spec.q + 1):
                pos = t - h - j
                if pos >= 0:
                    mu_err[k, j - 1] = params["varpi"][j - 1] * resid[pos]
        out += [mu_err[:, j] for j in range(spec.q)]
    if spec.family == "arx":
        out += [params["beta"][j] * x[h:, j] for j in range(spec.m)]
    elif spec.family == "ardl":
        design = data.lagged_design(spec.g, h)
        out += [params["beta"][j] * design[:, j] for j in range(design.shape[1])]
    elif spec.family == "ltx":
        out.append(params["delta"][1:])
        out += [params["beta"][j] * x[:, j] for j in range(spec.m)]
    return out


def posterior_state_sd(spec: models.ModelSpec, draws) -> np.ndarray:
    """Per-draw innovation sd of the latent trend implied by the prior tie."""
    if spec.family != "ltx":
        raise ValueError("state scale only defined for the latent-trend family")
    out = np.empty(draws.n_draws)
    for s, params in enumerate(draws.iter_params()):
        out[s] = math.sqrt(priors.state_innovation_variance(spec, params))
    return out


def aggregate(rows: list, keys: list, metrics: Optional[list] = None) -> list:
    """Group rows by ``keys`` and report mean, standard error and count.

    The standard error is ``sd / sqrt(n)`` (``0.0`` for singleton groups,
    flagged by ``n = 1``).  Non-numeric or missing entries are skipped.
    """
    if not rows:
        raise ValueError("nothing to aggregate")
    if metrics is None:
        metrics = sorted(
            {
                k
                for row in rows
                for k, v in row.items()
                if k not in keys and isinstance(v, (int, float)) and not isinstance(v, bool)
            }
        )
    groups = {}
    for row in rows:
        groups.setdefault(tuple(row.get(k) for k in keys), []).append(row)
    out = []
    for gkey in sorted(groups, key=lambda t: tuple(str(v) for v in t)):
        members = groups[gkey]
        for metric in metrics:
            vals = np.array(
                [m[metric] for m in members if isinstance(m.get(metric), (int, float))],
                dtype=float,
            )
            vals = vals[np.isfinite(vals)]
            if vals.size == 0:
                continue
            se = float(np.std(vals, ddof=1) / math.sqrt(vals.size)) if vals.size > 1 else 0.0
            out.append(
                {
                    **dict(zip(keys, gkey)),
                    "metric": metric,
                    "mean": float(vals.mean()),
                    "se": se,
                    "n": int(vals.size),
                }
            )
    return out
