"""Model families: likelihoods, posteriors, and predictive densities.

Six observation models share one interface: pure autoregression (``ar``),
autoregression with exogenous covariates (``arx``), moving average (``ma``),
``arma``, autoregressive distributed lag (``ardl``), and a local-trend model
with covariates (``ltx``) whose latent states are sampled jointly with the
other parameters.

Likelihood conventions
----------------------
The Gaussian likelihood conditions on the first ``max(p, g)`` observations
(the y- and covariate-lag horizon).  Error-lag recursions (``ma``/``arma``)
start at the first conditioned time point with presample errors fixed to
zero, so an MA model with all coefficients at zero collapses exactly to
white noise and an ARMA(p, 0) reproduces the AR(p) likelihood bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from . import priors
from .data import DataStats, TimeSeriesData
from .inference import autodiff as ad
from .tsmath import sample_variance

FAMILIES = ("ar", "arx", "ma", "arma", "ardl", "ltx")


@dataclass(frozen=True)
class ModelSpec:
    """Family, orders, and prior configuration of one model.

    Orders: ``p`` y-lags (ar, arx, arma, ardl), ``q`` error lags (ma, arma),
    ``m`` exogenous covariates (arx) or covariate groups (ardl) or design
    columns (ltx), ``g`` lags per covariate (ardl; for ltx the group size of
    an already lag-expanded design when using grouped decompositions).
    """

    family: str
    p: int = 0
    q: int = 0
    m: int = 0
    g: int = 0
    prior: priors.PriorConfig = field(default_factory=priors.Arr2Config)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; choose from {FAMILIES}")
        if min(self.p, self.q, self.m, self.g) < 0:
            raise ValueError("orders must be nonnegative")
        required = {
            "ar": self.p >= 0,
            "arx": self.p >= 0 and self.m >= 1,
            "ma": self.q >= 1,
            "arma": self.p >= 1 and self.q >= 1,
            "ardl": self.p >= 0 and self.m >= 1 and self.g >= 1,
            "ltx": self.m >= 0,
        }
        if not required[self.family]:
            raise ValueError(f"family {self.family!r} is missing a required order")
        if self.family == "ltx" and self.g > 0 and self.m % self.g:
            raise ValueError("ltx design columns must be a multiple of the lag group size")
        if isinstance(self.prior, priors.Arr2Config) and self.n_variance_components == 0:
            raise ValueError("the R2 shrinkage prior needs at least one variance component")

    # -- structural helpers -------------------------------------------------

    @property
    def conditioning_horizon(self) -> int:
        if self.family in ("ar", "arx", "arma"):
            return self.p
        if self.family == "ardl":
            return max(self.p, self.g)
        return 0  # ma (presample errors zeroed), ltx

    @property
    def n_lag_coefficients(self) -> int:
        return {"ar": self.p, "arx": self.p, "ma": self.q, "arma": self.p + self.q}.get(
            self.family, self.p if self.family == "ardl" else 0
        )

    @property
    def n_exog_coefficients(self) -> int:
        if self.family == "arx":
            return self.m
        if self.family == "ardl":
            return self.m * self.g
        if self.family == "ltx":
            return self.m
        return 0

    def grouped(self, prior) -> bool:
        """Group-level variance decomposition active for this spec?"""
        return (
            isinstance(prior, priors.Arr2Config)
            and prior.group_weights is not None
            and self.family in ("ardl", "ltx")
            and self.g > 0
        )

    def n_covariate_groups(self, prior) -> int:
        if self.family == "ltx":
            return self.m // self.g if self.grouped(prior) else self.m
        raise ValueError("covariate groups only defined for ltx")

    @property
    def n_variance_components(self) -> int:
        if not isinstance(self.prior, priors.Arr2Config):
            raise TypeError("variance components are an R2-prior concept")
        labels, _, _ = priors.arr2_variance_layout(self, None)
        return len(labels)

    def coefficient_blocks(self):
        """Ordered (name, size) coefficient blocks for this family."""
        fam = self.family
        if fam == "ar":
            return [("phi", self.p)]
        if fam == "arx":
            return [("phi", self.p), ("beta", self.m)]
        if fam == "ma":
            return [("varpi", self.q)]
        if fam == "arma":
            return [("phi", self.p), ("varpi", self.q)]
        if fam == "ardl":
            return [("phi", self.p), ("beta", self.m * self.g)]
        return [("beta", self.m)]

    def stacked_coefficients(self, params):
        parts = [params[name] for name, size in self.coefficient_blocks() if size > 0]
        if not parts:
            return np.empty(0)
        if len(parts) == 1:
            return parts[0]
        return ad.concat(parts)

    def exog_reference_variances(self, stats: DataStats) -> np.ndarray:
        """Sample variance of the regressor behind each exogenous coefficient."""
        if self.family == "ardl":
            return np.repeat(stats.var_x, self.g)
        return stats.var_x

    def validate_data(self, data: TimeSeriesData):
        if self.family in ("arx", "ardl", "ltx") and self.m > 0:
            if data.x is None or data.x.shape[1] != self.m:
                have = 0 if data.x is None else data.x.shape[1]
                raise ValueError(f"family {self.family!r} needs {self.m} covariates, data has {have}")
        if data.n <= self.conditioning_horizon + 1:
            raise ValueError(
                f"series of length {data.n} too short for conditioning horizon "
                f"{self.conditioning_horizon}"
            )


@dataclass(frozen=True)
class PredictiveQuery:
    """Score ``horizon`` future points after conditioning on ``y[1..cut]``."""

    cut: int
    horizon: int = 1

    def __post_init__(self):
        if self.cut < 1 or self.horizon < 1:
            raise ValueError("cut and horizon must be positive")


LOG_2PI = math.log(2.0 * math.pi)


def _gaussian_loglik(resid, sigma, n: int):
    ss = ad.total(resid * resid)
    return -0.5 * n * LOG_2PI - n * ad.log(sigma) - ss / (2.0 * sigma * sigma)


def residuals(spec: ModelSpec, params, data: TimeSeriesData):
    """One-step prediction errors entering the Gaussian likelihood."""
    y = data.y
    h = spec.conditioning_horizon
    fam = spec.family
    y_c = y[h:]
    if fam in ("ar", "arx", "arma", "ardl"):
        pred = 0.0
        if spec.p > 0:
            pred = ad.matvec(data.lag_matrix(spec.p, h), params["phi"])
        if fam == "arx":
            pred = pred + ad.matvec(data.x[h:], params["beta"])
        if fam == "ardl":
            pred = pred + ad.matvec(data.lagged_design(spec.g, h), params["beta"])
        z = y_c - pred if spec.p > 0 or fam in ("arx", "ardl") else y_c
        if fam == "arma" and spec.q > 0:
            return ad.ar_filter(-params["varpi"], z)
        return z
    if fam == "ma":
        return ad.ar_filter(-params["varpi"], y_c)
    if fam == "ltx":
        pred = params["delta"][1:]
        if spec.m > 0:
            pred = pred + ad.matvec(data.x, params["beta"])
        return y - pred
    raise ValueError(f"unknown family {fam!r}")


def loglik(spec: ModelSpec, params, data: TimeSeriesData):
    """Gaussian log likelihood conditional on the lag horizon."""
    sigma = params["sigma"]
    if not isinstance(sigma, ad.Node) and sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    spec.validate_data(data)
    resid = residuals(spec, params, data)
    n = data.n - spec.conditioning_horizon
    return _gaussian_loglik(resid, sigma, n)


def logposterior(spec: ModelSpec, params, data: TimeSeriesData, stats: DataStats = None):
    """Log likelihood plus log prior; ``-inf`` propagates cleanly."""
    if stats is None:
        stats = data.stats()
    ll = loglik(spec, params, data)
    if not isinstance(ll, ad.Node) and not np.isfinite(ll):
        return ll
    return ll + priors.logprior(spec, params, stats)


# ---------------------------------------------------------------------------
# posterior predictive evaluation
# ---------------------------------------------------------------------------

def _one_step_means(spec: ModelSpec, params, y: np.ndarray, x, t_targets: np.ndarray):
    """Predictive means at the (0-based) target indices, given full history."""
    fam = spec.family
    mu = np.zeros(t_targets.size)
    if spec.p > 0:
        lagged = y[t_targets[:, None] - np.arange(1, spec.p + 1)[None, :]]
        mu += lagged @ params["phi"]
    if fam == "arx":
        mu += x[t_targets] @ params["beta"]
    if fam == "ardl":
        cols = [
            x[t_targets - j, l]
            for l in range(x.shape[1])
            for j in range(1, spec.g + 1)
        ]
        mu += np.column_stack(cols) @ params["beta"]
    if fam in ("ma", "arma") and spec.q > 0:
        h = spec.conditioning_horizon
        pred = 0.0
        if spec.p > 0:
            t_idx = np.arange(h, y.size)
            pred = y[t_idx[:, None] - np.arange(1, spec.p + 1)[None, :]] @ params["phi"]
        eps = ad.ar_filter(-params["varpi"], y[h:] - pred)
        for k, t in enumerate(t_targets):
            window = eps[max(0, t - h - spec.q) : t - h][::-1]
            mu[k] += float(np.dot(params["varpi"][: window.size], window))
    return mu


def posterior_predictive_logdensity(
    spec: ModelSpec,
    draws,
    data: TimeSeriesData,
    query: PredictiveQuery,
    rng=None,
    n_paths: int = 100,
) -> float:
    """Log of the draw-averaged predictive density of a future block.

    For observation-driven families the joint density over the observed
    horizon factorises exactly into one-step conditionals.  The latent-trend
    family advances its state: analytic for one step ahead, simulated over
    ``n_paths`` inner state paths per draw beyond that.
    """
    per_draw = per_draw_predictive_logdensity(spec, draws, data, query, rng, n_paths)
    return float(logsumexp(per_draw) - math.log(per_draw.size))


def per_draw_predictive_logdensity(
    spec: ModelSpec,
    draws,
    data: TimeSeriesData,
    query: PredictiveQuery,
    rng=None,
    n_paths: int = 100,
) -> np.ndarray:
    """Predictive log density of the queried block under each single draw."""
    i, horizon = query.cut, query.horizon
    if i + horizon > data.n:
        raise ValueError(f"horizon {horizon} after cut {i} exceeds series length {data.n}")
    if spec.family != "ltx" and i < spec.conditioning_horizon:
        raise ValueError(f"cut {i} is inside the conditioning horizon {spec.conditioning_horizon}")
    if draws.n_draws == 0:
        raise ValueError("empty draws")

    t_targets = np.arange(i, i + horizon)  # 0-based indices of scored points
    per_draw = np.empty(draws.n_draws)
    for s, params in enumerate(draws.iter_params()):
        sigma = params["sigma"]
        if spec.family == "ltx":
            delta = params["delta"]
            if delta.size != i + 1:
                raise ValueError(
                    f"latent-trend predictive needs a fit on exactly {i} points "
                    f"(draw has {delta.size - 1} states)"
                )
            phi_s = params["phi_state"]
            innov = priors.state_innovation_variance(spec, params)
            base = data.x[t_targets] @ params["beta"] if spec.m > 0 else np.zeros(horizon)
            if horizon == 1:
                mean = base[0] + phi_s * delta[-1]
                var = sigma**2 + innov
                per_draw[s] = -0.5 * (LOG_2PI + np.log(var) + (data.y[i] - mean) ** 2 / var)
            else:
                if rng is None:
                    rng = np.random.default_rng(0)
                noise = rng.standard_normal((n_paths, horizon)) * math.sqrt(innov)
                paths = np.empty((n_paths, horizon))
                prev = np.full(n_paths, delta[-1])
                for hgap in range(horizon):
                    prev = phi_s * prev + noise[:, hgap]
                    paths[:, hgap] = prev
                dens = -0.5 * (
                    LOG_2PI + 2.0 * np.log(sigma)
                    + ((data.y[t_targets][None, :] - base[None, :] - paths) / sigma) ** 2
                ).sum(axis=1)
                per_draw[s] = logsumexp(dens) - math.log(n_paths)
        else:
            mu = _one_step_means(spec, params, data.y, data.x, t_targets)
            z = (data.y[t_targets] - mu) / sigma
            per_draw[s] = float(np.sum(-0.5 * LOG_2PI - np.log(sigma) - 0.5 * z * z))
    return per_draw


def bayes_r2_draws(spec: ModelSpec, draws, data: TimeSeriesData) -> np.ndarray:
    """Per-draw explained-variance fraction of the realised predictor."""
    if draws.n_draws == 0:
        raise ValueError("empty draws")
    h = spec.conditioning_horizon
    if data.n - h < 2:
        raise ValueError("need at least two usable time points")
    out = np.empty(draws.n_draws)
    for s, params in enumerate(draws.iter_params()):
        resid = np.asarray(residuals(spec, params, data), dtype=float)
        mu = data.y[h:] - resid
        v = sample_variance(mu) if mu.size >= 2 else 0.0
        out[s] = v / (v + params["sigma"] ** 2)
    return out
