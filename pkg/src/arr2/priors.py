"""Prior configurations and their log-density contributions.

The main export is the R2-based joint shrinkage prior ("ARR2"): a beta prior
on the model's explained-variance fraction whose induced total variance
``tau2 = r2 / (1 - r2)`` is split across coefficients (and latent states) by
a Dirichlet simplex.  Alternatives used as baselines throughout the
experiments are the Minnesota-style lag-decay prior, the regularised
horseshoe, and independent Gaussians.

Log priors accept traced parameter values (autodiff nodes) so the sampler
can differentiate through them; all densities are fully normalised.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from . import distributions as dist
from .data import DataStats
from .inference import autodiff as ad

DEFAULT_R2_MEAN = 1.0 / 3.0
DEFAULT_R2_PRECISION = 3.0
MINNESOTA_EXOG_CONCENTRATION = 0.1


# ---------------------------------------------------------------------------
# concentration and weight builders
# ---------------------------------------------------------------------------

def arr2_concentrations(scheme: str, p: int, m: int = 0) -> np.ndarray:
    """Dirichlet concentrations for ``p`` lag components and ``m`` others.

    ``minnesota`` decays the lag entries as ``(p**2 / 10) / i**2`` (so the
    last lag gets exactly 0.1) and assigns 0.1 to every non-lag component;
    ``flat`` is all ones and ``sparse`` all 0.1.
    """
    if p < 0 or m < 0:
        raise ValueError("component counts must be nonnegative")
    if p + m == 0:
        raise ValueError("need at least one variance component")
    if scheme == "flat":
        return np.ones(p + m)
    if scheme == "sparse":
        return np.full(p + m, 0.1)
    if scheme == "minnesota":
        lags = (p * p / 10.0) / np.arange(1, p + 1) ** 2 if p else np.empty(0)
        return np.concatenate([lags, np.full(m, MINNESOTA_EXOG_CONCENTRATION)])
    raise ValueError(f"unknown concentration scheme {scheme!r}")


def deterministic_lag_weights(p: int, kind: str = "minnesota") -> np.ndarray:
    """Fixed per-lag weights summing to one for group-level decompositions."""
    if p < 1:
        raise ValueError("need at least one lag")
    if kind == "flat":
        return np.full(p, 1.0 / p)
    if kind == "minnesota":
        raw = 1.0 / np.arange(1, p + 1) ** 2
        return raw / raw.sum()
    raise ValueError(f"unknown weight kind {kind!r}")


def arr2_coeff_scale(sigma2: float, var_ref: float, tau2: float, psi_k: float) -> float:
    """Prior variance ``sigma2 / var_ref * tau2 * psi_k`` of one coefficient."""
    if var_ref == 0:
        raise ValueError("reference variance is zero (constant regressor)")
    return sigma2 / var_ref * tau2 * psi_k


# ---------------------------------------------------------------------------
# configurations
# ---------------------------------------------------------------------------

SigmaPrior = Union[str, object]  # "auto" or a distribution with .logpdf/.sample


@dataclass(frozen=True)
class Arr2Config:
    """R2-based joint shrinkage prior.

    ``concentration`` is either a scheme name (flat | sparse | minnesota) or
    an explicit vector matching the component count.  ``group_weights``
    switches lagged-covariate families (ardl, ltx) to the group-level
    decomposition with deterministic per-lag weights (flat | minnesota or an
    explicit vector).  ``sigma_prior`` defaults to a half-normal whose scale
    matches the sample standard deviation of the target.
    """

    mu_r2: float = DEFAULT_R2_MEAN
    phi_r2: float = DEFAULT_R2_PRECISION
    concentration: Union[str, Sequence[float]] = "flat"
    group_weights: Optional[Union[str, Sequence[float]]] = None
    sigma_prior: SigmaPrior = "auto"
    state_phi_sd: float = 0.5

    def __post_init__(self):
        if not (0.0 < self.mu_r2 < 1.0):
            raise ValueError("mu_r2 must lie in (0,1)")
        if self.phi_r2 <= 0:
            raise ValueError("phi_r2 must be positive")
        if self.state_phi_sd <= 0:
            raise ValueError("state_phi_sd must be positive")

    def r2_dist(self) -> dist.BetaMP:
        return dist.BetaMP(self.mu_r2, self.phi_r2)

    def concentrations(self, n_lags: int, n_other: int) -> np.ndarray:
        if isinstance(self.concentration, str):
            return arr2_concentrations(self.concentration, n_lags, n_other)
        xi = np.asarray(self.concentration, dtype=float)
        if xi.size != n_lags + n_other:
            raise ValueError(
                f"concentration length {xi.size} != component count {n_lags + n_other}"
            )
        if np.any(xi <= 0):
            raise ValueError("concentrations must be positive")
        return xi

    def lag_weights(self, n_lags: int) -> np.ndarray:
        if self.group_weights is None:
            raise ValueError("group_weights not configured")
        if isinstance(self.group_weights, str):
            return deterministic_lag_weights(n_lags, self.group_weights)
        w = np.asarray(self.group_weights, dtype=float)
        if w.size != n_lags or np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
            raise ValueError("group weights must be nonnegative and sum to one")
        return w


@dataclass(frozen=True)
class MinnesotaConfig:
    """Lag-decay shrinkage: coefficient ``i`` gets variance ``kappa1 / i**2``.

    Exogenous coefficients share ``(var_y / var_xj) * kappa2``.  The gamma
    hyperpriors are in shape/rate form; the defaults put prior mean 0.04 on
    ``kappa1`` and 0.04**2 on ``kappa2``.
    """

    kappa1_prior: dist.GammaShapeRate = field(
        default_factory=lambda: dist.GammaShapeRate(1.0, 1.0 / 0.04)
    )
    kappa2_prior: dist.GammaShapeRate = field(
        default_factory=lambda: dist.GammaShapeRate(1.0, 1.0 / 0.04**2)
    )
    sigma_prior: SigmaPrior = "auto"
    state_scale_prior: dist.HalfNormal = field(default_factory=lambda: dist.HalfNormal(3.0))
    state_phi_sd: float = 0.5


@dataclass(frozen=True)
class RhsConfig:
    """Regularised horseshoe over all regression coefficients.

    ``p0`` is the prior guess of the active coefficient count (default: half
    the lag order, or half of all coefficients for lag-free families); it
    sets the half-Cauchy scale of the global shrinkage through
    ``p0 / (n_coef - p0) * sigma / sqrt(T)``.  The slab width gets a
    half-Student-t(4, 2) prior.
    """

    p0: Optional[int] = None
    c_prior: dist.HalfStudentT = field(default_factory=lambda: dist.HalfStudentT(4.0, 2.0))
    sigma_prior: SigmaPrior = "auto"
    state_scale_prior: dist.HalfNormal = field(default_factory=lambda: dist.HalfNormal(3.0))
    state_phi_sd: float = 0.5

    def active_count(self, n_lags: int, n_coef: int) -> int:
        if self.p0 is not None:
            p0 = int(self.p0)
        else:
            p0 = max(1, (n_lags if n_lags > 0 else n_coef) // 2)
        if not (1 <= p0 < n_coef):
            raise ValueError(f"p0={p0} must lie in [1, n_coef={n_coef})")
        return p0


@dataclass(frozen=True)
class GaussianConfig:
    """Independent normal coefficients with a fixed standard deviation."""

    sd: float = 1.0
    sigma_prior: SigmaPrior = "auto"
    state_scale_prior: dist.HalfNormal = field(default_factory=lambda: dist.HalfNormal(3.0))
    state_phi_sd: float = 0.5

    def __post_init__(self):
        if self.sd <= 0:
            raise ValueError("sd must be positive")


PriorConfig = Union[Arr2Config, MinnesotaConfig, RhsConfig, GaussianConfig]


def resolve_sigma_prior(cfg, stats: DataStats):
    """Materialise the observation-scale prior (``"auto"`` matches the data scale)."""
    if cfg.sigma_prior == "auto":
        return dist.HalfNormal(math.sqrt(stats.var_y))
    return cfg.sigma_prior


# ---------------------------------------------------------------------------
# named prior presets used by the experiment grids and the CLI
# ---------------------------------------------------------------------------

PRIOR_PRESETS = {
    "arr2-flat": lambda: Arr2Config(concentration="flat"),
    "arr2-minnesota": lambda: Arr2Config(concentration="minnesota"),
    "arr2-sparse": lambda: Arr2Config(concentration="sparse"),
    "arr2-deterministic": lambda: Arr2Config(concentration="minnesota", group_weights="minnesota"),
    "minnesota": MinnesotaConfig,
    "rhs": RhsConfig,
    "gaussian": GaussianConfig,
}


def prior_from_name(name: str) -> PriorConfig:
    try:
        return PRIOR_PRESETS[name]()
    except KeyError:
        raise ValueError(f"unknown prior {name!r}; choose from {sorted(PRIOR_PRESETS)}") from None


def prior_name(cfg: PriorConfig) -> str:
    if isinstance(cfg, Arr2Config):
        if cfg.group_weights is not None:
            return "arr2-deterministic"
        scheme = cfg.concentration if isinstance(cfg.concentration, str) else "custom"
        return f"arr2-{scheme}"
    return {MinnesotaConfig: "minnesota", RhsConfig: "rhs", GaussianConfig: "gaussian"}[type(cfg)]


# ---------------------------------------------------------------------------
# log prior evaluation
# ---------------------------------------------------------------------------

def _state_terms(delta, phi_state, innovation_var):
    """Centred latent-trend prior: transitions plus the initial state."""
    resid = delta[1:] - phi_state * delta[:-1]
    lp = dist.normal_logpdf_var(resid, innovation_var)
    lp = lp + dist.normal_logpdf_var(delta[0], innovation_var)
    return lp


def arr2_variance_layout(spec, stats: DataStats):
    """Per-component reference variances and simplex bookkeeping for a family.

    Returns ``(labels, n_lags, n_other)`` where labels tag each simplex
    component as ``ylag`` (scaled by ``sigma2 / var_y``), ``exog`` (scaled by
    ``sigma2 / var_xj``), ``errlag`` (unscaled) or ``state``.
    """
    fam = spec.family
    if fam == "ar":
        return ["ylag"] * spec.p, spec.p, 0
    if fam == "arx":
        return ["ylag"] * spec.p + ["exog"] * spec.m, spec.p, spec.m
    if fam == "ma":
        return ["errlag"] * spec.q, spec.q, 0
    if fam == "arma":
        return ["ylag"] * spec.p + ["errlag"] * spec.q, spec.p, spec.q
    if fam == "ardl":
        if spec.grouped(spec.prior):
            return ["ylag"] * spec.p + ["exog"] * spec.m, spec.p, spec.m
        return ["ylag"] * spec.p + ["exog"] * (spec.m * spec.g), spec.p, spec.m * spec.g
    if fam == "ltx":
        n_cov = spec.n_covariate_groups(spec.prior)
        return ["state"] + ["exog"] * n_cov, 0, 1 + n_cov
    raise ValueError(f"unknown family {spec.family!r}")


def arr2_coefficient_variances(spec, stats, sigma2, tau2, psi):
    """Prior variance vector for the coefficient blocks, aligned with them."""
    fam = spec.family
    var_y = stats.var_y

    def exog_vars(psi_part, var_x):
        return sigma2 / var_x * tau2 * psi_part

    if fam == "ar":
        return {"phi": sigma2 / var_y * tau2 * psi}
    if fam == "arx":
        return {
            "phi": sigma2 / var_y * tau2 * psi[: spec.p],
            "beta": exog_vars(psi[spec.p :], stats.var_x),
        }
    if fam == "ma":
        return {"varpi": tau2 * psi}
    if fam == "arma":
        return {
            "phi": sigma2 / var_y * tau2 * psi[: spec.p],
            "varpi": tau2 * psi[spec.p :],
        }
    if fam == "ardl":
        var_x_rep = np.repeat(stats.var_x, spec.g)
        if spec.grouped(spec.prior):
            w = spec.prior.lag_weights(spec.g)
            psi_cov = psi[spec.p :]
            weights = _kron_vector(psi_cov, w)
            return {
                "phi": sigma2 / var_y * tau2 * psi[: spec.p],
                "beta": sigma2 / var_x_rep * tau2 * weights,
            }
        return {
            "phi": sigma2 / var_y * tau2 * psi[: spec.p],
            "beta": exog_vars(psi[spec.p :], var_x_rep),
        }
    if fam == "ltx":
        psi_cov = psi[1:]
        if spec.grouped(spec.prior):
            w = spec.prior.lag_weights(spec.g)
            weights = _kron_vector(psi_cov, w)
        else:
            weights = psi_cov
        return {"beta": sigma2 / stats.var_x * tau2 * weights}
    raise ValueError(f"unknown family {fam!r}")


def _kron_vector(groups, w):
    """Per-coefficient weights ``groups[i] * w[j]`` flattened group-major."""
    parts = [groups[i] * w for i in range(len(ad.value(groups)))]
    return ad.concat(parts) if any(isinstance(p, ad.Node) for p in parts) else np.concatenate(parts)


def state_innovation_variance(spec, params):
    """Variance of one latent-trend innovation under the model's prior."""
    if isinstance(spec.prior, Arr2Config):
        sigma = params["sigma"]
        tau2 = dist.beta_to_betaprime(params["r2"])
        phi_s = params["phi_state"]
        return sigma * sigma * tau2 * (1.0 - phi_s * phi_s) * params["psi"][0]
    sd = params["sigma_delta"]
    return sd * sd


def _std_normal_total(z):
    """Sum of standard normal log densities of whitened coordinates."""
    n = len(ad.value(z))
    return -0.5 * n * math.log(2.0 * math.pi) - 0.5 * ad.total(z * z)


def arr2_logprior(spec, params, cfg: Arr2Config, stats: DataStats, whitened=None):
    """Joint log density of the R2-shrinkage hierarchy for any family.

    ``whitened`` optionally maps block names to the raw sampler coordinates
    produced by the whitening transform; for those blocks the coefficient
    (or state) terms plus the transform's log-Jacobian reduce exactly to
    standard normal densities, which is what gets evaluated instead.
    """
    whitened = whitened or {}
    labels, n_lags, n_other = arr2_variance_layout(spec, stats)
    xi = cfg.concentrations(n_lags, n_other)
    psi = params["psi"]
    if len(ad.value(psi)) != xi.size:
        raise ValueError(f"psi length {len(ad.value(psi))} != component count {xi.size}")
    r2 = params["r2"]
    sigma = params["sigma"]
    tau2 = dist.beta_to_betaprime(r2)
    sigma2 = sigma * sigma

    lp = cfg.r2_dist().logpdf(r2)
    lp = lp + dist.DirichletDist(tuple(xi)).logpdf(psi)
    lp = lp + resolve_sigma_prior(cfg, stats).logpdf(sigma)

    names = [name for name, size in spec.coefficient_blocks() if size > 0]
    if all(name in whitened for name in names):
        for name in names:
            lp = lp + _std_normal_total(whitened[name])
    else:
        variances = arr2_coefficient_variances(spec, stats, sigma2, tau2, psi)
        for name, var in variances.items():
            coef = params[name]
            if len(ad.value(coef)) == 0:
                continue
            lp = lp + dist.normal_logpdf_var(coef, var)

    if spec.family == "ltx":
        phi_s = params["phi_state"]
        if "delta" in whitened:
            lp = lp + _std_normal_total(whitened["delta"])
        else:
            innovation = sigma2 * tau2 * (1.0 - phi_s * phi_s) * psi[0]
            lp = lp + _state_terms(params["delta"], phi_s, innovation)
        lp = lp + dist.normal_logpdf(phi_s, 0.0, cfg.state_phi_sd)
    return lp


def minnesota_logprior(spec, params, cfg: MinnesotaConfig, stats: DataStats, whitened=None):
    """Lag-decay prior: variance ``kappa1 / i**2`` per lag coefficient."""
    whitened = whitened or {}
    lp = 0.0
    if spec.n_lag_coefficients > 0:
        kappa1 = params["kappa1"]
        lp = lp + cfg.kappa1_prior.logpdf(kappa1)
        for name, order in (("phi", spec.p), ("varpi", spec.q)):
            if name not in params or order == 0:
                continue
            if name in whitened:
                lp = lp + _std_normal_total(whitened[name])
            else:
                decay = np.arange(1, order + 1, dtype=float) ** 2
                lp = lp + dist.normal_logpdf_var(params[name], kappa1 / decay)
    if spec.n_exog_coefficients > 0:
        kappa2 = params["kappa2"]
        lp = lp + cfg.kappa2_prior.logpdf(kappa2)
        if "beta" in whitened:
            lp = lp + _std_normal_total(whitened["beta"])
        else:
            var_x = spec.exog_reference_variances(stats)
            lp = lp + dist.normal_logpdf_var(params["beta"], stats.var_y / var_x * kappa2)
    lp = lp + resolve_sigma_prior(cfg, stats).logpdf(params["sigma"])
    if spec.family == "ltx":
        lp = lp + _baseline_state_terms(spec, params, cfg, whitened)
    return lp


def regularised_local_scales(lam, c, tau):
    """Slab-bounded squared local scales ``c^2 lam^2 / (c^2 + tau^2 lam^2)``."""
    lam2 = lam * lam
    c2 = c * c
    return c2 * lam2 / (c2 + (tau * tau) * lam2)


def rhs_logprior(spec, params, cfg: RhsConfig, stats: DataStats, whitened=None):
    """Regularised horseshoe over the stacked coefficient vector."""
    whitened = whitened or {}
    names = [name for name, size in spec.coefficient_blocks() if size > 0]
    n_coef = sum(len(ad.value(params[name])) for name in names)
    if n_coef == 0:
        raise ValueError("horseshoe prior needs at least one coefficient")
    p0 = cfg.active_count(spec.n_lag_coefficients, n_coef)
    sigma = params["sigma"]
    lam = params["lam"]
    c = params["c"]
    tau = params["tau_rhs"]

    tau0 = p0 / (n_coef - p0) / math.sqrt(stats.n_obs)
    lp = dist.halfcauchy_logpdf(tau, tau0 * sigma)
    lp = lp + ad.total(dist.halfcauchy_logpdf(lam, 1.0))
    lp = lp + cfg.c_prior.logpdf(c)

    if all(name in whitened for name in names):
        for name in names:
            lp = lp + _std_normal_total(whitened[name])
    else:
        lam_tilde2 = regularised_local_scales(lam, c, tau)
        lp = lp + dist.normal_logpdf_var(
            spec.stacked_coefficients(params), (tau * tau) * lam_tilde2
        )
    lp = lp + resolve_sigma_prior(cfg, stats).logpdf(sigma)
    if spec.family == "ltx":
        lp = lp + _baseline_state_terms(spec, params, cfg, whitened)
    return lp


def gaussian_logprior(spec, params, cfg: GaussianConfig, stats: DataStats, whitened=None):
    """Independent N(0, sd^2) coefficients."""
    coef = spec.stacked_coefficients(params)
    lp = resolve_sigma_prior(cfg, stats).logpdf(params["sigma"])
    if len(ad.value(coef)) > 0:
        v = ad.value(coef)
        lp = lp + dist.normal_logpdf_var(coef, np.full_like(v, cfg.sd**2))
    if spec.family == "ltx":
        lp = lp + _baseline_state_terms(spec, params, cfg, whitened)
    return lp


def _baseline_state_terms(spec, params, cfg, whitened=None):
    """Latent-trend terms for non-ARR2 priors: free innovation scale."""
    whitened = whitened or {}
    sd = params["sigma_delta"]
    lp = cfg.state_scale_prior.logpdf(sd)
    if "delta" in whitened:
        lp = lp + _std_normal_total(whitened["delta"])
    else:
        lp = lp + _state_terms(params["delta"], params["phi_state"], sd * sd)
    lp = lp + dist.normal_logpdf(params["phi_state"], 0.0, cfg.state_phi_sd)
    return lp


def logprior(spec, params, stats: DataStats, whitened=None):
    """Dispatch to the configured prior's log density.

    When ``whitened`` carries raw coordinates of reparameterised blocks, the
    returned value equals the plain log prior plus the whitening transform's
    log-Jacobian (see the inference transforms).
    """
    cfg = spec.prior
    if isinstance(cfg, Arr2Config):
        return arr2_logprior(spec, params, cfg, stats, whitened)
    if isinstance(cfg, MinnesotaConfig):
        return minnesota_logprior(spec, params, cfg, stats, whitened)
    if isinstance(cfg, RhsConfig):
        return rhs_logprior(spec, params, cfg, stats, whitened)
    if isinstance(cfg, GaussianConfig):
        return gaussian_logprior(spec, params, cfg, stats, whitened)
    raise TypeError(f"unsupported prior config {type(cfg).__name__}")


# ---------------------------------------------------------------------------
# prior push-forward diagnostics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PushforwardResult:
    """Implied explained variance and root diagnostics of prior draws.

    ``r2``: per-draw explained-variance fraction implied by the drawn prior
    scales through the family's variance decomposition.  ``stationary`` and
    ``max_root_modulus`` analyse the drawn lag-coefficient vectors (empty
    for families without y-lags).  ``rel_contrib`` holds squared coefficient
    draws, whose means are the per-component relative contributions.
    """

    r2: np.ndarray
    stationary: Optional[np.ndarray]
    max_root_modulus: Optional[np.ndarray]
    rel_contrib: Optional[np.ndarray]
    component_labels: list


def _draw_scalar_prior(prior, rng, n):
    return np.asarray(prior.sample(rng, size=n), dtype=float)


def prior_pushforward_r2(
    spec,
    n_draws: int,
    stats: DataStats,
    rng,
    sigma: Optional[float] = 1.0,
    include_roots: bool = True,
):
    """Sample the prior and compute implied R2, stationarity and contributions.

    ``sigma`` fixes the observation scale (the convention used for prior
    comparison plots); pass ``None`` to draw it from the configured prior.
    Non-stationary coefficient draws are flagged, never fatal.
    ``include_roots=False`` skips drawing coefficients and analysing their
    characteristic roots, which dominates the cost at large draw counts.
    """
    if n_draws < 1:
        raise ValueError("n_draws must be positive")
    cfg = spec.prior
    labels, n_lags, n_other = arr2_variance_layout(spec, stats)
    labels = list(labels)
    k = len(labels)

    if sigma is None:
        sigma_draws = _draw_scalar_prior(resolve_sigma_prior(cfg, stats), rng, n_draws)
    else:
        sigma_draws = np.full(n_draws, float(sigma))
    sigma2 = sigma_draws**2

    # reference variance multiplying each component's prior scale in the
    # family's explained-variance formula
    ref = np.empty(k)
    exog_seen = 0
    for j, lab in enumerate(labels):
        if lab == "ylag":
            ref[j] = stats.var_y
        elif lab == "exog":
            ref[j] = stats.var_x[exog_seen] if stats.var_x.size else 1.0
            exog_seen += 1
        else:  # errlag contributes sigma2 per unit scale; state handled below
            ref[j] = 1.0

    # ``scaled``: the drawn prior variance of each coefficient (for the state
    # component, its stationary variance contribution).  ``contrib``: the
    # component's term in the explained-variance numerator.
    scaled = np.empty((n_draws, k))
    if isinstance(cfg, Arr2Config):
        r2_param = cfg.r2_dist().sample(rng, size=n_draws)
        tau2 = r2_param / (1.0 - r2_param)
        xi = cfg.concentrations(n_lags, n_other)
        psi = dist.DirichletDist(tuple(xi)).sample(rng, size=n_draws)
        for j, lab in enumerate(labels):
            if lab in ("ylag", "exog"):
                scaled[:, j] = sigma2 / ref[j] * tau2 * psi[:, j]
            elif lab == "errlag":
                scaled[:, j] = tau2 * psi[:, j]
            else:  # state: stationary contribution of the latent trend
                scaled[:, j] = sigma2 * tau2 * psi[:, j]
    elif isinstance(cfg, MinnesotaConfig):
        kappa1 = cfg.kappa1_prior.sample(rng, size=n_draws)
        kappa2 = cfg.kappa2_prior.sample(rng, size=n_draws)
        lag_idx = 0
        prev = None
        for j, lab in enumerate(labels):
            lag_idx = lag_idx + 1 if lab == prev else 1
            prev = lab
            if lab in ("ylag", "errlag"):
                scaled[:, j] = kappa1 / lag_idx**2
            elif lab == "exog":
                scaled[:, j] = stats.var_y / ref[j] * kappa2
    elif isinstance(cfg, RhsConfig):
        n_coef = sum(lab != "state" for lab in labels)
        p0 = cfg.active_count(n_lags, max(n_coef, 2))
        tau0 = p0 / (n_coef - p0) / math.sqrt(stats.n_obs)
        tau = np.abs(tau0 * sigma_draws * rng.standard_cauchy(n_draws))
        c = cfg.c_prior.sample(rng, size=n_draws)
        for j, lab in enumerate(labels):
            if lab == "state":
                continue
            lam = np.abs(rng.standard_cauchy(n_draws))
            lam_t2 = c**2 * lam**2 / (c**2 + tau**2 * lam**2)
            scaled[:, j] = tau**2 * lam_t2
    elif isinstance(cfg, GaussianConfig):
        scaled[:] = cfg.sd**2
    else:
        raise TypeError(f"unsupported prior config {type(cfg).__name__}")

    contrib = np.empty((n_draws, k))
    for j, lab in enumerate(labels):
        if lab in ("ylag", "exog"):
            contrib[:, j] = scaled[:, j] * ref[j]
        elif lab == "errlag":
            contrib[:, j] = scaled[:, j] * sigma2
        elif isinstance(cfg, Arr2Config):
            contrib[:, j] = scaled[:, j]
        else:
            # baseline latent trend: free scale, stationary variance
            sd = cfg.state_scale_prior.sample(rng, size=n_draws)
            phi_s = _truncated_state_phi(cfg.state_phi_sd, rng, n_draws)
            contrib[:, j] = sd**2 / (1.0 - phi_s**2)
            scaled[:, j] = contrib[:, j]

    numerator = contrib.sum(axis=1)
    r2 = numerator / (numerator + sigma2)

    stationary = None
    max_root = None
    rel_contrib = None
    if include_roots and n_lags > 0 and labels[0] == "ylag":
        from .tsmath import stationary_mask

        ylag_cols = [j for j, lab in enumerate(labels) if lab == "ylag"]
        var_phi = scaled[:, ylag_cols]
        phi_draws = rng.standard_normal((n_draws, len(ylag_cols))) * np.sqrt(var_phi)
        stationary = stationary_mask(phi_draws)
        comps = np.zeros((n_draws, len(ylag_cols), len(ylag_cols)))
        comps[:, 0, :] = phi_draws
        if len(ylag_cols) > 1:
            comps[:, 1:, :-1] = np.eye(len(ylag_cols) - 1)
        max_root = np.max(np.abs(np.linalg.eigvals(comps)), axis=1)
        rel_contrib = phi_draws**2
    return PushforwardResult(
        r2=r2,
        stationary=stationary,
        max_root_modulus=max_root,
        rel_contrib=rel_contrib,
        component_labels=labels,
    )


def _truncated_state_phi(sd, rng, n):
    draws = rng.normal(0.0, sd, size=n)
    while True:
        bad = np.abs(draws) >= 1.0
        if not np.any(bad):
            return draws
        draws[bad] = rng.normal(0.0, sd, size=int(bad.sum()))
