"""Convergence diagnostics: split R-hat and rank-normalised effective sample size."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import norm, rankdata


@dataclass(frozen=True)
class Diagnostics:
    names: list
    rhat: np.ndarray
    ess_bulk: np.ndarray
    ess_tail: np.ndarray
    divergences: int
    divergence_rate: float
    step_size: np.ndarray
    inv_metric_range: tuple

    @property
    def max_rhat(self) -> float:
        finite = self.rhat[np.isfinite(self.rhat)]
        return float(np.max(finite)) if finite.size else float("nan")

    def summary(self) -> dict:
        return {
            "max_rhat": self.max_rhat,
            "min_ess_bulk": float(np.nanmin(self.ess_bulk)) if self.ess_bulk.size else float("nan"),
            "min_ess_tail": float(np.nanmin(self.ess_tail)) if self.ess_tail.size else float("nan"),
            "divergences": self.divergences,
            "divergence_rate": self.divergence_rate,
        }


def _split_chains(x: np.ndarray) -> np.ndarray:
    """Halve each chain, doubling the chain count (drops an odd draw)."""
    m, n = x.shape
    half = n // 2
    return np.vstack([x[:, :half], x[:, half : 2 * half]])


def split_rhat(x: np.ndarray) -> float:
    """Split R-hat of one parameter from (chains, draws).

    Constant chains make the statistic undefined; reported as NaN.
    """
    x = _split_chains(np.asarray(x, dtype=float))
    m, n = x.shape
    if n < 2:
        return float("nan")
    chain_means = x.mean(axis=1)
    chain_vars = x.var(axis=1, ddof=1)
    w = chain_vars.mean()
    b = n * chain_means.var(ddof=1)
    if w <= 0:
        return float("nan")
    var_plus = (n - 1) / n * w + b / n
    return float(np.sqrt(var_plus / w))


def _autocovariance(x: np.ndarray) -> np.ndarray:
    """Biased autocovariance per chain via FFT: (chains, lags)."""
    m, n = x.shape
    centered = x - x.mean(axis=1, keepdims=True)
    size = 2 ** int(np.ceil(np.log2(2 * n)))
    f = np.fft.rfft(centered, n=size, axis=1)
    acov = np.fft.irfft(f * np.conj(f), n=size, axis=1)[:, :n].real
    return acov / n


def _ess_from_chains(x: np.ndarray) -> float:
    """Effective sample size with Geyer's initial monotone sequence."""
    m, n = x.shape
    if n < 4:
        return float("nan")
    acov = _autocovariance(x)
    chain_var = acov[:, 0] * n / (n - 1)
    w = chain_var.mean()
    mean_acov = acov.mean(axis=0)
    if m > 1:
        var_plus = (n - 1) / n * w + n * x.mean(axis=1).var(ddof=1) / n
    else:
        var_plus = (n - 1) / n * w
    if var_plus <= 0 or not np.isfinite(var_plus):
        return float("nan")

    rho = 1.0 - (w - mean_acov) / var_plus
    # Geyer pairs: sum rho[2k+1] + rho[2k+2]; keep while positive, force monotone
    pair_sums = []
    t = 1
    while t + 1 < n:
        pair = rho[t] + rho[t + 1]
        if pair < 0:
            break
        pair_sums.append(pair)
        t += 2
    running_min = np.inf
    tau = 1.0
    for pair in pair_sums:
        running_min = min(running_min, pair)
        tau += 2.0 * running_min
    ess = m * n / tau
    return float(min(ess, m * n))


def _rank_normalise(x: np.ndarray) -> np.ndarray:
    flat = x.reshape(-1)
    ranks = rankdata(flat, method="average")
    z = norm.ppf((ranks - 0.375) / (flat.size + 0.25))
    return z.reshape(x.shape)


def ess_bulk(x: np.ndarray) -> float:
    x = _split_chains(np.asarray(x, dtype=float))
    if np.allclose(x, x.flat[0]):
        return float("nan")
    return _ess_from_chains(_rank_normalise(x))


def ess_tail(x: np.ndarray) -> float:
    """Minimum ESS of the 5% and 95% quantile indicators."""
    x = _split_chains(np.asarray(x, dtype=float))
    if np.allclose(x, x.flat[0]):
        return float("nan")
    out = np.inf
    for q in (0.05, 0.95):
        indicator = (x <= np.quantile(x, q)).astype(float)
        if np.allclose(indicator, indicator.flat[0]):
            continue
        out = min(out, _ess_from_chains(_rank_normalise(indicator)))
    return float(out) if np.isfinite(out) else float("nan")


def diagnostics(draws) -> Diagnostics:
    """Per-parameter split R-hat and bulk/tail ESS for a draws container.

    Requires at least 2 chains and 4 draws per chain for meaningful output;
    with fewer, statistics degrade to NaN flags rather than raising.
    """
    arr = draws.draws  # (chains, n, dim)
    dim = arr.shape[2]
    rhat = np.empty(dim)
    bulk = np.empty(dim)
    tail = np.empty(dim)
    for j in range(dim):
        x = arr[:, :, j]
        if np.allclose(x, x.flat[0]):
            rhat[j] = float("nan")
            bulk[j] = float("nan")
            tail[j] = float("nan")
            continue
        rhat[j] = split_rhat(x)
        bulk[j] = ess_bulk(x)
        tail[j] = ess_tail(x)
    n_div = int(draws.divergent.sum())
    return Diagnostics(
        names=list(draws.names),
        rhat=rhat,
        ess_bulk=bulk,
        ess_tail=tail,
        divergences=n_div,
        divergence_rate=n_div / max(draws.n_draws, 1),
        step_size=np.asarray(draws.step_size, dtype=float),
        inv_metric_range=(float(np.min(draws.inv_metric)), float(np.max(draws.inv_metric))),
    )
