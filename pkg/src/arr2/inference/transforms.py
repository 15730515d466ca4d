"""Bijections between constrained model parameters and sampler coordinates.

Block kinds: regression coefficients, log-transformed positives (scales),
logit-transformed unit interval (explained variance), stick-built simplex
(variance decomposition weights), tanh-mapped (-1, 1) (state AR
coefficient), and the latent-trend states.

Two blocks are reparameterised rather than mapped one-to-one:

- States are non-centred: the sampler sees standardised innovations which
  the constraining map scales and accumulates through the AR(1) recursion.
- Coefficient blocks under hierarchical priors are whitened by their prior
  standard deviation (which depends on the scale parameters), so the
  sampler explores near-unit-scale coordinates instead of a funnel whose
  width is set by the shrinkage hyperparameters.

Both carry their exact log-Jacobian, and ``constrain`` accepts a traced
vector so gradients flow through transform, priors and likelihood in one
tape.  Scale-bearing blocks are evaluated before the blocks that depend on
them; the external layout (vector offsets, column names) is unaffected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logit

from .. import priors
from . import autodiff as ad

# blocks whose single value is reported as a bare scalar (and bare column name)
SCALAR_BLOCKS = {"sigma", "r2", "kappa1", "kappa2", "c", "tau_rhs", "phi_state", "sigma_delta"}

# evaluation order: scales first, then whitened coefficients, then states
_PASS2 = {"coef", "states"}


@dataclass(frozen=True)
class Block:
    name: str
    kind: str  # coef | positive | unit | simplex | interval | states
    size: int  # constrained length

    @property
    def unconstrained_size(self) -> int:
        if self.kind == "simplex":
            return self.size - 1
        return self.size


def blocks_for(spec, n_obs: int) -> list:
    """Ordered parameter blocks for a model spec fitted to ``n_obs`` points."""
    blocks = [Block(name, "coef", size) for name, size in spec.coefficient_blocks() if size > 0]
    prior = spec.prior
    if isinstance(prior, priors.Arr2Config):
        labels, _, _ = priors.arr2_variance_layout(spec, None)
        blocks.append(Block("psi", "simplex", len(labels)))
        blocks.append(Block("r2", "unit", 1))
    elif isinstance(prior, priors.MinnesotaConfig):
        if spec.n_lag_coefficients > 0:
            blocks.append(Block("kappa1", "positive", 1))
        if spec.n_exog_coefficients > 0:
            blocks.append(Block("kappa2", "positive", 1))
    elif isinstance(prior, priors.RhsConfig):
        n_coef = sum(size for _, size in spec.coefficient_blocks())
        blocks.append(Block("lam", "positive", n_coef))
        blocks.append(Block("c", "positive", 1))
        blocks.append(Block("tau_rhs", "positive", 1))
    elif isinstance(prior, priors.GaussianConfig):
        pass
    else:
        raise TypeError(f"unsupported prior config {type(prior).__name__}")
    blocks.append(Block("sigma", "positive", 1))
    if spec.family == "ltx":
        blocks.append(Block("phi_state", "interval", 1))
        if not isinstance(prior, priors.Arr2Config):
            blocks.append(Block("sigma_delta", "positive", 1))
        blocks.append(Block("delta", "states", n_obs + 1))
    return blocks


class TransformMap:
    """Forward/inverse transform with log-Jacobian for one model spec."""

    def __init__(self, spec, n_obs: int, stats=None):
        self.spec = spec
        self.n_obs = n_obs
        self.stats = stats
        self.blocks = blocks_for(spec, n_obs)
        self.dim = sum(b.unconstrained_size for b in self.blocks)

    def column_names(self) -> list:
        """Deterministic flattened names of the constrained parameters."""
        names = []
        for b in self.blocks:
            if b.name == "delta":
                names.extend(f"delta.{t}" for t in range(b.size))
            elif b.name == "beta" and self.spec.family == "ardl":
                names.extend(
                    f"beta.{l + 1}.{j + 1}" for l in range(self.spec.m) for j in range(self.spec.g)
                )
            elif b.size == 1 and b.name in SCALAR_BLOCKS:
                names.append(b.name)
            else:
                names.extend(f"{b.name}.{k + 1}" for k in range(b.size))
        return names

    def _segments(self, u):
        off = 0
        for b in self.blocks:
            width = b.unconstrained_size
            yield b, (u[off : off + width] if width > 0 else None)
            off += width

    def _coef_sds(self, params):
        """Prior standard deviation of each coefficient block, or None."""
        cfg = self.spec.prior
        if isinstance(cfg, priors.GaussianConfig):
            return None
        if self.stats is None:
            raise ValueError("this transform needs data statistics (pass stats=)")
        if isinstance(cfg, priors.Arr2Config):
            sigma = params["sigma"]
            tau2 = params["r2"] / (1.0 - params["r2"])
            variances = priors.arr2_coefficient_variances(
                self.spec, self.stats, sigma * sigma, tau2, params["psi"]
            )
            return {name: ad.sqrt(var) for name, var in variances.items()}
        if isinstance(cfg, priors.MinnesotaConfig):
            out = {}
            for name, order in (("phi", self.spec.p), ("varpi", self.spec.q)):
                if order > 0 and any(b.name == name for b in self.blocks):
                    decay = np.arange(1.0, order + 1.0)
                    out[name] = ad.sqrt(params["kappa1"]) / decay
            if self.spec.n_exog_coefficients > 0:
                ref = self.spec.exog_reference_variances(self.stats)
                out["beta"] = ad.sqrt(params["kappa2"] * (self.stats.var_y / ref))
            return out
        if isinstance(cfg, priors.RhsConfig):
            lam = params["lam"]
            c, tau = params["c"], params["tau_rhs"]
            sd_all = ad.sqrt((tau * tau) * priors.regularised_local_scales(lam, c, tau))
            out = {}
            off = 0
            for name, size in self.spec.coefficient_blocks():
                if size > 0:
                    out[name] = sd_all[off : off + size]
                    off += size
            return out
        raise TypeError(f"unsupported prior config {type(cfg).__name__}")

    # -- constraining direction (tape-compatible) ---------------------------

    def constrain(self, u, fused: bool = False):
        """Map unconstrained ``u`` to a parameter dict plus the log-Jacobian
        of the constraining map (to add to the constrained-space density).

        With ``fused=True`` the return value is ``(params, logj, whitened)``
        where ``whitened`` maps reparameterised block names to their raw
        sampler coordinates and ``logj`` omits those blocks' Jacobian terms.
        Evaluating the prior on the whitened coordinates (standard normals)
        is then exactly equivalent to the constrained prior plus the omitted
        Jacobians, at a fraction of the tape work.
        """
        params = {}
        whitened = {}
        logj = 0.0
        deferred = []
        for b, seg in self._segments(u):
            if b.kind in _PASS2:
                deferred.append((b, seg))
                continue
            if b.kind == "positive":
                x = ad.exp(seg)
                params[b.name] = x[0] if b.size == 1 else x
                logj = logj + ad.total(seg)
            elif b.kind == "unit":
                x = ad.sigmoid(seg[0])
                params[b.name] = x
                logj = logj + ad.log(x) + ad.log1p(-x)
            elif b.kind == "interval":
                x = ad.tanh(seg[0])
                params[b.name] = x
                logj = logj + ad.log1p(-x * x)
            elif b.kind == "simplex":
                psi, lj = _stick_forward(seg, b.size)
                params[b.name] = psi
                logj = logj + lj
            else:
                raise ValueError(f"unknown block kind {b.kind!r}")
        coef_sds = self._coef_sds(params) if deferred else None
        for b, seg in deferred:
            if b.kind == "coef":
                if coef_sds is None:
                    params[b.name] = seg
                else:
                    sd = coef_sds[b.name]
                    params[b.name] = sd * seg
                    if fused:
                        whitened[b.name] = seg
                    else:
                        logj = logj + ad.total(ad.log(sd))
            else:  # states
                scale = _state_scale(self.spec, params)
                delta = ad.ar_filter(ad.concat([params["phi_state"]]), scale * seg)
                params[b.name] = delta
                if fused:
                    whitened[b.name] = seg
                else:
                    logj = logj + b.size * ad.log(scale)
        if fused:
            return params, logj, whitened
        return params, logj

    # -- unconstraining direction (plain numpy) ------------------------------

    def unconstrain(self, params):
        """Map a constrained parameter dict to ``(u, log_jacobian)``.

        The returned Jacobian is that of the constraining map evaluated at
        the same point.  Boundary values (r2 in {0,1}, zero simplex weights,
        nonpositive scales) raise a domain error.
        """
        u = np.empty(self.dim)
        logj = 0.0
        coef_sds = None
        off = 0
        offsets = {}
        for b in self.blocks:
            offsets[b.name] = off
            off += b.unconstrained_size
        # pass 1: scale-bearing blocks
        for b in self.blocks:
            if b.kind in _PASS2:
                continue
            off = offsets[b.name]
            width = b.unconstrained_size
            val = np.atleast_1d(np.asarray(params[b.name], dtype=float))
            if val.size != b.size:
                raise ValueError(f"block {b.name!r} expects length {b.size}, got {val.size}")
            if b.kind == "positive":
                if np.any(val <= 0):
                    raise ValueError(f"{b.name} must be positive")
                u[off : off + width] = np.log(val)
                logj += float(np.sum(np.log(val)))
            elif b.kind == "unit":
                if not (0.0 < val[0] < 1.0):
                    raise ValueError(f"{b.name} must lie strictly inside (0,1)")
                u[off] = logit(val[0])
                logj += math.log(val[0]) + math.log1p(-val[0])
            elif b.kind == "interval":
                if not (-1.0 < val[0] < 1.0):
                    raise ValueError(f"{b.name} must lie strictly inside (-1,1)")
                u[off] = np.arctanh(val[0])
                logj += math.log1p(-val[0] ** 2)
            elif b.kind == "simplex":
                seg, lj = _stick_inverse(val)
                u[off : off + width] = seg
                logj += lj
        # pass 2: coefficients and states
        for b in self.blocks:
            if b.kind not in _PASS2:
                continue
            off = offsets[b.name]
            width = b.unconstrained_size
            val = np.atleast_1d(np.asarray(params[b.name], dtype=float))
            if val.size != b.size:
                raise ValueError(f"block {b.name!r} expects length {b.size}, got {val.size}")
            if b.kind == "coef":
                if isinstance(self.spec.prior, priors.GaussianConfig):
                    u[off : off + width] = val
                else:
                    if coef_sds is None:
                        coef_sds = self._coef_sds(params)
                    sd = np.asarray(coef_sds[b.name], dtype=float)
                    u[off : off + width] = val / sd
                    logj += float(np.sum(np.log(sd)))
            else:  # states
                scale = float(_state_scale(self.spec, params))
                phi_s = float(params["phi_state"])
                z = np.empty(val.size)
                z[0] = val[0] / scale
                z[1:] = (val[1:] - phi_s * val[:-1]) / scale
                u[off : off + width] = z
                logj += b.size * math.log(scale)
        return u, logj


def _state_scale(spec, params):
    """Innovation standard deviation of the latent trend (may be traced)."""
    if isinstance(spec.prior, priors.Arr2Config):
        tau2 = params["r2"] / (1.0 - params["r2"])
        phi_s = params["phi_state"]
        var = params["sigma"] * params["sigma"] * tau2 * (1.0 - phi_s * phi_s) * params["psi"][0]
        return ad.sqrt(var)
    return params["sigma_delta"]


def _stick_offsets(k: int) -> np.ndarray:
    return np.log(np.arange(k - 1, 0, -1, dtype=float))


def _stick_forward(seg, k: int):
    """Stick-breaking simplex from ``k - 1`` unconstrained values."""
    if k == 1:
        return np.ones(1), 0.0
    v = ad.sigmoid(seg - _stick_offsets(k))
    log1mv = ad.log1p(-v)
    csum = ad.cumsum(log1mv)
    remaining = ad.concat([0.0, csum[:-1]]) if k > 2 else ad.concat([0.0])
    head = v * ad.exp(remaining)
    tail = ad.exp(csum[k - 2 :])
    psi = ad.concat([head, tail])
    logj = ad.total(ad.log(v) + log1mv + remaining)
    return psi, logj


def _stick_inverse(psi: np.ndarray):
    k = psi.size
    if np.any(psi <= 0) or abs(psi.sum() - 1.0) > 1e-8:
        raise ValueError("simplex values must be positive and sum to one")
    if k == 1:
        return np.empty(0), 0.0
    seg = np.empty(k - 1)
    offsets = _stick_offsets(k)
    remaining = 1.0
    logj = 0.0
    for idx in range(k - 1):
        v = psi[idx] / remaining
        if not (0.0 < v < 1.0):
            raise ValueError("simplex values must lie strictly inside the simplex")
        seg[idx] = logit(v) + offsets[idx]
        logj += math.log(v) + math.log1p(-v) + math.log(remaining)
        remaining *= 1.0 - v
    return seg, logj
