"""Adaptive No-U-Turn sampling of the unconstrained posterior.

Implements the recursive tree-doubling sampler with slice acceptance, dual
averaging of the step size toward a target acceptance statistic, and
diagonal mass-matrix estimation over a fast/slow/fast warmup schedule.
Chains run independently with generators seeded as ``seed + chain_index``
and are merged in chain order, so results are reproducible bit for bit for
a fixed configuration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional

import numpy as np

from .. import models
from . import autodiff as ad
from .transforms import SCALAR_BLOCKS, TransformMap

ENERGY_DIVERGENCE = 1000.0  # tree exploration stops past this energy error
MAX_INIT_ATTEMPTS = 100


@dataclass(frozen=True)
class SamplerConfig:
    chains: int = 4
    warmup: int = 1000
    samples: int = 1000
    target_accept: float = 0.8
    max_treedepth: int = 10
    seed: int = 0

    def __post_init__(self):
        if min(self.chains, self.warmup, self.samples, self.max_treedepth) < 1:
            raise ValueError("chains, warmup, samples, max_treedepth must be positive")
        if not (0.0 < self.target_accept < 1.0):
            raise ValueError("target_accept must lie in (0,1)")


@dataclass
class DrawsMatrix:
    """Posterior draws in constrained space with per-draw sampler diagnostics."""

    names: list
    draws: np.ndarray  # (chains, n, dim_constrained)
    divergent: np.ndarray  # (chains, n) bool
    energy: np.ndarray  # (chains, n)
    step_size: np.ndarray  # (chains,)
    inv_metric: np.ndarray  # (chains, dim_unconstrained)
    blocks: list = field(default_factory=list)  # (name, size) pairs

    @property
    def n_chains(self) -> int:
        return self.draws.shape[0]

    @property
    def n_per_chain(self) -> int:
        return self.draws.shape[1]

    @property
    def n_draws(self) -> int:
        return self.draws.shape[0] * self.draws.shape[1]

    def stacked(self) -> np.ndarray:
        return self.draws.reshape(-1, self.draws.shape[2])

    def column(self, name: str) -> np.ndarray:
        return self.stacked()[:, self.names.index(name)]

    def block_slice(self, name: str) -> slice:
        off = 0
        for bname, size in self.blocks:
            if bname == name:
                return slice(off, off + size)
            off += size
        raise KeyError(name)

    def block_matrix(self, name: str) -> np.ndarray:
        """All draws of one block as (n_total, size)."""
        return self.stacked()[:, self.block_slice(name)]

    def iter_params(self) -> Iterator[dict]:
        """Yield one constrained parameter dict per draw (chains merged)."""
        flat = self.stacked()
        slices = []
        off = 0
        for bname, size in self.blocks:
            slices.append((bname, slice(off, off + size), size))
            off += size
        for row in flat:
            params = {}
            for bname, sl, size in slices:
                vals = row[sl]
                params[bname] = float(vals[0]) if bname in SCALAR_BLOCKS else vals
            yield params

    @classmethod
    def from_param_draws(cls, blocks, param_draws):
        """Build a draws container from explicit parameter dicts (one chain).

        Useful for frozen-posterior evaluations in tests and scoring.
        """
        rows = []
        names = []
        for bname, size in blocks:
            if size == 1 and bname in SCALAR_BLOCKS:
                names.append(bname)
            else:
                names.extend(f"{bname}.{k + 1}" for k in range(size))
        for params in param_draws:
            row = np.concatenate(
                [np.atleast_1d(np.asarray(params[bname], dtype=float)) for bname, _ in blocks]
            )
            rows.append(row)
        draws = np.asarray(rows)[None, :, :]
        n = draws.shape[1]
        return cls(
            names=names,
            draws=draws,
            divergent=np.zeros((1, n), dtype=bool),
            energy=np.zeros((1, n)),
            step_size=np.ones(1),
            inv_metric=np.ones((1, draws.shape[2])),
            blocks=list(blocks),
        )


# ---------------------------------------------------------------------------
# gradient of the unconstrained-space log density
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GradResult:
    logdensity: float
    gradient: Optional[np.ndarray]

    @property
    def ok(self) -> bool:
        return self.gradient is not None and np.isfinite(self.logdensity)


def make_logdensity(spec, data) -> tuple:
    """Unconstrained-space log density closure and its transform map.

    The returned function evaluates log posterior plus transform Jacobian and
    its gradient via the reverse-mode tape.
    """
    spec.validate_data(data)
    stats = data.stats()
    tmap = TransformMap(spec, data.n, stats)

    def logdens(u: np.ndarray) -> GradResult:
        def traced(root):
            # fused form: whitened blocks contribute standard-normal terms
            # through the prior instead of explicit Jacobian entries
            params, logj, whitened = tmap.constrain(root, fused=True)
            ll = models.loglik(spec, params, data)
            from .. import priors as _priors

            return ll + _priors.logprior(spec, params, stats, whitened) + logj

        try:
            with np.errstate(over="ignore", invalid="ignore", divide="ignore", under="ignore"):
                val, grad = ad.value_and_grad(traced, u)
        except (ZeroDivisionError, OverflowError, FloatingPointError, ValueError):
            # saturated transforms (e.g. explained variance pinned at 1.0)
            return GradResult(-np.inf, None)
        if grad is not None and not np.all(np.isfinite(grad)):
            return GradResult(-np.inf, None)
        return GradResult(val, grad)

    return logdens, tmap


def grad_logposterior(spec, data, u: np.ndarray) -> GradResult:
    """Gradient of the unconstrained log posterior at ``u`` (with Jacobians)."""
    logdens, _ = make_logdensity(spec, data)
    return logdens(np.asarray(u, dtype=float))


# ---------------------------------------------------------------------------
# core sampler on an arbitrary log density
# ---------------------------------------------------------------------------

@dataclass
class _Tree:
    u_minus: np.ndarray
    r_minus: np.ndarray
    g_minus: np.ndarray
    u_plus: np.ndarray
    r_plus: np.ndarray
    g_plus: np.ndarray
    u_prop: np.ndarray
    g_prop: np.ndarray
    lp_prop: float
    n_valid: int
    keep_going: bool
    alpha_sum: float
    n_alpha: int
    diverged: bool


def _leapfrog(f, u, r, g, eps, inv_metric):
    r_half = r + 0.5 * eps * g
    u_new = u + eps * inv_metric * r_half
    res = f(u_new)
    if not res.ok:
        return None
    r_new = r_half + 0.5 * eps * res.gradient
    return u_new, r_new, res.gradient, res.logdensity


def _kinetic(r, inv_metric) -> float:
    with np.errstate(over="ignore", invalid="ignore"):
        return 0.5 * float(np.dot(r * r, inv_metric))


def _find_reasonable_epsilon(f, u, g, lp, inv_metric, rng) -> float:
    eps = 1.0
    r = rng.standard_normal(u.size) / np.sqrt(inv_metric)
    step = _leapfrog(f, u, r, g, eps, inv_metric)
    for _ in range(30):
        if step is not None:
            break
        eps *= 0.5
        step = _leapfrog(f, u, r, g, eps, inv_metric)
    if step is None:
        return 1e-6
    _, r_new, _, lp_new = step
    log_ratio = (lp_new - _kinetic(r_new, inv_metric)) - (lp - _kinetic(r, inv_metric))
    direction = 1.0 if log_ratio > math.log(0.5) else -1.0
    for _ in range(50):
        eps *= 2.0**direction
        step = _leapfrog(f, u, r, g, eps, inv_metric)
        if step is None:
            if direction > 0:
                eps *= 0.5
                break
            continue
        _, r_new, _, lp_new = step
        log_ratio = (lp_new - _kinetic(r_new, inv_metric)) - (lp - _kinetic(r, inv_metric))
        if direction * log_ratio <= direction * math.log(0.5):
            break
    return max(eps, 1e-10)


def _build_tree(f, u, r, g, log_slice, direction, depth, eps, inv_metric, h0, rng) -> Optional[_Tree]:
    if depth == 0:
        step = _leapfrog(f, u, r, g, direction * eps, inv_metric)
        if step is None:
            return _Tree(u, r, g, u, r, g, u, g, -np.inf, 0, False, 0.0, 1, True)
        u1, r1, g1, lp1 = step
        h = lp1 - _kinetic(r1, inv_metric)
        n_valid = int(log_slice <= h)
        diverged = log_slice - ENERGY_DIVERGENCE >= h
        alpha = min(1.0, math.exp(min(0.0, h - h0)))
        return _Tree(u1, r1, g1, u1, r1, g1, u1, g1, lp1, n_valid, not diverged, alpha, 1, diverged)
    inner = _build_tree(f, u, r, g, log_slice, direction, depth - 1, eps, inv_metric, h0, rng)
    if not inner.keep_going:
        return inner
    if direction == -1:
        outer = _build_tree(
            f, inner.u_minus, inner.r_minus, inner.g_minus, log_slice, direction, depth - 1,
            eps, inv_metric, h0, rng,
        )
        inner.u_minus, inner.r_minus, inner.g_minus = outer.u_minus, outer.r_minus, outer.g_minus
    else:
        outer = _build_tree(
            f, inner.u_plus, inner.r_plus, inner.g_plus, log_slice, direction, depth - 1,
            eps, inv_metric, h0, rng,
        )
        inner.u_plus, inner.r_plus, inner.g_plus = outer.u_plus, outer.r_plus, outer.g_plus
    total = inner.n_valid + outer.n_valid
    if outer.n_valid > 0 and rng.random() < outer.n_valid / max(total, 1):
        inner.u_prop, inner.g_prop, inner.lp_prop = outer.u_prop, outer.g_prop, outer.lp_prop
    inner.alpha_sum += outer.alpha_sum
    inner.n_alpha += outer.n_alpha
    inner.n_valid = total
    inner.diverged = inner.diverged or outer.diverged
    inner.keep_going = (
        outer.keep_going
        and not outer.diverged
        and _no_u_turn(inner.u_minus, inner.u_plus, inner.r_minus, inner.r_plus, inv_metric)
    )
    return inner


def _no_u_turn(u_minus, u_plus, r_minus, r_plus, inv_metric) -> bool:
    span = u_plus - u_minus
    return (
        float(np.dot(span, inv_metric * r_minus)) >= 0.0
        and float(np.dot(span, inv_metric * r_plus)) >= 0.0
    )


@dataclass
class _Adaptation:
    """Dual averaging state (step size) plus Welford variance (metric)."""

    mu: float
    log_eps: float
    log_eps_bar: float = 0.0
    h_bar: float = 0.0
    count: int = 0
    gamma: float = 0.05
    t0: float = 10.0
    kappa: float = 0.75

    def update(self, accept_stat: float, target: float):
        self.count += 1
        frac = 1.0 / (self.count + self.t0)
        self.h_bar = (1.0 - frac) * self.h_bar + frac * (target - accept_stat)
        self.log_eps = self.mu - math.sqrt(self.count) / self.gamma * self.h_bar
        w = self.count ** (-self.kappa)
        self.log_eps_bar = w * self.log_eps + (1.0 - w) * self.log_eps_bar


class _Welford:
    def __init__(self, dim):
        self.n = 0
        self.mean = np.zeros(dim)
        self.m2 = np.zeros(dim)

    def push(self, x):
        self.n += 1
        delta = x - self.mean
        self.mean += delta / self.n
        self.m2 += delta * (x - self.mean)

    def variance(self):
        if self.n < 2:
            return np.ones_like(self.mean)
        var = self.m2 / (self.n - 1)
        # regularise toward unit scale as Welford counts stay small
        return (self.n / (self.n + 5.0)) * var + 1e-3 * (5.0 / (self.n + 5.0))


def _warmup_windows(warmup: int):
    """(step-size-only, slow-window-ends, final-fast) schedule."""
    if warmup < 20:
        return warmup, [], 0
    init = max(1, int(round(0.15 * warmup)))
    term = max(1, int(round(0.10 * warmup)))
    slow = warmup - init - term
    ends = []
    width = max(1, slow // 15)
    pos = 0
    while pos < slow:
        step = min(width, slow - pos)
        if slow - (pos + step) < width:  # absorb the remainder into the last window
            step = slow - pos
        pos += step
        ends.append(init + pos)
        width *= 2
    return init, ends, term


def _nuts_chain(f, dim, cfg: SamplerConfig, chain_idx: int):
    rng = np.random.default_rng(cfg.seed + chain_idx)
    u = None
    for _ in range(MAX_INIT_ATTEMPTS):
        cand = rng.uniform(-2.0, 2.0, size=dim)
        res = f(cand)
        if res.ok:
            u, g, lp = cand, res.gradient, res.logdensity
            break
    if u is None:
        raise RuntimeError(f"initialisation failed after {MAX_INIT_ATTEMPTS} attempts (density -inf)")

    inv_metric = np.ones(dim)
    eps = _find_reasonable_epsilon(f, u, g, lp, inv_metric, rng)
    adapt = _Adaptation(mu=math.log(10.0 * eps), log_eps=math.log(eps))
    welford = _Welford(dim)
    init_len, slow_ends, _ = _warmup_windows(cfg.warmup)
    slow_start = init_len

    draws_u = np.empty((cfg.samples, dim))
    divergent = np.zeros(cfg.samples, dtype=bool)
    energy = np.empty(cfg.samples)
    warmup_divergences = 0

    total_iters = cfg.warmup + cfg.samples
    for it in range(total_iters):
        warming = it < cfg.warmup
        step = math.exp(adapt.log_eps if warming else adapt.log_eps_bar)
        r0 = rng.standard_normal(dim) / np.sqrt(inv_metric)
        h0 = lp - _kinetic(r0, inv_metric)
        log_slice = h0 + math.log1p(-rng.random())  # log of u ~ U(0, exp(h0))
        tree = _Tree(u, r0, g, u, r0, g, u, g, lp, 1, True, 0.0, 1, False)
        n_valid = 1
        depth = 0
        diverged = False
        while tree.keep_going and depth < cfg.max_treedepth:
            direction = -1 if rng.random() < 0.5 else 1
            if direction == -1:
                sub = _build_tree(
                    f, tree.u_minus, tree.r_minus, tree.g_minus, log_slice, direction,
                    depth, step, inv_metric, h0, rng,
                )
                tree.u_minus, tree.r_minus, tree.g_minus = sub.u_minus, sub.r_minus, sub.g_minus
            else:
                sub = _build_tree(
                    f, tree.u_plus, tree.r_plus, tree.g_plus, log_slice, direction,
                    depth, step, inv_metric, h0, rng,
                )
                tree.u_plus, tree.r_plus, tree.g_plus = sub.u_plus, sub.r_plus, sub.g_plus
            diverged = diverged or sub.diverged
            if sub.keep_going and sub.n_valid > 0 and rng.random() < sub.n_valid / max(n_valid, 1):
                u, g, lp = sub.u_prop.copy(), sub.g_prop.copy(), sub.lp_prop
            n_valid += sub.n_valid
            depth += 1
            if not (
                sub.keep_going
                and _no_u_turn(tree.u_minus, tree.u_plus, tree.r_minus, tree.r_plus, inv_metric)
            ):
                break
        accept_stat = sub.alpha_sum / max(sub.n_alpha, 1)

        if warming:
            adapt.update(accept_stat, cfg.target_accept)
            if diverged:
                warmup_divergences += 1
            if slow_ends and slow_start <= it < slow_ends[-1]:
                welford.push(u.copy())
            if slow_ends and (it + 1) in slow_ends:
                inv_metric = welford.variance()
                welford = _Welford(dim)
                res = f(u)
                eps = _find_reasonable_epsilon(f, u, res.gradient, res.logdensity, inv_metric, rng)
                adapt = _Adaptation(mu=math.log(10.0 * eps), log_eps=math.log(eps))
        else:
            idx = it - cfg.warmup
            draws_u[idx] = u
            divergent[idx] = diverged
            energy[idx] = -(lp - _kinetic(r0, inv_metric))
    return draws_u, divergent, energy, math.exp(adapt.log_eps_bar), inv_metric, warmup_divergences


def sample_from_logdensity(f: Callable[[np.ndarray], GradResult], dim: int, cfg: SamplerConfig):
    """Run NUTS chains on an arbitrary unconstrained log density.

    Returns ``(draws_u, divergent, energy, step_sizes, inv_metrics)`` with
    ``draws_u`` of shape (chains, samples, dim), merged in chain order.
    """
    draws = np.empty((cfg.chains, cfg.samples, dim))
    divergent = np.zeros((cfg.chains, cfg.samples), dtype=bool)
    energy = np.empty((cfg.chains, cfg.samples))
    steps = np.empty(cfg.chains)
    metrics = np.empty((cfg.chains, dim))
    for chain in range(cfg.chains):
        d, dv, en, st, im, _ = _nuts_chain(f, dim, cfg, chain)
        draws[chain], divergent[chain], energy[chain] = d, dv, en
        steps[chain], metrics[chain] = st, im
    return draws, divergent, energy, steps, metrics


def nuts_sample(spec, data, cfg: SamplerConfig):
    """Fit a model spec by NUTS; returns draws (constrained) and diagnostics."""
    from .diagnostics import diagnostics as compute_diagnostics

    logdens, tmap = make_logdensity(spec, data)
    draws_u, divergent, energy, steps, metrics = sample_from_logdensity(logdens, tmap.dim, cfg)

    names = tmap.column_names()
    blocks = [(b.name, b.size) for b in tmap.blocks]
    dim_c = sum(size for _, size in blocks)
    out = np.empty((cfg.chains, cfg.samples, dim_c))
    for chain in range(cfg.chains):
        for i in range(cfg.samples):
            params, _ = tmap.constrain(draws_u[chain, i])
            out[chain, i] = np.concatenate(
                [np.atleast_1d(np.asarray(params[bname], dtype=float)) for bname, _ in blocks]
            )
    result = DrawsMatrix(
        names=names,
        draws=out,
        divergent=divergent,
        energy=energy,
        step_size=steps,
        inv_metric=metrics,
        blocks=blocks,
    )
    return result, compute_diagnostics(result)
