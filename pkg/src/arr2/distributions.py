"""Distributions used by the prior hierarchies.

Includes the beta distribution in mean/precision form, its beta-prime and
generalised-beta-prime transforms, the Dirichlet, and the scalar priors drawn
on by the model configurations (normal, half-normal, half-Cauchy, gamma,
half-Student-t).

All log densities are fully normalised so that predictive scores remain
comparable across priors.  ``logpdf`` on plain numeric input returns ``-inf``
outside the support instead of raising; invalid *parameters* raise at
construction time.  The module-level ``*_logpdf`` helpers additionally accept
traced values (see :mod:`arr2.inference.autodiff`) for use inside gradient
computations, where inputs are guaranteed in-support by the transforms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import betaln, gammaln

from .inference import autodiff as ad

LOG_2PI = math.log(2.0 * math.pi)


def _require_positive(name, *vals):
    for v in vals:
        if not np.all(np.asarray(v) > 0):
            raise ValueError(f"{name} must be positive, got {v}")


# ---------------------------------------------------------------------------
# traced-friendly log density kernels (location/scale may be Node or float)
# ---------------------------------------------------------------------------

def normal_logpdf(x, mean, sd):
    z = (x - mean) / sd
    return -0.5 * LOG_2PI - ad.log(sd) - 0.5 * z * z


def normal_logpdf_var(x, var):
    """Zero-mean normal parameterised by variance; summed over elements."""
    t = ad.log(var) + x * x / var
    if isinstance(ad.value(t), np.ndarray):
        t = ad.total(t)
        n = len(ad.value(x))
    else:
        n = 1
    return -0.5 * (n * LOG_2PI + t)


def halfnormal_logpdf(x, sd):
    if not isinstance(x, ad.Node) and np.ndim(x) == 0 and x < 0:
        return -np.inf
    return math.log(2.0) + normal_logpdf(x, 0.0, sd)


def halfcauchy_logpdf(x, scale):
    if not isinstance(x, ad.Node) and np.ndim(x) == 0 and x < 0:
        return -np.inf
    z = x / scale
    return math.log(2.0 / math.pi) - ad.log(scale) - ad.log1p(z * z)


def gamma_logpdf(x, shape, rate):
    if not isinstance(x, ad.Node) and np.ndim(x) == 0 and x <= 0:
        return -np.inf
    const = shape * math.log(rate) - gammaln(shape)
    return const + (shape - 1.0) * ad.log(x) - rate * x


def halfstudent_logpdf(x, df, scale):
    if not isinstance(x, ad.Node) and np.ndim(x) == 0 and x < 0:
        return -np.inf
    const = (
        math.log(2.0)
        + gammaln((df + 1.0) / 2.0)
        - gammaln(df / 2.0)
        - 0.5 * math.log(df * math.pi)
        - math.log(scale)
    )
    z = x / scale
    return const - 0.5 * (df + 1.0) * ad.log1p(z * z / df)


# ---------------------------------------------------------------------------
# distribution objects
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BetaMP:
    """Beta distribution with mean ``mu`` in (0,1) and precision ``phi`` > 0."""

    mu: float
    phi: float

    def __post_init__(self):
        if not (0.0 < self.mu < 1.0):
            raise ValueError(f"mu must lie in (0,1), got {self.mu}")
        _require_positive("phi", self.phi)

    @property
    def a(self) -> float:
        return self.mu * self.phi

    @property
    def b(self) -> float:
        return (1.0 - self.mu) * self.phi

    def logpdf(self, x):
        if not isinstance(x, ad.Node) and not (0.0 < x < 1.0):
            return -np.inf
        return (
            (self.a - 1.0) * ad.log(x)
            + (self.b - 1.0) * ad.log1p(-x)
            - betaln(self.a, self.b)
        )

    def sample(self, rng, size=None):
        return rng.beta(self.a, self.b, size=size)


@dataclass(frozen=True)
class BetaPrime:
    """Beta-prime with the same (mu, phi) shapes as :class:`BetaMP`.

    If ``r ~ BetaMP(mu, phi)`` then ``r / (1 - r)`` follows this law.
    """

    mu: float
    phi: float

    def __post_init__(self):
        if not (0.0 < self.mu < 1.0):
            raise ValueError(f"mu must lie in (0,1), got {self.mu}")
        _require_positive("phi", self.phi)

    @property
    def a(self) -> float:
        return self.mu * self.phi

    @property
    def b(self) -> float:
        return (1.0 - self.mu) * self.phi

    def logpdf(self, x):
        if not isinstance(x, ad.Node) and x <= 0:
            return -np.inf
        return (self.a - 1.0) * ad.log(x) - (self.a + self.b) * ad.log1p(x) - betaln(self.a, self.b)

    def cdf(self, x):
        from scipy.stats import beta as beta_dist

        x = np.asarray(x, dtype=float)
        return beta_dist(self.a, self.b).cdf(x / (1.0 + x))

    def sample(self, rng, size=None):
        r = rng.beta(self.a, self.b, size=size)
        return r / (1.0 - r)


@dataclass(frozen=True)
class GBP:
    """Generalised beta-prime: ``d * z**(1/c)`` for ``z ~ BetaPrime`` shapes (a, b)."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        _require_positive("GBP parameters", self.a, self.b, self.c, self.d)

    def logpdf(self, x):
        if not isinstance(x, ad.Node) and x <= 0:
            return -np.inf
        z = (x / self.d) ** self.c
        base = (self.a - 1.0) * ad.log(z) - (self.a + self.b) * ad.log1p(z) - betaln(self.a, self.b)
        return base + math.log(self.c) + ad.log(z) - ad.log(x)

    def sample(self, rng, size=None):
        r = rng.beta(self.a, self.b, size=size)
        return self.d * (r / (1.0 - r)) ** (1.0 / self.c)


@dataclass(frozen=True)
class DirichletDist:
    """Dirichlet over the probability simplex, concentrations ``xi`` > 0."""

    xi: tuple

    def __post_init__(self):
        xi = np.asarray(self.xi, dtype=float)
        if xi.ndim != 1 or xi.size == 0:
            raise ValueError("xi must be a non-empty vector")
        _require_positive("xi", xi)
        object.__setattr__(self, "xi", tuple(float(v) for v in xi))

    @property
    def dim(self) -> int:
        return len(self.xi)

    def logpdf(self, psi):
        xi = np.asarray(self.xi)
        const = float(gammaln(xi.sum()) - gammaln(xi).sum())
        if not isinstance(psi, ad.Node):
            psi_v = np.asarray(psi, dtype=float)
            if psi_v.size != xi.size:
                raise ValueError(f"simplex length {psi_v.size} != concentration length {xi.size}")
            if np.any(psi_v < 0) or abs(psi_v.sum() - 1.0) > 1e-9:
                return -np.inf
            if np.any((psi_v == 0) & (xi != 1.0)):
                return -np.inf
            if xi.size == 1:
                return const
            with np.errstate(divide="ignore", invalid="ignore"):
                terms = (xi - 1.0) * np.log(psi_v)
            return const + float(np.sum(np.where(xi == 1.0, 0.0, terms)))
        if len(ad.value(psi)) != xi.size:
            raise ValueError(f"simplex length {len(ad.value(psi))} != concentration length {xi.size}")
        if xi.size == 1 or np.all(xi == 1.0):
            return const
        return const + ad.total((xi - 1.0) * ad.log(psi))

    def sample(self, rng, size=None):
        # last component closed to the simplex exactly
        g = rng.gamma(np.asarray(self.xi), 1.0, size=None if size is None else (size, self.dim))
        g = np.atleast_2d(g)
        p = g / g.sum(axis=1, keepdims=True)
        p[:, -1] = 1.0 - p[:, :-1].sum(axis=1)
        np.clip(p, 0.0, None, out=p)
        return p[0] if size is None else p


@dataclass(frozen=True)
class Normal:
    mean: float
    sd: float

    def __post_init__(self):
        _require_positive("sd", self.sd)

    def logpdf(self, x):
        return normal_logpdf(x, self.mean, self.sd)

    def sample(self, rng, size=None):
        return rng.normal(self.mean, self.sd, size=size)


@dataclass(frozen=True)
class HalfNormal:
    sd: float

    def __post_init__(self):
        _require_positive("sd", self.sd)

    def logpdf(self, x):
        return halfnormal_logpdf(x, self.sd)

    def sample(self, rng, size=None):
        return np.abs(rng.normal(0.0, self.sd, size=size))


@dataclass(frozen=True)
class HalfCauchy:
    scale: float

    def __post_init__(self):
        _require_positive("scale", self.scale)

    def logpdf(self, x):
        return halfcauchy_logpdf(x, self.scale)

    def sample(self, rng, size=None):
        return np.abs(self.scale * rng.standard_cauchy(size=size))


@dataclass(frozen=True)
class GammaShapeRate:
    """Gamma in shape/rate form; mean is ``shape / rate``."""

    shape: float
    rate: float

    def __post_init__(self):
        _require_positive("shape and rate", self.shape, self.rate)

    def logpdf(self, x):
        return gamma_logpdf(x, self.shape, self.rate)

    def sample(self, rng, size=None):
        return rng.gamma(self.shape, 1.0 / self.rate, size=size)


@dataclass(frozen=True)
class HalfStudentT:
    df: float
    scale: float

    def __post_init__(self):
        _require_positive("df and scale", self.df, self.scale)

    def logpdf(self, x):
        return halfstudent_logpdf(x, self.df, self.scale)

    def sample(self, rng, size=None):
        return np.abs(self.scale * rng.standard_t(self.df, size=size))


# scalar priors allowed in configuration files
ScalarDist = (Normal, HalfNormal, HalfCauchy, GammaShapeRate, HalfStudentT)


# ---------------------------------------------------------------------------
# transformation chain between R2, total variance, and GBP scales
# ---------------------------------------------------------------------------

def beta_to_betaprime(r2):
    """Map explained variance ``r2`` in (0,1) to total variance ``r2/(1-r2)``."""
    if isinstance(r2, ad.Node):
        return r2 / (1.0 - r2)
    r2 = float(r2)
    if not (0.0 < r2 < 1.0):
        raise ValueError(f"r2 must lie strictly inside (0,1), got {r2}")
    return r2 / (1.0 - r2)


def betaprime_to_beta(x):
    """Inverse of :func:`beta_to_betaprime`."""
    if isinstance(x, ad.Node):
        return x / (1.0 + x)
    x = float(x)
    if x <= 0:
        raise ValueError(f"x must be positive, got {x}")
    return x / (1.0 + x)


def gbp_from_betaprime(x, c, d):
    """Push a beta-prime variate through the GBP transform ``d * x**(1/c)``."""
    for name, v in (("x", x), ("c", c), ("d", d)):
        if float(v) <= 0:
            raise ValueError(f"{name} must be positive, got {v}")
    return d * float(x) ** (1.0 / c)
