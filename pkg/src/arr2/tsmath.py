"""Deterministic time-series algebra.

Autocovariances from coefficient vectors, stationarity via characteristic
roots, partial autocorrelations, and the sample variance estimator that the
prior scalings plug in for the conditional variance.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

ROOT_BOUNDARY_TOL = 1e-10


@dataclass(frozen=True)
class StationarityReport:
    """Root analysis of ``1 - phi_1 u - ... - phi_p u^p``.

    ``roots`` holds the finite characteristic roots (zero companion
    eigenvalues correspond to roots at infinity and are dropped, so an
    all-zero coefficient vector reports an empty root list).  Stationarity
    requires every root strictly outside the unit circle; a root on the
    boundary within ``ROOT_BOUNDARY_TOL`` counts as non-stationary because
    the process variance is no longer finite there.
    """

    roots: np.ndarray
    max_inverse_modulus: float
    is_stationary: bool
    periods: np.ndarray = field(default_factory=lambda: np.empty(0))


def companion_matrix(phi: np.ndarray) -> np.ndarray:
    phi = np.asarray(phi, dtype=float)
    p = phi.size
    c = np.zeros((p, p))
    c[0, :] = phi
    if p > 1:
        c[1:, :-1] = np.eye(p - 1)
    return c


def stationarity(phi) -> StationarityReport:
    """Classify an AR coefficient vector via companion-matrix eigenvalues."""
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    if not np.all(np.isfinite(phi)):
        raise ValueError("coefficients must be finite")
    trimmed = np.trim_zeros(phi, "b")
    if trimmed.size == 0:
        return StationarityReport(np.empty(0, dtype=complex), 0.0, True)
    eig = np.linalg.eigvals(companion_matrix(trimmed))
    eig = eig[np.abs(eig) > 1e-12]
    max_inv = float(np.max(np.abs(eig))) if eig.size else 0.0
    roots = 1.0 / eig if eig.size else np.empty(0, dtype=complex)
    complex_mask = np.abs(roots.imag) > 1e-12
    periods = 2.0 * np.pi / np.abs(np.angle(roots[complex_mask])) if np.any(complex_mask) else np.empty(0)
    return StationarityReport(
        roots=roots,
        max_inverse_modulus=max_inv,
        is_stationary=bool(max_inv < 1.0 - ROOT_BOUNDARY_TOL),
        periods=periods,
    )


def stationary_mask(phi_draws: np.ndarray) -> np.ndarray:
    """Vectorised stationarity flags for an (n, p) array of coefficient draws."""
    phi_draws = np.atleast_2d(np.asarray(phi_draws, dtype=float))
    n, p = phi_draws.shape
    comps = np.zeros((n, p, p))
    comps[:, 0, :] = phi_draws
    if p > 1:
        comps[:, 1:, :-1] = np.eye(p - 1)
    eig = np.linalg.eigvals(comps)
    return np.max(np.abs(eig), axis=1) < 1.0 - ROOT_BOUNDARY_TOL


def yule_walker(phi, sigma2: float, n_lags: int) -> np.ndarray:
    """Autocovariances gamma(0..n_lags) of the stationary process given by ``phi``.

    Solves the defining linear system; ``gamma(0)`` is the stationary
    variance of the process.  Raises for non-stationary coefficients, naming
    the offending root modulus.
    """
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    if sigma2 <= 0:
        raise ValueError(f"sigma2 must be positive, got {sigma2}")
    report = stationarity(phi)
    if not report.is_stationary:
        raise ValueError(
            "non-stationary coefficients: a characteristic root has modulus "
            f"{1.0 / report.max_inverse_modulus:.6g} (must exceed 1)"
        )
    p = phi.size
    a = np.zeros((p + 1, p + 1))
    rhs = np.zeros(p + 1)
    rhs[0] = sigma2
    for k in range(p + 1):
        a[k, k] += 1.0
        for i in range(1, p + 1):
            a[k, abs(k - i)] -= phi[i - 1]
    gamma_head = np.linalg.solve(a, rhs)
    if n_lags <= p:
        return gamma_head[: n_lags + 1]
    gamma = np.empty(n_lags + 1)
    gamma[: p + 1] = gamma_head
    for k in range(p + 1, n_lags + 1):
        gamma[k] = np.dot(phi, gamma[k - 1 :: -1][:p])
    return gamma


def partial_autocorrelations(gamma) -> np.ndarray:
    """PACF at lags 1..K from autocovariances gamma(0..K) (Durbin-Levinson)."""
    gamma = np.asarray(gamma, dtype=float)
    if gamma.size < 2:
        raise ValueError("need at least gamma(0) and gamma(1)")
    if gamma[0] <= 0:
        raise ValueError("gamma(0) must be positive")
    n = gamma.size - 1
    pacf = np.zeros(n)
    prev = np.zeros(0)
    v = gamma[0]
    for k in range(1, n + 1):
        if v <= 1e-300:
            raise ValueError(f"degenerate autocovariance sequence at lag {k}")
        num = gamma[k] - (np.dot(prev, gamma[1:k][::-1]) if k > 1 else 0.0)
        a = num / v
        pacf[k - 1] = a
        cur = np.empty(k)
        cur[:-1] = prev - a * prev[::-1]
        cur[-1] = a
        v *= 1.0 - a * a
        prev = cur
    return pacf


def sample_variance(y) -> float:
    """Unbiased sample variance (divisor ``n - 1``)."""
    y = np.asarray(y, dtype=float)
    if y.size < 2:
        raise ValueError("need at least two observations")
    return float(np.var(y, ddof=1))
