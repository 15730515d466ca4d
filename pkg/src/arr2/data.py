"""Time-series data container and the sample statistics the priors plug in."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tsmath import sample_variance


@dataclass(frozen=True)
class DataStats:
    """Plug-in variance estimates used by the prior scalings."""

    var_y: float
    var_x: np.ndarray  # per-column sample variance of the design, empty if none
    n_obs: int


class TimeSeriesData:
    """Target series plus an optional exogenous design matrix.

    ``y_shift`` records any constant subtracted from the raw target so that
    fits on centred data can be reported back on the original scale.
    """

    def __init__(self, y, x=None, y_shift: float = 0.0):
        y = np.asarray(y, dtype=float)
        if y.ndim != 1 or y.size == 0:
            raise ValueError("y must be a non-empty 1-d array")
        if not np.all(np.isfinite(y)):
            raise ValueError("y contains non-finite values")
        if x is not None:
            x = np.asarray(x, dtype=float)
            if x.ndim != 2 or x.shape[0] != y.size:
                raise ValueError(f"x must be (T, m) with T={y.size}, got {x.shape}")
            if not np.all(np.isfinite(x)):
                raise ValueError("x contains non-finite values")
        self.y = y
        self.x = x
        self.y_shift = float(y_shift)
        self._cache = {}

    @property
    def n(self) -> int:
        return self.y.size

    @property
    def n_covariates(self) -> int:
        return 0 if self.x is None else self.x.shape[1]

    def centered(self) -> "TimeSeriesData":
        """Subtract the sample mean from the target."""
        mean = float(np.mean(self.y))
        return TimeSeriesData(self.y - mean, self.x, y_shift=self.y_shift + mean)

    def head(self, n: int) -> "TimeSeriesData":
        """First ``n`` time points (used by leave-future-out refits)."""
        if not (1 <= n <= self.n):
            raise ValueError(f"head length {n} outside 1..{self.n}")
        return TimeSeriesData(self.y[:n], None if self.x is None else self.x[:n], self.y_shift)

    def stats(self) -> DataStats:
        if "stats" not in self._cache:
            var_x = (
                np.array([sample_variance(self.x[:, j]) for j in range(self.n_covariates)])
                if self.x is not None
                else np.empty(0)
            )
            self._cache["stats"] = DataStats(
                var_y=sample_variance(self.y), var_x=var_x, n_obs=self.n
            )
        return self._cache["stats"]

    def lag_matrix(self, p: int, start: int) -> np.ndarray:
        """Rows ``t = start..T-1`` (0-based) of lagged targets ``y[t-1..t-p]``."""
        key = ("lag", p, start)
        if key not in self._cache:
            t_idx = np.arange(start, self.n)
            self._cache[key] = self.y[t_idx[:, None] - np.arange(1, p + 1)[None, :]]
        return self._cache[key]

    def lagged_design(self, g: int, start: int) -> np.ndarray:
        """Covariate-major lagged design: columns (x1 lag1..g, x2 lag1..g, ...)."""
        key = ("design", g, start)
        if key not in self._cache:
            t_idx = np.arange(start, self.n)
            cols = [self.x[t_idx - j, l] for l in range(self.x.shape[1]) for j in range(1, g + 1)]
            self._cache[key] = np.column_stack(cols)
        return self._cache[key]
