"""Bayesian time-series models with R2-based joint shrinkage priors.

Subpackages and modules:

- ``distributions``: univariate and simplex distributions used by the priors.
- ``tsmath``: deterministic time-series algebra (autocovariances, roots, PACF).
- ``priors``: prior configurations and log-density contributions.
- ``models``: likelihoods, posteriors and predictive densities per model family.
- ``inference``: parameter transforms, reverse-mode gradients, NUTS sampling
  and convergence diagnostics.
- ``dgp``: seeded simulators for the experiment data-generating processes.
- ``evaluation``: RMSE, leave-future-out predictive scores, R2 decompositions.
- ``cli``: command-line surface and the experiment runner.
"""

__version__ = "0.1.0"

from .data import TimeSeriesData
from .models import ModelSpec

__all__ = ["TimeSeriesData", "ModelSpec", "__version__"]
