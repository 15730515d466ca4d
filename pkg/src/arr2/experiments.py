"""Simulation-study runner: simulate, fit, and score over configuration grids.

Each grid cell (data process x fitted model x prior x replication) is an
independent work unit.  All randomness derives from the master seed through
a documented splitting rule, so dispatching cells to a worker pool cannot
change any result:

    seeds(cell) = SeedSequence((master_seed, cell_index)).generate_state(2)

with the first word seeding the data generator and the second the sampler.
Results are assembled in cell order regardless of completion order.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor

import numpy as np

_THREAD_LIMIT = None


def _single_threaded_blas():
    """Pin BLAS pools to one thread per worker; spinning threads from
    multiple workers otherwise fight over the same cores."""
    global _THREAD_LIMIT
    try:
        import threadpoolctl

        _THREAD_LIMIT = threadpoolctl.threadpool_limits(1)
    except Exception:
        pass

from . import dgp as dgps
from . import evaluation, models, priors
from .inference.nuts import SamplerConfig, nuts_sample

AR_PRIOR_LIST = ["arr2-flat", "arr2-minnesota", "minnesota", "rhs", "gaussian"]
ARX_PRIOR_LIST = ["arr2-flat", "arr2-minnesota", "minnesota", "rhs"]
LTX_PRIOR_LIST = ["arr2-flat", "arr2-minnesota", "arr2-deterministic", "gaussian"]

RESULT_COLUMNS = [
    "cell", "family", "dgp", "p", "q", "m", "g", "rho", "state_scale", "T",
    "prior", "rep", "data_seed", "fit_seed",
    "rmse_phi", "rmse_beta", "rmse_state_sd", "rmse_delta",
    "mlpd", "elpd", "n_folds", "lfo_failed",
    "r2_mean", "r2_q05", "r2_q95",
    "max_rhat", "min_ess_bulk", "divergences",
]


def cell_seeds(master_seed: int, cell_index: int) -> tuple:
    words = np.random.SeedSequence((int(master_seed), int(cell_index))).generate_state(2)
    return int(words[0]), int(words[1])


def build_cells(cfg: dict) -> list:
    """Enumerate the grid deterministically; returns payload dicts."""
    family = cfg["family"]
    reps = int(cfg["reps"])
    cells = []

    def add(**kw):
        kw.setdefault("family", family)
        kw["cell"] = len(cells)
        cells.append(kw)

    if family == "ar":
        for dgp_name in cfg["dgps"]:
            for p in cfg["p_grid"]:
                for prior in cfg["priors"]:
                    for rep in range(reps):
                        add(dgp=dgp_name, p=int(p), prior=prior, rep=rep, T=int(cfg["T"]))
    elif family == "arx":
        for m in cfg["m_grid"]:
            for rho in cfg["rho_grid"]:
                for prior in cfg["priors"]:
                    for rep in range(reps):
                        add(
                            dgp="arx", p=int(cfg["p_fit"]), m=int(m), rho=float(rho),
                            prior=prior, rep=rep, T=int(cfg["T"]),
                        )
    elif family == "ltx":
        for scale in cfg["scale_grid"]:
            for T in cfg["T_grid"]:
                for prior in cfg["priors"]:
                    for rep in range(reps):
                        add(
                            dgp="ltx", state_scale=float(scale), T=int(T),
                            m=int(cfg["m_base"]), g=int(cfg["lags"]), rho=float(cfg["rho"]),
                            prior=prior, rep=rep,
                        )
    else:
        raise ValueError(f"unknown experiment family {cfg['family']!r}")
    for cell in cells:
        cell["master_seed"] = int(cfg["seed"])
        cell["sampler"] = dict(cfg["sampler"])
        cell["lfo"] = cfg.get("lfo", "none")
    return cells


def run_cell(cell: dict) -> dict:
    """Simulate, fit and score one grid cell; returns a tidy result row."""
    data_seed, fit_seed = cell_seeds(cell["master_seed"], cell["cell"])
    rng = np.random.default_rng(data_seed)
    family = cell["family"]
    prior_cfg = priors.prior_from_name(cell["prior"])

    row = {k: cell.get(k) for k in ("cell", "family", "dgp", "prior", "rep")}
    row.update(
        p=cell.get("p", 0), q=0, m=cell.get("m", 0), g=cell.get("g", 0),
        rho=cell.get("rho"), state_scale=cell.get("state_scale"), T=cell.get("T"),
        data_seed=data_seed, fit_seed=fit_seed,
    )

    if family == "ar":
        data = dgps.simulate_ar(dgps.ArDgp.named(cell["dgp"], n_obs=cell["T"]), rng)
        spec = models.ModelSpec("ar", p=cell["p"], prior=prior_cfg)
        truth = {"phi": _padded(dgps.AR_PROFILES[cell["dgp"]], cell["p"])}
    elif family == "arx":
        data, truth_raw = dgps.simulate_arx(
            dgps.ArxDgp(m=cell["m"], rho=cell["rho"], n_obs=cell["T"]), rng
        )
        spec = models.ModelSpec("arx", p=cell["p"], m=cell["m"], prior=prior_cfg)
        truth = {"phi": _padded(truth_raw["phi"], cell["p"]), "beta": truth_raw["beta"]}
    elif family == "ltx":
        process = dgps.LtxDgp(
            m=cell["m"], lags=cell["g"], rho=cell["rho"],
            sigma_delta=cell["state_scale"], n_obs=cell["T"],
        )
        data, truth_raw = dgps.simulate_ltx(process, rng)
        grouped = isinstance(prior_cfg, priors.Arr2Config) and prior_cfg.group_weights is not None
        spec = models.ModelSpec(
            "ltx", m=data.n_covariates, g=cell["g"] if grouped else 0, prior=prior_cfg
        )
        truth = {
            "beta": truth_raw["beta"],
            "delta": truth_raw["delta"],
            "state_sd": truth_raw["sigma_delta"],
        }
    else:
        raise ValueError(f"unknown family {family!r}")

    scfg = SamplerConfig(seed=fit_seed % 2**31, **cell["sampler"])
    draws, diag = nuts_sample(spec, data, scfg)

    if "phi" in truth:
        row["rmse_phi"] = evaluation.rmse(draws.block_matrix("phi").mean(axis=0), truth["phi"])
    if "beta" in truth:
        row["rmse_beta"] = evaluation.rmse(draws.block_matrix("beta").mean(axis=0), truth["beta"])
    if family == "ltx":
        state_sd = evaluation.posterior_state_sd(spec, draws)
        row["rmse_state_sd"] = abs(float(state_sd.mean()) - truth["state_sd"])
        row["rmse_delta"] = evaluation.rmse(
            draws.block_matrix("delta").mean(axis=0), truth["delta"]
        )

    r2 = models.bayes_r2_draws(spec, draws, data)
    row["r2_mean"] = float(r2.mean())
    row["r2_q05"], row["r2_q95"] = (float(q) for q in np.quantile(r2, [0.05, 0.95]))
    row["max_rhat"] = diag.max_rhat
    row["min_ess_bulk"] = float(np.nanmin(diag.ess_bulk))
    row["divergences"] = diag.divergences

    mode = cell.get("lfo", "none")
    if mode != "none":
        # fixed mode refits once on the training half; refit mode per fold
        lfo = evaluation.elpd_lfo(spec, data, scfg, refit=(mode == "refit"))
        row["mlpd"] = lfo.mlpd
        row["elpd"] = lfo.elpd
        row["n_folds"] = len(lfo.fold_scores)
        row["lfo_failed"] = lfo.n_failed
    return row


def _padded(truth: np.ndarray, p: int) -> np.ndarray:
    out = np.zeros(p)
    out[: min(p, truth.size)] = truth[:p]
    return out


def run_experiment(cfg: dict, jobs: int = 1, log=None) -> list:
    """Run all cells (optionally in a process pool) and return rows in order."""
    cells = build_cells(cfg)
    rows = [None] * len(cells)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs, initializer=_single_threaded_blas) as pool:
            for row in pool.map(run_cell, cells):
                rows[row["cell"]] = row
                if log:
                    log(f"cell {row['cell'] + 1}/{len(cells)} done")
    else:
        for cell in cells:
            row = run_cell(cell)
            rows[row["cell"]] = row
            if log:
                log(f"cell {row['cell'] + 1}/{len(cells)} done")
    return rows
