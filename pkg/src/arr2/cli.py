"""Command-line surface.

Subcommands: ``fit`` (sample a model on a CSV dataset), ``simulate`` (write
a dataset from one of the benchmark processes), ``experiment`` (the
simulate/fit/score grids), ``prior-check`` (push-forward draws of a prior's
implied explained variance), and ``diagnose`` (recompute convergence
diagnostics from a draws file).

Configuration is layered: built-in defaults, then an optional config file
of flat ``key = value`` sections (``--config``), then command-line flags of
the same names.  Every run writes its fully resolved configuration next to
its outputs; rerunning from that file reproduces the outputs byte for byte.
Exit codes: 0 success, 1 internal or runtime error, 2 user/config error.
"""

from __future__ import annotations

import os
import sys

import click
import numpy as np

from . import evaluation, experiments, io, models, priors
from .data import DataStats
from .dgp import AR_PROFILES, ArDgp, ArxDgp, LtxDgp, simulate_ar, simulate_arx, simulate_ltx
from .inference.diagnostics import diagnostics as compute_diagnostics
from .inference.nuts import SamplerConfig, nuts_sample
from .io import UserError

PRIOR_CHOICES = sorted(priors.PRIOR_PRESETS)
DGP_CHOICES = ["minnesota", "oscillation", "delayed", "arx", "ltx"]


def _merge(defaults: dict, file_cfg: dict, overrides: dict) -> dict:
    """defaults <- config file <- explicit CLI flags; all values strings."""
    resolved = {s: dict(kv) for s, kv in defaults.items()}
    for section, kv in file_cfg.items():
        if section not in resolved:
            raise UserError(f"unknown config section [{section}]")
        for key, value in kv.items():
            if key not in resolved[section]:
                raise UserError(f"unknown config key {key!r} in section [{section}]")
            resolved[section][key] = value
    for (section, key), value in overrides.items():
        if value is not None:
            resolved[section][key] = _to_str(value)
    return resolved


def _to_str(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (tuple, list)):
        return ",".join(str(x) for x in v)
    return str(v)


def _as_bool(s: str) -> bool:
    if s.lower() in ("true", "1", "yes", "on"):
        return True
    if s.lower() in ("false", "0", "no", "off"):
        return False
    raise UserError(f"expected a boolean, got {s!r}")


def _as_int(s: str, key: str) -> int:
    try:
        return int(s)
    except ValueError:
        raise UserError(f"{key}: expected an integer, got {s!r}") from None


def _as_float(s: str, key: str) -> float:
    try:
        return float(s)
    except ValueError:
        raise UserError(f"{key}: expected a number, got {s!r}") from None


def _as_list(s: str, conv=str) -> list:
    return [conv(x.strip()) for x in str(s).split(",") if x.strip() != ""]


def build_prior(cfg: dict, key_prefix: str = "prior"):
    """Construct a prior configuration from a resolved config section."""
    name = cfg["name"]
    if name not in priors.PRIOR_PRESETS:
        raise UserError(f"{key_prefix}.name: unknown prior {name!r} (choose from {PRIOR_CHOICES})")
    prior = priors.prior_from_name(name)
    if isinstance(prior, priors.Arr2Config):
        kwargs = {}
        kwargs["mu_r2"] = _as_float(cfg["mu_r2"], "prior.mu_r2")
        kwargs["phi_r2"] = _as_float(cfg["phi_r2"], "prior.phi_r2")
        conc = cfg["concentration"]
        if conc not in ("flat", "sparse", "minnesota"):
            kwargs["concentration"] = tuple(_as_list(conc, float))
        else:
            kwargs["concentration"] = conc
        gw = cfg["group_weights"]
        if gw:
            kwargs["group_weights"] = gw if gw in ("flat", "minnesota") else tuple(_as_list(gw, float))
        try:
            return priors.Arr2Config(**kwargs)
        except ValueError as exc:
            raise UserError(f"prior: {exc}") from None
    if isinstance(prior, priors.RhsConfig) and cfg.get("p0"):
        return priors.RhsConfig(p0=_as_int(cfg["p0"], "prior.p0"))
    if isinstance(prior, priors.GaussianConfig) and cfg.get("gaussian_sd"):
        return priors.GaussianConfig(sd=_as_float(cfg["gaussian_sd"], "prior.gaussian_sd"))
    return prior


def build_sampler(cfg: dict) -> SamplerConfig:
    try:
        return SamplerConfig(
            chains=_as_int(cfg["chains"], "sampler.chains"),
            warmup=_as_int(cfg["warmup"], "sampler.warmup"),
            samples=_as_int(cfg["samples"], "sampler.samples"),
            target_accept=_as_float(cfg["target_accept"], "sampler.target_accept"),
            max_treedepth=_as_int(cfg["max_treedepth"], "sampler.max_treedepth"),
            seed=_as_int(cfg["seed"], "sampler.seed"),
        )
    except ValueError as exc:
        raise UserError(f"sampler: {exc}") from None


def _write_resolved(out_dir: str, resolved: dict, stem: str = "resolved"):
    io.ensure_dir(out_dir)
    path = os.path.join(out_dir, f"{stem}.cfg")
    io.write_config(path, resolved)
    return io.config_hash(resolved), path


@click.group()
def cli():
    """Bayesian time-series models with R2-based joint shrinkage priors."""


# ---------------------------------------------------------------------------
# fit
# ---------------------------------------------------------------------------

FIT_DEFAULTS = {
    "run": {"seed": "0", "out": "fit-output", "allow_nonconverged": "false", "center": "true"},
    "model": {"family": "ar", "p": "0", "q": "0", "m": "0", "g": "0"},
    "prior": {
        "name": "arr2-flat", "mu_r2": str(1.0 / 3.0), "phi_r2": "3.0",
        "concentration": "flat", "group_weights": "", "p0": "", "gaussian_sd": "1.0",
    },
    "sampler": {
        "chains": "4", "warmup": "1000", "samples": "1000",
        "target_accept": "0.8", "max_treedepth": "10",
    },
}


@cli.command()
@click.option("--data", "data_path", required=True, type=click.Path(), help="Dataset CSV (t,y[,x1..xm]).")
@click.option("--config", "config_path", type=click.Path(), default=None)
@click.option("--family", type=click.Choice(models.FAMILIES), default=None)
@click.option("--p", type=int, default=None)
@click.option("--q", type=int, default=None)
@click.option("--m", type=int, default=None)
@click.option("--g", type=int, default=None)
@click.option("--prior", "prior_name", type=click.Choice(PRIOR_CHOICES), default=None)
@click.option("--mu-r2", type=float, default=None)
@click.option("--phi-r2", type=float, default=None)
@click.option("--concentration", default=None)
@click.option("--group-weights", default=None)
@click.option("--p0", type=int, default=None)
@click.option("--chains", type=int, default=None)
@click.option("--warmup", type=int, default=None)
@click.option("--samples", type=int, default=None)
@click.option("--target-accept", type=float, default=None)
@click.option("--max-treedepth", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--center/--no-center", "center", default=None)
@click.option("--allow-nonconverged", is_flag=True, default=None)
@click.option("--out", default=None, help="Output directory.")
def fit(data_path, config_path, **flags):
    """Sample the posterior of a model on a CSV dataset."""
    file_cfg = io.read_config(config_path) if config_path else {}
    overrides = {
        ("model", "family"): flags["family"],
        ("model", "p"): flags["p"],
        ("model", "q"): flags["q"],
        ("model", "m"): flags["m"],
        ("model", "g"): flags["g"],
        ("prior", "name"): flags["prior_name"],
        ("prior", "mu_r2"): flags["mu_r2"],
        ("prior", "phi_r2"): flags["phi_r2"],
        ("prior", "concentration"): flags["concentration"],
        ("prior", "group_weights"): flags["group_weights"],
        ("prior", "p0"): flags["p0"],
        ("sampler", "chains"): flags["chains"],
        ("sampler", "warmup"): flags["warmup"],
        ("sampler", "samples"): flags["samples"],
        ("sampler", "target_accept"): flags["target_accept"],
        ("sampler", "max_treedepth"): flags["max_treedepth"],
        ("run", "seed"): flags["seed"],
        ("run", "center"): flags["center"],
        ("run", "allow_nonconverged"): flags["allow_nonconverged"],
        ("run", "out"): flags["out"],
    }
    resolved = _merge(FIT_DEFAULTS, file_cfg, overrides)
    resolved["run"]["data"] = str(data_path)

    data = io.read_dataset(data_path)
    if _as_bool(resolved["run"]["center"]):
        data = data.centered()
    prior = build_prior(resolved["prior"])
    try:
        spec = models.ModelSpec(
            family=resolved["model"]["family"],
            p=_as_int(resolved["model"]["p"], "model.p"),
            q=_as_int(resolved["model"]["q"], "model.q"),
            m=_as_int(resolved["model"]["m"], "model.m"),
            g=_as_int(resolved["model"]["g"], "model.g"),
            prior=prior,
        )
        spec.validate_data(data)
    except ValueError as exc:
        raise UserError(str(exc)) from None
    scfg = build_sampler({**resolved["sampler"], "seed": resolved["run"]["seed"]})

    out_dir = resolved["run"]["out"]
    chash, _ = _write_resolved(out_dir, resolved)
    draws, diag = nuts_sample(spec, data, scfg)
    comments = [f"config_hash={chash}", f"seed={scfg.seed}"]
    io.write_draws(os.path.join(out_dir, "draws.csv"), draws, comments)

    r2 = models.bayes_r2_draws(spec, draws, data)
    report = {
        "config_hash": chash,
        "seed": scfg.seed,
        "y_shift": data.y_shift,
        "rhat": dict(zip(diag.names, map(float, diag.rhat))),
        "ess_bulk": dict(zip(diag.names, map(float, diag.ess_bulk))),
        "ess_tail": dict(zip(diag.names, map(float, diag.ess_tail))),
        "divergences": diag.divergences,
        "divergence_rate": diag.divergence_rate,
        "step_size": [float(s) for s in diag.step_size],
        "bayes_r2": {
            "mean": float(r2.mean()),
            "q05": float(np.quantile(r2, 0.05)),
            "q95": float(np.quantile(r2, 0.95)),
        },
        **diag.summary(),
    }
    io.write_json(os.path.join(out_dir, "diagnostics.json"), report)
    click.echo(
        f"fit: {draws.n_draws} draws, max R-hat {diag.max_rhat:.4f}, "
        f"{diag.divergences} divergences -> {out_dir}"
    )
    if diag.max_rhat > 1.05 and not _as_bool(resolved["run"]["allow_nonconverged"]):
        raise RuntimeError(
            f"max R-hat {diag.max_rhat:.4f} > 1.05; rerun with more iterations "
            "or pass --allow-nonconverged"
        )


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------

SIM_DEFAULTS = {
    "run": {"seed": "0", "out": "dataset.csv"},
    "dgp": {
        "name": "minnesota", "t": "120", "m": "20", "rho": "0.0",
        "state_scale": "0.1", "lags": "2", "m_base": "5", "burn_in": "500",
    },
}


@cli.command()
@click.option("--config", "config_path", type=click.Path(), default=None)
@click.option("--dgp", "dgp_name", type=click.Choice(DGP_CHOICES), default=None)
@click.option("--t", "--T", "t_len", type=int, default=None, help="Series length.")
@click.option("--m", type=int, default=None, help="Covariate count (arx).")
@click.option("--m-base", type=int, default=None, help="Base covariates (ltx).")
@click.option("--rho", type=float, default=None)
@click.option("--state-scale", type=float, default=None)
@click.option("--lags", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--out", default=None, help="Output CSV path.")
def simulate(config_path, dgp_name, t_len, m, m_base, rho, state_scale, lags, seed, out):
    """Write a simulated dataset plus a truth sidecar."""
    file_cfg = io.read_config(config_path) if config_path else {}
    overrides = {
        ("dgp", "name"): dgp_name,
        ("dgp", "t"): t_len,
        ("dgp", "m"): m,
        ("dgp", "m_base"): m_base,
        ("dgp", "rho"): rho,
        ("dgp", "state_scale"): state_scale,
        ("dgp", "lags"): lags,
        ("run", "seed"): seed,
        ("run", "out"): out,
    }
    resolved = _merge(SIM_DEFAULTS, file_cfg, overrides)
    name = resolved["dgp"]["name"]
    seed_val = _as_int(resolved["run"]["seed"], "run.seed")
    rng = np.random.default_rng(seed_val)
    t_val = _as_int(resolved["dgp"]["t"], "dgp.t")

    try:
        if name in AR_PROFILES:
            process = ArDgp.named(
                name, n_obs=t_val, burn_in=_as_int(resolved["dgp"]["burn_in"], "dgp.burn_in")
            )
            data = simulate_ar(process, rng)
            truth = {"phi": list(map(float, process.phi)), "sigma2": process.sigma2}
        elif name == "arx":
            process = ArxDgp(
                m=_as_int(resolved["dgp"]["m"], "dgp.m"),
                rho=_as_float(resolved["dgp"]["rho"], "dgp.rho"),
                n_obs=t_val,
            )
            data, truth_raw = simulate_arx(process, rng)
            truth = {
                "phi": list(map(float, truth_raw["phi"])),
                "beta": list(map(float, truth_raw["beta"])),
                "sigma2": truth_raw["sigma2"],
            }
        elif name == "ltx":
            process = LtxDgp(
                m=_as_int(resolved["dgp"]["m_base"], "dgp.m_base"),
                lags=_as_int(resolved["dgp"]["lags"], "dgp.lags"),
                rho=_as_float(resolved["dgp"]["rho"], "dgp.rho"),
                sigma_delta=_as_float(resolved["dgp"]["state_scale"], "dgp.state_scale"),
                n_obs=t_val,
            )
            data, truth_raw = simulate_ltx(process, rng)
            truth = {
                "beta": list(map(float, truth_raw["beta"])),
                "delta": list(map(float, truth_raw["delta"])),
                "sigma_delta": truth_raw["sigma_delta"],
                "phi_state": truth_raw["phi_state"],
                "sigma2": truth_raw["sigma2"],
            }
        else:
            raise UserError(f"unknown dgp {name!r}")
    except ValueError as exc:
        raise UserError(f"dgp: {exc}") from None

    out_path = resolved["run"]["out"]
    parent = os.path.dirname(out_path)
    if parent:
        io.ensure_dir(parent)
    chash = io.config_hash(resolved)
    io.write_config(_sidecar(out_path, "resolved.cfg"), resolved)
    io.write_dataset(out_path, data, comments=[f"config_hash={chash}", f"seed={seed_val}"])
    truth.update(config_hash=chash, seed=seed_val, dgp=name)
    io.write_json(_sidecar(out_path, "truth.json"), truth)
    click.echo(f"simulate: {data.n} rows, {data.n_covariates} covariates -> {out_path}")


def _sidecar(csv_path: str, suffix: str) -> str:
    base = csv_path[:-4] if csv_path.endswith(".csv") else csv_path
    return f"{base}.{suffix}"


# ---------------------------------------------------------------------------
# experiment
# ---------------------------------------------------------------------------

EXP_DEFAULTS = {
    "run": {"seed": "0", "out": "experiment-output", "jobs": "", "full": "false"},
    "experiment": {
        "family": "ar",
        "dgps": "minnesota",
        "p_grid": "9,30",
        "p_fit": "12",
        "m_grid": "20",
        "rho_grid": "0.0",
        "scale_grid": "0.1,1.0",
        "t_grid": "100,200",
        "t": "120",
        "m_base": "5",
        "lags": "2",
        "rho": "0.0",
        "reps": "5",
        "priors": "",
        "lfo": "fixed",
    },
    "sampler": {
        "chains": "2", "warmup": "500", "samples": "500",
        "target_accept": "0.85", "max_treedepth": "10",
    },
}

FULL_SCALE = {"p_grid": "9,20,30,45,60", "m_grid": "20,100,200,400", "rho_grid": "0.0,0.5,0.9",
              "scale_grid": "0.1,0.5,1.0", "reps": "25"}


@cli.command()
@click.option("--config", "config_path", type=click.Path(), default=None)
@click.option("--family", type=click.Choice(["ar", "arx", "ltx"]), default=None)
@click.option("--dgps", default=None, help="Comma list of AR profiles.")
@click.option("--p-grid", default=None)
@click.option("--m-grid", default=None)
@click.option("--rho-grid", default=None)
@click.option("--scale-grid", default=None)
@click.option("--t-grid", default=None)
@click.option("--t", "--T", "t_len", type=int, default=None)
@click.option("--reps", type=int, default=None)
@click.option("--priors", default=None, help="Comma list of prior names.")
@click.option("--lfo", type=click.Choice(["none", "fixed", "refit"]), default=None)
@click.option("--chains", type=int, default=None)
@click.option("--warmup", type=int, default=None)
@click.option("--samples", type=int, default=None)
@click.option("--target-accept", type=float, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--jobs", type=int, default=None, help="Worker processes (env ARR2_JOBS).")
@click.option("--full", is_flag=True, default=None, help="Restore the full-scale grids.")
@click.option("--out", default=None)
def experiment(config_path, **flags):
    """Run a simulation study over a grid of processes, priors and sizes."""
    file_cfg = io.read_config(config_path) if config_path else {}
    overrides = {
        ("experiment", "family"): flags["family"],
        ("experiment", "dgps"): flags["dgps"],
        ("experiment", "p_grid"): flags["p_grid"],
        ("experiment", "m_grid"): flags["m_grid"],
        ("experiment", "rho_grid"): flags["rho_grid"],
        ("experiment", "scale_grid"): flags["scale_grid"],
        ("experiment", "t_grid"): flags["t_grid"],
        ("experiment", "t"): flags["t_len"],
        ("experiment", "reps"): flags["reps"],
        ("experiment", "priors"): flags["priors"],
        ("experiment", "lfo"): flags["lfo"],
        ("sampler", "chains"): flags["chains"],
        ("sampler", "warmup"): flags["warmup"],
        ("sampler", "samples"): flags["samples"],
        ("sampler", "target_accept"): flags["target_accept"],
        ("run", "seed"): flags["seed"],
        ("run", "jobs"): flags["jobs"],
        ("run", "full"): flags["full"],
        ("run", "out"): flags["out"],
    }
    resolved = _merge(EXP_DEFAULTS, file_cfg, overrides)
    if _as_bool(resolved["run"]["full"]):
        for key, value in FULL_SCALE.items():
            resolved["experiment"][key] = value

    exp = resolved["experiment"]
    family = exp["family"]
    default_priors = {
        "ar": experiments.AR_PRIOR_LIST,
        "arx": experiments.ARX_PRIOR_LIST,
        "ltx": experiments.LTX_PRIOR_LIST,
    }[family]
    prior_names = _as_list(exp["priors"]) or default_priors
    for name in prior_names:
        if name not in priors.PRIOR_PRESETS:
            raise UserError(f"experiment.priors: unknown prior {name!r}")

    plan = {
        "family": family,
        "seed": _as_int(resolved["run"]["seed"], "run.seed"),
        "reps": _as_int(exp["reps"], "experiment.reps"),
        "priors": prior_names,
        "dgps": _as_list(exp["dgps"]),
        "p_grid": _as_list(exp["p_grid"], int),
        "p_fit": _as_int(exp["p_fit"], "experiment.p_fit"),
        "m_grid": _as_list(exp["m_grid"], int),
        "rho_grid": _as_list(exp["rho_grid"], float),
        "scale_grid": _as_list(exp["scale_grid"], float),
        "T_grid": _as_list(exp["t_grid"], int),
        "T": _as_int(exp["t"], "experiment.t"),
        "m_base": _as_int(exp["m_base"], "experiment.m_base"),
        "lags": _as_int(exp["lags"], "experiment.lags"),
        "rho": _as_float(exp["rho"], "experiment.rho"),
        "lfo": exp["lfo"] if family != "ltx" else ("refit" if exp["lfo"] == "refit" else "none"),
        "sampler": {
            "chains": _as_int(resolved["sampler"]["chains"], "sampler.chains"),
            "warmup": _as_int(resolved["sampler"]["warmup"], "sampler.warmup"),
            "samples": _as_int(resolved["sampler"]["samples"], "sampler.samples"),
            "target_accept": _as_float(resolved["sampler"]["target_accept"], "sampler.target_accept"),
            "max_treedepth": _as_int(resolved["sampler"]["max_treedepth"], "sampler.max_treedepth"),
        },
    }
    for name in plan["dgps"]:
        if name not in AR_PROFILES:
            raise UserError(f"experiment.dgps: unknown AR profile {name!r}")

    jobs_str = resolved["run"]["jobs"] or os.environ.get("ARR2_JOBS", "1")
    jobs = max(1, _as_int(jobs_str, "run.jobs"))

    out_dir = resolved["run"]["out"]
    chash, _ = _write_resolved(out_dir, resolved)
    rows = experiments.run_experiment(plan, jobs=jobs, log=lambda msg: click.echo(msg, err=True))
    comments = [f"config_hash={chash}", f"seed={plan['seed']}"]
    io.write_csv(
        os.path.join(out_dir, "results.csv"), experiments.RESULT_COLUMNS, rows, comments
    )
    group_keys = {
        "ar": ["dgp", "p", "prior"],
        "arx": ["m", "rho", "prior"],
        "ltx": ["state_scale", "T", "prior"],
    }[family]
    summary = evaluation.aggregate(rows, group_keys)
    io.write_csv(
        os.path.join(out_dir, "summary.csv"),
        group_keys + ["metric", "mean", "se", "n"],
        summary,
        comments,
    )
    click.echo(f"experiment: {len(rows)} cells -> {out_dir}")


# ---------------------------------------------------------------------------
# prior-check
# ---------------------------------------------------------------------------

PRIOR_CHECK_DEFAULTS = {
    "run": {"seed": "0", "out": "prior-check-output", "draws": "50000"},
    "model": {"family": "ar", "p": "12", "q": "0", "m": "0", "g": "0"},
    "prior": FIT_DEFAULTS["prior"],
    "pushforward": {"sigma": "1.0", "var_y": "1.0", "t": "120"},
}


@cli.command("prior-check")
@click.option("--config", "config_path", type=click.Path(), default=None)
@click.option("--family", type=click.Choice(models.FAMILIES), default=None)
@click.option("--p", type=int, default=None)
@click.option("--q", type=int, default=None)
@click.option("--m", type=int, default=None)
@click.option("--prior", "prior_name", type=click.Choice(PRIOR_CHOICES), default=None)
@click.option("--mu-r2", type=float, default=None)
@click.option("--phi-r2", type=float, default=None)
@click.option("--concentration", default=None)
@click.option("--draws", "n_draws", type=int, default=None)
@click.option("--sigma", type=float, default=None, help="Fixed observation scale.")
@click.option("--var-y", type=float, default=None, help="Assumed target variance.")
@click.option("--seed", type=int, default=None)
@click.option("--out", default=None)
def prior_check(config_path, **flags):
    """Push a prior forward to its implied explained variance and roots."""
    file_cfg = io.read_config(config_path) if config_path else {}
    overrides = {
        ("model", "family"): flags["family"],
        ("model", "p"): flags["p"],
        ("model", "q"): flags["q"],
        ("model", "m"): flags["m"],
        ("prior", "name"): flags["prior_name"],
        ("prior", "mu_r2"): flags["mu_r2"],
        ("prior", "phi_r2"): flags["phi_r2"],
        ("prior", "concentration"): flags["concentration"],
        ("run", "draws"): flags["n_draws"],
        ("pushforward", "sigma"): flags["sigma"],
        ("pushforward", "var_y"): flags["var_y"],
        ("run", "seed"): flags["seed"],
        ("run", "out"): flags["out"],
    }
    resolved = _merge(PRIOR_CHECK_DEFAULTS, file_cfg, overrides)
    prior = build_prior(resolved["prior"])
    try:
        spec = models.ModelSpec(
            family=resolved["model"]["family"],
            p=_as_int(resolved["model"]["p"], "model.p"),
            q=_as_int(resolved["model"]["q"], "model.q"),
            m=_as_int(resolved["model"]["m"], "model.m"),
            g=_as_int(resolved["model"]["g"], "model.g"),
            prior=prior,
        )
    except ValueError as exc:
        raise UserError(str(exc)) from None
    n_draws = _as_int(resolved["run"]["draws"], "run.draws")
    seed_val = _as_int(resolved["run"]["seed"], "run.seed")
    stats = DataStats(
        var_y=_as_float(resolved["pushforward"]["var_y"], "pushforward.var_y"),
        var_x=np.ones(max(spec.n_exog_coefficients, spec.m)),
        n_obs=_as_int(resolved["pushforward"]["t"], "pushforward.t"),
    )
    rng = np.random.default_rng(seed_val)
    result = priors.prior_pushforward_r2(
        spec, n_draws, stats, rng, sigma=_as_float(resolved["pushforward"]["sigma"], "sigma")
    )

    out_dir = resolved["run"]["out"]
    chash, _ = _write_resolved(out_dir, resolved)
    comments = [f"config_hash={chash}", f"seed={seed_val}"]
    rows = []
    for i in range(n_draws):
        rows.append(
            [
                i + 1,
                result.r2[i],
                "" if result.stationary is None else int(result.stationary[i]),
                "" if result.max_root_modulus is None else result.max_root_modulus[i],
            ]
        )
    io.write_csv(
        os.path.join(out_dir, "prior_r2_draws.csv"),
        ["draw", "r2", "stationary", "max_inverse_root_modulus"],
        rows,
        comments,
    )
    if result.rel_contrib is not None:
        contrib = result.rel_contrib
        crows = []
        for j in range(contrib.shape[1]):
            vals = contrib[:, j]
            crows.append([j + 1, float(vals.mean()), float(vals.std(ddof=1) / np.sqrt(len(vals)))])
        io.write_csv(
            os.path.join(out_dir, "prior_contributions.csv"),
            ["lag", "mean_relative_r2", "se"],
            crows,
            comments,
        )
    frac = float(result.stationary.mean()) if result.stationary is not None else float("nan")
    click.echo(f"prior-check: {n_draws} draws, stationary fraction {frac:.3f} -> {out_dir}")


# ---------------------------------------------------------------------------
# diagnose
# ---------------------------------------------------------------------------

@cli.command()
@click.option("--draws", "draws_path", required=True, type=click.Path())
@click.option("--out", default=None, help="JSON output path (default: stdout).")
def diagnose(draws_path, out):
    """Recompute convergence diagnostics from a draws file."""
    draws = io.read_draws(draws_path)
    diag = compute_diagnostics(draws)
    report = {
        "rhat": dict(zip(diag.names, map(float, diag.rhat))),
        "ess_bulk": dict(zip(diag.names, map(float, diag.ess_bulk))),
        "ess_tail": dict(zip(diag.names, map(float, diag.ess_tail))),
        "divergences": diag.divergences,
        **diag.summary(),
    }
    if out:
        io.write_json(out, report)
        click.echo(f"diagnose: max R-hat {diag.max_rhat:.4f} -> {out}")
    else:
        import json

        click.echo(json.dumps(report, indent=2, sort_keys=True))


def main(argv=None) -> int:
    try:
        cli(args=argv, standalone_mode=False)
        return 0
    except click.ClickException as exc:
        exc.show()
        return 2
    except click.Abort:
        return 1
    except UserError as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        click.echo(f"internal error: {type(exc).__name__}: {exc}", err=True)
        return 1


if __name__ == "__main__":
    sys.exit(main())
