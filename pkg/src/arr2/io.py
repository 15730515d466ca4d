"""File formats: datasets, draws, tidy results, resolved configs.

All writers are deterministic: floats are rendered with ``repr`` (shortest
round-trip, exact to the bit on re-parse), dict keys are sorted, and no
timestamps are embedded.  Rerunning a command with the same resolved
configuration reproduces every output byte for byte.
"""

from __future__ import annotations

import configparser
import hashlib
import io as _io
import json
import os
from typing import Iterable, Optional

import numpy as np

from .data import TimeSeriesData


class UserError(Exception):
    """Invalid input or configuration; reported with exit code 2."""


def fmt_value(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        f = float(v)
        if np.isnan(f):
            return "nan"
        return repr(f)
    return str(v)


def write_csv(path, columns: list, rows: Iterable, comments: Optional[list] = None):
    buf = _io.StringIO()
    for line in comments or []:
        buf.write(f"# {line}\n")
    buf.write(",".join(columns) + "\n")
    for row in rows:
        if isinstance(row, dict):
            row = [row.get(c) for c in columns]
        buf.write(",".join(fmt_value(v) if v is not None else "" for v in row) + "\n")
    with open(path, "w") as fh:
        fh.write(buf.getvalue())


def read_csv(path):
    """Returns (comments, columns, rows-of-strings)."""
    comments = []
    columns = None
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                comments.append(line[1:].strip())
                continue
            if columns is None:
                columns = line.split(",")
                continue
            rows.append(line.split(","))
    if columns is None:
        raise UserError(f"{path}: empty file")
    return comments, columns, rows


def write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, allow_nan=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# dataset files: header t,y[,x1..xm]; t strictly consecutive integers
# ---------------------------------------------------------------------------

def write_dataset(path, data: TimeSeriesData, comments: Optional[list] = None, t0: int = 1):
    m = data.n_covariates
    columns = ["t", "y"] + [f"x{j + 1}" for j in range(m)]
    rows = []
    for t in range(data.n):
        row = [t0 + t, data.y[t]]
        if m:
            row.extend(data.x[t])
        rows.append(row)
    write_csv(path, columns, rows, comments)


def read_dataset(path) -> TimeSeriesData:
    comments, columns, rows = read_csv(path)
    if len(columns) < 2 or columns[0] != "t" or columns[1] != "y":
        raise UserError(f"{path}: header must start with 't,y', got {','.join(columns[:2])}")
    for j, name in enumerate(columns[2:], start=1):
        if name != f"x{j}":
            raise UserError(f"{path}: covariate columns must be named x1..xm in order, got {name!r}")
    if not rows:
        raise UserError(f"{path}: no data rows")
    t_prev = None
    y = np.empty(len(rows))
    m = len(columns) - 2
    x = np.empty((len(rows), m)) if m else None
    for idx, row in enumerate(rows):
        line_no = idx + 2 + 0  # header on line 1 (comments excluded from count)
        if len(row) != len(columns):
            raise UserError(f"{path}: row {line_no} has {len(row)} fields, expected {len(columns)}")
        try:
            t_val = int(row[0])
        except ValueError:
            raise UserError(f"{path}: row {line_no}: non-integer time index {row[0]!r}") from None
        if t_prev is not None and t_val != t_prev + 1:
            raise UserError(
                f"{path}: row {line_no}: time index {t_val} does not follow {t_prev} "
                "(gaps are not allowed)"
            )
        t_prev = t_val
        try:
            y[idx] = float(row[1])
            for j in range(m):
                x[idx, j] = float(row[2 + j])
        except ValueError:
            raise UserError(f"{path}: row {line_no}: non-numeric value") from None
        if not np.isfinite(y[idx]) or (m and not np.all(np.isfinite(x[idx]))):
            raise UserError(f"{path}: row {line_no}: missing or non-finite value")
    return TimeSeriesData(y, x)


# ---------------------------------------------------------------------------
# draws files: chain, iteration, then one column per constrained parameter
# ---------------------------------------------------------------------------

def write_draws(path, draws, comments: Optional[list] = None):
    columns = ["chain", "iteration", "divergent", "energy"] + list(draws.names)
    rows = []
    for chain in range(draws.n_chains):
        for it in range(draws.n_per_chain):
            rows.append(
                [chain + 1, it + 1, int(draws.divergent[chain, it]), draws.energy[chain, it]]
                + list(draws.draws[chain, it])
            )
    write_csv(path, columns, rows, comments)


def read_draws(path):
    """Reconstruct a draws container (names, per-chain arrays) from a file."""
    from .inference.nuts import DrawsMatrix

    comments, columns, rows = read_csv(path)
    if columns[:4] != ["chain", "iteration", "divergent", "energy"]:
        raise UserError(f"{path}: not a draws file (header {columns[:4]})")
    names = columns[4:]
    chains = sorted({int(r[0]) for r in rows})
    per_chain = {c: [] for c in chains}
    for r in rows:
        per_chain[int(r[0])].append(r)
    n = len(per_chain[chains[0]])
    if any(len(v) != n for v in per_chain.values()):
        raise UserError(f"{path}: chains have unequal lengths")
    draws = np.empty((len(chains), n, len(names)))
    divergent = np.zeros((len(chains), n), dtype=bool)
    energy = np.empty((len(chains), n))
    for ci, c in enumerate(chains):
        for it, r in enumerate(per_chain[c]):
            divergent[ci, it] = r[2] not in ("0", "false")
            energy[ci, it] = float(r[3])
            draws[ci, it] = [float(v) for v in r[4:]]
    blocks = _blocks_from_names(names)
    return DrawsMatrix(
        names=names,
        draws=draws,
        divergent=divergent,
        energy=energy,
        step_size=np.ones(len(chains)),
        inv_metric=np.ones((len(chains), len(names))),
        blocks=blocks,
    )


def _blocks_from_names(names: list) -> list:
    blocks = []
    for name in names:
        base = name.split(".")[0]
        if blocks and blocks[-1][0] == base:
            blocks[-1] = (base, blocks[-1][1] + 1)
        else:
            blocks.append((base, 1))
    return blocks


# ---------------------------------------------------------------------------
# resolved configuration: flat key=value sections, hashable, reloadable
# ---------------------------------------------------------------------------

def config_text(resolved: dict, exclude=()) -> str:
    """Canonical text of a resolved configuration (sorted sections/keys)."""
    lines = []
    for section in sorted(resolved):
        lines.append(f"[{section}]")
        for key in sorted(resolved[section]):
            if (section, key) in exclude:
                continue
            lines.append(f"{key} = {resolved[section][key]}")
        lines.append("")
    return "\n".join(lines)


def config_hash(resolved: dict) -> str:
    # the destination does not change what is computed, so it stays out of
    # the hash; rerunning into another directory yields identical payloads
    return hashlib.sha256(
        config_text(resolved, exclude={("run", "out")}).encode()
    ).hexdigest()[:16]


def write_config(path, resolved: dict):
    with open(path, "w") as fh:
        fh.write(config_text(resolved))


def read_config(path) -> dict:
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except FileNotFoundError:
        raise UserError(f"config file not found: {path}") from None
    except configparser.Error as exc:
        raise UserError(f"{path}: {exc}") from None
    return {section: dict(parser[section]) for section in parser.sections()}


def ensure_dir(path):
    os.makedirs(path, exist_ok=True)
