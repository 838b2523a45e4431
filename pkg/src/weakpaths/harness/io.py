"""CSV, JSON and gnuplot output.

Snapshot CSVs have the header ``t,x,comp_0,...,comp_{n-1}`` and one row per
cell, every number written with 17 significant digits so that reading the
file back reproduces the doubles exactly.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from weakpaths.core import Grid1D, SpaceTimeField

SCHEMA_VERSION = 1
FMT = "%.17g"


def _header(ncomp: int) -> str:
    return ",".join(["t", "x"] + [f"comp_{k}" for k in range(ncomp)])


def write_snapshot_csv(path, t: float, x: np.ndarray, U: np.ndarray):
    U = np.atleast_2d(U)
    table = np.column_stack([np.full(len(x), t), x, U.T])
    np.savetxt(path, table, delimiter=",", header=_header(U.shape[0]),
               comments="", fmt=FMT)


def read_snapshot_csv(path):
    """``(t, x, U)`` with ``U`` of shape ``(ncomp, nx)``."""
    with open(path) as fh:
        header = fh.readline().strip().split(",")
    if header[:2] != ["t", "x"] or any(
            h != f"comp_{k}" for k, h in enumerate(header[2:])):
        raise ValueError(f"{path}: unexpected header {','.join(header)!r}")
    table = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return float(table[0, 0]), table[:, 1], table[:, 2:].T.copy()


def write_field_csv(directory, field: SpaceTimeField, prefix: str = "snapshot"):
    """One CSV per recorded time; returns the file paths."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    paths = []
    for k, t in enumerate(field.times):
        p = d / f"{prefix}_{k:04d}.csv"
        write_snapshot_csv(p, t, field.grid.centers, field.frames[k])
        paths.append(p)
    return paths


def read_field_csv(directory, grid: Grid1D, prefix: str = "snapshot") -> SpaceTimeField:
    files = sorted(Path(directory).glob(f"{prefix}_*.csv"))
    if not files:
        raise FileNotFoundError(f"no {prefix}_*.csv files in {str(directory)!r}")
    times, frames = [], []
    for f in files:
        t, x, U = read_snapshot_csv(f)
        if len(x) != grid.nx:
            raise ValueError(f"{f}: {len(x)} rows, grid has {grid.nx} cells")
        times.append(t)
        frames.append(U)
    return SpaceTimeField(grid, np.array(times), np.array(frames))


def write_dat(path, field: SpaceTimeField, names=None):
    """Gnuplot data: one block per time, blocks separated by two blank lines."""
    names = names or [f"comp_{k}" for k in range(field.ncomp)]
    with open(path, "w") as fh:
        fh.write("# t x " + " ".join(names) + "\n")
        for k, t in enumerate(field.times):
            table = np.column_stack([np.full(field.grid.nx, t),
                                     field.grid.centers, field.frames[k].T])
            np.savetxt(fh, table, fmt=FMT)
            fh.write("\n\n")


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if np.isfinite(v) else str(v)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_report(path, kind: str, config_sha256: str, body: dict):
    """JSON report carrying the schema version and the config hash."""
    report = {"schema_version": SCHEMA_VERSION, "kind": kind,
              "config_sha256": config_sha256, **_clean(body)}
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
    return report
