"""Run configuration in ``key = value`` files with ``[section]`` headers.

Example::

    [system]
    id = burgers

    [ic]
    kind = riemann
    left = 2.0
    right = 1.0
    x0 = 0.25

    [grid]
    topology = line
    nx = 400

    [scheme]
    t_end = 0.4
    snapshots = 8
"""

from __future__ import annotations

import configparser
import dataclasses
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from weakpaths.core import CellField, Grid1D, make_grid, sample_ic
from weakpaths.harness.registry import (
    DEFAULT_PARAMS, PRIMITIVE_COUNT, UnknownSystemError, get_system)
from weakpaths.solver import SchemeConfig, uniform_times


class ConfigError(ValueError):
    pass


def _floats(text: str, where: str) -> tuple:
    try:
        return tuple(float(s) for s in text.split(",") if s.strip())
    except ValueError:
        raise ConfigError(f"{where}: expected comma-separated numbers, "
                          f"got {text!r}") from None


@dataclass(frozen=True)
class ICSpec:
    kind: str = "constant"
    state: tuple = ()
    left: tuple = ()
    right: tuple = ()
    x0: Optional[float] = None
    mean: tuple = ()
    amp: tuple = ()
    freq: float = 1.0
    file: Optional[str] = None

    def ncomp(self) -> Optional[int]:
        if self.kind == "constant":
            return len(self.state)
        if self.kind == "riemann":
            return len(self.left)
        if self.kind == "sinusoid":
            return len(self.mean)
        return None

    def sample(self, grid: Grid1D) -> CellField:
        """Cell averages of the primitive initial data."""
        if self.kind == "constant":
            s = np.array(self.state)[:, None]
            return CellField(grid, np.repeat(s, grid.nx, axis=1))
        if self.kind == "riemann":
            x0 = 0.5 * (grid.a + grid.b) if self.x0 is None else self.x0
            L, R = np.array(self.left)[:, None], np.array(self.right)[:, None]
            return sample_ic(grid, lambda x: np.where(x < x0, L, R))
        if self.kind == "sinusoid":
            mean, amp = np.array(self.mean)[:, None], np.array(self.amp)[:, None]
            k = 2 * np.pi * self.freq / grid.length
            return sample_ic(grid, lambda x: mean + amp * np.sin(k * (x - grid.a)))
        table = np.loadtxt(self.file, delimiter=",", skiprows=1, ndmin=2)
        xs, vals = table[:, 0], table[:, 1:]
        return CellField(grid, np.stack([np.interp(grid.centers, xs, v)
                                         for v in vals.T]))


@dataclass(frozen=True)
class RunConfig:
    system: str
    params: dict
    ic: ICSpec
    topology: str = "torus"
    nx: int = 400
    a: float = 0.0
    b: float = 1.0
    flux: str = "auto"
    cfl: float = 0.5
    bc: str = "auto"
    t_end: float = 0.1
    snapshots: int = 1
    record_every_step: bool = False
    out_dir: str = "out"
    formats: tuple = ("csv", "json", "dat")
    levels: tuple = (400, 800, 1600)
    min_ratio: float = 1.5
    c_adm: float = 10.0
    adm_levels: int = 3
    inject: str = "none"
    ri_system: Optional[str] = None
    ri_samples: int = 1000
    perturb_b: float = 0.0
    seed: int = 0

    def grid(self, nx: Optional[int] = None) -> Grid1D:
        return make_grid(self.topology, nx or self.nx, self.a, self.b)

    def scheme(self, flux_default: str = "rusanov", record: Optional[bool] = None):
        flux = flux_default if self.flux == "auto" else self.flux
        bc = self.bc
        if bc == "auto":
            bc = "periodic" if self.topology == "torus" else "outflow"
        rec = self.record_every_step if record is None else record
        return SchemeConfig(flux, self.cfl, bc,
                            uniform_times(self.t_end, self.snapshots), rec)

    def with_overrides(self, nx=None, seed=None, out_dir=None) -> "RunConfig":
        changes = {}
        if nx is not None:
            changes["nx"] = int(nx)
        if seed is not None:
            changes["seed"] = int(seed)
        if out_dir is not None:
            changes["out_dir"] = str(out_dir)
        return dataclasses.replace(self, **changes)

    def sha256(self) -> str:
        blob = json.dumps(dataclasses.asdict(self), sort_keys=True, default=str)
        return hashlib.sha256(blob.encode()).hexdigest()


def _get(cp, section, key, conv, default, path):
    if not cp.has_option(section, key):
        return default
    raw = cp.get(section, key)
    try:
        return conv(raw)
    except ValueError:
        raise ConfigError(f"{path}: [{section}] {key} = {raw!r} is not a valid "
                          f"{getattr(conv, '__name__', 'value')}") from None


def _bool(text):
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(text)
_bool.__name__ = "boolean"


def parse_config(text: str, path: str = "<config>") -> RunConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string(text, source=path)
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None

    def g(section, key, conv=str, default=None):
        return _get(cp, section, key, conv, default, path)

    system = g("system", "id")
    ri_system = g("ri", "system")
    if system is None and ri_system is None:
        raise ConfigError(f"{path}: [system] id is required")
    params = dict(DEFAULT_PARAMS)
    for key in DEFAULT_PARAMS:
        params[key] = g("system", key, float, params[key])

    kind = g("ic", "kind", str, "constant")
    if kind not in ("constant", "riemann", "sinusoid", "table"):
        raise ConfigError(f"{path}: [ic] kind must be constant, riemann, "
                          f"sinusoid or table, got {kind!r}")
    where = f"{path}: [ic]"
    ic = ICSpec(kind,
                _floats(g("ic", "state", str, ""), where + " state"),
                _floats(g("ic", "left", str, ""), where + " left"),
                _floats(g("ic", "right", str, ""), where + " right"),
                g("ic", "x0", float),
                _floats(g("ic", "mean", str, ""), where + " mean"),
                _floats(g("ic", "amp", str, ""), where + " amp"),
                g("ic", "freq", float, 1.0),
                g("ic", "file"))
    if kind == "table":
        if ic.file is None:
            raise ConfigError(f"{path}: [ic] kind = table needs file")
        f = Path(ic.file)
        if not f.is_absolute():
            f = Path(path).parent / f
        if not f.exists():
            raise ConfigError(f"{path}: [ic] file {str(f)!r} does not exist")
        ic = dataclasses.replace(ic, file=str(f))
    if kind == "riemann" and len(ic.left) != len(ic.right):
        raise ConfigError(f"{path}: [ic] left and right differ in length")
    if kind == "sinusoid" and len(ic.amp) != len(ic.mean):
        raise ConfigError(f"{path}: [ic] mean and amp differ in length")

    formats = tuple(s.strip() for s in g("output", "formats", str,
                                         "csv,json,dat").split(",") if s.strip())
    bad = set(formats) - {"csv", "json", "dat"}
    if bad:
        raise ConfigError(f"{path}: [output] unknown formats {sorted(bad)}")
    levels = tuple(int(v) for v in _floats(g("convergence", "levels", str,
                                              "400,800,1600"),
                                            f"{path}: [convergence] levels"))
    cfg = RunConfig(
        system=system, params=params, ic=ic,
        topology=g("grid", "topology", str, "torus"),
        nx=g("grid", "nx", int, 400),
        a=g("grid", "a", float, 0.0), b=g("grid", "b", float, 1.0),
        flux=g("scheme", "flux", str, "auto"),
        cfl=g("scheme", "cfl", float, 0.5),
        bc=g("scheme", "bc", str, "auto"),
        t_end=g("scheme", "t_end", float, 0.1),
        snapshots=g("scheme", "snapshots", int, 1),
        record_every_step=g("scheme", "record_every_step", _bool, False),
        out_dir=g("output", "dir", str, "out"),
        formats=formats, levels=levels,
        min_ratio=g("convergence", "min_ratio", float, 1.5),
        c_adm=g("admissibility", "c_adm", float, 10.0),
        adm_levels=g("admissibility", "levels", int, 3),
        inject=g("admissibility", "inject", str, "none"),
        ri_system=ri_system,
        ri_samples=g("ri", "samples", int, 1000),
        perturb_b=g("ri", "perturb_b", float, 0.0),
        seed=g("run", "seed", int, 0))
    validate(cfg, path)
    return cfg


def validate(cfg: RunConfig, path: str = "<config>"):
    if cfg.system is not None:
        try:
            entry = get_system(cfg.system)
        except UnknownSystemError as exc:
            raise ConfigError(f"{path}: {exc}") from None
        need = PRIMITIVE_COUNT[entry.family]
        have = cfg.ic.ncomp()
        if have is not None and have != need:
            raise ConfigError(f"{path}: system {cfg.system!r} takes {need} "
                              f"primitive components, the ic gives {have}")
    if cfg.topology not in ("torus", "line"):
        raise ConfigError(f"{path}: [grid] topology must be torus or line")
    if cfg.nx < 4:
        raise ConfigError(f"{path}: [grid] nx must be at least 4")
    if cfg.flux not in ("auto", "rusanov", "godunov_exact"):
        raise ConfigError(f"{path}: [scheme] flux must be auto, rusanov or "
                          f"godunov_exact")
    if cfg.bc not in ("auto", "periodic", "outflow"):
        raise ConfigError(f"{path}: [scheme] bc must be auto, periodic or outflow")
    if not 0 < cfg.cfl <= 1:
        raise ConfigError(f"{path}: [scheme] cfl must lie in (0, 1]")
    if cfg.t_end <= 0 or cfg.snapshots < 1:
        raise ConfigError(f"{path}: [scheme] needs t_end > 0 and snapshots >= 1")
    if cfg.inject not in ("none", "expansion_shock"):
        raise ConfigError(f"{path}: [admissibility] inject must be none or "
                          f"expansion_shock")


def load_config(path) -> RunConfig:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {str(p)!r}: {exc.strerror}") from None
    return parse_config(text, str(p))
