"""First-order finite-volume integrator for any :class:`SystemSpec`."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from weakpaths.core import (
    CellField, InadmissibleStateError, SpaceTimeField, SystemSpec)


@dataclass(frozen=True)
class SchemeConfig:
    flux_kind: str = "rusanov"
    cfl: float = 0.5
    bc: str = "periodic"
    snapshot_times: tuple = ()
    record_every_step: bool = False

    def __post_init__(self):
        if not 0.0 < self.cfl <= 1.0:
            raise ValueError(f"cfl must lie in (0, 1], got {self.cfl}")
        if self.flux_kind not in ("rusanov", "godunov_exact"):
            raise ValueError(f"unknown flux kind {self.flux_kind!r}")
        if self.bc not in ("periodic", "outflow"):
            raise ValueError(f"unknown boundary condition {self.bc!r}")
        object.__setattr__(self, "snapshot_times",
                           tuple(float(t) for t in self.snapshot_times))


class SolveError(RuntimeError):
    def __init__(self, message, step, time):
        super().__init__(message)
        self.step = step
        self.time = time


def _check_admissible(spec: SystemSpec, U: np.ndarray, what: str):
    ok = spec.admissible(U)
    if not np.all(ok):
        i = int(np.argmin(ok))
        raise InadmissibleStateError(
            f"{what}: cell {i} holds inadmissible state {U[:, i].tolist()} "
            f"for system {spec.name!r}", index=i, state=U[:, i].copy())


def cfl_dt(spec: SystemSpec, field: CellField, cfl: float) -> float:
    """Explicit time step ``cfl * dx / max wave speed`` (capped at ``dx``)."""
    U = field.data
    _check_admissible(spec, U, "cfl_dt")
    amax = float(np.max(spec.max_wave_speed(U)))
    dx = field.grid.dx
    if amax <= 0.0:
        return dx
    return min(cfl * dx / amax, dx)


def _with_ghosts(U: np.ndarray, bc: str) -> np.ndarray:
    if bc == "periodic":
        return np.concatenate([U[:, -1:], U, U[:, :1]], axis=1)
    return np.concatenate([U[:, :1], U, U[:, -1:]], axis=1)


def _dissipation_mask(spec: SystemSpec) -> np.ndarray:
    mask = np.ones((spec.ncomp, 1))
    for k in spec.static:
        mask[k] = 0.0
    return mask


def rusanov_flux(spec: SystemSpec, UL: np.ndarray, UR: np.ndarray) -> np.ndarray:
    """Local Lax-Friedrichs flux; static components receive no dissipation."""
    a = np.maximum(spec.max_wave_speed(UL), spec.max_wave_speed(UR))
    return (0.5 * (spec.flux(UL) + spec.flux(UR))
            - 0.5 * a * _dissipation_mask(spec) * (UR - UL))


def godunov_flux(spec: SystemSpec, UL: np.ndarray, UR: np.ndarray) -> np.ndarray:
    if spec.riemann_exact is None or spec.ncomp != 1:
        raise ValueError("godunov_exact needs a scalar system with an exact "
                         "Riemann solution")
    return spec.flux(spec.riemann_exact(UL, UR, 0.0))


def interface_fluxes(spec: SystemSpec, U: np.ndarray, scheme: SchemeConfig):
    """Numerical fluxes at the ``nx + 1`` interfaces of the field ``U``."""
    G = _with_ghosts(U, scheme.bc)
    UL, UR = G[:, :-1], G[:, 1:]
    if scheme.flux_kind == "rusanov":
        return rusanov_flux(spec, UL, UR)
    return godunov_flux(spec, UL, UR)


def step(spec: SystemSpec, field: CellField, dt: float,
         scheme: SchemeConfig) -> CellField:
    """One conservative forward-Euler update."""
    U = field.data
    Fh = interface_fluxes(spec, U, scheme)
    Unew = U - dt / field.grid.dx * (Fh[:, 1:] - Fh[:, :-1])
    _check_admissible(spec, Unew, "step")
    return CellField(field.grid, Unew, field.quadrature)


def solve(spec: SystemSpec, ic: CellField, t_end: float, scheme: SchemeConfig,
          on_step: Optional[Callable[[float, float, np.ndarray], None]] = None,
          max_steps: int = 10_000_000) -> SpaceTimeField:
    """Integrate to ``t_end``, landing exactly on every snapshot time.

    Frames are returned at ``t = 0``, at every requested snapshot time in
    ``(0, t_end]``, at ``t_end``, and after every step when
    ``scheme.record_every_step`` is set. ``on_step(t, dt, U)`` is called with
    the state at the start of each step.
    """
    if t_end < 0:
        raise ValueError("t_end must be nonnegative")
    if scheme.flux_kind == "godunov_exact" and (
            spec.ncomp != 1 or spec.riemann_exact is None):
        raise ValueError("godunov_exact requires a scalar system with an "
                         "exact Riemann solution")
    targets = sorted({t for t in scheme.snapshot_times if 0 < t < t_end}
                     | ({t_end} if t_end > 0 else set()))
    grid = ic.grid
    U = np.array(ic.data)
    _check_admissible(spec, U, "initial data")
    times, frames, steps = [0.0], [U.copy()], [0]
    t, n = 0.0, 0
    for target in targets:
        while t < target:
            if n >= max_steps:
                raise SolveError(f"exceeded {max_steps} steps", n, t)
            dt = cfl_dt(spec, CellField(grid, U), scheme.cfl)
            last = t + dt >= target * (1 - 1e-14)
            if last:
                dt = target - t
            if on_step is not None:
                on_step(t, dt, U)
            try:
                Fh = interface_fluxes(spec, U, scheme)
                U = U - dt / grid.dx * (Fh[:, 1:] - Fh[:, :-1])
                _check_admissible(spec, U, "step")
            except InadmissibleStateError as exc:
                raise SolveError(f"step {n + 1} at t={t:.6g}: {exc}", n + 1,
                                 t) from exc
            n += 1
            t = target if last else t + dt
            if scheme.record_every_step and not last:
                times.append(t)
                frames.append(U.copy())
                steps.append(n)
        times.append(t)
        frames.append(U.copy())
        steps.append(n)
    return SpaceTimeField(grid, np.array(times), np.array(frames),
                          np.array(steps))


def total_conserved(field) -> np.ndarray:
    """Per-component totals ``sum U_i dx`` of a field or of every frame."""
    dx = field.grid.dx
    if isinstance(field, SpaceTimeField):
        return field.frames.sum(axis=2) * dx
    return field.data.sum(axis=1) * dx


def uniform_times(t_end: float, count: int) -> tuple:
    """``count`` equally spaced snapshot times in ``(0, t_end]``."""
    return tuple(t_end * (k + 1) / count for k in range(count))
