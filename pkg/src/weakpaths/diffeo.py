"""Weak diffeomorphisms ``gamma`` with ``gamma_x = eta`` and ``gamma_t = xi``.

A path is stored at cell interfaces and interpolated piecewise linearly, so
every stored path is absolutely continuous with an absolutely continuous
inverse as soon as the interface values increase strictly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from weakpaths.core import (
    POSITIVITY_MARGIN, CellField, DegenerateDiffeomorphismError, Grid1D,
    SpaceTimeField, trapezoid_weights)
from weakpaths.solver import SchemeConfig, solve


@dataclass(frozen=True)
class DiffeoPath:
    """Sampled ``gamma(x, t)`` at cell interfaces.

    On a line ``gamma`` has shape ``(nt, nx + 1)``. On a torus it has shape
    ``(nt, nx)`` and the node after the last is ``gamma[:, 0] + winding``.
    ``defect`` is the closed-loop mismatch ``|sum(eta) dx - L|`` on a torus
    and zero on a line.
    """

    grid: Grid1D
    times: np.ndarray
    gamma: np.ndarray
    eta_min: float
    defect: np.ndarray
    winding: Optional[float] = None

    def nodes(self, k: int) -> np.ndarray:
        """Interpolation nodes ``gamma(x_j, t_k)``, ``j = 0..nx``."""
        g = self.gamma[k]
        if self.grid.periodic:
            return np.append(g, g[0] + self.winding)
        return g

    def at_centers(self, k: int) -> np.ndarray:
        g = self.nodes(k)
        return 0.5 * (g[:-1] + g[1:])

    def index_of(self, t: float) -> int:
        k = int(np.argmin(np.abs(self.times - t)))
        if not np.isclose(self.times[k], t, rtol=1e-12, atol=1e-14):
            raise KeyError(f"t={t} is not a recorded time of the path")
        return k


def translation_path(grid: Grid1D, times, speed: float = 0.0) -> DiffeoPath:
    """``gamma(x, t) = x + speed t``; ``speed = 0`` gives the identity."""
    times = np.asarray(times, dtype=np.float64)
    nodes = grid.interfaces[:-1] if grid.periodic else grid.interfaces
    gamma = nodes[None, :] + speed * times[:, None]
    winding = grid.length if grid.periodic else None
    return DiffeoPath(grid, times, gamma, 1.0, np.zeros(len(times)), winding)


def grid_translation_times(grid: Grid1D, speed: float, count: int) -> np.ndarray:
    """Times at which ``x + speed t`` has moved by whole cells: ``k dx / |speed|``."""
    if speed == 0:
        raise ValueError("speed must be nonzero")
    return np.arange(count) * grid.dx / abs(speed)


def anchor_velocity(grid: Grid1D, xi: np.ndarray) -> float:
    """``xi`` at the left-most interface (mean of the neighbouring cells)."""
    if grid.periodic:
        return 0.5 * (xi[0] + xi[-1])
    return float(xi[0])


class AnchorTracker:
    """Solver step hook integrating the anchor ``gamma(x_0, t)`` by forward Euler.

    ``velocity`` maps a state array ``(ncomp, nx)`` to ``xi`` per cell.
    """

    def __init__(self, grid: Grid1D, velocity: Callable[[np.ndarray], np.ndarray]):
        self.grid = grid
        self.velocity = velocity
        self.times = [0.0]
        self.positions = [grid.a]

    def __call__(self, t, dt, U):
        xi0 = anchor_velocity(self.grid, self.velocity(U))
        self.times.append(t + dt)
        self.positions.append(self.positions[-1] + dt * xi0)

    def at(self, times) -> np.ndarray:
        return np.interp(times, self.times, self.positions)


def reconstruct_gamma(eta: SpaceTimeField, xi: SpaceTimeField,
                      anchor: Optional[np.ndarray] = None) -> DiffeoPath:
    """Build ``gamma`` from ``eta`` and ``xi`` records.

    Without ``anchor`` the records must hold every solver step, and the
    anchor is advanced by forward Euler on ``xi`` between frames. With
    ``anchor`` (positions of ``gamma(x_0, t)`` at ``eta.times``, usually from
    an :class:`AnchorTracker`) only snapshot frames are needed.
    """
    grid = eta.grid
    if xi.grid != grid or len(xi.times) != len(eta.times) or not np.allclose(
            xi.times, eta.times, rtol=0, atol=1e-14):
        raise ValueError("eta and xi must share grid and times")
    E = eta.frames[:, 0, :]
    if E.min() <= POSITIVITY_MARGIN:
        k, i = np.unravel_index(int(np.argmin(E)), E.shape)
        raise DegenerateDiffeomorphismError(
            f"degenerate diffeomorphism: eta={E[k, i]:.3g} in cell {i} "
            f"at t={eta.times[k]:.6g}")
    if anchor is None:
        if eta.steps is not None and np.any(np.diff(eta.steps) != 1):
            raise ValueError("anchor integration needs a record of every step; "
                             "pass an anchor trajectory instead")
        X = xi.frames[:, 0, :]
        vel = np.array([anchor_velocity(grid, X[k]) for k in range(len(X))])
        dts = np.diff(eta.times)
        anchor = grid.a + np.concatenate([[0.0], np.cumsum(dts * vel[:-1])])
    anchor = np.asarray(anchor, dtype=np.float64)
    cums = np.cumsum(E * grid.dx, axis=1)
    if grid.periodic:
        gamma = anchor[:, None] + np.concatenate(
            [np.zeros((len(E), 1)), cums[:, :-1]], axis=1)
        defect = np.abs(cums[:, -1] - grid.length)
        winding = grid.length
        if np.any(gamma[:, 0] + winding - gamma[:, -1] <= 0):
            raise DegenerateDiffeomorphismError(
                "closed-loop defect destroys monotonicity across the seam")
    else:
        gamma = anchor[:, None] + np.concatenate(
            [np.zeros((len(E), 1)), cums], axis=1)
        defect = np.zeros(len(E))
        winding = None
    return DiffeoPath(grid, np.array(eta.times), gamma, float(E.min()),
                      defect, winding)


def _invert_nodes(grid: Grid1D, g: np.ndarray, y: np.ndarray, winding,
                  outside: str) -> np.ndarray:
    y = np.asarray(y, dtype=np.float64)
    xs = grid.interfaces
    shift = 0.0
    if grid.periodic:
        turns = np.floor((y - g[0]) / winding)
        y = y - turns * winding
        shift = turns * grid.length
    elif outside == "error":
        lo, hi = g[0], g[-1]
        tol = 1e-12 * grid.length
        bad = (y < lo - tol) | (y > hi + tol)
        if np.any(bad):
            yb = np.atleast_1d(y)[np.argmax(np.atleast_1d(bad))]
            raise ValueError(f"y={yb:.6g} outside the range "
                             f"[{lo:.6g}, {hi:.6g}] of gamma")
    j = np.clip(np.searchsorted(g, y, side="right") - 1, 0, grid.nx - 1)
    x = xs[j] + (y - g[j]) / (g[j + 1] - g[j]) * grid.dx
    if not grid.periodic and outside == "extend":
        # unit slope beyond the ends; the caller only needs the side
        x = np.where(y < g[0], xs[0] + (y - g[0]), x)
        x = np.where(y > g[-1], xs[-1] + (y - g[-1]), x)
    return x + shift


def invert(path: DiffeoPath, y, t: float, outside: str = "error"):
    """Solve ``gamma(x, t) = y`` for ``x`` on the piecewise-linear interpolant.

    The containing segment is located by bisection on the monotone node
    values, then the linear piece is solved exactly.
    """
    k = path.index_of(t)
    return _invert_nodes(path.grid, path.nodes(k), y, path.winding, outside)


def evaluate(path: DiffeoPath, x, t: float):
    """``gamma(x, t)`` by piecewise-linear interpolation (winding on a torus)."""
    k = path.index_of(t)
    grid, g = path.grid, path.nodes(k)
    x = np.asarray(x, dtype=np.float64)
    shift = 0.0
    if grid.periodic:
        turns = np.floor((x - grid.a) / grid.length)
        x = x - turns * grid.length
        shift = turns * path.winding
    return np.interp(x, grid.interfaces, g) + shift


def cell_index(grid: Grid1D, x: np.ndarray) -> np.ndarray:
    """Cell containing each ``x`` (periodic wrap on a torus, clamp on a line)."""
    i = np.floor((np.asarray(x) - grid.a) / grid.dx).astype(np.int64)
    if grid.periodic:
        return np.mod(i, grid.nx)
    return np.clip(i, 0, grid.nx - 1)


def pullback(source: SpaceTimeField, path: DiffeoPath,
             fn: Callable[[np.ndarray], np.ndarray],
             outside: str = "extend",
             frame_speed: float = 0.0) -> SpaceTimeField:
    """Physical-frame field ``fn(U) o gamma^{-1}`` at the target cell centers.

    ``source`` holds reference-frame states; on a line, points beyond the
    range of ``gamma`` take the state of the nearest boundary cell, which
    matches the outflow ghost cells of the solver. With ``frame_speed`` c
    the target at time t is ``x + c t`` instead of ``x``.
    """
    if len(source.times) != len(path.times) or not np.allclose(
            source.times, path.times, rtol=0, atol=1e-14):
        raise ValueError("source and path must share times")
    grid = path.grid
    out = []
    for k in range(len(path.times)):
        y = grid.centers + frame_speed * path.times[k]
        x = _invert_nodes(grid, path.nodes(k), y, path.winding, outside)
        states = source.frames[k][:, cell_index(grid, x)]
        out.append(np.atleast_2d(fn(states)))
    return SpaceTimeField(grid, path.times, np.array(out), source.steps)


def verify_change_of_variables(A: SpaceTimeField, B: SpaceTimeField,
                               path: DiffeoPath, testfn) -> float:
    """Absolute difference of the two sides of the change-of-variables identity.

    The physical side ``iint chi_t a + chi_x b dx dt`` uses the pullbacks
    ``a = A o gamma^{-1}`` and ``b = B o gamma^{-1}``. The reference side
    ``iint (chi_t(gamma, t) A + chi_x(gamma, t) B) eta dy dt`` uses the path
    directly. Both use midpoint sums in space and trapezoid sums over the
    recorded times.
    """
    grid = path.grid
    x0, x1, t0, t1 = testfn.support
    if not grid.periodic and (x0 <= grid.a or x1 >= grid.b):
        raise ValueError("test function support touches the spatial boundary")
    if t0 <= path.times[0] or t1 >= path.times[-1]:
        raise ValueError("test function support touches the time boundary")
    a = pullback(A, path, lambda U: U[0])
    b = pullback(B, path, lambda U: U[0])
    wt = trapezoid_weights(path.times)
    xc, dx = grid.centers, grid.dx
    lhs = rhs = 0.0
    for k, t in enumerate(path.times):
        if wt[k] == 0.0:
            continue
        g = path.nodes(k)
        eta = np.diff(g) / dx
        gc = path.at_centers(k)
        if grid.periodic:
            # the bump lives on one period; fold the physical centers onto it
            gc = x0 + np.mod(gc - x0, grid.length)
            xp = x0 + np.mod(xc - x0, grid.length)
        else:
            xp = xc
        lhs += wt[k] * dx * np.sum(testfn.dt(xp, t) * a.frames[k, 0]
                                   + testfn.dx(xp, t) * b.frames[k, 0])
        rhs += wt[k] * dx * np.sum(
            (testfn.dt(gc, t) * A.frames[k, 0] + testfn.dx(gc, t) * B.frames[k, 0])
            * eta)
    return float(abs(lhs - rhs))


def solve_with_path(spec, ic: CellField, t_end: float, scheme: SchemeConfig,
                    velocity: Callable[[np.ndarray], np.ndarray],
                    eta_row: int = 0):
    """Solve a particle-path system and reconstruct its diffeomorphism.

    Returns ``(run, path)``; the anchor is integrated during the solve with
    the solver's own time steps.
    """
    tracker = AnchorTracker(ic.grid, velocity)
    run = solve(spec, ic, t_end, scheme, on_step=tracker)
    eta = run.component(eta_row)
    xi = run.map(velocity)
    return run, reconstruct_gamma(eta, xi, tracker.at(run.times))
