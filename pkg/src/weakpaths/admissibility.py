"""Numerical certificates for the entropy inequality.

A run is admissible for a convex extension ``(E, Q)`` when
``iint phi_t E(U) + phi_x Q(U) dx dt >= 0`` for every nonnegative test
function supported in ``t > 0``. The check uses a fixed, finite family of
tensor bumps on a dyadic lattice of the space-time rectangle. Each integral
is exact for the field taken piecewise constant in space (cells) and in
time (between recorded times), so constant states give zero up to roundoff.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from weakpaths.core import (
    ConvexExtension, Grid1D, SpaceTimeField, SystemSpec, TensorBump,
    total_variation)
from weakpaths.solver import SchemeConfig, _with_ghosts

C_ADM = 10.0
# absolute floor so that exactly constant runs pass despite roundoff
ROUNDOFF_FLOOR = 1e-12


def dyadic_family(grid: Grid1D, t_end: float, levels: int = 3) -> list:
    """Bumps filling each cell of the ``2^l x 2^l`` splits of the domain, ``l < levels``.

    Each bump is supported on its sub-rectangle, so every member vanishes
    near ``t = 0``, near ``t_end`` and (on a line) near the boundary.
    """
    if levels < 1:
        raise ValueError("need at least one level")
    family = []
    for lev in range(levels):
        n = 2 ** lev
        hx = 0.5 * grid.length / n
        ht = 0.5 * t_end / n
        for i in range(n):
            for k in range(n):
                family.append(TensorBump(grid.a + (2 * i + 1) * hx,
                                         (2 * k + 1) * ht, hx, ht))
    return family


def weak_form_values(run: SpaceTimeField, ext: ConvexExtension,
                     family: Sequence[TensorBump]) -> np.ndarray:
    """``iint phi_t E + phi_x Q`` for every bump.

    With ``U = U^n_j`` on cell ``j`` and ``[t_n, t_{n+1})`` the integrals are
    ``sum_n (b(t_{n+1}) - b(t_n)) sum_j E^n_j int_j b`` and
    ``sum_n int_n b sum_j Q^n_j (b(x_{j+1/2}) - b(x_{j-1/2}))``.
    """
    if len(family) == 0:
        raise ValueError("empty test-function family")
    E = np.stack([np.asarray(ext.E(f), dtype=np.float64) for f in run.frames])
    Q = np.stack([np.asarray(ext.Q(f), dtype=np.float64) for f in run.frames])
    xi, t = run.grid.interfaces, run.times
    out = np.empty(len(family))
    for j, bump in enumerate(family):
        # bumps are separable, so each integral is a bilinear form
        sx = (xi - bump.xc) / bump.hx
        st = (t - bump.tc) / bump.ht
        bx_cell = bump.hx * np.diff(TensorBump._ib(sx))
        bt_step = bump.ht * np.diff(TensorBump._ib(st))
        out[j] = (np.diff(TensorBump._b(st)) @ E[:-1] @ bx_cell
                  + bt_step @ Q[:-1] @ np.diff(TensorBump._b(sx)))
    return out


def entropy_production(run: SpaceTimeField, ext: ConvexExtension,
                       family: Optional[Sequence[TensorBump]] = None,
                       levels: int = 3) -> float:
    """Minimum of the weak entropy form over the test family.

    Admissible runs give values above ``-admissibility_tolerance(run)``.
    """
    if family is None:
        family = dyadic_family(run.grid, float(run.times[-1]), levels)
    return float(np.min(weak_form_values(run, ext, family)))


def admissibility_tolerance(run: SpaceTimeField, c_adm: float = C_ADM) -> float:
    """``c_adm (dx + dt) TV0`` with ``dt`` the widest gap between recorded times."""
    dt = float(np.max(np.diff(run.times))) if len(run.times) > 1 else 0.0
    tv0 = total_variation(run.frames[0], run.grid.periodic)
    return c_adm * (run.grid.dx + dt) * tv0 + ROUNDOFF_FLOOR


@dataclass(frozen=True)
class AdmissibilityResult:
    extension: str
    minimum: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.minimum >= -self.tolerance


def check_admissibility(run: SpaceTimeField, extensions: Sequence[ConvexExtension],
                        c_adm: float = C_ADM, levels: int = 3) -> list:
    """One :class:`AdmissibilityResult` per extension."""
    tol = admissibility_tolerance(run, c_adm)
    family = dyadic_family(run.grid, float(run.times[-1]), levels)
    return [AdmissibilityResult(ext.name, entropy_production(run, ext, family),
                                tol) for ext in extensions]


def inject_expansion_shock(grid: Grid1D, t_end: float, n_times: int = 201,
                           x0: Optional[float] = None, left: float = -1.0,
                           right: float = 1.0) -> SpaceTimeField:
    """Stationary Burgers weak solution ``left | right`` at ``x0`` with ``left < right``.

    The jump satisfies Rankine-Hugoniot with speed ``(left + right)/2``,
    which is zero for the default data, but violates the entropy inequality.
    """
    if not left < right:
        raise ValueError("an expansion shock needs left < right")
    if left + right != 0:
        raise ValueError("only the stationary jump left = -right is supported")
    x0 = 0.5 * (grid.a + grid.b) if x0 is None else x0
    xs = grid.interfaces
    frac = np.clip((x0 - xs[:-1]) / grid.dx, 0.0, 1.0)
    # on a torus the seam carries the compensating (admissible) jump
    U = frac * left + (1 - frac) * right
    times = np.linspace(0.0, t_end, n_times)
    frames = np.broadcast_to(U, (n_times, 1, grid.nx))
    return SpaceTimeField(grid, times, frames.copy())


def _numerical_entropy_flux(spec: SystemSpec, ext: ConvexExtension,
                            UL: np.ndarray, UR: np.ndarray, kind: str):
    if kind == "godunov_exact":
        return ext.Q(spec.riemann_exact(UL, UR, 0.0))
    a = np.maximum(spec.max_wave_speed(UL), spec.max_wave_speed(UR))
    return 0.5 * (ext.Q(UL) + ext.Q(UR)) - 0.5 * a * (ext.E(UR) - ext.E(UL))


def cell_entropy_report(run: SpaceTimeField, spec: SystemSpec,
                        ext: ConvexExtension, scheme: SchemeConfig) -> np.ndarray:
    """Per-step max of ``E(U^{n+1}) - E(U^n) + dt/dx (Qh_{i+1/2} - Qh_{i-1/2})``, clipped at 0.

    ``Qh`` is the Rusanov-form entropy flux, or the entropy flux of the
    exact Riemann state for ``godunov_exact``. Consecutive frames must be
    consecutive solver steps. A step passes when its value is below
    ``1e-10`` times the largest ``|E|``.
    """
    if run.steps is not None and np.any(np.diff(run.steps) != 1):
        raise ValueError("cell entropy report needs a record of every step")
    dx = run.grid.dx
    out = np.empty(len(run.times) - 1)
    for n in range(len(out)):
        U0, U1 = run.frames[n], run.frames[n + 1]
        dt = run.times[n + 1] - run.times[n]
        G = _with_ghosts(U0, scheme.bc)
        Qh = _numerical_entropy_flux(spec, ext, G[:, :-1], G[:, 1:],
                                     scheme.flux_kind)
        excess = ext.E(U1) - ext.E(U0) + dt / dx * (Qh[1:] - Qh[:-1])
        out[n] = max(0.0, float(np.max(excess)))
    return out


def cell_tolerance(run: SpaceTimeField, ext: ConvexExtension) -> float:
    scale = max(1.0, float(np.max(np.abs(ext.E(run.frames[0])))))
    return 1e-10 * scale
