"""Isentropic gas dynamics in Eulerian and particle-path form.

Eulerian variables are ``(rho, m = rho u)``. The particle-path system uses
``eta = gamma_x``, ``w = rho_0 gamma_t`` and ``v = rho_0``:

    eta_t - (w / v)_x = 0,   w_t + p(v / eta)_x = 0,   v_t = 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from weakpaths.core import (
    CellField, ConvexExtension, SpaceTimeField, SystemSpec, fd_step,
    lift_extension, positive_rows)
from weakpaths.diffeo import pullback, reconstruct_gamma, solve_with_path
from weakpaths.scalar import Antiderivative
from weakpaths.solver import SchemeConfig


@dataclass(frozen=True)
class PressureLaw:
    """Barotropic pressure ``p(rho)`` with derivative ``pp`` on ``[rho_min, rho_max]``.

    ``kappa`` and ``alpha`` are set for the power law ``kappa rho^alpha``,
    which has a closed-form energy.
    """

    p: Callable
    pp: Callable
    rho_min: float = 0.1
    rho_max: float = 10.0
    kappa: Optional[float] = None
    alpha: Optional[float] = None

    def check(self, n: int = 201):
        rho = np.linspace(self.rho_min, self.rho_max, n)
        if np.any(self.pp(rho) <= 0):
            raise ValueError("p' must be positive (hyperbolicity)")
        h = fd_step(rho, 1e-4)
        ppp = (self.pp(rho + h) - self.pp(rho - h)) / (2 * h)
        if np.any(2 * self.pp(rho) + rho * ppp <= 0):
            raise ValueError("2p' + rho p'' must be positive (genuine nonlinearity)")
        return self


def gamma_law(kappa: float = 1.0, alpha: float = 2.0, rho_min: float = 0.1,
              rho_max: float = 10.0) -> PressureLaw:
    return PressureLaw(lambda r: kappa * np.asarray(r) ** alpha,
                       lambda r: kappa * alpha * np.asarray(r) ** (alpha - 1),
                       rho_min, rho_max, kappa, alpha).check()


# {{{ systems

def build_eulerian_isentropic(pl: PressureLaw, extensions=()) -> SystemSpec:
    """``(rho, m)`` with flux ``(m, m^2/rho + p(rho))``."""
    def flux(U):
        rho, m = U
        return np.stack([m, m * m / rho + pl.p(rho)])

    def speed(U):
        rho, m = U
        return np.abs(m / rho) + np.sqrt(pl.pp(rho))

    def sampler(rng, n):
        rho = rng.uniform(0.5, 2.0, n)
        return np.stack([rho, rho * rng.uniform(-1.0, 1.0, n)])

    return SystemSpec("isentropic", 2, flux, speed, positive_rows(0),
                      tuple(extensions), None, ("rho", "m"), (), sampler)


def build_pp_isentropic(pl: PressureLaw, extensions=()) -> SystemSpec:
    """``(eta, w, v)`` with flux ``(-w/v, p(v/eta), 0)``."""
    def flux(U):
        eta, w, v = U
        return np.stack([-w / v, pl.p(v / eta), np.zeros_like(v)])

    def speed(U):
        eta, w, v = U
        return np.sqrt(pl.pp(v / eta)) / eta

    def sampler(rng, n):
        eta = rng.uniform(0.5, 2.0, n)
        rho = rng.uniform(0.5, 2.0, n)
        u = rng.uniform(-1.0, 1.0, n)
        v = rho * eta
        return np.stack([eta, v * u, v])

    return SystemSpec("isentropic-pp", 3, flux, speed, positive_rows(0, 2),
                      tuple(extensions), None, ("eta", "w", "v"), (2,),
                      sampler)


def pp_velocity(U):
    """``xi = gamma_t = w / v``."""
    return U[1] / U[2]


def pp_data(rho0: np.ndarray, u0: np.ndarray) -> np.ndarray:
    """Particle-path data ``(1, rho0 u0, rho0)``."""
    rho0, u0 = np.broadcast_arrays(np.asarray(rho0, dtype=np.float64),
                                   np.asarray(u0, dtype=np.float64))
    return np.stack([np.ones_like(rho0), rho0 * u0, rho0])


def eulerian_data(rho0, u0) -> np.ndarray:
    rho0, u0 = np.broadcast_arrays(np.asarray(rho0, dtype=np.float64),
                                   np.asarray(u0, dtype=np.float64))
    return np.stack([rho0, rho0 * u0])

# }}}


# {{{ convex extensions

def internal_energy(pl: PressureLaw) -> tuple:
    """``(F, F')`` with ``F'' = p'/rho``.

    The power law uses ``F = kappa rho^alpha / (alpha - 1)``; otherwise
    ``F = rho int_{rho_min}^{rho} p(s) / s^2 ds``.
    """
    if pl.kappa is not None and pl.alpha is not None and pl.alpha != 1:
        k, a = pl.kappa, pl.alpha
        return (lambda r: k * np.asarray(r) ** a / (a - 1),
                lambda r: k * a * np.asarray(r) ** (a - 1) / (a - 1))
    lo = 0.5 * pl.rho_min
    G = Antiderivative(lambda s: pl.p(s) / s ** 2, lo, 2 * pl.rho_max)

    def F(r):
        return np.asarray(r) * G(r)

    def Fp(r):
        return G(r) + pl.p(r) / np.asarray(r)

    return F, Fp


def energy_extension(pl: PressureLaw) -> ConvexExtension:
    """``E = m^2/(2 rho) + F(rho)``, ``Q = (m/rho)(m^2/(2 rho) + rho F'(rho))``."""
    F, Fp = internal_energy(pl)

    def E(U):
        rho, m = U
        return 0.5 * m * m / rho + F(rho)

    def Q(U):
        rho, m = U
        return (m / rho) * (0.5 * m * m / rho + rho * Fp(rho))

    def convex_on(U):
        return U[0] > 0

    return ConvexExtension("energy", E, Q, convex_on)


def _to_physical(U):
    eta, w, v = U
    return np.stack([v / eta, w / eta]), eta


def lift_extension_isentropic(ext: ConvexExtension, name=None) -> ConvexExtension:
    """``E~ = eta X(v/eta, w/eta)`` and ``Q~ = Q - (w/v) X`` at the physical state."""
    def convex_on(U):
        return (U[0] > 0) & (U[2] > 0)

    return lift_extension(ext, _to_physical, pp_velocity,
                          name or f"lifted {ext.name}", convex_on)


def verify_extension_pde(X: Callable, pl: PressureLaw, samples: np.ndarray,
                         h: float = 1e-4) -> float:
    """Max residual of ``X_xx + (2y/x) X_xy + ((y/x)^2 - p'(x)) X_yy`` at ``(x, y)`` samples.

    ``X`` takes a state array ``(2, n)``.
    """
    x, y = np.asarray(samples, dtype=np.float64)
    hx, hy = h * np.maximum(1.0, np.abs(x)), h * np.maximum(1.0, np.abs(y))

    def at(dx, dy):
        return X(np.stack([x + dx, y + dy]))

    f0 = at(0, 0)
    Xxx = (at(hx, 0) - 2 * f0 + at(-hx, 0)) / hx ** 2
    Xyy = (at(0, hy) - 2 * f0 + at(0, -hy)) / hy ** 2
    Xxy = (at(hx, hy) - at(hx, -hy) - at(-hx, hy) + at(-hx, -hy)) / (4 * hx * hy)
    res = Xxx + 2 * y / x * Xxy + ((y / x) ** 2 - pl.pp(x)) * Xyy
    return float(np.max(np.abs(res)))

# }}}


# {{{ reconstruction

def run_pp_isentropic(pl: PressureLaw, rho0: CellField, u0: np.ndarray,
                      t_end: float, scheme: SchemeConfig, spec=None):
    """Solve the particle-path system from physical data; returns ``(run, path)``."""
    spec = spec or build_pp_isentropic(pl)
    ic = CellField(rho0.grid, pp_data(rho0.data[0], u0))
    return solve_with_path(spec, ic, t_end, scheme, pp_velocity)


def reconstruct_isentropic(run: SpaceTimeField, path=None):
    """``(rho, u) = (v/eta, w/v) o gamma^{-1}``."""
    if path is None:
        path = reconstruct_gamma(run.component(0), run.map(pp_velocity))
    rho = pullback(run, path, lambda U: U[2] / U[0])
    u = pullback(run, path, pp_velocity)
    return rho, u

# }}}
