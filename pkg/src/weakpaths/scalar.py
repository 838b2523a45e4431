"""Convex scalar conservation laws and their particle-path Temple system.

The scalar law ``rho_t + f(rho)_x = 0`` is rewritten with the velocity
``u = F(rho) = f(rho) / rho``. With ``eta = gamma_x`` and ``v = rho_0`` the
path satisfies the 2x2 system

    eta_t - F(v / eta)_x = 0,    v_t = 0,

whose solutions map back to the scalar law through ``rho = (v / eta) o gamma^{-1}``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.interpolate import CubicHermiteSpline

from weakpaths.core import (
    CellField, ConvexExtension, SpaceTimeField, SystemSpec, fd_step)
from weakpaths.diffeo import pullback, reconstruct_gamma, solve_with_path
from weakpaths.solver import SchemeConfig, solve


def _derivative(fn, rel=1e-6):
    def d(x):
        x = np.asarray(x, dtype=np.float64)
        h = fd_step(x, rel)
        return (fn(x + h) - fn(x - h)) / (2 * h)
    return d


def _second_derivative(fn, rel=1e-4):
    def d2(x):
        x = np.asarray(x, dtype=np.float64)
        h = fd_step(x, rel)
        return (fn(x + h) - 2 * fn(x) + fn(x - h)) / h ** 2
    return d2


def _bisect(fn, target, lo, hi, iters=200):
    """Vectorized bisection for an increasing ``fn`` on ``[lo, hi]``."""
    lo = np.array(np.broadcast_to(lo, np.shape(target)), dtype=np.float64)
    hi = np.array(np.broadcast_to(hi, np.shape(target)), dtype=np.float64)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        below = fn(mid) < target
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
        if np.all(hi - lo <= 1e-15 * np.maximum(1.0, np.abs(hi))):
            break
    return 0.5 * (lo + hi)


class Antiderivative:
    """Tabulated ``int_{a}^{x} integrand(s) ds`` on ``[a, b]``.

    Panel integrals come from adaptive quadrature; values between nodes use a
    cubic Hermite spline with the exact integrand as the node slopes.
    """

    def __init__(self, integrand: Callable, a: float, b: float,
                 nodes: int = 2049, epsabs: float = 1e-13):
        xs = np.linspace(a, b, nodes)
        with warnings.catch_warnings():
            # panels where the integrand is near zero hit the roundoff floor
            warnings.simplefilter("ignore", IntegrationWarning)
            pieces = [quad(integrand, x0, x1, epsabs=epsabs, epsrel=1e-12)[0]
                      for x0, x1 in zip(xs[:-1], xs[1:])]
        ys = np.concatenate([[0.0], np.cumsum(pieces)])
        self.a, self.b = a, b
        self._spline = CubicHermiteSpline(xs, ys, integrand(xs))

    def __call__(self, x):
        return self._spline(x)


# {{{ flux normalization

@dataclass(frozen=True)
class ConvexFlux:
    """A convex flux shifted so that density and velocity are positive.

    The working variable is ``r = rho + C`` with flux
    ``fs(r) = f(r - C) + m r - K``; ``F(r) = fs(r) / r`` and ``g`` inverts
    ``F``. The constant ``K`` leaves the conservation law unchanged but
    enters ``F``. A physical solution is recovered as
    ``rho(x, t) = r(x + c t, t) - C``. ``[r_min, r_max]`` is the shifted
    data range.
    """

    f: Callable
    fp: Callable
    fpp: Callable
    C: float
    m: float
    c: float
    r_min: float
    r_max: float
    K: float = 0.0

    def fs(self, r):
        return self.f(r - self.C) + self.m * r - self.K

    def fsp(self, r):
        return self.fp(r - self.C) + self.m

    def F(self, r):
        r = np.asarray(r, dtype=np.float64)
        return self.fs(r) / r

    def Fp(self, r):
        r = np.asarray(r, dtype=np.float64)
        return (r * self.fsp(r) - self.fs(r)) / r ** 2

    def g(self, u):
        """Inverse of ``F`` on a padded copy of the domain."""
        lo, hi = self._padded()
        return _bisect(self.F, np.asarray(u, dtype=np.float64), lo, hi)

    def to_shifted(self, rho):
        return np.asarray(rho) + self.C

    def from_shifted(self, r):
        return np.asarray(r) - self.C

    def _padded(self):
        pad = 0.5 * (self.r_max - self.r_min) + 0.5 * self.r_min
        return 0.5 * self.r_min, self.r_max + pad


def normalize_flux(f: Callable, fp: Optional[Callable] = None,
                   data_range=(1.0, 2.0), fpp: Optional[Callable] = None,
                   n_check: int = 401) -> ConvexFlux:
    """Choose ``C``, ``K`` and ``m`` so density, ``F`` and ``F'`` are positive on the data.

    ``C`` is the smallest nonnegative shift putting the shifted minimum at
    least ``0.1 * span`` above 0. ``r F'(r) r = r f' - f + K`` grows with
    ``r``, so ``K`` is the smallest nonnegative constant making it exceed
    ``0.1 * span`` at the left end (zero whenever the shift alone suffices).
    ``m`` is the smallest integer making ``F`` exceed ``0.1 * max(span_F, 1)``.
    """
    fp = fp or _derivative(f)
    fpp = fpp or _second_derivative(f)
    lo, hi = map(float, data_range)
    if hi < lo:
        raise ValueError("data range must be increasing")
    span = max(hi - lo, 1e-3 * max(abs(lo), 1.0))
    rho = np.linspace(lo, hi, n_check)
    if np.any(fpp(rho) <= 0):
        bad = rho[np.argmax(fpp(rho) <= 0)]
        raise ValueError(f"flux is not strictly convex on the data range "
                         f"(f'' <= 0 at rho={bad:.6g})")
    C = max(0.0, 0.1 * span - lo)
    r = rho + C
    gap = float((lo + C) * fp(lo) - f(lo))
    K = 0.0 if gap > 0 else 0.1 * span - gap
    Fr = (f(rho) - K) / r
    F_min = float(Fr.min())
    margin = 0.1 * max(float(Fr.max() - Fr.min()), 1.0)
    m = 0.0 if F_min >= margin else float(np.ceil(margin - F_min))
    cf = ConvexFlux(f, fp, fpp, float(C), m, m, lo + C, hi + C, K)
    if np.any(cf.Fp(r) <= 0) or np.any(cf.F(r) <= 0):
        raise ValueError("normalization failed to make F and F' positive")
    return cf


def burgers_flux(data_range=(1.0, 2.0)) -> ConvexFlux:
    return normalize_flux(lambda r: 0.5 * np.asarray(r) ** 2,
                          lambda r: np.asarray(r, dtype=np.float64),
                          data_range, lambda r: np.ones_like(np.asarray(r, dtype=np.float64)))

# }}}


# {{{ Eulerian scalar law

def exact_riemann_scalar(f, fp, rho_l, rho_r, xi, fp_inv=None):
    """Self-similar entropy solution of a convex scalar Riemann problem at ``x/t = xi``."""
    rl, rr = np.broadcast_arrays(np.asarray(rho_l, dtype=np.float64),
                                 np.asarray(rho_r, dtype=np.float64))
    xi = np.broadcast_to(np.asarray(xi, dtype=np.float64), rl.shape)
    out = np.array(rl, dtype=np.float64)
    shock = rl > rr
    with np.errstate(invalid="ignore", divide="ignore"):
        s = (f(rl) - f(rr)) / (rl - rr)
    out = np.where(shock & (xi >= s), rr, out)
    rare = rl < rr
    if np.any(rare):
        al, ar = fp(rl), fp(rr)
        out = np.where(rare & (xi >= ar), rr, out)
        fan = rare & (xi > al) & (xi < ar)
        if np.any(fan):
            if fp_inv is not None:
                inner = fp_inv(xi[fan])
            else:
                inner = _bisect(fp, xi[fan], rl[fan], rr[fan])
            out[fan] = inner
    return out


def build_eulerian_scalar(f, fp, data_range, fp_inv=None, name="scalar",
                          extensions=()) -> SystemSpec:
    """``rho_t + f(rho)_x = 0`` with an exact Godunov Riemann solution."""
    lo, hi = data_range
    slack = 1e-12 * max(1.0, abs(hi - lo))

    def flux(U):
        return f(U)

    def speed(U):
        return np.abs(fp(U[0]))

    def admissible(U):
        return (U[0] >= lo - slack) & (U[0] <= hi + slack) & np.isfinite(U[0])

    def riemann(UL, UR, xi):
        return exact_riemann_scalar(f, fp, UL, UR, xi, fp_inv)

    def sampler(rng, n):
        return rng.uniform(lo, hi, size=(1, n))

    return SystemSpec(name, 1, flux, speed, admissible, tuple(extensions),
                      riemann, ("rho",), (), sampler)


def burgers_system(data_range=(-2.0, 2.0), extensions=()) -> SystemSpec:
    return build_eulerian_scalar(lambda r: 0.5 * np.asarray(r) ** 2,
                                 lambda r: np.asarray(r, dtype=np.float64),
                                 data_range, fp_inv=lambda a: a,
                                 name="burgers", extensions=extensions)


def shock_time(fp, rho0, domain=(0.0, 1.0), n: int = 20001,
               drho0: Optional[Callable] = None, fpp: Optional[Callable] = None):
    """``-1 / min_x d/dx f'(rho0(x))`` sampled on ``n`` points (``inf`` if never)."""
    x = np.linspace(domain[0], domain[1], n)
    fpp = fpp or _derivative(fp)
    if drho0 is None:
        drho0 = _derivative(rho0)
    slope = fpp(rho0(x)) * drho0(x)
    smin = float(np.min(slope))
    if smin >= 0:
        return np.inf
    return -1.0 / smin


def characteristics_solution(fp, rho0, x, t, domain=(0.0, 1.0),
                             t_shock: Optional[float] = None, drho0=None,
                             fpp=None, periodic=True):
    """Pre-shock solution ``rho0(x0)`` with ``x = x0 + f'(rho0(x0)) t``."""
    if t_shock is None:
        t_shock = shock_time(fp, rho0, domain, drho0=drho0, fpp=fpp)
    if t >= 0.95 * t_shock:
        raise ValueError(f"t={t} is beyond 0.95 of the shock time {t_shock:.6g}")
    x = np.asarray(x, dtype=np.float64)
    probe = fp(rho0(np.linspace(domain[0], domain[1], 2001)))
    smin, smax = float(probe.min()), float(probe.max())
    pad = 1e-9 + 0.01 * (smax - smin) * t

    def foot(x0):
        return x0 + fp(rho0(x0)) * t

    x0 = _bisect(foot, x, x - smax * t - pad, x - smin * t + pad)
    return rho0(x0)

# }}}


# {{{ Temple system

def build_temple_system(cf: ConvexFlux, rho0=None, bounds=None,
                        slack: float = 1e-12) -> SystemSpec:
    """Particle-path system for ``(eta, v)`` with flux ``(-F(v/eta), 0)``.

    States are restricted to the invariant quadrilateral
    ``m <= v <= M, m <= v/eta <= M`` in shifted variables. ``bounds`` defaults
    to the range of the shifted data ``rho0`` (a :class:`CellField` of
    physical densities) or to the flux domain.
    """
    if bounds is None:
        if rho0 is not None:
            r0 = cf.to_shifted(rho0.data[0] if isinstance(rho0, CellField)
                               else np.asarray(rho0))
            bounds = (float(r0.min()), float(r0.max()))
        else:
            bounds = (cf.r_min, cf.r_max)
    m, M = bounds
    if m <= 0:
        raise ValueError(f"lower bound {m} must be positive")
    if m < cf.r_min * (1 - 1e-12) or M > cf.r_max * (1 + 1e-12):
        raise ValueError(f"data range [{m}, {M}] leaves the normalized flux "
                         f"domain [{cf.r_min}, {cf.r_max}]")

    def flux(U):
        eta, v = U
        return np.stack([-cf.F(v / eta), np.zeros_like(v)])

    # The eigenvalue z^2 F'(z) / v (z = v/eta) is bounded over the whole
    # Riemann fan, where z sweeps [m, M] while v keeps its end values; the
    # end-state speeds alone underestimate it and break the invariant region.
    zs = np.linspace(m, M, 257)
    kmax = float(np.max(np.abs(zs * zs * cf.Fp(zs)))) * (1 + 1e-9)

    def speed(U):
        eta, v = U
        return kmax / np.abs(v)

    def admissible(U):
        eta, v = U
        with np.errstate(divide="ignore", invalid="ignore"):
            z = v / eta
        return ((eta > 0) & (v >= m - slack) & (v <= M + slack)
                & (z >= m - slack) & (z <= M + slack) & np.isfinite(z))

    def sampler(rng, n):
        v = rng.uniform(m, M, n)
        z = rng.uniform(m, M, n)
        return np.stack([v / z, v])

    # v is dissipated like eta: the local Lax-Friedrichs average keeps the
    # convex quadrilateral invariant, the undissipated variant does not
    return SystemSpec("temple", 2, flux, speed, admissible, (), None,
                      ("eta", "v"), (), sampler)


def quadrilateral_vertices(m, M):
    return [(m / M, m), (1.0, m), (M / m, M), (1.0, M)]


def temple_velocity(cf: ConvexFlux):
    def xi(U):
        return cf.F(U[1] / U[0])
    return xi


def temple_data(cf: ConvexFlux, rho0: CellField) -> CellField:
    """``(eta, v) = (1, rho0 + C)``."""
    r0 = cf.to_shifted(rho0.data[0])
    return CellField(rho0.grid, np.stack([np.ones_like(r0), r0]))


def run_temple(cf: ConvexFlux, rho0: CellField, t_end: float,
               scheme: SchemeConfig, spec: Optional[SystemSpec] = None):
    """Solve the Temple system from physical data; returns ``(run, path)``."""
    spec = spec or build_temple_system(cf, rho0)
    return solve_with_path(spec, temple_data(cf, rho0), t_end, scheme,
                           temple_velocity(cf))


def reconstruct_scalar(run: SpaceTimeField, cf: ConvexFlux,
                       path=None) -> SpaceTimeField:
    """Physical density ``(v / eta) o gamma^{-1}`` with the normalization undone."""
    if path is None:
        path = reconstruct_gamma(run.component(0), run.map(temple_velocity(cf)))
    r = pullback(run, path, lambda U: U[1] / U[0], frame_speed=cf.c)
    return r.map(lambda R: cf.from_shifted(R))

# }}}


# {{{ convex extensions

def _check_convex(Xpp, lo, hi, n=401):
    s = np.linspace(lo, hi, n)
    if np.any(Xpp(s) < 0):
        raise ValueError("X is not convex on the requested range")


def scalar_extension_pair(X, f_prime, domain, Xp=None, Xpp=None,
                          name="scalar extension") -> ConvexExtension:
    """``E = X(rho)``, ``Q = int_{rho_min}^{rho} X'(s) f'(s) ds``."""
    Xp = Xp or _derivative(X)
    Xpp = Xpp or _second_derivative(X)
    lo, hi = domain
    _check_convex(Xpp, lo, hi)
    pad = 0.05 * (hi - lo) + 1e-3
    Q = Antiderivative(lambda s: Xp(s) * f_prime(s), lo - pad, hi + pad)
    shift = float(Q(lo))

    def E(U):
        return X(np.asarray(U)[0])

    def Qf(U):
        return Q(np.asarray(U)[0]) - shift

    def convex_on(U):
        return np.ones(np.shape(U)[1:], dtype=bool)

    return ConvexExtension(name, E, Qf, convex_on)


def temple_extension_pair(X, cf: ConvexFlux, Xp=None, Xpp=None,
                          domain=None, name="temple extension") -> ConvexExtension:
    """``E = eta X(v/eta)``, ``Q = -int^{v/eta} (X(s) - s X'(s)) F'(s) ds``."""
    Xp = Xp or _derivative(X)
    Xpp = Xpp or _second_derivative(X)
    lo, hi = domain or (cf.r_min, cf.r_max)
    _check_convex(Xpp, lo, hi)
    pad = 0.05 * (hi - lo) + 1e-3
    lo_q = max(lo - pad, 0.5 * lo)
    Q = Antiderivative(lambda s: -(X(s) - s * Xp(s)) * cf.Fp(s), lo_q, hi + pad)
    shift = float(Q(lo))

    def E(U):
        eta, v = U
        return eta * X(v / eta)

    def Qf(U):
        eta, v = U
        return Q(v / eta) - shift

    def convex_on(U):
        return np.ones(np.shape(U)[1:], dtype=bool)

    return ConvexExtension(name, E, Qf, convex_on)

# }}}

