"""General 2x2 systems through the half-trace/half-gap coordinates ``(T, E)``.

For ``(u, v)_t + (f, g)_x = 0`` the eigenvalues of ``dF`` are ``T -+ E`` with
``T = (f_u + g_v)/2`` and ``E^2 = T^2 - det dF``. Riemann invariants ``z, w``
written as functions of ``(T, E)`` give the coefficients ``B, C, D`` of the
particle-path system whose velocity is ``T``.

The power-law example ``p'(u) = u^(1/lam)`` is carried through to a
conservative particle-path system in ``(h1, h2, eta)``. Two variants exist:

``"exact"``
    Riemann invariants ``T -+ 2 lam E`` (so ``B = 0``, ``C = -2 lam``,
    ``D = -1/(2 lam)``) and ``h2``-flux ``lam zeta^2 - xi^2/2``.
``"printed"``
    Invariants ``T -+ E^beta`` with ``beta = 1 - 2 lam`` and the flux term
    ``beta/(beta+1) zeta^(beta+1)``. These are not the invariants of the
    gas system; the variant is kept as a negative control. It is not
    hyperbolic for ``lam > 1/2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from weakpaths.core import CellField, SpaceTimeField, SystemSpec, positive_rows
from weakpaths.diffeo import pullback, reconstruct_gamma, solve_with_path
from weakpaths.solver import SchemeConfig

FD_STEP = 1e-4


def _partial(fn, i, args, h=1e-6):
    """Central difference of ``fn(*args)`` in argument ``i`` (relative step)."""
    args = [np.asarray(a, dtype=np.float64) for a in args]
    step = h * np.maximum(1.0, np.abs(args[i]))
    up, dn = list(args), list(args)
    up[i] = args[i] + step
    dn[i] = args[i] - step
    return (fn(*up) - fn(*dn)) / (2 * step)


@dataclass(frozen=True)
class TwoSystem:
    """A 2x2 conservation law with Riemann invariants in ``(T, E)`` form.

    ``f``, ``g`` act on ``(u, v)``. Missing partials fall back to central
    differences. ``z``, ``w`` and their partials act on ``(T, E)`` and may
    be absent when ``(T, E)`` is not a coordinate system. ``sample_uv``
    draws admissible states as ``(u, v)`` arrays.
    """

    name: str
    f: Optional[Callable] = None
    g: Optional[Callable] = None
    f_u: Optional[Callable] = None
    f_v: Optional[Callable] = None
    g_u: Optional[Callable] = None
    g_v: Optional[Callable] = None
    z: Optional[Callable] = None
    w: Optional[Callable] = None
    z_T: Optional[Callable] = None
    z_E: Optional[Callable] = None
    w_T: Optional[Callable] = None
    w_E: Optional[Callable] = None
    uv_from_TE: Optional[Callable] = None
    TE_from_zw: Optional[Callable] = None
    admissible: Optional[Callable] = None
    sample_uv: Optional[Callable] = None
    sample_TE: Optional[Callable] = None

    def jacobian(self, u, v):
        """``(f_u, f_v, g_u, g_v)`` at ``(u, v)``."""
        if self.f is None or self.g is None:
            raise ValueError(f"system {self.name!r} has no flux")
        parts = []
        for exact, fn, i in ((self.f_u, self.f, 0), (self.f_v, self.f, 1),
                             (self.g_u, self.g, 0), (self.g_v, self.g, 1)):
            parts.append(exact(u, v) if exact is not None
                         else _partial(fn, i, (u, v)))
        return tuple(np.asarray(p, dtype=np.float64) for p in parts)

    def invariant_partials(self, T, E):
        """``(z_T, z_E, w_T, w_E)`` at ``(T, E)``."""
        if self.z is None or self.w is None:
            raise ValueError(f"system {self.name!r} has no Riemann invariants "
                             "in (T, E) form")
        parts = []
        for exact, fn, i in ((self.z_T, self.z, 0), (self.z_E, self.z, 1),
                             (self.w_T, self.w, 0), (self.w_E, self.w, 1)):
            parts.append(exact(T, E) if exact is not None
                         else _partial(fn, i, (T, E)))
        return tuple(np.broadcast_to(np.asarray(p, dtype=np.float64),
                                     np.broadcast(T, E).shape) for p in parts)

    def samples_TE(self, rng, n):
        if self.sample_TE is not None:
            return self.sample_TE(rng, n)
        u, v = self.sample_uv(rng, n)
        return compute_T_E(self, u, v)


# {{{ coefficients

def compute_T_E(sys: TwoSystem, u, v):
    """``T = (f_u + g_v)/2`` and ``E = sqrt(T^2 - D)`` with ``D = det dF``."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if sys.admissible is not None and not np.all(sys.admissible(u, v)):
        raise ValueError(f"inadmissible state for system {sys.name!r}")
    fu, fv, gu, gv = sys.jacobian(u, v)
    T = 0.5 * (fu + gv)
    # (f_u - g_v)^2 / 4 + f_v g_u avoids cancellation in T^2 - D
    E2 = 0.25 * (fu - gv) ** 2 + fv * gu
    if np.any(E2 <= 0):
        i = int(np.argmin(np.atleast_1d(E2)))
        raise ValueError(f"not strictly hyperbolic here: E^2="
                         f"{np.atleast_1d(E2)[i]:.3g} at sample {i}")
    return T, np.sqrt(E2)


def compute_BCD(sys: TwoSystem, T, E, perturb_B: float = 0.0):
    """``B = (z_T w_E + z_E w_T)/Delta``, ``C = 2 z_E w_E/Delta``, ``D = -2 z_T w_T/Delta``.

    ``perturb_B`` shifts ``B`` and only serves negative controls.
    """
    zT, zE, wT, wE = sys.invariant_partials(T, E)
    delta = zT * wE - zE * wT
    if np.any(np.abs(delta) <= 1e-14 * (np.abs(zT * wE) + np.abs(zE * wT) + 1e-300)):
        raise ValueError("Delta = z_T w_E - z_E w_T vanishes; (T, E) -> (z, w) "
                         "is not invertible here")
    B = (zT * wE + zE * wT) / delta + perturb_B
    C = 2 * zE * wE / delta
    D = -2 * zT * wT / delta
    return B, C, D


def discriminant_residual(sys: TwoSystem, n_samples: int = 1000, seed: int = 0,
                          perturb_B: float = 0.0) -> float:
    """Max ``|B^2 + C D - 1|`` over sampled ``(T, E)``."""
    rng = np.random.default_rng(seed)
    T, E = sys.samples_TE(rng, n_samples)
    B, C, D = compute_BCD(sys, T, E, perturb_B)
    return float(np.max(np.abs(B * B + C * D - 1.0)))


def check_inverse(sys: TwoSystem, n_samples: int = 200, seed: int = 0) -> float:
    """Max relative error of ``uv_from_TE`` after ``compute_T_E``."""
    rng = np.random.default_rng(seed)
    u, v = sys.sample_uv(rng, n_samples)
    T, E = compute_T_E(sys, u, v)
    u2, v2 = sys.uv_from_TE(T, E)
    scale = np.maximum(1.0, np.abs(u)) + np.maximum(1.0, np.abs(v))
    return float(np.max((np.abs(u2 - u) + np.abs(v2 - v)) / scale))


def check_assumption(sys: TwoSystem, u, v, h: float = 1e-6) -> float:
    """Min ``|det d(T, E)/d(u, v)|`` by central differences.

    A value near zero means ``(T, E)`` cannot serve as state variables, as
    for the Lagrangian gas system where ``T`` vanishes identically.
    """
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)

    def TE(uu, vv):
        return np.stack(compute_T_E(sys, uu, vv))

    du = _partial(TE, 0, (u, v), h)
    dv = _partial(TE, 1, (u, v), h)
    det = du[0] * dv[1] - du[1] * dv[0]
    return float(np.min(np.abs(det)))

# }}}


# {{{ residual checks

def verify_hbar(sys: TwoSystem, hbar: Callable, samples, h: float = FD_STEP,
                perturb_B: float = 0.0) -> float:
    """Max residual of the equation for ``hbar(xi, zeta)``.

    The residual is ``[zeta (C hbar_xi - B hbar_zeta)]_xi
    - [zeta (B hbar_xi + D hbar_zeta) + hbar]_zeta`` with ``B, C, D`` at
    ``(T, E) = (xi, zeta)``, every derivative a central difference of step
    ``h``.
    """
    xi, zeta = (np.asarray(s, dtype=np.float64) for s in samples)

    def grads(a, b):
        ha = (hbar(a + h, b) - hbar(a - h, b)) / (2 * h)
        hb = (hbar(a, b + h) - hbar(a, b - h)) / (2 * h)
        return ha, hb

    def P(a, b):
        B, C, _ = compute_BCD(sys, a, b, perturb_B)
        ha, hb = grads(a, b)
        return b * (C * ha - B * hb)

    def R(a, b):
        B, _, D = compute_BCD(sys, a, b, perturb_B)
        ha, hb = grads(a, b)
        return b * (B * ha + D * hb) + hbar(a, b)

    res = ((P(xi + h, zeta) - P(xi - h, zeta)) / (2 * h)
           - (R(xi, zeta + h) - R(xi, zeta - h)) / (2 * h))
    return float(np.max(np.abs(res)))


def verify_mixed_partials(sys: TwoSystem, u_cand: Callable, f_cand: Callable,
                          samples, h: float = FD_STEP) -> float:
    """Residual of ``(lam u_z)_w = (mu u_w)_z`` and of ``f_z = lam u_z``, ``f_w = mu u_w``.

    ``lam = T - E`` and ``mu = T + E`` are evaluated through
    ``sys.TE_from_zw``; candidates and samples are in ``(z, w)``.
    """
    if sys.TE_from_zw is None:
        raise ValueError(f"system {sys.name!r} has no inverse (z, w) -> (T, E)")
    z, w = (np.asarray(s, dtype=np.float64) for s in samples)

    def speeds(a, b):
        T, E = sys.TE_from_zw(a, b)
        return T - E, T + E

    def d(fn, a, b, i):
        if i == 0:
            return (fn(a + h, b) - fn(a - h, b)) / (2 * h)
        return (fn(a, b + h) - fn(a, b - h)) / (2 * h)

    def lam_uz(a, b):
        return speeds(a, b)[0] * d(u_cand, a, b, 0)

    def mu_uw(a, b):
        return speeds(a, b)[1] * d(u_cand, a, b, 1)

    r_mixed = d(lam_uz, z, w, 1) - d(mu_uw, z, w, 0)
    r_z = lam_uz(z, w) - d(f_cand, z, w, 0)
    r_w = mu_uw(z, w) - d(f_cand, z, w, 1)
    return float(max(np.max(np.abs(r_mixed)), np.max(np.abs(r_z)),
                     np.max(np.abs(r_w))))

# }}}


# {{{ registered systems

def _uniform_uv(u_range, v_range):
    def sample(rng, n):
        return rng.uniform(*u_range, n), rng.uniform(*v_range, n)
    return sample


def gasdyn_system(kappa: float = 1.0, a: float = 2.0, u_range=(0.5, 2.0),
                  v_range=(-1.0, 1.0)) -> TwoSystem:
    """Isentropic gas in (density, velocity): ``(u v, v^2/2 + q(u))``, ``p = kappa u^a``.

    ``q' = p'/u``; ``T = v``, ``E = sqrt(p'(u))`` and the Riemann invariants
    are ``T -+ 2E/(a - 1)``.
    """
    if a <= 1:
        raise ValueError("need a > 1")
    ka = kappa * a
    k = 2.0 / (a - 1)

    def q(u):
        return ka / (a - 1) * u ** (a - 1)

    def uv_from_TE(T, E):
        return (E * E / ka) ** (1.0 / (a - 1)), np.asarray(T, dtype=np.float64)

    def TE_from_zw(z, w):
        return 0.5 * (z + w), (w - z) / (2 * k)

    return TwoSystem(
        f"gasdyn(kappa={kappa:g}, a={a:g})",
        f=lambda u, v: u * v,
        g=lambda u, v: 0.5 * v * v + q(u),
        f_u=lambda u, v: v, f_v=lambda u, v: u,
        g_u=lambda u, v: ka * u ** (a - 2), g_v=lambda u, v: v,
        z=lambda T, E: T - k * E, w=lambda T, E: T + k * E,
        z_T=lambda T, E: 1.0, z_E=lambda T, E: -k,
        w_T=lambda T, E: 1.0, w_E=lambda T, E: k,
        uv_from_TE=uv_from_TE, TE_from_zw=TE_from_zw,
        admissible=lambda u, v: u > 0,
        sample_uv=_uniform_uv(u_range, v_range))


def powerlaw_system(lam: float, variant: str = "exact", u_range=(0.5, 2.0),
                    v_range=(-1.0, 1.0)) -> TwoSystem:
    """Gas in (density, velocity) with ``p'(u) = u^(1/lam)``.

    ``variant="printed"`` replaces the invariants by ``T -+ E^beta``,
    ``beta = 1 - 2 lam``; the discriminant identity still holds for it.
    """
    if lam <= 0:
        raise ValueError("need lam > 0")
    base = gasdyn_system(lam / (1 + lam), 1 + 1 / lam, u_range, v_range)
    if variant == "exact":
        return TwoSystem(**{**base.__dict__, "name": f"powerlaw(lam={lam:g})"})
    if variant != "printed":
        raise ValueError(f"unknown variant {variant!r}")
    beta = _beta(lam)

    def TE_from_zw(z, w):
        return 0.5 * (z + w), np.abs(0.5 * (w - z)) ** (1 / beta)

    return TwoSystem(**{
        **base.__dict__,
        "name": f"powerlaw-printed(lam={lam:g})",
        "z": lambda T, E: T - E ** beta, "w": lambda T, E: T + E ** beta,
        "z_T": lambda T, E: 1.0, "z_E": lambda T, E: -beta * E ** (beta - 1),
        "w_T": lambda T, E: 1.0, "w_E": lambda T, E: beta * E ** (beta - 1),
        "TE_from_zw": TE_from_zw})


def lagrangian_gas_system(a: float = 2.0) -> TwoSystem:
    """``tau_t - v_x = 0``, ``v_t + p(tau)_x = 0`` with ``p = tau^(-a)``.

    ``T`` vanishes identically, so ``(T, E)`` is not a coordinate system.
    """
    return TwoSystem(
        f"lagrangian-gas(a={a:g})",
        f=lambda t, v: -v, g=lambda t, v: t ** (-a),
        f_u=lambda t, v: np.zeros_like(t), f_v=lambda t, v: -np.ones_like(v),
        g_u=lambda t, v: -a * t ** (-a - 1), g_v=lambda t, v: np.zeros_like(v),
        admissible=lambda t, v: t > 0,
        sample_uv=_uniform_uv((0.5, 2.0), (-1.0, 1.0)))


def decoupled_burgers_system() -> TwoSystem:
    """``(u^2/2 + v^2/2, u v)``: ``T = u``, ``E = v`` with unit Jacobian.

    In ``z = u - v``, ``w = u + v`` the system is two uncoupled Burgers
    equations. States need ``v > 0``.
    """
    def TE_from_zw(z, w):
        return 0.5 * (z + w), 0.5 * (w - z)

    return TwoSystem(
        "decoupled-burgers",
        f=lambda u, v: 0.5 * (u * u + v * v), g=lambda u, v: u * v,
        f_u=lambda u, v: u, f_v=lambda u, v: v,
        g_u=lambda u, v: v, g_v=lambda u, v: u,
        z=lambda T, E: T - E, w=lambda T, E: T + E,
        z_T=lambda T, E: 1.0, z_E=lambda T, E: -1.0,
        w_T=lambda T, E: 1.0, w_E=lambda T, E: 1.0,
        uv_from_TE=lambda T, E: (np.asarray(T, float), np.asarray(E, float)),
        TE_from_zw=TE_from_zw,
        admissible=lambda u, v: v > 0,
        sample_uv=_uniform_uv((-1.0, 1.0), (0.5, 2.0)))


def _TE_box(rng, n):
    return rng.uniform(-1.0, 1.0, n), rng.uniform(0.5, 2.0, n)


def one_sided_invariants_system() -> TwoSystem:
    """Invariant pair ``z = T``, ``w = T + E + E^2`` (``z_E = 0``; so ``B = 1``, ``C = 0``)."""
    return TwoSystem(
        "one-sided",
        z=lambda T, E: np.asarray(T, float),
        w=lambda T, E: T + E + E * E,
        sample_TE=_TE_box)


def random_invariants_system(seed: int = 0) -> TwoSystem:
    """``(z, w) = (T - h(E), T + h(E))`` with a random increasing ``h``.

    ``h(E) = a E + b E^3 + c log(1 + E) + d sin(E)`` with ``a > d``, so
    ``h' > 0``. Partials are left to central differences.
    """
    rng = np.random.default_rng(seed)
    a, b, c = rng.uniform(0.5, 2.0, 3)
    d = rng.uniform(0.0, 0.45)

    def hfun(E):
        return a * E + b * E ** 3 + c * np.log1p(E) + d * np.sin(E)

    return TwoSystem(
        f"random-invariants(seed={seed})",
        z=lambda T, E: T - hfun(E), w=lambda T, E: T + hfun(E),
        sample_TE=_TE_box)


def registered_systems() -> dict:
    """Systems checked by ``ri-verify`` keyed by id."""
    systems = {
        "isentropic": gasdyn_system(1.0, 2.0),
        "decoupled-burgers": decoupled_burgers_system(),
        "one-sided": one_sided_invariants_system(),
        "lagrangian-gas": lagrangian_gas_system(),
    }
    for lam in (0.6, 1.0, 2.0):
        systems[f"powerlaw-{lam:g}"] = powerlaw_system(lam)
        systems[f"powerlaw-printed-{lam:g}"] = powerlaw_system(lam, "printed")
    for seed in range(3):
        systems[f"random-{seed}"] = random_invariants_system(seed)
    return systems

# }}}


# {{{ power-law particle-path system

def _beta(lam):
    beta = 1.0 - 2.0 * lam
    if beta == 0.0:
        raise ValueError("lam = 1/2 gives beta = 0")
    return beta


def powerlaw_zeta(lam: float, h1, eta):
    """``zeta = (h1/eta)^(1/(2 lam))``, the sound speed ``E`` along the path."""
    return (np.asarray(h1) / np.asarray(eta)) ** (1.0 / (2.0 * lam))


def powerlaw_hbar(lam: float):
    """Conserved densities ``(hbar1, hbar2) = (zeta^(2 lam), xi)`` per unit ``eta``."""
    return (lambda xi, zeta: zeta ** (2.0 * lam) + 0.0 * xi,
            lambda xi, zeta: xi + 0.0 * zeta)


def _pressure_term(lam: float, variant: str):
    """``q(zeta)`` in ``d_t h2 = (h2^2/(2 eta^2) - q)_x``."""
    if variant == "exact":
        return lambda zeta: lam * zeta * zeta, lambda zeta: 2 * lam * zeta
    beta = _beta(lam)
    if beta == -1.0:
        # zeta^(beta+1)/(beta+1) becomes log(zeta)
        return lambda zeta: beta * np.log(zeta), lambda zeta: beta / zeta
    return (lambda zeta: beta / (beta + 1) * zeta ** (beta + 1),
            lambda zeta: beta * zeta ** beta)


def build_powerlaw_pp(lam: float, variant: str = "exact") -> SystemSpec:
    """Conservative particle-path system ``(h1, h2, eta)`` for ``p'(u) = u^(1/lam)``.

    The natural form ``d_t h1 = 0``, ``d_t h2 = (h2^2/(2 eta^2) - q(zeta))_x``,
    ``d_t eta = (h2/eta)_x`` is negated into ``U_t + F_x = 0``. The
    wave speeds are ``0`` and ``+-sqrt(-q'(zeta) zeta_eta / eta)``; the
    printed variant with ``lam > 1/2`` has ``q' < 0`` and complex speeds, and
    its modulus is used as the dissipation bound.
    """
    if lam <= 0:
        raise ValueError("need lam > 0")
    _beta(lam)
    q, qp = _pressure_term(lam, variant)

    def flux(U):
        h1, h2, eta = U
        zeta = powerlaw_zeta(lam, h1, eta)
        xi = h2 / eta
        return np.stack([np.zeros_like(h1), q(zeta) - 0.5 * xi * xi, -xi])

    def speed(U):
        h1, h2, eta = U
        zeta = powerlaw_zeta(lam, h1, eta)
        # zeta_eta = -zeta / (2 lam eta)
        return np.sqrt(np.abs(qp(zeta) * zeta / (2 * lam))) / eta

    def sampler(rng, n):
        eta = rng.uniform(0.5, 2.0, n)
        u = rng.uniform(0.5, 2.0, n)
        return np.stack([u * eta, eta * rng.uniform(-1.0, 1.0, n), eta])

    name = "powerlaw-pp" if variant == "exact" else "powerlaw-pp-printed"
    return SystemSpec(name, 3, flux, speed, positive_rows(0, 2), (), None,
                      ("h1", "h2", "eta"), (0,), sampler)


def build_powerlaw_eulerian(lam: float) -> SystemSpec:
    """Direct ``(u, v)`` solver: ``(u v, v^2/2 + lam u^(1/lam))``."""
    def flux(U):
        u, v = U
        return np.stack([u * v, 0.5 * v * v + lam * u ** (1.0 / lam)])

    def speed(U):
        u, v = U
        return np.abs(v) + u ** (0.5 / lam)

    def sampler(rng, n):
        return np.stack([rng.uniform(0.5, 2.0, n), rng.uniform(-1.0, 1.0, n)])

    return SystemSpec(f"powerlaw-eulerian(lam={lam:g})", 2, flux, speed,
                      positive_rows(0), (), None, ("u", "v"), (), sampler)


def powerlaw_velocity(U):
    """``xi = gamma_t = h2/eta``."""
    return U[1] / U[2]


def powerlaw_pp_data(u0, v0) -> np.ndarray:
    """``(h1, h2, eta) = (u0, v0, 1)``."""
    u0, v0 = np.broadcast_arrays(np.asarray(u0, dtype=np.float64),
                                 np.asarray(v0, dtype=np.float64))
    return np.stack([u0, v0, np.ones_like(u0)])


def run_powerlaw(lam: float, u0: CellField, v0, t_end: float,
                 scheme: SchemeConfig, variant: str = "exact"):
    """Solve the particle-path system from ``(u0, v0)``; returns ``(run, path)``."""
    spec = build_powerlaw_pp(lam, variant)
    ic = CellField(u0.grid, powerlaw_pp_data(u0.data[0], v0))
    return solve_with_path(spec, ic, t_end, scheme, powerlaw_velocity, eta_row=2)


def reconstruct_powerlaw(run: SpaceTimeField, path=None):
    """``(u, v) = (h1/eta, h2/eta) o gamma^{-1}``."""
    if path is None:
        path = reconstruct_gamma(run.component(2), run.map(powerlaw_velocity))
    u = pullback(run, path, lambda U: U[0] / U[2])
    v = pullback(run, path, powerlaw_velocity)
    return u, v

# }}}
