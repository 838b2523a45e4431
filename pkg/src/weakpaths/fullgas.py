"""Full (polytropic) gas dynamics in Eulerian and particle-path form.

Eulerian forms:

* energy form, conserved ``(rho, m, eps)`` with ``eps = rho (e + u^2/2)``;
* entropy form, conserved ``(rho, m, sigma)`` with ``sigma = rho S`` and
  ``S = log p - alpha log rho``.

Particle-path forms use ``eta = gamma_x``, ``w = rho_0 gamma_t``, ``v = rho_0``
and either the energy ``s = rho_0 E o gamma`` or ``r = rho_0 S_0``. A third
"naive" form carries ``r = p_0`` and is kept as a negative demonstration.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from weakpaths.core import (
    POSITIVITY_MARGIN, CellField, ConvexExtension, InadmissibleStateError,
    SpaceTimeField, SystemSpec, lift_extension)
from weakpaths.diffeo import pullback, reconstruct_gamma, solve_with_path
from weakpaths.solver import SchemeConfig


def _check_alpha(alpha):
    if not 1.0 < alpha < 2.0:
        raise ValueError(f"alpha must lie in (1, 2), got {alpha}")


@dataclass(frozen=True)
class GasState:
    rho: float
    u: float
    p: float
    alpha: float

    def __post_init__(self):
        _check_alpha(self.alpha)
        if not (self.rho > 0 and self.p > 0 and np.isfinite(self.u)):
            raise ValueError(f"non-physical gas state {self}")

    @property
    def e(self):
        return self.p / ((self.alpha - 1) * self.rho)

    @property
    def E(self):
        return self.e + 0.5 * self.u ** 2

    @property
    def S(self):
        return np.log(self.p) - self.alpha * np.log(self.rho)

    def energy_form(self):
        return np.array([self.rho, self.rho * self.u, self.rho * self.E])

    def entropy_form(self):
        return np.array([self.rho, self.rho * self.u, self.rho * self.S])


def sample_physical(rng, n, rho=(0.5, 2.0), u=(-1.0, 1.0), p=(0.5, 2.0)):
    """Random primitive states ``(rho, u, p)`` from a box, shape ``(3, n)``."""
    return np.stack([rng.uniform(*rho, n), rng.uniform(*u, n),
                     rng.uniform(*p, n)])


# {{{ primitive conversions

def energy_to_primitive(U, alpha):
    rho, m, eps = U
    return np.stack([rho, m / rho, (alpha - 1) * (eps - 0.5 * m * m / rho)])


def primitive_to_energy(W, alpha):
    rho, u, p = W
    return np.stack([rho, rho * u, p / (alpha - 1) + 0.5 * rho * u * u])


def entropy_to_primitive(U, alpha):
    rho, m, sigma = U
    return np.stack([rho, m / rho, np.exp(sigma / rho) * rho ** alpha])


def primitive_to_entropy(W, alpha):
    rho, u, p = W
    return np.stack([rho, rho * u, rho * (np.log(p) - alpha * np.log(rho))])

# }}}


# {{{ Eulerian systems

def _physical(prim_fn, alpha):
    def admissible(U):
        with np.errstate(all="ignore"):
            W = prim_fn(U, alpha)
        return ((W[0] >= POSITIVITY_MARGIN) & (W[2] >= POSITIVITY_MARGIN)
                & np.all(np.isfinite(W), axis=0))
    return admissible


def _sampler(to_cons, alpha):
    def sampler(rng, n):
        return to_cons(sample_physical(rng, n), alpha)
    return sampler


def build_gas2(alpha: float, extensions=()) -> SystemSpec:
    """Energy form: flux ``(m, m^2/rho + p, (eps + p) m / rho)``."""
    _check_alpha(alpha)

    def flux(U):
        rho, m, eps = U
        p = (alpha - 1) * (eps - 0.5 * m * m / rho)
        return np.stack([m, m * m / rho + p, (eps + p) * m / rho])

    def speed(U):
        rho, u, p = energy_to_primitive(U, alpha)
        return np.abs(u) + np.sqrt(alpha * p / rho)

    return SystemSpec("gas2", 3, flux, speed,
                      _physical(energy_to_primitive, alpha), tuple(extensions),
                      None, ("rho", "m", "eps"), (),
                      _sampler(primitive_to_energy, alpha))


def build_gas_entropy(alpha: float, extensions=()) -> SystemSpec:
    """Entropy form: flux ``(m, m^2/rho + p, m sigma / rho)``, ``p = e^{sigma/rho} rho^alpha``."""
    _check_alpha(alpha)

    def flux(U):
        rho, m, sigma = U
        p = np.exp(sigma / rho) * rho ** alpha
        return np.stack([m, m * m / rho + p, m * sigma / rho])

    def speed(U):
        rho, u, p = entropy_to_primitive(U, alpha)
        return np.abs(u) + np.sqrt(alpha * p / rho)

    return SystemSpec("gas", 3, flux, speed,
                      _physical(entropy_to_primitive, alpha), tuple(extensions),
                      None, ("rho", "m", "sigma"), (),
                      _sampler(primitive_to_entropy, alpha))

# }}}


# {{{ particle-path systems

def pp_velocity(U):
    """``xi = w / v`` for every particle-path form (``v`` is the last row)."""
    return U[1] / U[-1]


def _pp_admissible(pressure, alpha):
    def admissible(U):
        with np.errstate(all="ignore"):
            p = pressure(U)
        return ((U[0] >= POSITIVITY_MARGIN) & (U[-1] >= POSITIVITY_MARGIN)
                & (p >= POSITIVITY_MARGIN) & np.all(np.isfinite(U), axis=0))
    return admissible


def _pp_speed(pressure, alpha):
    def speed(U):
        eta, v = U[0], U[-1]
        return np.sqrt(alpha * pressure(U) * eta / v) / eta
    return speed


def _pp_sampler(to_pp, alpha):
    def sampler(rng, n):
        W = sample_physical(rng, n)
        eta = rng.uniform(0.5, 2.0, n)
        return to_pp(W, eta, alpha)
    return sampler


def energy_pp_pressure(alpha):
    def pressure(U):
        eta, w, s, v = U
        return (alpha - 1) * (s - 0.5 * w * w / v) / eta
    return pressure


def entropy_pp_pressure(alpha):
    def pressure(U):
        eta, w, r, v = U
        return np.exp(r / v) * v ** alpha / eta ** alpha
    return pressure


def naive_pp_pressure(alpha):
    def pressure(U):
        eta, w, r, v = U
        return r / eta ** alpha
    return pressure


def _energy_pp_state(W, eta, alpha):
    rho, u, p = W
    v = rho * eta
    return np.stack([eta, v * u, eta * (p / (alpha - 1) + 0.5 * rho * u * u), v])


def _entropy_pp_state(W, eta, alpha):
    rho, u, p = W
    v = rho * eta
    return np.stack([eta, v * u, v * (np.log(p) - alpha * np.log(rho)), v])


def _naive_pp_state(W, eta, alpha):
    rho, u, p = W
    return np.stack([eta, rho * eta * u, p * eta ** alpha, rho * eta])


def build_pp_energy(alpha: float, extensions=()) -> SystemSpec:
    """``(eta, w, s, v)`` with energy conserved along particle paths."""
    _check_alpha(alpha)
    pressure = energy_pp_pressure(alpha)

    def flux(U):
        eta, w, s, v = U
        return np.stack([-w / v,
                         (alpha - 1) * (s / eta - 0.5 * w * w / (v * eta)),
                         (alpha - 1) * (s * w / (eta * v)
                                        - 0.5 * w ** 3 / (eta * v * v)),
                         np.zeros_like(v)])

    return SystemSpec("gas2-pp", 4, flux, _pp_speed(pressure, alpha),
                      _pp_admissible(pressure, alpha), tuple(extensions), None,
                      ("eta", "w", "s", "v"), (3,),
                      _pp_sampler(_energy_pp_state, alpha))


def build_pp_entropy(alpha: float, extensions=()) -> SystemSpec:
    """``(eta, w, r, v)`` with ``r = rho_0 S_0`` frozen."""
    _check_alpha(alpha)
    pressure = entropy_pp_pressure(alpha)

    def flux(U):
        eta, w, r, v = U
        z = np.zeros_like(v)
        return np.stack([-w / v, pressure(U), z, z])

    return SystemSpec("gas-pp", 4, flux, _pp_speed(pressure, alpha),
                      _pp_admissible(pressure, alpha), tuple(extensions), None,
                      ("eta", "w", "r", "v"), (2, 3),
                      _pp_sampler(_entropy_pp_state, alpha))


def build_pp_naive(alpha: float) -> SystemSpec:
    """``(eta, w, r = p_0)`` with the coefficient ``rho_0`` carried as a frozen fourth row.

    Kept as a demonstration of a particle-path form whose weak solutions are
    not the admissible ones.
    """
    _check_alpha(alpha)
    pressure = naive_pp_pressure(alpha)

    def flux(U):
        eta, w, r, rho0 = U
        z = np.zeros_like(r)
        return np.stack([-w / rho0, r / eta ** alpha, z, z])

    return SystemSpec("naive-pp", 4, flux, _pp_speed(pressure, alpha),
                      _pp_admissible(pressure, alpha), (), None,
                      ("eta", "w", "r", "rho0"), (2, 3),
                      _pp_sampler(_naive_pp_state, alpha))


def pp_initial_data(form: str, rho0, u0, p0, alpha: float) -> np.ndarray:
    """Particle-path data for ``form`` in ``{"energy", "entropy", "naive"}``."""
    W = np.stack(np.broadcast_arrays(*(np.asarray(a, dtype=np.float64)
                                       for a in (rho0, u0, p0))))
    eta = np.ones_like(W[0])
    to_pp = {"energy": _energy_pp_state, "entropy": _entropy_pp_state,
             "naive": _naive_pp_state}[form]
    return to_pp(W, eta, alpha)


_PP_BUILDERS = {"energy": build_pp_energy, "entropy": build_pp_entropy,
                "naive": build_pp_naive}
_PP_PRESSURE = {"energy": energy_pp_pressure, "entropy": entropy_pp_pressure,
                "naive": naive_pp_pressure}


def run_pp_gas(form: str, alpha: float, rho0: CellField, u0, p0,
               t_end: float, scheme: SchemeConfig, spec=None):
    """Solve a particle-path form from primitive data; returns ``(run, path)``."""
    spec = spec or _PP_BUILDERS[form](alpha)
    ic = CellField(rho0.grid, pp_initial_data(form, rho0.data[0], u0, p0, alpha))
    return solve_with_path(spec, ic, t_end, scheme, pp_velocity)


def reconstruct_fullgas(run: SpaceTimeField, form: str, alpha: float, path=None):
    """Pulled-back primitive fields ``(rho, u, p)``."""
    if path is None:
        path = reconstruct_gamma(run.component(0), run.map(pp_velocity))
    pressure = _PP_PRESSURE[form](alpha)
    rho = pullback(run, path, lambda U: U[-1] / U[0])
    u = pullback(run, path, pp_velocity)
    p = pullback(run, path, pressure)
    return rho, u, p

# }}}


# {{{ convex extensions

@dataclass(frozen=True)
class ScalarProfile:
    """``X`` with its first two derivatives."""

    X: Callable
    Xp: Callable
    Xpp: Callable
    name: str = "X"

    def sign_ok(self, z) -> np.ndarray:
        return (self.Xp(z) < 0) & (self.Xpp(z) > 0)

    def ratio(self, z):
        """``z X''(z) / (-X'(z))``; ``rho X(z)`` is convex where it exceeds a form-dependent bound."""
        return z * self.Xpp(z) / (-self.Xp(z))


def exp_profile() -> ScalarProfile:
    return ScalarProfile(lambda z: np.exp(-z), lambda z: -np.exp(-z),
                         lambda z: np.exp(-z), "exp(-z)")


def inverse_profile() -> ScalarProfile:
    return ScalarProfile(lambda z: 1.0 / z, lambda z: -1.0 / z ** 2,
                         lambda z: 2.0 / z ** 3, "1/z")


def log_profile() -> ScalarProfile:
    """``X = -log z``, the physical entropy ``-rho S``."""
    return ScalarProfile(lambda z: -np.log(z), lambda z: -1.0 / z,
                         lambda z: 1.0 / z ** 2, "-log z")


def convexity_bound(alpha: float, form: str) -> float:
    """Lower bound on ``z X''/(-X')`` for ``rho X(z)`` to be convex.

    ``(alpha - 1)/alpha`` in energy variables, 1 in entropy variables (where
    it is the condition ``Y'' >= 0`` for ``Y(S) = X(e^S)``).
    """
    return (alpha - 1) / alpha if form == "energy" else 1.0


def fullgas_extension(prof: ScalarProfile, alpha: float, form: str,
                      z_range=(0.05, 20.0)) -> ConvexExtension:
    """``E = rho X(p rho^{-alpha})``, ``Q = m X(p rho^{-alpha})`` in the conserved variables of ``form``.

    ``convex_on`` marks states where ``z X''/(-X')`` exceeds
    :func:`convexity_bound`; the sign conditions ``X' < 0 < X''`` alone do
    not make ``E`` convex.
    """
    _check_alpha(alpha)
    z = np.linspace(*z_range, 400)
    if not np.all(prof.sign_ok(z)):
        raise ValueError(f"{prof.name} violates X' < 0 < X'' on {z_range}")
    to_prim = energy_to_primitive if form == "energy" else entropy_to_primitive
    bound = convexity_bound(alpha, form)

    def zeta(U):
        rho, _, p = to_prim(U, alpha)
        return p * rho ** (-alpha)

    def E(U):
        return U[0] * prof.X(zeta(U))

    def Q(U):
        return U[1] * prof.X(zeta(U))

    def convex_on(U):
        return prof.ratio(zeta(U)) >= bound * (1 + 1e-9)

    return ConvexExtension(f"{form} rho X, X={prof.name}", E, Q, convex_on)


def lift_extension_fullgas(prof: ScalarProfile, alpha: float,
                           form: str) -> ConvexExtension:
    """Particle-path extension ``E~ = v X(z)`` with ``Q~ = m X - (w/v) rho X = 0``.

    Energy form: ``z = (alpha - 1) eta^{alpha-1} (s/v^alpha - w^2/(2 v^{alpha+1}))``;
    entropy form: ``z = e^{r/v}``.
    """
    ext = fullgas_extension(prof, alpha, form)
    if form == "energy":
        def to_physical(U):
            eta, w, s, v = U
            return np.stack([v / eta, w / eta, s / eta]), eta
    else:
        def to_physical(U):
            eta, w, r, v = U
            return np.stack([v / eta, w / eta, r / eta]), eta

    def convex_on(U):
        phys, _ = to_physical(U)
        return ext.convex_on(phys)

    return lift_extension(ext, to_physical, pp_velocity,
                          f"lifted {ext.name}", convex_on)


def lifted_energy_closed_form(prof: ScalarProfile, alpha: float):
    """``v X((alpha-1) eta^{alpha-1} (s/v^alpha - w^2/(2 v^{alpha+1})))``."""
    def E(U):
        eta, w, s, v = U
        z = (alpha - 1) * eta ** (alpha - 1) * (s / v ** alpha
                                                - w * w / (2 * v ** (alpha + 1)))
        return v * prof.X(z)
    return E


def lifted_entropy_closed_form(prof: ScalarProfile):
    """``v X(e^{r/v})``."""
    def E(U):
        eta, w, r, v = U
        return v * prof.X(np.exp(r / v))
    return E

# }}}


# {{{ convexity matrix

def _z_partials(rho, m, eps, alpha):
    a = alpha
    z = eps / rho ** a - m * m / (2 * rho ** (a + 1))
    return dict(
        z=z,
        z_r=-a * eps / rho ** (a + 1) + (a + 1) * m * m / (2 * rho ** (a + 2)),
        z_m=-m / rho ** (a + 1),
        z_e=rho ** (-a),
        z_rr=a * (a + 1) * eps / rho ** (a + 2)
        - (a + 1) * (a + 2) * m * m / (2 * rho ** (a + 3)),
        z_rm=(a + 1) * m / rho ** (a + 2),
        z_re=-a / rho ** (a + 1),
        z_mm=-1.0 / rho ** (a + 1),
    )


def convexity_matrix(state, prof: ScalarProfile, alpha: float) -> np.ndarray:
    """The 3x3 matrix whose negative definiteness certifies convexity of ``rho X(z)``.

    Here ``z = eps/rho^alpha - m^2/(2 rho^{alpha+1})`` in the energy variables
    ``state = (rho, m, eps)``.
    """
    rho, m, eps = map(float, state)
    if rho <= 0 or 2 * rho * eps - m * m <= 0:
        raise InadmissibleStateError(f"non-physical state {state}")
    d = _z_partials(rho, m, eps, alpha)
    ratio = float(prof.Xpp(d["z"]) / prof.Xp(d["z"]))
    m11 = rho * (d["z_rr"] - 2 * d["z_r"] * d["z_re"] / d["z_e"])
    m12 = rho * (d["z_rm"] - d["z_m"] * d["z_re"] / d["z_e"])
    m13 = d["z_e"] + rho * d["z_re"]
    return np.array([[m11, m12, m13],
                     [m12, rho * d["z_mm"], 0.0],
                     [m13, 0.0, rho * d["z_e"] ** 2 * ratio]])


def check_M_negative_definite(state, prof: ScalarProfile, alpha: float):
    """Leading-minor test ``M11 < 0 < minor2`` and ``det M < 0``.

    Returns ``(ok, (M11, minor2, det))``.
    """
    M = convexity_matrix(state, prof, alpha)
    m1 = M[0, 0]
    m2 = M[0, 0] * M[1, 1] - M[0, 1] ** 2
    m3 = float(np.linalg.det(M))
    return bool(m1 < 0 < m2 and m3 < 0), (m1, m2, m3)


def printed_det_M(state, prof: ScalarProfile, alpha: float) -> float:
    """Closed form ``-(1-a)^2/rho^{3a} + a(a-1) X''(2 rho eps - m^2)/(2 rho^{2a+1} X')``.

    Kept for comparison with the determinant of :func:`convexity_matrix`.
    """
    rho, m, eps = map(float, state)
    a = alpha
    z = eps / rho ** a - m * m / (2 * rho ** (a + 1))
    ratio = prof.Xpp(z) / prof.Xp(z)
    return float(-(1 - a) ** 2 / rho ** (3 * a)
                 + a * (a - 1) * ratio * (2 * rho * eps - m * m)
                 / (2 * rho ** (2 * a + 1)))

# }}}
