"""Registered systems and frame pairs.

Initial data are always given in primitive variables of the physical system
(``rho`` for scalar laws, ``(rho, u)`` for isentropic gas, ``(rho, u, p)``
for full gas, ``(u, v)`` for the power-law example). A prepared run knows
how to turn them into the state of its own system and, for particle-path
systems, how to pull the solution back to primitive fields.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from weakpaths import fullgas, isentropic, riemann2x2, scalar
from weakpaths.core import CellField, SpaceTimeField, SystemSpec
from weakpaths.diffeo import DiffeoPath, solve_with_path
from weakpaths.solver import SchemeConfig, solve

DEFAULT_PARAMS = {"alpha": 1.4, "lam": 1.0, "kappa": 1.0, "gamma": 2.0}


@dataclass
class Prepared:
    """A system instance bound to its initial data."""

    system_id: str
    spec: SystemSpec
    ic: CellField
    primitive_names: tuple
    velocity: Optional[Callable] = None
    eta_row: int = 0
    to_primitive: Optional[Callable] = None
    reconstruct: Optional[Callable] = None
    flux_kind: str = "rusanov"

    @property
    def is_particle_path(self) -> bool:
        return self.velocity is not None

    def run(self, t_end: float, scheme: SchemeConfig):
        """``(run, path)``; ``path`` is ``None`` for Eulerian systems."""
        if self.velocity is None:
            return solve(self.spec, self.ic, t_end, scheme), None
        return solve_with_path(self.spec, self.ic, t_end, scheme,
                               self.velocity, self.eta_row)

    def primitive_fields(self, run: SpaceTimeField,
                         path: Optional[DiffeoPath] = None) -> list:
        """Primitive fields in the physical frame, one per primitive variable."""
        if self.velocity is None:
            W = np.stack([self.to_primitive(f) for f in run.frames])
            return [SpaceTimeField(run.grid, run.times, W[:, k:k + 1], run.steps)
                    for k in range(W.shape[1])]
        return list(self.reconstruct(run, path))


@dataclass(frozen=True)
class SystemEntry:
    id: str
    family: str
    frame: str
    prepare: Callable[[dict, CellField], Prepared]
    description: str = ""


@dataclass(frozen=True)
class Family:
    name: str
    primitive_names: tuple
    eulerian: str
    pp: str
    extras: tuple = field(default_factory=tuple)


def _range(W0: CellField, row=0):
    lo, hi = float(W0.data[row].min()), float(W0.data[row].max())
    if hi - lo < 1e-12:
        lo, hi = lo - 0.5, hi + 0.5
    return lo, hi


# {{{ scalar

def _x2_pair(lo, hi):
    return scalar.scalar_extension_pair(lambda r: r * r, lambda r: r, (lo, hi),
                                        lambda r: 2 * r,
                                        lambda r: 2 + 0 * r, name="rho^2")


def _prep_burgers(params, W0):
    lo, hi = _range(W0)
    spec = scalar.burgers_system((lo, hi)).with_extensions(_x2_pair(lo, hi))
    return Prepared("burgers", spec, W0, ("rho",),
                    to_primitive=lambda U: U, flux_kind="godunov_exact")


def _prep_temple(params, W0):
    cf = scalar.burgers_flux(_range(W0))
    spec = scalar.build_temple_system(cf, W0).with_extensions(
        scalar.temple_extension_pair(lambda x: x * x, cf, lambda x: 2 * x,
                                     lambda x: 2 + 0 * x, name="lifted x^2"))

    def recon(run, path):
        return [scalar.reconstruct_scalar(run, cf, path)]

    return Prepared("temple", spec, scalar.temple_data(cf, W0), ("rho",),
                    velocity=scalar.temple_velocity(cf), reconstruct=recon)

# }}}


# {{{ isentropic

def _pressure_law(params):
    return isentropic.gamma_law(params["kappa"], params["gamma"])


def _prep_isentropic(params, W0):
    pl = _pressure_law(params)
    spec = isentropic.build_eulerian_isentropic(
        pl, (isentropic.energy_extension(pl),))
    ic = CellField(W0.grid, isentropic.eulerian_data(W0.data[0], W0.data[1]))
    return Prepared("isentropic", spec, ic, ("rho", "u"),
                    to_primitive=lambda U: np.stack([U[0], U[1] / U[0]]))


def _prep_isentropic_pp(params, W0):
    pl = _pressure_law(params)
    spec = isentropic.build_pp_isentropic(
        pl, (isentropic.lift_extension_isentropic(isentropic.energy_extension(pl)),))
    ic = CellField(W0.grid, isentropic.pp_data(W0.data[0], W0.data[1]))
    return Prepared("isentropic-pp", spec, ic, ("rho", "u"),
                    velocity=isentropic.pp_velocity,
                    reconstruct=lambda run, path: isentropic.reconstruct_isentropic(run, path))

# }}}


# {{{ full gas

_PROFILES = (fullgas.log_profile, fullgas.inverse_profile)


def _prep_gas(form):
    def prep(params, W0):
        a = params["alpha"]
        exts = tuple(fullgas.fullgas_extension(p(), a, form) for p in _PROFILES)
        if form == "energy":
            spec = fullgas.build_gas2(a, exts)
            to_c, to_p = fullgas.primitive_to_energy, fullgas.energy_to_primitive
        else:
            spec = fullgas.build_gas_entropy(a, exts)
            to_c, to_p = fullgas.primitive_to_entropy, fullgas.entropy_to_primitive
        return Prepared("gas2" if form == "energy" else "gas", spec,
                        CellField(W0.grid, to_c(W0.data, a)), ("rho", "u", "p"),
                        to_primitive=lambda U: to_p(U, a))
    return prep


def _prep_gas_pp(form):
    def prep(params, W0):
        a = params["alpha"]
        if form == "naive":
            spec = fullgas.build_pp_naive(a)
        else:
            builder = (fullgas.build_pp_energy if form == "energy"
                       else fullgas.build_pp_entropy)
            spec = builder(a, tuple(fullgas.lift_extension_fullgas(p(), a, form)
                                    for p in _PROFILES))
        ic = CellField(W0.grid, fullgas.pp_initial_data(form, *W0.data, a))

        def recon(run, path):
            return fullgas.reconstruct_fullgas(run, form, a, path)

        return Prepared(f"pp-{form}", spec, ic, ("rho", "u", "p"),
                        velocity=fullgas.pp_velocity, reconstruct=recon)
    return prep

# }}}


# {{{ power law

def _prep_powerlaw(params, W0):
    spec = riemann2x2.build_powerlaw_eulerian(params["lam"])
    return Prepared("powerlaw", spec, W0, ("u", "v"), to_primitive=lambda U: U)


def _prep_powerlaw_pp(variant):
    def prep(params, W0):
        spec = riemann2x2.build_powerlaw_pp(params["lam"], variant)
        ic = CellField(W0.grid, riemann2x2.powerlaw_pp_data(*W0.data))
        return Prepared(spec.name, spec, ic, ("u", "v"),
                        velocity=riemann2x2.powerlaw_velocity, eta_row=2,
                        reconstruct=lambda run, path: riemann2x2.reconstruct_powerlaw(run, path))
    return prep

# }}}


SYSTEMS = {e.id: e for e in (
    SystemEntry("burgers", "scalar", "eulerian", _prep_burgers,
                "Burgers rho_t + (rho^2/2)_x = 0, exact Godunov flux"),
    SystemEntry("temple", "scalar", "pp", _prep_temple,
                "particle-path Temple system (eta, v) for Burgers"),
    SystemEntry("isentropic", "isentropic", "eulerian", _prep_isentropic,
                "isentropic gas (rho, m), p = kappa rho^gamma"),
    SystemEntry("isentropic-pp", "isentropic", "pp", _prep_isentropic_pp,
                "particle-path isentropic gas (eta, w, v)"),
    SystemEntry("gas2", "fullgas-energy", "eulerian", _prep_gas("energy"),
                "full gas, energy form (rho, m, eps)"),
    SystemEntry("gas", "fullgas-entropy", "eulerian", _prep_gas("entropy"),
                "full gas, entropy form (rho, m, sigma)"),
    SystemEntry("pp-energy", "fullgas-energy", "pp", _prep_gas_pp("energy"),
                "particle-path full gas (eta, w, s, v)"),
    SystemEntry("pp-entropy", "fullgas-entropy", "pp", _prep_gas_pp("entropy"),
                "particle-path full gas (eta, w, r, v)"),
    SystemEntry("pp-naive", "fullgas-naive", "pp", _prep_gas_pp("naive"),
                "particle-path full gas carrying r = p0 (not admissible)"),
    SystemEntry("powerlaw", "powerlaw", "eulerian", _prep_powerlaw,
                "gas in (density, velocity) with p'(u) = u^(1/lam)"),
    SystemEntry("powerlaw-pp", "powerlaw", "pp", _prep_powerlaw_pp("exact"),
                "particle-path power-law system (h1, h2, eta)"),
    SystemEntry("powerlaw-pp-printed", "powerlaw-printed", "pp",
                _prep_powerlaw_pp("printed"),
                "power-law particle-path system with the alternative h2 flux"),
)}

FAMILIES = {f.name: f for f in (
    Family("scalar", ("rho",), "burgers", "temple"),
    Family("isentropic", ("rho", "u"), "isentropic", "isentropic-pp"),
    Family("fullgas-energy", ("rho", "u", "p"), "gas2", "pp-energy"),
    Family("fullgas-entropy", ("rho", "u", "p"), "gas", "pp-entropy"),
    Family("fullgas-naive", ("rho", "u", "p"), "gas2", "pp-naive"),
    Family("powerlaw", ("u", "v"), "powerlaw", "powerlaw-pp"),
    Family("powerlaw-printed", ("u", "v"), "powerlaw", "powerlaw-pp-printed"),
)}

PRIMITIVE_COUNT = {"scalar": 1, "isentropic": 2, "fullgas-energy": 3,
                   "fullgas-entropy": 3, "fullgas-naive": 3, "powerlaw": 2,
                   "powerlaw-printed": 2}


class UnknownSystemError(KeyError):
    def __init__(self, system_id, known):
        super().__init__(system_id)
        self.message = (f"unknown system {system_id!r}; registered systems: "
                        + ", ".join(sorted(known)))

    def __str__(self):
        return self.message


def get_system(system_id: str) -> SystemEntry:
    try:
        return SYSTEMS[system_id]
    except KeyError:
        raise UnknownSystemError(system_id, SYSTEMS) from None


def get_family(name: str) -> Family:
    try:
        return FAMILIES[name]
    except KeyError:
        raise UnknownSystemError(name, FAMILIES) from None


def family_of(system_id: str) -> Family:
    """The frame pair containing ``system_id`` (a family name is accepted too)."""
    if system_id in FAMILIES:
        return FAMILIES[system_id]
    entry = get_system(system_id)
    return FAMILIES[entry.family]


def prepare(system_id: str, W0: CellField, params: Optional[dict] = None) -> Prepared:
    entry = get_system(system_id)
    params = {**DEFAULT_PARAMS, **(params or {})}
    need = PRIMITIVE_COUNT[entry.family]
    if W0.ncomp != need:
        raise ValueError(f"system {system_id!r} needs {need} primitive "
                         f"initial components, got {W0.ncomp}")
    return entry.prepare(params, W0)
