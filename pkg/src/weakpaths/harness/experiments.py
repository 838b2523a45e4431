"""Experiment orchestration shared by the CLI and the acceptance suite.

Every acceptance criterion is a function returning a list of
:class:`CheckLine`. A line with ``known_failure`` set records an outcome
that is expected to fail, with the reason.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from weakpaths import admissibility, fullgas, riemann2x2, scalar
from weakpaths.core import (
    CellField, Grid1D, SpaceTimeField, TensorBump, make_grid, sample_ic,
    total_variation)
from weakpaths.diffeo import (
    grid_translation_times, translation_path, verify_change_of_variables)
from weakpaths.harness.registry import get_family, prepare
from weakpaths.solver import SchemeConfig, total_conserved, uniform_times


@dataclass
class CheckLine:
    criterion: int
    name: str
    passed: bool
    detail: str
    known_failure: Optional[str] = None
    data: dict = field(default_factory=dict)

    @property
    def status(self) -> str:
        if self.known_failure is not None:
            return "XPASS" if self.passed else "XFAIL"
        return "PASS" if self.passed else "FAIL"

    def line(self) -> str:
        return f"criterion {self.criterion:2d} [{self.status}] {self.name}: {self.detail}"


def l1_distance(fields_a, fields_b, k: int = -1) -> float:
    """Sum over fields of ``sum |a - b| dx`` at frame ``k``."""
    total = 0.0
    for a, b in zip(fields_a, fields_b):
        total += float(np.sum(np.abs(a.frames[k, 0] - b.frames[k, 0])) * a.grid.dx)
    return total


def linf_distance(fields_a, fields_b, k: int = -1) -> float:
    return max(float(np.max(np.abs(a.frames[k, 0] - b.frames[k, 0])))
               for a, b in zip(fields_a, fields_b))


def refinement_ratios(errors) -> list:
    return [errors[i] / errors[i + 1] if errors[i + 1] > 0 else np.inf
            for i in range(len(errors) - 1)]


# {{{ frame comparison

def run_frames(family_name: str, W0: CellField, t_end: float, scheme: SchemeConfig,
               params: Optional[dict] = None):
    """Run both frames of a pair; returns primitive fields and paths."""
    fam = get_family(family_name)
    eul = prepare(fam.eulerian, W0, params)
    pp = prepare(fam.pp, W0, params)
    s_eul = SchemeConfig(eul.flux_kind, scheme.cfl, scheme.bc,
                         scheme.snapshot_times, scheme.record_every_step)
    s_pp = SchemeConfig("rusanov", scheme.cfl, scheme.bc,
                        scheme.snapshot_times, scheme.record_every_step)
    run_e, _ = eul.run(t_end, s_eul)
    run_p, path = pp.run(t_end, s_pp)
    return {"eulerian": eul.primitive_fields(run_e),
            "pp": pp.primitive_fields(run_p, path),
            "runs": (run_e, run_p), "path": path, "prepared": (eul, pp)}


def compare_frames(family_name: str, ic: Callable[[Grid1D], CellField],
                   grid: Callable[[int], Grid1D], levels, t_end: float,
                   bc: str, snapshots: int = 1, cfl: float = 0.5,
                   params: Optional[dict] = None, min_ratio: float = 1.5) -> dict:
    """Refinement study of the distance between the two frames of a pair."""
    rows = []
    for nx in levels:
        g = grid(nx)
        scheme = SchemeConfig("rusanov", cfl, bc, uniform_times(t_end, snapshots))
        t0 = time.perf_counter()
        out = run_frames(family_name, ic(g), t_end, scheme, params)
        elapsed = time.perf_counter() - t0
        E, P = out["eulerian"], out["pp"]
        times = E[0].times
        rows.append({
            "nx": nx, "runtime_s": elapsed, "times": times,
            "l1": [l1_distance(E, P, k) for k in range(len(times))],
            "linf": [linf_distance(E, P, k) for k in range(len(times))],
            "defect": float(np.max(out["path"].defect)),
            "eta_min": out["path"].eta_min})
    finals = [r["l1"][-1] for r in rows]
    ratios = refinement_ratios(finals)
    return {"family": family_name, "levels": list(levels), "rows": rows,
            "l1_final": finals, "ratios": ratios, "min_ratio": min_ratio,
            "passed": bool(all(r >= min_ratio for r in ratios))}

# }}}


# {{{ shared setups

def _riemann_ic(left, right, x0):
    L, R = np.array(left, float)[:, None], np.array(right, float)[:, None]

    def ic(g):
        return sample_ic(g, lambda x: np.where(x < x0, L, R))
    return ic


def _sinusoid(mean, amp):
    def ic(g):
        return sample_ic(g, lambda x: mean + amp * np.sin(2 * np.pi * x))
    return ic


def burgers_sinusoid(g):
    return _sinusoid(1.5, 0.5)(g)


def torus(nx):
    return make_grid("torus", nx)


def line(nx):
    return make_grid("line", nx, -1.0, 1.0)


LEVELS = (400, 800, 1600)
ALPHA = 1.4
GAS_RECEDING = ((1.0, -0.1, 1.0), (1.0, 0.1, 1.0))
GAS_CONTACT = ((1.2, 0.0, 1.2), (1.0, 0.0, 1.0))
GAS_COLLIDING = ((1.0, 2.0, 1.0), (1.0, -2.0, 1.0))


def smooth_primitive(family_name: str):
    """Smooth periodic primitive data used for pre-shock and conservation checks."""
    rho = lambda x: 1 + 0.2 * np.sin(2 * np.pi * x)
    u = lambda x: 0.1 * np.cos(2 * np.pi * x)
    if family_name == "scalar":
        return burgers_sinusoid
    if family_name in ("isentropic", "powerlaw"):
        return lambda g: sample_ic(g, lambda x: np.stack([rho(x), u(x)]))
    return lambda g: sample_ic(g, lambda x: np.stack([rho(x), u(x),
                                                      rho(x) ** ALPHA]))

# }}}


# {{{ criteria

def criterion_1(levels=LEVELS) -> list:
    rep = compare_frames("scalar", burgers_sinusoid, torus, levels, 0.5,
                         "periodic")
    slowest = max(r["runtime_s"] for r in rep["rows"])
    ok_ratio = rep["passed"]
    ok_abs = rep["l1_final"][-1] <= 0.02
    ok_time = slowest <= 10.0
    detail = (f"L1 {_fmt(rep['l1_final'])}, ratios {_fmt(rep['ratios'])} "
              f"(>= 1.5), L1@{levels[-1]} = {rep['l1_final'][-1]:.2e} (<= 0.02), "
              f"max level runtime {slowest:.2f} s (<= 10)")
    return [CheckLine(1, "scalar frame equivalence", ok_ratio and ok_abs and ok_time,
                      detail, data=rep)]


def criterion_2(levels=LEVELS) -> list:
    t0 = time.perf_counter()
    rep = compare_frames("isentropic", _riemann_ic((1.0, 0.0), (1.2, 0.0), 0.0),
                         line, levels, 0.3, "outflow",
                         params={"kappa": 1.0, "gamma": 2.0})
    total = time.perf_counter() - t0
    detail = (f"L1 {_fmt(rep['l1_final'])}, ratios {_fmt(rep['ratios'])} "
              f"(>= 1.5), total runtime {total:.2f} s (<= 30)")
    return [CheckLine(2, "isentropic frame equivalence",
                      rep["passed"] and total <= 30.0, detail, data=rep)]


def criterion_3(levels=LEVELS) -> list:
    out = []
    for fam in ("fullgas-energy", "fullgas-entropy"):
        rep = compare_frames(fam, _riemann_ic(*GAS_RECEDING, 0.0), line, levels,
                             0.3, "outflow", params={"alpha": ALPHA})
        out.append(CheckLine(
            3, f"full-gas frame equivalence, {fam.split('-')[1]} form "
               f"(rarefactions, 10% jump in u)", rep["passed"],
            f"L1 {_fmt(rep['l1_final'])}, ratios {_fmt(rep['ratios'])} (>= 1.5)",
            data=rep))
    rep = compare_frames("fullgas-energy", _riemann_ic(*GAS_CONTACT, 0.0), line,
                         levels, 0.3, "outflow", params={"alpha": ALPHA})
    out.append(CheckLine(
        3, "full-gas frame equivalence, energy form (20% jump with contact)",
        rep["passed"],
        f"L1 {_fmt(rep['l1_final'])}, ratios {_fmt(rep['ratios'])} (>= 1.5)",
        known_failure=("a first-order scheme smears a contact over O(sqrt(dx t)) "
                       "cells, so the L1 distance falls like dx^(1/2) and "
                       "the ratio tends to 1.41"),
        data=rep))
    return out


def shock_positions(field: SpaceTimeField, level: float) -> np.ndarray:
    """Position of the first downward crossing of ``level`` in each frame after the first."""
    g = field.grid
    xs = []
    for k in range(1, len(field.times)):
        r = field.frames[k, 0]
        i = int(np.argmax(r < level))
        xs.append(g.centers[i - 1] + (r[i - 1] - level) / (r[i - 1] - r[i]) * g.dx)
    return np.array(xs)


def criterion_4(levels=LEVELS) -> list:
    x0, t_end = 0.25, 0.4
    worst = []
    for nx in levels:
        g = make_grid("line", nx, 0.0, 1.0)
        W0 = sample_ic(g, lambda x: np.where(x < x0, 2.0, 1.0))
        pp = prepare("temple", W0)
        run, path = pp.run(t_end, SchemeConfig("rusanov", 0.5, "outflow",
                                               uniform_times(t_end, 8)))
        rho = pp.primitive_fields(run, path)[0]
        xs = shock_positions(rho, 1.5)
        worst.append(float(np.max(np.abs(xs - (x0 + 1.5 * rho.times[1:]))) / g.dx))
    return [CheckLine(4, "shock position of the reconstruction",
                      max(worst) <= 2.0,
                      f"max |x_s - (x0 + 1.5 t)| / dx = {_fmt(worst)} over 8 "
                      f"snapshots (<= 2)", data={"levels": levels, "dx_units": worst})]


def _block_average(W, factor):
    return W.reshape(W.shape[0], -1, factor).mean(axis=2)


def criterion_5(levels=(200, 400, 800)) -> list:
    out = []
    # scalar: characteristics oracle at 63% of the shock time 1/pi
    t = 0.2
    consts = []
    for nx in levels:
        g = torus(nx)
        W0 = burgers_sinusoid(g)
        tv = total_variation(W0.data, True)
        res = run_frames("scalar", W0, t, SchemeConfig("rusanov", 0.5, "periodic"))
        exact = scalar.characteristics_solution(
            lambda r: r, lambda x: 1.5 + 0.5 * np.sin(2 * np.pi * x), g.centers, t)
        for side in ("eulerian", "pp"):
            err = float(np.max(np.abs(res[side][0].frames[-1, 0] - exact)))
            consts.append(err / (g.dx * tv))
    out.append(CheckLine(5, "smooth phase, Burgers vs characteristics (t = 0.2)",
                         max(consts) <= 5.0,
                         f"max L_inf / (dx TV0) = {max(consts):.3f} (<= 5)",
                         data={"constants": consts}))
    t = 0.1
    for fam, params in (("isentropic", {"kappa": 1.0, "gamma": 2.0}),
                        ("fullgas-energy", {"alpha": ALPHA}),
                        ("fullgas-entropy", {"alpha": ALPHA}),
                        ("powerlaw", {"lam": 1.0})):
        ic = smooth_primitive(fam)
        consts = []
        for nx in levels:
            g, gf = torus(nx), torus(4 * nx)
            W0 = ic(g)
            tv = total_variation(W0.data, True)
            ref_p = prepare(get_family(fam).eulerian, ic(gf), params)
            ref_run, _ = ref_p.run(t, SchemeConfig("rusanov", 0.5, "periodic"))
            ref = _block_average(np.stack([f.frames[-1, 0] for f in
                                           ref_p.primitive_fields(ref_run)]), 4)
            res = run_frames(fam, W0, t, SchemeConfig("rusanov", 0.5, "periodic"),
                             params)
            for side in ("eulerian", "pp"):
                W = np.stack([f.frames[-1, 0] for f in res[side]])
                consts.append(float(np.max(np.abs(W - ref))) / (g.dx * tv))
        out.append(CheckLine(5, f"smooth phase, {fam} vs 4x finer run (t = 0.1)",
                             max(consts) <= 5.0,
                             f"max L_inf / (dx TV0) = {max(consts):.3f} (<= 5)",
                             data={"constants": consts}))
    return out


def ri_systems_for_discriminant() -> dict:
    systems = {f"power law lam={lam:g}": riemann2x2.powerlaw_system(lam)
               for lam in (0.6, 1.0, 2.0)}
    systems["isentropic p = u^2"] = riemann2x2.gasdyn_system(1.0, 2.0)
    for seed in range(3):
        systems[f"random invariants seed {seed}"] = riemann2x2.random_invariants_system(seed)
    return systems


def criterion_6(n_samples: int = 1000) -> list:
    res = {name: riemann2x2.discriminant_residual(s, n_samples, seed=0)
           for name, s in ri_systems_for_discriminant().items()}
    worst = max(res.values())
    return [CheckLine(6, "discriminant identity B^2 + CD = 1", worst <= 1e-10,
                      f"max residual {worst:.2e} over {len(res)} systems x "
                      f"{n_samples} samples (<= 1e-10)", data=res)]


def hbar_residuals(lam: float, n_samples: int = 200, seed: int = 0) -> dict:
    rng = np.random.default_rng(seed)
    samples = (rng.uniform(-1.0, 1.0, n_samples), rng.uniform(0.5, 2.0, n_samples))
    sys = riemann2x2.powerlaw_system(lam)
    h1, h2 = riemann2x2.powerlaw_hbar(lam)
    return {"hbar1": riemann2x2.verify_hbar(sys, h1, samples),
            "hbar2": riemann2x2.verify_hbar(sys, h2, samples),
            "control xi^2": riemann2x2.verify_hbar(sys, lambda a, b: a * a + 0 * b,
                                                   samples)}


def criterion_7() -> list:
    out = []
    for lam in (0.6, 1.0, 2.0):
        r = hbar_residuals(lam)
        ok = r["hbar1"] <= 1e-4 and r["hbar2"] <= 1e-4 and r["control xi^2"] >= 1e-2
        out.append(CheckLine(
            7, f"conserved-quantity residuals, power law lam={lam:g}", ok,
            f"hbar1 {r['hbar1']:.1e}, hbar2 {r['hbar2']:.1e} (<= 1e-4), "
            f"xi^2 control {r['control xi^2']:.2f} (>= 1e-2)", data=r))
    return out


def _admissibility_runs(nx: int = 400):
    """``(label, run, extensions)`` for both frames of the scalar, isentropic and gas pairs."""
    setups = [
        ("scalar", burgers_sinusoid(torus(nx)), 0.5, "periodic", {}),
        ("isentropic", _riemann_ic((1.0, 0.0), (1.2, 0.0), 0.0)(line(nx)), 0.3,
         "outflow", {}),
        ("isentropic", _riemann_ic((1.0, 0.5), (1.0, -0.5), 0.0)(line(nx)), 0.3,
         "outflow", {}),
    ]
    for data in (GAS_RECEDING, GAS_CONTACT, GAS_COLLIDING):
        for fam in ("fullgas-energy", "fullgas-entropy"):
            setups.append((fam, _riemann_ic(*data, 0.0)(line(nx)), 0.3, "outflow",
                           {"alpha": ALPHA}))
    for fam, W0, t_end, bc, params in setups:
        res = run_frames(fam, W0, t_end,
                         SchemeConfig("rusanov", 0.5, bc, (), True), params)
        for side, run, prep in zip(("eulerian", "pp"), res["runs"], res["prepared"]):
            yield f"{fam}/{side}/{prep.system_id}", run, prep.spec.extensions


def criterion_8() -> list:
    worst, n, failures = np.inf, 0, []
    for label, run, exts in _admissibility_runs():
        for r in admissibility.check_admissibility(run, exts):
            n += 1
            worst = min(worst, r.minimum + r.tolerance)
            if not r.passed:
                failures.append(f"{label} {r.extension} {r.minimum:.2e}")
    lines = [CheckLine(8, "admissibility of solver runs", not failures,
                       f"{n} (run, extension) pairs, all minima >= -tol_adm "
                       f"(smallest margin {worst:.2e})" if not failures
                       else "; ".join(failures))]
    ext = scalar.scalar_extension_pair(lambda r: r * r, lambda r: r, (-1.0, 1.0),
                                       lambda r: 2 * r, lambda r: 2 + 0 * r)
    vals = {}
    for nx in (400, 1600):
        g = make_grid("line", nx, 0.0, 1.0)
        vals[nx] = admissibility.entropy_production(
            admissibility.inject_expansion_shock(g, 0.3), ext)
    lines.append(CheckLine(8, "expansion shock negative control",
                           vals[400] <= -0.01 and vals[1600] <= -0.01,
                           f"min weak entropy form {vals[400]:.4f} at nx=400 "
                           f"(<= -0.01), {vals[1600]:.4f} at nx=1600", data=vals))
    return lines


def criterion_9(levels=LEVELS) -> list:
    m, M, slack = 1.0, 2.0, 1e-12
    worst = 0.0
    cases = [(torus, burgers_sinusoid, 0.5, "periodic"),
             (lambda nx: make_grid("line", nx, 0.0, 1.0),
              lambda g: sample_ic(g, lambda x: np.where(x < 0.25, 2.0, 1.0)),
              0.4, "outflow"),
             (lambda nx: make_grid("line", nx, 0.0, 1.0),
              lambda g: sample_ic(g, lambda x: np.where(x < 0.5, 1.0, 2.0)),
              0.4, "outflow")]
    for grid, ic, t_end, bc in cases:
        for nx in levels[:2]:
            pp = prepare("temple", ic(grid(nx)))
            run, _ = pp.run(t_end, SchemeConfig("rusanov", 0.5, bc, (), True))
            eta, v = run.frames[:, 0], run.frames[:, 1]
            z = v / eta
            excess = max(float(np.max(m - v)), float(np.max(v - M)),
                         float(np.max(m - z)), float(np.max(z - M)))
            worst = max(worst, excess)
    return [CheckLine(9, "Temple invariant quadrilateral",
                      worst <= slack,
                      f"largest excursion outside [m, M] = [1, 2] in v and v/eta "
                      f"over every step: {worst:.1e} (<= 1e-12)")]


STATIC_ROWS = {"isentropic-pp": (2,), "pp-entropy": (2, 3), "pp-energy": (3,),
               "powerlaw-pp": (0,)}


def criterion_10(nx: int = 200) -> list:
    worst_rel, worst_static = 0.0, 0.0
    for fam, params in (("scalar", {}), ("isentropic", {}),
                        ("fullgas-energy", {"alpha": ALPHA}),
                        ("fullgas-entropy", {"alpha": ALPHA}),
                        ("powerlaw", {"lam": 1.0})):
        W0 = smooth_primitive(fam)(torus(nx))
        res = run_frames(fam, W0, 0.3, SchemeConfig("rusanov", 0.5, "periodic",
                                                    (), True), params)
        for run, prep in zip(res["runs"], res["prepared"]):
            tot = total_conserved(run)
            # totals near zero (momentum) are measured against sum |U| dx
            scale = np.sum(np.abs(run.frames[0]), axis=1) * run.grid.dx
            rel = np.abs(tot - tot[0]) / np.maximum(scale, 1e-300)
            worst_rel = max(worst_rel, float(np.max(rel)))
            for row in STATIC_ROWS.get(prep.system_id, ()):
                dev = np.abs(run.frames[:, row] - run.frames[0, row])
                worst_static = max(worst_static, float(np.max(dev)))
    return [CheckLine(10, "conservation and stationarity on the torus",
                      worst_rel <= 1e-10 and worst_static <= 1e-13,
                      f"max relative drift of totals {worst_rel:.1e} (<= 1e-10), "
                      f"max change of zero-flux rows {worst_static:.1e} (<= 1e-13)")]


CONVEXITY_NOTE = ("rho X(z_M) with z_M = eps/rho^alpha - m^2/(2 rho^(alpha+1)) is "
                  "convex only where z_M X''/(-X') > (alpha-1)/alpha; for X = e^-z "
                  "this is z_M > (alpha-1)/alpha, which fails on part of the "
                  "sampled states when alpha >= 1.6")


def criterion_11(n_states: int = 100, seed: int = 0) -> list:
    out = []
    for alpha in (1.2, 1.4, 1.6, 1.8):
        rng = np.random.default_rng(seed)
        U = fullgas.primitive_to_energy(fullgas.sample_physical(rng, n_states), alpha)
        ok = [fullgas.check_M_negative_definite(U[:, i], fullgas.exp_profile(),
                                                alpha)[0] for i in range(n_states)]
        n_ok = int(np.sum(ok))
        out.append(CheckLine(
            11, f"convexity matrix negative definite, X = e^-z, alpha = {alpha}",
            n_ok == n_states, f"{n_ok}/{n_states} states pass",
            known_failure=CONVEXITY_NOTE if alpha >= 1.6 else None))
    rng = np.random.default_rng(seed)
    U = fullgas.primitive_to_energy(fullgas.sample_physical(rng, n_states), 1.4)
    ctl = fullgas.ScalarProfile(lambda z: -np.sqrt(z), lambda z: -0.5 / np.sqrt(z),
                                lambda z: -0.25 * z ** -1.5, "-sqrt z")
    n_ok = sum(fullgas.check_M_negative_definite(U[:, i], ctl, 1.4)[0]
               for i in range(n_states))
    out.append(CheckLine(11, "convexity matrix control X'' < 0", n_ok == 0,
                         f"{n_ok}/{n_states} states pass (expected 0)"))
    return out


def criterion_12(levels=(100, 200, 400, 800)) -> list:
    rng = np.random.default_rng(0)
    exact = 0.0
    for nx in (100, 400):
        g = torus(nx)
        for speed in (0.0, 0.7, -0.7):
            times = (np.linspace(0.0, 0.5, 51) if speed == 0
                     else grid_translation_times(g, speed, int(0.5 * abs(speed) / g.dx) + 1))
            nt = len(times)
            A = SpaceTimeField(g, times, rng.uniform(1, 2, (nt, 1, nx)))
            B = SpaceTimeField(g, times, rng.uniform(1, 2, (nt, 1, nx)))
            tc = 0.5 * times[-1]
            bump = TensorBump(0.5, tc, 0.3, 0.9 * tc)
            exact = max(exact, verify_change_of_variables(
                A, B, translation_path(g, times, speed), bump))
    res = []
    bump = TensorBump(0.5, 0.25, 0.3, 0.15)
    for nx in levels:
        pp = prepare("temple", burgers_sinusoid(torus(nx)))
        run, path = pp.run(0.5, SchemeConfig("rusanov", 0.5, "periodic",
                                             uniform_times(0.5, 50)))
        A = run.map(lambda U: U[1] / U[0])
        B = run.map(lambda U: (U[1] / U[0]) ** 2)
        res.append(verify_change_of_variables(A, B, path, bump))
    ratios = refinement_ratios(res)
    return [CheckLine(12, "change of variables, identity and grid translations",
                      exact <= 1e-13, f"max residual {exact:.1e} (<= 1e-13)"),
            CheckLine(12, "change of variables, solver paths",
                      all(r >= 1.8 for r in ratios),
                      f"residuals {_fmt(res)}, ratios {_fmt(ratios)} "
                      f"(>= 1.8 per halving of dx)", data={"residuals": res})]


def criterion_13(levels=LEVELS, threshold: float = 10.0) -> list:
    gaps = {"energy": [], "naive": [], "entropy": []}
    for nx in levels:
        g = line(nx)
        W0 = _riemann_ic(*GAS_COLLIDING, 0.0)(g)
        scheme = SchemeConfig("rusanov", 0.5, "outflow")
        eul = prepare("gas2", W0, {"alpha": ALPHA})
        run_e, _ = eul.run(0.3, scheme)
        ref = eul.primitive_fields(run_e)
        for form in gaps:
            pp = prepare(f"pp-{form}", W0, {"alpha": ALPHA})
            run, path = pp.run(0.3, scheme)
            gaps[form].append(l1_distance(pp.primitive_fields(run, path), ref))
    ratio = [n / e for n, e in zip(gaps["naive"], gaps["energy"])]
    return [CheckLine(13, "naive particle-path form vs admissible form",
                      min(ratio) >= threshold,
                      f"colliding flow u = +-2: naive gap {_fmt(gaps['naive'])}, "
                      f"energy gap {_fmt(gaps['energy'])}, ratio {_fmt(ratio)} "
                      f"(>= {threshold:g})", data={"gaps": gaps, "ratio": ratio})]


CRITERIA = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4,
            5: criterion_5, 6: criterion_6, 7: criterion_7, 8: criterion_8,
            9: criterion_9, 10: criterion_10, 11: criterion_11, 12: criterion_12,
            13: criterion_13}

# }}}


def _fmt(values, digits=3) -> str:
    return "[" + ", ".join(f"{v:.{digits}g}" for v in values) + "]"
