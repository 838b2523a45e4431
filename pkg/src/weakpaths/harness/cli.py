"""``weakpaths`` command line.

Exit codes: 0 pass, 1 criterion or run failure, 2 usage or configuration
error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from weakpaths import admissibility, riemann2x2, scalar
from weakpaths.core import CellField, InadmissibleStateError, SpaceTimeField, make_grid
from weakpaths.harness import experiments, io
from weakpaths.harness.config import ConfigError, RunConfig, load_config
from weakpaths.harness.registry import (
    UnknownSystemError, family_of, get_family, prepare)
from weakpaths.solver import SolveError, total_conserved

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class CriterionFailed(Exception):
    pass


def _out(cfg: RunConfig) -> Path:
    p = Path(cfg.out_dir)
    p.mkdir(parents=True, exist_ok=True)
    return p


def _run_config(cfg: RunConfig, record=None):
    grid = cfg.grid()
    W0 = cfg.ic.sample(grid)
    prep = prepare(cfg.system, W0, cfg.params)
    scheme = cfg.scheme(prep.flux_kind, record)
    run, path = prep.run(cfg.t_end, scheme)
    return prep, run, path


def _admissibility_body(run, exts, c_adm, levels):
    return [{"extension": r.extension, "minimum": r.minimum,
             "tolerance": r.tolerance, "passed": r.passed}
            for r in admissibility.check_admissibility(run, exts, c_adm, levels)]


# {{{ commands

def cmd_solve(cfg: RunConfig) -> int:
    prep, run, path = _run_config(cfg)
    out = _out(cfg)
    if "csv" in cfg.formats:
        io.write_field_csv(out, run)
        if path is not None:
            for name, f in zip(prep.primitive_names, prep.primitive_fields(run, path)):
                io.write_field_csv(out / "physical", f, prefix=name)
    if "dat" in cfg.formats:
        io.write_dat(out / "solution.dat", run, list(prep.spec.component_names))
    tot = total_conserved(run)
    body = {
        "system": cfg.system, "nx": cfg.nx, "times": run.times,
        "components": list(prep.spec.component_names),
        "totals": tot, "min": run.frames.min(axis=2), "max": run.frames.max(axis=2),
        "entropy_production": _admissibility_body(
            run, prep.spec.extensions, cfg.c_adm, cfg.adm_levels),
    }
    if path is not None:
        body["gamma"] = {"eta_min": path.eta_min,
                         "closed_loop_defect": float(np.max(path.defect))}
    if "json" in cfg.formats:
        io.write_report(out / "summary.json", "solve", cfg.sha256(), body)
    drift = np.max(np.abs(tot - tot[0]), axis=0)
    print(f"solved {cfg.system} on {cfg.nx} cells to t={cfg.t_end:g} "
          f"in {int(run.steps[-1])} steps; total drift per component "
          + ", ".join(f"{d:.1e}" for d in drift))
    print(f"wrote {out}")
    return EXIT_PASS


def cmd_compare_frames(cfg: RunConfig) -> int:
    fam = family_of(cfg.system)
    bc = cfg.scheme().bc
    rep = experiments.compare_frames(
        fam.name, cfg.ic.sample, cfg.grid, cfg.levels, cfg.t_end, bc,
        cfg.snapshots, cfg.cfl, cfg.params, cfg.min_ratio)
    io.write_report(_out(cfg) / "compare_frames.json", "compare-frames",
                    cfg.sha256(), rep)
    print(f"frame pair {fam.eulerian} <-> {fam.pp}")
    print(f"{'nx':>6} {'L1':>12} {'Linf':>12} {'ratio':>8}")
    ratios = [None] + rep["ratios"]
    for row, r in zip(rep["rows"], ratios):
        print(f"{row['nx']:>6} {row['l1'][-1]:12.4e} {row['linf'][-1]:12.4e} "
              + (f"{r:8.3f}" if r is not None else f"{'':>8}"))
    verdict = "converged" if rep["passed"] else "NOT converged"
    print(f"{verdict}: L1 ratio per doubling >= {cfg.min_ratio:g} "
          f"{'holds' if rep['passed'] else 'fails'}")
    return EXIT_PASS if rep["passed"] else EXIT_FAIL


def _load_or_run(cfg: RunConfig, source):
    if cfg.inject == "expansion_shock":
        grid = cfg.grid()
        field = admissibility.inject_expansion_shock(grid, cfg.t_end)
        ext = scalar.scalar_extension_pair(
            lambda r: r * r, lambda r: r, (-1.0, 1.0), lambda r: 2 * r,
            lambda r: 2 + 0 * r, name="rho^2")
        return field, (ext,)
    grid = cfg.grid()
    W0 = cfg.ic.sample(grid)
    prep = prepare(cfg.system, W0, cfg.params)
    if source is not None:
        return io.read_field_csv(source, grid), prep.spec.extensions
    run, _ = prep.run(cfg.t_end, cfg.scheme(prep.flux_kind, record=True))
    return run, prep.spec.extensions


def cmd_check_admissibility(cfg: RunConfig, source=None) -> int:
    run, exts = _load_or_run(cfg, source)
    if not exts:
        print(f"system {cfg.system!r} has no registered convex extension")
        return EXIT_FAIL
    body = _admissibility_body(run, exts, cfg.c_adm, cfg.adm_levels)
    io.write_report(_out(cfg) / "admissibility.json", "check-admissibility",
                    cfg.sha256(), {"results": body})
    for r in body:
        print(f"{'pass' if r['passed'] else 'FAIL'}  {r['extension']}: "
              f"min {r['minimum']:.6e}, tol_adm {r['tolerance']:.3e}")
    return EXIT_PASS if all(r["passed"] for r in body) else EXIT_FAIL


def _reference(cfg: RunConfig, grid, t):
    """Exact Burgers Riemann solution when available, else ``None``."""
    fam = family_of(cfg.system)
    if fam.name != "scalar" or cfg.ic.kind != "riemann" or grid.periodic:
        return None
    rl, rr = cfg.ic.left[0], cfg.ic.right[0]
    x0 = 0.5 * (grid.a + grid.b) if cfg.ic.x0 is None else cfg.ic.x0
    f = lambda r: 0.5 * np.asarray(r) ** 2
    xi = (grid.centers - x0) / t
    rl, rr = np.full_like(xi, rl), np.full_like(xi, rr)
    return [scalar.exact_riemann_scalar(f, lambda r: np.asarray(r), rl, rr, xi,
                                        fp_inv=lambda a: a)]


def cmd_convergence(cfg: RunConfig) -> int:
    levels = sorted(cfg.levels)
    sols = {}
    for nx in levels:
        c = cfg.with_overrides(nx=nx)
        prep, run, path = _run_config(c)
        sols[nx] = np.stack([f.frames[-1, 0] for f in prep.primitive_fields(run, path)])
    exact = _reference(cfg, cfg.grid(levels[0]), cfg.t_end)
    errors = []
    if exact is not None:
        for nx in levels:
            g = cfg.grid(nx)
            ref = _reference(cfg, g, cfg.t_end)
            errors.append(float(np.sum(np.abs(sols[nx] - np.stack(ref))) * g.dx))
        kind = "exact Riemann solution"
    else:
        finest = levels[-1]
        for nx in levels[:-1]:
            f = finest // nx
            if f * nx != finest:
                raise ConfigError("self-convergence needs levels dividing the finest")
            ref = sols[finest].reshape(sols[finest].shape[0], nx, f).mean(axis=2)
            errors.append(float(np.sum(np.abs(sols[nx] - ref)) * cfg.grid(nx).dx))
        kind = f"finest level nx={finest}"
    ratios = experiments.refinement_ratios(errors)
    passed = all(r >= cfg.min_ratio for r in ratios)
    io.write_report(_out(cfg) / "convergence.json", "convergence", cfg.sha256(),
                    {"system": cfg.system, "reference": kind, "levels": levels,
                     "l1": errors, "ratios": ratios, "passed": passed})
    print(f"{cfg.system}: L1 error against {kind}")
    for nx, e in zip(levels, errors):
        print(f"{nx:>6} {e:12.4e}")
    print("ratios " + ", ".join(f"{r:.3f}" for r in ratios)
          + f" (>= {cfg.min_ratio:g}: {'pass' if passed else 'FAIL'})")
    return EXIT_PASS if passed else EXIT_FAIL


# expected failures reported by ri-verify
RI_EXPECTED_FAIL = {"lagrangian-gas": {"assumption"}}


def ri_checks(system_id: str, n_samples: int = 1000, seed: int = 0,
              perturb_b: float = 0.0) -> list:
    systems = riemann2x2.registered_systems()
    if system_id not in systems:
        raise UnknownSystemError(system_id, systems)
    sys_ = systems[system_id]
    rng = np.random.default_rng(seed)
    checks = []
    if sys_.z is not None:
        r = riemann2x2.discriminant_residual(sys_, n_samples, seed, perturb_b)
        checks.append(("discriminant", r, r <= 1e-10, "<= 1e-10"))
    if system_id.startswith("powerlaw-") and "printed" not in system_id:
        lam = float(system_id.split("-")[1])
        xi, ze = rng.uniform(-1, 1, 200), rng.uniform(0.5, 2.0, 200)
        for name, hb in zip(("hbar1", "hbar2"), riemann2x2.powerlaw_hbar(lam)):
            r = riemann2x2.verify_hbar(sys_, hb, (xi, ze), perturb_B=perturb_b)
            checks.append((name, r, r <= 1e-4, "<= 1e-4"))
    if sys_.f is not None:
        u, v = sys_.sample_uv(rng, n_samples)
        r = riemann2x2.check_assumption(sys_, u, v)
        checks.append(("assumption", r, r >= 1e-6, ">= 1e-6"))
    if sys_.f is not None and sys_.uv_from_TE is not None:
        r = riemann2x2.check_inverse(sys_, min(n_samples, 200), seed)
        checks.append(("inverse", r, r <= 1e-10, "<= 1e-10"))
    expected = RI_EXPECTED_FAIL.get(system_id, set())
    return [{"check": name, "value": float(val), "passed": bool(ok),
             "threshold": thr, "expected_fail": name in expected}
            for name, val, ok, thr in checks]


def cmd_ri_verify(cfg: RunConfig) -> int:
    system_id = cfg.ri_system or cfg.system
    checks = ri_checks(system_id, cfg.ri_samples, cfg.seed, cfg.perturb_b)
    io.write_report(_out(cfg) / "ri_verify.json", "ri-verify", cfg.sha256(),
                    {"system": system_id, "perturb_b": cfg.perturb_b,
                     "checks": checks})
    ok = True
    for c in checks:
        if c["expected_fail"]:
            tag = "expected-fail" if not c["passed"] else "UNEXPECTED PASS"
            ok &= not c["passed"]
        else:
            tag = "pass" if c["passed"] else "FAIL"
            ok &= c["passed"]
        print(f"{tag:>15}  {c['check']}: {c['value']:.3e} ({c['threshold']})")
    return EXIT_PASS if ok else EXIT_FAIL

# }}}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="weakpaths",
        description="Eulerian and particle-path solvers for 1D conservation laws.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (("solve", "run one configured system and write artifacts"),
                       ("compare-frames", "refinement study of a frame pair"),
                       ("check-admissibility", "weak entropy inequality check"),
                       ("convergence", "L1 refinement study of one system"),
                       ("ri-verify", "2x2 Riemann-invariant identity checks")):
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", required=True, help="configuration file")
        p.add_argument("--out", help="output directory (overrides [output] dir)")
        p.add_argument("--nx", type=int, help="number of cells (overrides [grid] nx)")
        p.add_argument("--seed", type=int, help="random seed (overrides [run] seed)")
        if name == "check-admissibility":
            p.add_argument("--from", dest="source",
                           help="directory of snapshot CSVs written by solve")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config).with_overrides(args.nx, args.seed, args.out)
        if args.command != "ri-verify" and cfg.system is None:
            raise ConfigError(f"{args.config}: [system] id is required")
        if args.command == "solve":
            return cmd_solve(cfg)
        if args.command == "compare-frames":
            return cmd_compare_frames(cfg)
        if args.command == "check-admissibility":
            return cmd_check_admissibility(cfg, args.source)
        if args.command == "convergence":
            return cmd_convergence(cfg)
        return cmd_ri_verify(cfg)
    except (ConfigError, UnknownSystemError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SolveError, InadmissibleStateError, ValueError) as exc:
        print(f"error: {args.command} failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
