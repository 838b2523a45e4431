import numpy as np
import pytest

from weakpaths.admissibility import (
    ROUNDOFF_FLOOR, admissibility_tolerance, cell_entropy_report, cell_tolerance,
    check_admissibility, dyadic_family, entropy_production, inject_expansion_shock,
    weak_form_values)
from weakpaths.core import CellField, SpaceTimeField, make_grid
from weakpaths.scalar import burgers_system, scalar_extension_pair
from weakpaths.solver import SchemeConfig, solve


def rho2():
    return scalar_extension_pair(lambda r: r * r, lambda r: r, (-2.0, 2.0),
                                 lambda r: 2 * r, lambda r: 2 + 0 * r, "rho^2")


def expansion_value(ht):
    # stationary jump -1 | 1: only the flux term survives, [Q] = 2/3 - (-2/3),
    # times b(0) = 1 and the time integral ht * int (1 - s^2)^3 ds = ht * 32/35
    return -(4.0 / 3.0) * ht * 32.0 / 35.0


def test_family_size_and_supports():
    g = make_grid("line", 64, -1, 1)
    fam = dyadic_family(g, 0.4, levels=3)
    assert len(fam) == 1 + 4 + 16
    for b in fam:
        x0, x1, t0, t1 = b.support
        assert -1 - 1e-12 <= x0 and x1 <= 1 + 1e-12 and 0 <= t0 and t1 <= 0.4 + 1e-12
    with pytest.raises(ValueError):
        dyadic_family(g, 0.4, levels=0)


def test_constant_run_produces_zero():
    g = make_grid("torus", 50)
    run = solve(burgers_system(), CellField(g, np.full(50, 0.7)), 0.2,
                SchemeConfig("godunov_exact", 0.5, "periodic", (), True))
    [res] = check_admissibility(run, [rho2()])
    assert abs(res.minimum) < 1e-13 and res.passed
    assert res.tolerance == ROUNDOFF_FLOOR


@pytest.mark.parametrize("nx", [400, 1600])
def test_expansion_shock_matches_analytic_value(nx):
    g = make_grid("torus", nx)
    field = inject_expansion_shock(g, 0.3)
    [res] = check_admissibility(field, [rho2()])
    assert res.minimum == pytest.approx(expansion_value(0.15), rel=1e-3)
    assert not res.passed


def test_expansion_shock_guards():
    g = make_grid("line", 10)
    with pytest.raises(ValueError, match="left < right"):
        inject_expansion_shock(g, 1.0, left=1.0, right=-1.0)


def test_godunov_shock_passes():
    g = make_grid("line", 400, 0, 1)
    U0 = np.where(g.centers < 0.25, 2.0, 1.0)
    run = solve(burgers_system((1, 2)), CellField(g, U0), 0.4,
                SchemeConfig("godunov_exact", 0.5, "outflow", (), True))
    [res] = check_admissibility(run, [rho2()])
    assert res.passed


def test_tolerance_formula():
    g = make_grid("torus", 10)
    frames = np.zeros((3, 1, 10))
    frames[:, 0, 5:] = 1.0
    run = SpaceTimeField(g, [0.0, 0.1, 0.3], frames)
    # TV0 = 2 on a torus, widest gap 0.2
    assert admissibility_tolerance(run, 10) == pytest.approx(10 * (0.1 + 0.2) * 2 + 1e-12)


def test_weak_form_is_linear_in_the_extension():
    g = make_grid("torus", 40)
    rng = np.random.default_rng(0)
    run = SpaceTimeField(g, np.linspace(0, 1, 11), rng.uniform(size=(11, 1, 40)))
    fam = dyadic_family(g, 1.0, 2)
    e = rho2()
    from weakpaths.core import ConvexExtension
    double = ConvexExtension("2 rho^2", lambda U: 2 * e.E(U), lambda U: 2 * e.Q(U))
    np.testing.assert_allclose(weak_form_values(run, double, fam),
                               2 * weak_form_values(run, e, fam), rtol=1e-12)
    assert entropy_production(run, e, fam) == pytest.approx(weak_form_values(run, e, fam).min())


@pytest.mark.parametrize("flux", ["rusanov", "godunov_exact"])
def test_cell_entropy_inequality_for_burgers(flux):
    g = make_grid("torus", 100)
    U0 = 1 + 0.5 * np.sin(2 * np.pi * g.centers)
    scheme = SchemeConfig(flux, 0.5, "periodic", (), True)
    run = solve(burgers_system(), CellField(g, U0), 0.5, scheme)
    rep = cell_entropy_report(run, burgers_system(), rho2(), scheme)
    assert rep.max() <= cell_tolerance(run, rho2())


def test_cell_report_needs_every_step():
    g = make_grid("torus", 20)
    run = solve(burgers_system(), CellField(g, np.ones(20)), 0.1, SchemeConfig())
    with pytest.raises(ValueError, match="every step"):
        cell_entropy_report(run.__class__(g, [0.0, 0.1], run.frames[[0, -1]], [0, 7]),
                            burgers_system(), rho2(), SchemeConfig())
