import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from weakpaths.core import CellField, SystemSpec, make_grid, positive_rows
from weakpaths.scalar import burgers_system
from weakpaths.solver import (
    SchemeConfig, SolveError, cfl_dt, rusanov_flux, solve, total_conserved,
    uniform_times)
from weakpaths import isentropic


def advection(c=1.0):
    return SystemSpec("advection", 1, lambda U: c * U,
                      lambda U: np.full(U.shape[1:], abs(c)),
                      lambda U: np.isfinite(U[0]))


@pytest.mark.parametrize("kwargs, msg", [
    ({"cfl": 0.0}, "cfl"), ({"cfl": 1.5}, "cfl"),
    ({"flux_kind": "roe"}, "flux kind"), ({"bc": "reflect"}, "boundary"),
])
def test_scheme_config_validation(kwargs, msg):
    with pytest.raises(ValueError, match=msg):
        SchemeConfig(**kwargs)


def test_uniform_times():
    assert uniform_times(1.0, 4) == (0.25, 0.5, 0.75, 1.0)


def test_cfl_dt_formula():
    g = make_grid("torus", 10)
    f = CellField(g, np.linspace(0.5, 2.0, 10))
    assert cfl_dt(burgers_system(), f, 0.4) == pytest.approx(0.4 * 0.1 / 2.0)


@pytest.mark.parametrize("flux", ["rusanov", "godunov_exact"])
def test_constant_state_is_stationary(flux):
    g = make_grid("line", 20)
    run = solve(burgers_system(), CellField(g, np.full(20, 0.7)), 0.3,
                SchemeConfig(flux, 0.9, "outflow"))
    np.testing.assert_array_equal(run.frames[-1], run.frames[0])


def test_snapshots_land_exactly():
    g = make_grid("torus", 50)
    run = solve(burgers_system(), CellField(g, 1 + 0.5 * np.sin(2 * np.pi * g.centers)),
                0.3, SchemeConfig("rusanov", 0.5, "periodic", (0.1, 0.2, 0.25)))
    assert list(run.times) == [0.0, 0.1, 0.2, 0.25, 0.3]
    assert np.all(np.diff(run.steps) > 0)


def test_record_every_step_keeps_all_steps():
    g = make_grid("torus", 30)
    run = solve(burgers_system(), CellField(g, 1 + 0.5 * np.sin(2 * np.pi * g.centers)),
                0.1, SchemeConfig("rusanov", 0.5, "periodic", (0.05,), True))
    np.testing.assert_array_equal(run.steps, np.arange(len(run.times)))


def test_advection_one_period_with_cfl_one():
    # upwind with unit Courant number is an exact shift
    g = make_grid("torus", 40)
    U0 = np.random.default_rng(3).uniform(size=40)
    run = solve(advection(), CellField(g, U0), 1.0, SchemeConfig("rusanov", 1.0))
    np.testing.assert_allclose(run.frames[-1, 0], U0, atol=1e-12)


@given(arrays(np.float64, 32, elements=st.floats(-1.5, 1.5)))
def test_conservation_and_maximum_principle_on_torus(U0):
    g = make_grid("torus", 32)
    for flux in ("rusanov", "godunov_exact"):
        run = solve(burgers_system(), CellField(g, U0), 0.2, SchemeConfig(flux, 0.5))
        tot = total_conserved(run)[:, 0]
        assert abs(tot[-1] - tot[0]) <= 1e-13 * (1 + np.abs(U0).sum() * g.dx)
        assert run.frames.min() >= U0.min() - 1e-13
        assert run.frames.max() <= U0.max() + 1e-13


@given(st.floats(-2, 2), st.floats(-2, 2))
def test_rusanov_consistency(a, b):
    spec = isentropic.build_eulerian_isentropic(isentropic.gamma_law())
    U = np.array([[1 + abs(a)], [b]])
    np.testing.assert_allclose(rusanov_flux(spec, U, U), spec.flux(U))


def test_godunov_burgers_shock_speed():
    # Rankine-Hugoniot speed (2 + 1)/2 for the data 2 | 1
    g = make_grid("line", 400, 0.0, 1.0)
    U0 = np.where(g.centers < 0.25, 2.0, 1.0)
    run = solve(burgers_system(), CellField(g, U0), 0.4,
                SchemeConfig("godunov_exact", 0.5, "outflow"))
    x_shock = g.centers[np.argmax(run.frames[-1, 0] < 1.5)]
    assert abs(x_shock - (0.25 + 1.5 * 0.4)) <= 2 * g.dx


def test_static_rows_receive_no_dissipation():
    pl = isentropic.gamma_law()
    spec = isentropic.build_pp_isentropic(pl)
    g = make_grid("torus", 50)
    rng = np.random.default_rng(0)
    rho, u = rng.uniform(0.8, 1.2, 50), rng.uniform(-0.1, 0.1, 50)
    run = solve(spec, CellField(g, isentropic.pp_data(rho, u)), 0.1, SchemeConfig())
    np.testing.assert_array_equal(run.frames[-1, 2], run.frames[0, 2])


def test_inadmissible_state_raises_with_context():
    spec = SystemSpec("blowup", 1, lambda U: -10 * U ** 2,
                      lambda U: np.full(U.shape[1:], 0.01), positive_rows(0))
    g = make_grid("line", 10)
    U0 = np.where(np.arange(10) < 5, 1.0, 0.01)
    with pytest.raises(SolveError, match="step"):
        solve(spec, CellField(g, U0), 1.0, SchemeConfig("rusanov", 0.9, "outflow"))


def test_godunov_needs_exact_riemann_solver():
    g = make_grid("torus", 10)
    with pytest.raises(ValueError, match="godunov_exact"):
        solve(advection(), CellField(g, np.ones(10)), 0.1, SchemeConfig("godunov_exact"))
