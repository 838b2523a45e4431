import numpy as np
import pytest
from hypothesis import given, strategies as st

from weakpaths.core import CellField, make_grid, numerical_jacobian, sample_ic
from weakpaths import riemann2x2 as r2
from weakpaths.solver import SchemeConfig, solve


@pytest.mark.parametrize("sid", [k for k, s in r2.registered_systems().items()
                                 if s.z is not None])
def test_discriminant_identity_registered(sid):
    assert r2.discriminant_residual(r2.registered_systems()[sid], 500) <= 1e-10


@given(st.integers(0, 10_000))
def test_discriminant_identity_random_invariants(seed):
    assert r2.discriminant_residual(r2.random_invariants_system(seed), 200, seed) <= 1e-10


def test_perturbed_B_breaks_discriminant():
    assert r2.discriminant_residual(r2.powerlaw_system(1.0), 100, perturb_B=0.1) \
        == pytest.approx(0.01, rel=1e-9)


@pytest.mark.parametrize("lam", [0.6, 1.0, 2.0])
def test_powerlaw_coefficients_exact(lam):
    T, E = np.array([0.3, -0.2]), np.array([0.7, 1.4])
    B, C, D = r2.compute_BCD(r2.powerlaw_system(lam), T, E)
    np.testing.assert_allclose(B, 0, atol=1e-14)
    np.testing.assert_allclose(C, -2 * lam)
    np.testing.assert_allclose(D, -1 / (2 * lam))


@pytest.mark.parametrize("lam", [0.3, 1.0, 2.0])
def test_powerlaw_coefficients_printed(lam):
    beta = 1 - 2 * lam
    T, E = np.array([0.1]), np.array([1.3])
    B, C, D = r2.compute_BCD(r2.powerlaw_system(lam, "printed"), T, E)
    np.testing.assert_allclose(B, 0, atol=1e-14)
    np.testing.assert_allclose(C, -beta * E ** (beta - 1))
    np.testing.assert_allclose(D, -E ** (1 - beta) / beta)


def test_one_sided_coefficients():
    B, C, D = r2.compute_BCD(r2.one_sided_invariants_system(),
                             np.array([0.0]), np.array([1.0]))
    assert (B[0], C[0]) == (pytest.approx(1.0), pytest.approx(0.0))


@given(st.floats(0.5, 2.0), st.floats(-1, 1))
def test_gasdyn_T_E(u, v):
    s = r2.gasdyn_system(1.0, 2.0)
    T, E = r2.compute_T_E(s, np.array([u]), np.array([v]))
    assert T[0] == pytest.approx(v)
    assert E[0] == pytest.approx(np.sqrt(2 * u))
    uu, vv = s.uv_from_TE(T, E)
    assert uu[0] == pytest.approx(u) and vv[0] == pytest.approx(v)


def test_not_hyperbolic_raises():
    s = r2.TwoSystem("rotation", f=lambda u, v: v, g=lambda u, v: -u)
    with pytest.raises(ValueError, match="not strictly hyperbolic"):
        r2.compute_T_E(s, np.array([1.0]), np.array([0.0]))


def test_vanishing_delta_raises():
    s = r2.TwoSystem("degenerate", z=lambda T, E: T + E, w=lambda T, E: 2 * (T + E))
    with pytest.raises(ValueError, match="vanishes"):
        r2.compute_BCD(s, np.array([0.1]), np.array([1.0]))


def test_assumption_fails_for_lagrangian_gas_only():
    rng = np.random.default_rng(0)
    lag = r2.lagrangian_gas_system()
    assert r2.check_assumption(lag, *lag.sample_uv(rng, 100)) < 1e-8
    gas = r2.gasdyn_system()
    assert r2.check_assumption(gas, *gas.sample_uv(rng, 100)) > 1e-2


@pytest.mark.parametrize("sys_", [r2.gasdyn_system(), r2.powerlaw_system(0.6),
                                  r2.decoupled_burgers_system()])
def test_inverse(sys_):
    assert r2.check_inverse(sys_) <= 1e-10


@pytest.mark.parametrize("lam", [0.6, 1.0, 2.0])
def test_hbar_residuals_and_control(lam):
    rng = np.random.default_rng(0)
    xi, zeta = rng.uniform(-1, 1, 200), rng.uniform(0.5, 2.0, 200)
    s = r2.powerlaw_system(lam)
    h1, h2 = r2.powerlaw_hbar(lam)
    assert r2.verify_hbar(s, h1, (xi, zeta)) <= 1e-4
    assert r2.verify_hbar(s, h2, (xi, zeta)) <= 1e-4
    assert r2.verify_hbar(s, lambda a, b: a * a + 0 * b, (xi, zeta)) >= 1e-2


def test_mixed_partials_for_gas_density():
    # density and mass flux as functions of the invariants (z, w)
    a, kappa = 2.0, 1.0
    s = r2.gasdyn_system(kappa, a)
    k = 2 / (a - 1)

    def u(z, w):
        E = (w - z) / (2 * k)
        return (E * E / (kappa * a)) ** (1 / (a - 1))

    def f(z, w):
        return u(z, w) * 0.5 * (z + w)

    rng = np.random.default_rng(0)
    z = rng.uniform(-3, -1, 50)
    w = z + rng.uniform(2, 4, 50)
    assert s.TE_from_zw is not None
    assert r2.verify_mixed_partials(s, u, f, (z, w)) <= 1e-5
    assert r2.verify_mixed_partials(s, lambda z, w: z * w, f, (z, w)) > 1e-2


def test_powerlaw_pp_hyperbolicity():
    U = np.array([[1.2], [0.3], [0.9]])
    for variant, real in (("exact", True), ("printed", False)):
        spec = r2.build_powerlaw_pp(1.0, variant)
        ev = np.linalg.eigvals(numerical_jacobian(spec.flux, U)[..., 0])
        assert (np.max(np.abs(ev.imag)) < 1e-6) == real
    ev = np.linalg.eigvals(numerical_jacobian(r2.build_powerlaw_pp(1.0).flux, U)[..., 0])
    speed = r2.build_powerlaw_pp(1.0).max_wave_speed(U)[0]
    assert np.max(np.abs(ev)) == pytest.approx(speed, rel=1e-6)


def test_powerlaw_uniform_reconstruction():
    g = make_grid("torus", 16)
    u0 = sample_ic(g, lambda x: np.full_like(x, 1.3))
    run, path = r2.run_powerlaw(1.0, u0, np.full(16, 0.25), 0.2, SchemeConfig())
    u, v = r2.reconstruct_powerlaw(run, path)
    np.testing.assert_allclose(u.frames, 1.3, rtol=1e-13)
    np.testing.assert_allclose(v.frames, 0.25, rtol=1e-12)


def test_powerlaw_frames_converge():
    errs = []
    for nx in (100, 200, 400):
        g = make_grid("line", nx, -1, 1)
        u0 = sample_ic(g, lambda x: np.where(x < 0, 1.0, 1.2))
        sch = SchemeConfig("rusanov", 0.5, "outflow")
        run, path = r2.run_powerlaw(1.0, u0, np.zeros(nx), 0.3, sch)
        u, _ = r2.reconstruct_powerlaw(run, path)
        ic = CellField(g, np.stack([u0.data[0], np.zeros(nx)]))
        eul = solve(r2.build_powerlaw_eulerian(1.0), ic, 0.3, sch)
        errs.append(np.sum(np.abs(u.frames[-1, 0] - eul.frames[-1, 0])) * g.dx)
    assert errs[0] / errs[1] >= 1.5 and errs[1] / errs[2] >= 1.5
