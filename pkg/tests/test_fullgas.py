import numpy as np
import pytest
from hypothesis import given, strategies as st

from weakpaths.core import (
    check_extension_compatibility, check_extension_convexity, make_grid,
    min_hessian_eigenvalue, sample_ic)
from weakpaths import fullgas
from weakpaths.fullgas import (
    GasState, build_gas2, build_gas_entropy, build_pp_energy, build_pp_entropy,
    build_pp_naive, check_M_negative_definite, convexity_matrix, exp_profile,
    fullgas_extension, inverse_profile, lift_extension_fullgas,
    lifted_energy_closed_form, lifted_entropy_closed_form, log_profile,
    pp_initial_data, reconstruct_fullgas, run_pp_gas)
from weakpaths.solver import SchemeConfig

ALPHA = 1.4


def test_gas_state():
    s = GasState(1.0, 2.0, 0.4, 1.4)
    assert s.e == pytest.approx(1.0) and s.E == pytest.approx(3.0)
    assert s.S == pytest.approx(np.log(0.4))
    np.testing.assert_allclose(s.energy_form(), [1.0, 2.0, 3.0])
    with pytest.raises(ValueError, match="non-physical"):
        GasState(-1.0, 0.0, 1.0, 1.4)
    with pytest.raises(ValueError, match="alpha"):
        GasState(1.0, 0.0, 1.0, 2.5)


@given(st.floats(0.1, 5), st.floats(-3, 3), st.floats(0.1, 5), st.floats(1.05, 1.95))
def test_primitive_round_trips(rho, u, p, alpha):
    W = np.array([[rho], [u], [p]])
    for fwd, back in ((fullgas.primitive_to_energy, fullgas.energy_to_primitive),
                      (fullgas.primitive_to_entropy, fullgas.entropy_to_primitive)):
        np.testing.assert_allclose(back(fwd(W, alpha), alpha), W, rtol=1e-10, atol=1e-12)


@pytest.mark.parametrize("form, build", [("energy", build_gas2), ("entropy", build_gas_entropy)])
@pytest.mark.parametrize("prof", [log_profile, inverse_profile])
def test_eulerian_extensions_compatible_and_convex(form, build, prof):
    ext = fullgas_extension(prof(), ALPHA, form)
    spec = build(ALPHA)
    assert check_extension_compatibility(spec, ext) < 1e-6
    if form == "energy":
        assert check_extension_convexity(spec, ext) > -1e-6
    elif prof is log_profile:
        # -rho S is linear in the entropy variables, so never strictly convex
        with pytest.raises(ValueError, match="convexity region"):
            check_extension_convexity(spec, ext)
    else:
        # rho Y(sigma/rho) is homogeneous of degree one: semidefinite Hessian
        assert check_extension_convexity(spec, ext) > -1e-4


@pytest.mark.parametrize("form, build", [("energy", build_pp_energy), ("entropy", build_pp_entropy)])
def test_lifted_extensions_compatible(form, build):
    ext = lift_extension_fullgas(log_profile(), ALPHA, form)
    assert check_extension_compatibility(build(ALPHA), ext) < 1e-6


@pytest.mark.parametrize("form", ["energy", "entropy"])
def test_lifted_closed_forms(form):
    rng = np.random.default_rng(0)
    W = fullgas.sample_physical(rng, 50)
    eta = rng.uniform(0.5, 2, 50)
    prof = inverse_profile()
    if form == "energy":
        U = fullgas._energy_pp_state(W, eta, ALPHA)
        closed = lifted_energy_closed_form(prof, ALPHA)
    else:
        U = fullgas._entropy_pp_state(W, eta, ALPHA)
        closed = lifted_entropy_closed_form(prof)
    lifted = lift_extension_fullgas(prof, ALPHA, form)
    np.testing.assert_allclose(lifted.E(U), closed(U), rtol=1e-12)


def test_naive_form_equals_entropy_form_on_smooth_data():
    # with eta = 1 initially r = p0 and the naive pressure is r eta^-alpha
    g = make_grid("torus", 50)
    rho = sample_ic(g, lambda x: 1 + 0.1 * np.sin(2 * np.pi * x))
    u = 0.1 * np.cos(2 * np.pi * g.centers)
    p = rho.data[0] ** ALPHA
    sch = SchemeConfig("rusanov", 0.5, "periodic", (0.05,))
    a, pa = run_pp_gas("naive", ALPHA, rho, u, p, 0.05, sch)
    b, pb = run_pp_gas("entropy", ALPHA, rho, u, p, 0.05, sch)
    ra = reconstruct_fullgas(a, "naive", ALPHA, pa)
    rb = reconstruct_fullgas(b, "entropy", ALPHA, pb)
    for fa, fb in zip(ra, rb):
        np.testing.assert_allclose(fa.frames, fb.frames, atol=1e-10)


def test_uniform_flow_reconstructs_exactly():
    g = make_grid("torus", 16)
    rho = sample_ic(g, lambda x: np.full_like(x, 1.1))
    for form in ("energy", "entropy", "naive"):
        run, path = run_pp_gas(form, ALPHA, rho, np.full(16, 0.2), np.full(16, 0.9),
                               0.2, SchemeConfig())
        r, u, p = reconstruct_fullgas(run, form, ALPHA, path)
        np.testing.assert_allclose(r.frames, 1.1, rtol=1e-13)
        np.testing.assert_allclose(u.frames, 0.2, rtol=1e-12)
        np.testing.assert_allclose(p.frames, 0.9, rtol=1e-12)


def test_static_rows_declared():
    assert build_pp_energy(ALPHA).static == (3,)
    assert build_pp_entropy(ALPHA).static == (2, 3)
    assert build_pp_naive(ALPHA).static == (2, 3)


def test_pp_initial_data_shapes():
    U = pp_initial_data("energy", 1.0, 0.5, 0.4, ALPHA)
    np.testing.assert_allclose(U, [1.0, 0.5, 0.4 / 0.4 + 0.125, 1.0])


def z_M(U, alpha):
    rho, m, eps = U
    return eps / rho ** alpha - m * m / (2 * rho ** (alpha + 1))


@pytest.mark.parametrize("alpha", [1.2, 1.4, 1.6, 1.8])
def test_M_negative_definite_iff_hessian_positive(alpha):
    """The matrix test agrees with the numerical Hessian of rho X(z_M), X = e^-z.

    States within 2% of the boundary z_M = (alpha - 1)/alpha are skipped.
    """
    rng = np.random.default_rng(1)
    U = fullgas.primitive_to_energy(fullgas.sample_physical(rng, 200), alpha)
    z = z_M(U, alpha)
    bound = (alpha - 1) / alpha
    keep = np.abs(z - bound) > 0.02 * bound
    U, z = U[:, keep], z[keep]
    E = lambda V: V[0] * np.exp(-z_M(V, alpha))
    hess_ok = min_hessian_eigenvalue(E, U) > 0
    m_ok = np.array([check_M_negative_definite(U[:, i], exp_profile(), alpha)[0]
                     for i in range(U.shape[1])])
    np.testing.assert_array_equal(m_ok, hess_ok)
    np.testing.assert_array_equal(m_ok, z > bound)


def test_convexity_matrix_rejects_vacuum():
    with pytest.raises(ValueError, match="non-physical"):
        convexity_matrix((1.0, 2.0, 1.0), exp_profile(), ALPHA)


def test_profile_sign_conditions():
    z = np.linspace(0.1, 5, 20)
    for prof in (exp_profile(), inverse_profile(), log_profile()):
        assert np.all(prof.sign_ok(z))
    with pytest.raises(ValueError, match="violates"):
        fullgas_extension(fullgas.ScalarProfile(lambda z: z, lambda z: 1 + 0 * z,
                                                lambda z: 0 * z, "z"), ALPHA, "energy")
