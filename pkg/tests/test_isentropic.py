import numpy as np
import pytest

from weakpaths.core import (
    check_extension_compatibility, check_extension_convexity, make_grid,
    sample_ic)
from weakpaths.isentropic import (
    PressureLaw, build_eulerian_isentropic, build_pp_isentropic, energy_extension,
    eulerian_data, gamma_law, internal_energy, lift_extension_isentropic,
    pp_data, pp_velocity, reconstruct_isentropic, run_pp_isentropic,
    verify_extension_pde)
from weakpaths.solver import SchemeConfig


def test_pressure_law_checks():
    with pytest.raises(ValueError, match="hyperbolicity"):
        PressureLaw(lambda r: -r, lambda r: -np.ones_like(r)).check()
    # p = -1/rho has p' > 0 but 2p' + rho p'' = 0
    with pytest.raises(ValueError, match="nonlinearity"):
        PressureLaw(lambda r: -1 / r, lambda r: 1 / r ** 2).check()


def test_quadrature_internal_energy_matches_closed_form():
    closed = gamma_law(1.0, 2.0)
    generic = PressureLaw(closed.p, closed.pp)
    F1, _ = internal_energy(closed)
    F2, Fp2 = internal_energy(generic)
    r = np.linspace(0.5, 3.0, 11)
    # F'' = p'/rho fixes F up to an affine term; compare second differences
    d2 = lambda F: F(r + 1e-3) - 2 * F(r) + F(r - 1e-3)
    np.testing.assert_allclose(d2(F1), d2(F2), rtol=1e-6)


@pytest.mark.parametrize("kappa, alpha", [(1.0, 2.0), (0.5, 1.4), (2.0, 3.0)])
def test_energy_pair_compatible_and_convex(kappa, alpha):
    pl = gamma_law(kappa, alpha)
    ext = energy_extension(pl)
    eul = build_eulerian_isentropic(pl)
    assert check_extension_compatibility(eul, ext) < 1e-6
    assert check_extension_convexity(eul, ext) > 0
    pp = build_pp_isentropic(pl)
    lifted = lift_extension_isentropic(ext)
    assert check_extension_compatibility(pp, lifted) < 1e-6


def test_energy_satisfies_extension_pde():
    pl = gamma_law()
    ext = energy_extension(pl)
    rng = np.random.default_rng(0)
    samples = np.stack([rng.uniform(0.5, 2, 50), rng.uniform(-1, 1, 50)])
    # E(rho, rho u) as a function of (rho, u) rewritten in (x, y) = (rho, m)
    assert verify_extension_pde(lambda S: ext.E(S), pl, samples) < 1e-3


def test_pp_data_and_velocity():
    U = pp_data(np.array([2.0]), np.array([0.5]))
    np.testing.assert_allclose(U[:, 0], [1.0, 1.0, 2.0])
    assert pp_velocity(U)[0] == pytest.approx(0.5)
    np.testing.assert_allclose(eulerian_data(2.0, 0.5), [2.0, 1.0])


def test_reconstruction_of_uniform_flow():
    pl = gamma_law()
    g = make_grid("torus", 20)
    rho0 = sample_ic(g, lambda x: np.full_like(x, 1.2))
    run, path = run_pp_isentropic(pl, rho0, np.full(20, -0.4), 0.3,
                                  SchemeConfig("rusanov", 0.5, "periodic", (0.1,)))
    rho, u = reconstruct_isentropic(run, path)
    np.testing.assert_allclose(rho.frames, 1.2, atol=1e-13)
    np.testing.assert_allclose(u.frames, -0.4, atol=1e-13)
