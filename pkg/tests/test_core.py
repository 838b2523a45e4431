import numpy as np
import pytest
from hypothesis import given, strategies as st

from weakpaths.core import (
    CellField, ConvexExtension, SpaceTimeField, TensorBump, make_grid,
    numerical_hessian, numerical_jacobian, positive_rows, sample_ic,
    total_variation, trapezoid_weights, check_extension_compatibility)
from weakpaths.scalar import burgers_system, scalar_extension_pair


def test_grid_geometry():
    g = make_grid("torus", 10, 0.0, 2.0)
    assert g.periodic and g.dx == pytest.approx(0.2)
    np.testing.assert_allclose(g.centers[[0, -1]], [0.1, 1.9])
    assert len(g.interfaces) == 11
    assert g.refine(2).nx == 20


@pytest.mark.parametrize("args, msg", [
    (("torus", 3), "at least 4"),
    (("disk", 10), "unknown topology"),
    (("line", 10, 1.0, 1.0), "degenerate"),
])
def test_grid_errors(args, msg):
    with pytest.raises(ValueError, match=msg):
        make_grid(*args)


def test_cellfield_rejects_nonfinite():
    g = make_grid("line", 5)
    with pytest.raises(ValueError, match="cell 2"):
        CellField(g, [1, 1, np.nan, 1, 1])
    with pytest.raises(ValueError, match="4 cells"):
        CellField(g, np.ones(4))


def test_cellfield_is_read_only():
    f = CellField(make_grid("line", 5), np.ones(5))
    with pytest.raises(ValueError):
        f.data[0, 0] = 2.0


@pytest.mark.parametrize("power", [0, 1, 2, 3, 4, 5])
def test_gauss_cell_averages_exact_for_quintics(power):
    g = make_grid("line", 7, -1.0, 2.0)
    f = sample_ic(g, lambda x: x ** power)
    xl, xr = g.interfaces[:-1], g.interfaces[1:]
    exact = (xr ** (power + 1) - xl ** (power + 1)) / ((power + 1) * g.dx)
    np.testing.assert_allclose(f.data[0], exact, rtol=1e-13, atol=1e-14)


def test_total_variation():
    assert total_variation(np.array([0.0, 1.0, 0.5, 2.0])) == pytest.approx(3.0)
    assert total_variation(np.array([0.0, 1.0, 0.5, 2.0]), periodic=True) == pytest.approx(5.0)


def test_spacetime_index_and_map():
    g = make_grid("torus", 4)
    f = SpaceTimeField(g, [0.0, 0.5], np.arange(16.0).reshape(2, 2, 4))
    assert f.index_of(0.5) == 1
    assert f.component(1).frames.shape == (2, 1, 4)
    np.testing.assert_array_equal(f.map(lambda U: U[0] + U[1]).frames[0, 0],
                                  [4, 6, 8, 10])


def test_positive_rows():
    ok = positive_rows(0, 2)(np.array([[1.0, 1.0, -1.0], [-5.0, 0, 0], [1.0, 0.0, 1.0]]))
    np.testing.assert_array_equal(ok, [True, False, False])


def test_numerical_hessian_of_quadratic_form():
    A = np.array([[2.0, 0.3, -0.1], [0.3, 1.0, 0.2], [-0.1, 0.2, 3.0]])
    U = np.random.default_rng(1).uniform(-1, 1, (3, 5))
    H = numerical_hessian(lambda V: 0.5 * np.einsum("in,ij,jn->n", V, A, V), U)
    np.testing.assert_allclose(H, np.broadcast_to(A, H.shape), atol=1e-5)


def test_numerical_jacobian_linear_map():
    A = np.array([[1.0, 2.0], [-3.0, 0.5]])
    J = numerical_jacobian(lambda V: A @ V, np.ones((2, 3)))
    np.testing.assert_allclose(J[..., 0], A, atol=1e-9)


@given(st.floats(-0.9, 0.9), st.floats(-0.9, 0.9))
def test_tensor_bump_derivatives(sx, st_):
    b = TensorBump(0.3, 0.5, 0.2, 0.1)
    x, t, h = 0.3 + 0.2 * sx, 0.5 + 0.1 * st_, 1e-6
    assert b.dx(x, t) == pytest.approx((b(x + h, t) - b(x - h, t)) / (2 * h), abs=1e-5)
    assert b.dt(x, t) == pytest.approx((b(x, t + h) - b(x, t - h)) / (2 * h), abs=1e-4)
    assert b(x, t) >= 0


def test_tensor_bump_vanishes_outside_support():
    b = TensorBump(0.0, 0.0, 1.0, 1.0)
    assert b(1.0, 0.0) == 0.0 and b(0.0, -1.5) == 0.0 and b(0.0, 0.0) == 1.0


@given(st.lists(st.floats(0.01, 1.0), min_size=1, max_size=20))
def test_trapezoid_weights_sum_to_span(gaps):
    t = np.concatenate([[0.0], np.cumsum(gaps)])
    assert trapezoid_weights(t).sum() == pytest.approx(t[-1])


def test_extension_compatibility_burgers():
    spec = burgers_system((-2, 2))
    ext = scalar_extension_pair(lambda r: r ** 2, lambda r: r, (-2, 2))
    assert check_extension_compatibility(spec, ext) < 1e-7
    bad = ConvexExtension("wrong flux", ext.E, lambda U: U[0] ** 2)
    assert check_extension_compatibility(spec, bad) > 0.1


@given(st.floats(-1.2, 1.2))
def test_bump_antiderivative(s):
    h = 1e-6
    assert (TensorBump._ib(s + h) - TensorBump._ib(s - h)) / (2 * h) == pytest.approx(
        float(TensorBump._b(np.array(s))), abs=1e-6)
    assert TensorBump._ib(-1.0) == pytest.approx(0.0, abs=1e-15)
    assert TensorBump._ib(1.0) == pytest.approx(32 / 35)
