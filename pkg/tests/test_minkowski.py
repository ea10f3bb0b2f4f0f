import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lightlike import minkowski as mk

finite = st.floats(-1e3, 1e3, allow_nan=False)
vec = st.tuples(finite, finite, finite).map(np.array)
E0, E1, E2 = np.eye(3)


def test_basis_products():
    assert mk.scalar_product(E0, E0) == -1.0
    assert mk.scalar_product(E1, E2) == 0.0
    assert mk.scalar_product([1, 1, 0], [-1, 1, 0]) == 2.0


def test_cross_examples():
    np.testing.assert_array_equal(mk.lorentz_cross(E1, E2), [-1, 0, 0])
    np.testing.assert_array_equal(mk.lorentz_cross(E0, E1), [0, 0, 1])


@pytest.mark.parametrize(
    "v, cls",
    [((1, 1, 0), "lightlike"), ((0, 3, 4), "spacelike"), ((2, 1, 1), "timelike"), ((0, 0, 0), "zero")],
)
def test_vector_classes(v, cls):
    assert mk.causal_class(v) == cls


@pytest.mark.parametrize("n, cls", [(E0, "spacelike"), ((1, 1, 0), "lightlike"), (E1, "timelike")])
def test_plane_classes(n, cls):
    assert mk.plane_causal_class(n) == cls


def test_non_finite_rejected():
    with pytest.raises(ValueError):
        mk.scalar_product([np.nan, 0, 0], E0)
    with pytest.raises(ValueError):
        mk.mvec(1.0, np.inf, 0.0)


@given(vec, vec, vec, finite)
def test_bilinear_symmetric(x, y, z, a):
    lhs = mk.scalar_product(a * x + y, z)
    rhs = a * mk.scalar_product(x, z) + mk.scalar_product(y, z)
    assert abs(lhs - rhs) <= 1e-9 * (1 + abs(a)) * (1 + np.abs(x).sum() + np.abs(y).sum()) * (1 + np.abs(z).sum())
    assert mk.scalar_product(x, y) == mk.scalar_product(y, x)


@given(vec, vec)
def test_cross_orthogonal(x, y):
    c = mk.lorentz_cross(x, y)
    # rounding in <x cross y, x> scales like eps |x|^2 |y|; floor for subnormals
    nx, ny = np.linalg.norm(x), np.linalg.norm(y)
    assert abs(mk.scalar_product(c, x)) <= 1e-14 * nx * nx * ny + 1e-300
    assert abs(mk.scalar_product(c, y)) <= 1e-14 * nx * ny * ny + 1e-300


@given(vec, vec, vec)
def test_cross_is_determinant(x, y, z):
    lhs = mk.scalar_product(mk.lorentz_cross(x, y), z)
    rhs = mk.det3(x, y, z)
    assert abs(lhs - rhs) <= 1e-9 * (1 + np.linalg.norm(x) * np.linalg.norm(y) * np.linalg.norm(z))


@given(vec, vec)
def test_cross_antisymmetric(x, y):
    np.testing.assert_allclose(mk.lorentz_cross(x, y), -mk.lorentz_cross(y, x))
    np.testing.assert_array_equal(mk.lorentz_cross(x, x), 0.0)


def _plane_class_by_gram(n):
    # basis of {x : <x, n> = 0} and the eigenvalues of its induced Gram matrix
    _, _, vt = np.linalg.svd((mk.METRIC * n)[None, :])
    B = vt[1:]
    g = np.array([[mk.scalar_product(a, b) for b in B] for a in B])
    w = np.linalg.eigvalsh(g)
    if abs(w).min() <= 1e-9 * abs(w).max():
        return "lightlike"
    return "spacelike" if w.min() > 0 else "timelike"


def test_plane_duality_random():
    rng = np.random.default_rng(7)
    n = rng.normal(size=(1000, 3))
    for v in n:
        assert mk.plane_causal_class(v) == _plane_class_by_gram(v)
    # exactly null normals too
    for th in rng.uniform(0, 2 * np.pi, 50):
        v = np.array([1.0, np.cos(th), np.sin(th)])
        assert mk.plane_causal_class(v) == "lightlike" == _plane_class_by_gram(v)
