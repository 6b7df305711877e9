import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import haar_unitary
from dilatron.errors import NotHermitian, NotPSD, ShapeMismatch
from dilatron.linalg import (
    adjoint,
    as_cmatrix,
    block_assemble,
    herm_eig,
    numerical_rank,
    operator_norm,
    psd_sqrt,
    svd,
)


def sigma_max_2x2(a):
    # closed form: sigma^2 are the roots of x^2 - tr(A*A) x + |det A|^2
    g = np.trace(adjoint(a) @ a).real
    d = abs(np.linalg.det(a)) ** 2
    return np.sqrt((g + np.sqrt(g * g - 4 * d)) / 2)


class TestPsdSqrt:
    def test_identity(self):
        np.testing.assert_allclose(psd_sqrt(np.eye(3)), np.eye(3), atol=1e-14)

    def test_diagonal(self):
        np.testing.assert_allclose(psd_sqrt(np.diag([4.0, 1.0, 0.0])), np.diag([2.0, 1.0, 0.0]), atol=1e-14)

    def test_defect_of_shift(self):
        t = np.array([[0, 0.8], [0, 0]])
        a = np.eye(2) - adjoint(t) @ t
        s = psd_sqrt(a)
        assert np.max(np.abs(s @ s - a)) <= 1e-12
        np.testing.assert_allclose(s, adjoint(s))

    def test_clamps_tiny_negative(self):
        s = psd_sqrt(np.diag([1.0, -1e-12]))
        np.testing.assert_allclose(s, np.diag([1.0, 0.0]), atol=1e-14)

    def test_rejects_negative(self):
        with pytest.raises(NotPSD):
            psd_sqrt(np.diag([1.0, -1e-3]))

    def test_rejects_nonhermitian(self):
        with pytest.raises(NotHermitian):
            psd_sqrt(np.array([[1.0, 1.0], [0.0, 1.0]]))


class TestOperatorNorm:
    def test_zero(self):
        assert operator_norm(np.zeros((3, 2))) == 0.0

    def test_diagonal(self):
        assert operator_norm(np.diag([0.3, -0.7])) == pytest.approx(0.7, abs=1e-15)

    def test_nilpotent_against_closed_form(self):
        a = np.array([[0.0, 1.0], [0.0, 0.0]])
        assert sigma_max_2x2(a) == pytest.approx(1.0, abs=1e-15)
        assert operator_norm(a) == pytest.approx(sigma_max_2x2(a), abs=1e-14)

    def test_random_2x2_against_closed_form(self, rng):
        for _ in range(20):
            a = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
            assert operator_norm(a) == pytest.approx(sigma_max_2x2(a), rel=1e-12)


class TestNumericalRank:
    def test_identity(self):
        assert numerical_rank(np.eye(4), 1e-10) == 4

    def test_zero(self):
        assert numerical_rank(np.zeros((4, 4)), 1e-10) == 0

    def test_defect_of_partial_isometry(self):
        # sigma(D_T) = (0, sqrt(0.75)) for T = diag(1, 0.5)
        d = psd_sqrt(np.eye(2) - np.diag([1.0, 0.25]))
        np.testing.assert_allclose(np.sort(np.linalg.svd(d, compute_uv=False)), [0, np.sqrt(0.75)], atol=1e-15)
        assert numerical_rank(d, 1e-10) == 1

    def test_negative_tol(self):
        with pytest.raises(ValueError):
            numerical_rank(np.eye(2), -1.0)


class TestBlockAssemble:
    def test_single(self, rng):
        a = rng.standard_normal((2, 3))
        np.testing.assert_array_equal(block_assemble([[a]], [2], [3]), a)

    def test_identity_diagonal(self):
        i2 = np.eye(2)
        np.testing.assert_array_equal(block_assemble([[i2, None], [None, i2]], [2, 2], [2, 2]), np.eye(4))

    def test_halmos_grid_of_zero(self):
        u = block_assemble([[0.0, 1.0], [1.0, -0.0]], [1, 1], [1, 1])
        np.testing.assert_array_equal(u, [[0, 1], [1, 0]])

    def test_shape_mismatch(self):
        with pytest.raises(ShapeMismatch):
            block_assemble([[np.eye(2), None]], [2], [3, 1])

    def test_all_present_equals_concatenation(self, rng):
        blocks = [[rng.standard_normal((r, c)) for c in (1, 3)] for r in (2, 2, 1)]
        np.testing.assert_array_equal(block_assemble(blocks, [2, 2, 1], [1, 3]), np.block(blocks))


def test_as_cmatrix_rejects_nan():
    with pytest.raises(ValueError, match=r"\(1, 0\)"):
        as_cmatrix([[1.0, 2.0], [np.nan, 0.0]])


def test_herm_eig_and_svd_residuals(rng):
    a = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    h = a + adjoint(a)
    w, q = herm_eig(h)
    assert np.all(np.diff(w) >= 0)
    assert operator_norm(h @ q - q * w) <= 1e-10 * operator_norm(h)
    assert operator_norm(adjoint(q) @ q - np.eye(6)) <= 1e-10
    u, s, v = svd(a)
    assert np.all(np.diff(s) <= 0)
    assert operator_norm(a - (u * s) @ adjoint(v)) <= 1e-10 * operator_norm(a)


# properties

sizes = st.integers(min_value=1, max_value=20)
seeds = st.integers(min_value=0, max_value=2**32 - 1)


@settings(max_examples=60, deadline=None)
@given(n=sizes, m=sizes, seed=seeds)
def test_norm_of_adjoint(n, m, seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))
    assert abs(operator_norm(a) - operator_norm(adjoint(a))) <= 1e-12 * max(1.0, operator_norm(a))


@settings(max_examples=60, deadline=None)
@given(n=sizes, rank=st.integers(min_value=0, max_value=20), seed=seeds)
def test_psd_sqrt_squares_back(n, rank, seed):
    rng = np.random.default_rng(seed)
    b = rng.standard_normal((n, min(rank, n))) + 1j * rng.standard_normal((n, min(rank, n)))
    a = b @ adjoint(b)
    s = psd_sqrt(a)
    assert operator_norm(s @ s - a) <= 1e-10 * (1 + operator_norm(a))
    assert np.linalg.eigvalsh(s)[0] >= -1e-12


@settings(max_examples=60, deadline=None)
@given(n=st.integers(min_value=1, max_value=10), r=st.integers(min_value=0, max_value=10), seed=seeds)
def test_rank_unitarily_invariant(n, r, seed):
    rng = np.random.default_rng(seed)
    r = min(r, n)
    # singular values far from the threshold on both sides
    s = np.concatenate([rng.uniform(0.1, 1.0, r), np.full(n - r, 1e-13)])
    a = (haar_unitary(rng, n) * s) @ haar_unitary(rng, n)
    u = haar_unitary(rng, n)
    assert numerical_rank(a) == r
    assert numerical_rank(u @ a) == numerical_rank(a) == numerical_rank(a @ u)
