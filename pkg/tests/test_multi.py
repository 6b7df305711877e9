import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import doubly_commuting_tuple, haar_unitary, random_contraction
from dilatron.dilation import NDilation, egervary_dilation, graded_indices, verify_dilation
from dilatron.errors import (
    FugledeResidual,
    NotCommuting,
    NotContraction,
    NotDoublyCommuting,
    NotUnitary,
    ShapeMismatch,
)
from dilatron.linalg import adjoint, commutator_norm, operator_norm, unitarity_residual
from dilatron.multi import (
    ContractionTuple,
    brehmer_check,
    dilate_commutant_pair,
    dilation_stages,
    doubly_commuting_dilation,
    integer_indices,
    t_of_m,
    u_of_m,
    verify_regular,
)

S = np.array([[0.0, 1.0], [0.0, 0.0]])


def compressed_product(unitaries, exps, n):
    prod = np.eye(unitaries[0].shape[0], dtype=complex)
    for u, e in zip(unitaries, exps):
        prod = prod @ np.linalg.matrix_power(u, e)
    return prod[:n, :n]


class TestContractionTuple:
    def test_residuals(self):
        ct = ContractionTuple((S, S.T))
        assert ct.commute_residual == pytest.approx(1.0)
        assert ct.double_commute_residual == pytest.approx(operator_norm(S @ S - S @ S))
        assert ct.k == 2 and ct.n == 2 and len(ct) == 2

    def test_single_array(self):
        assert ContractionTuple(np.eye(2) * 0.5).k == 1

    def test_rejects(self):
        with pytest.raises(NotContraction):
            ContractionTuple((np.eye(2), 2 * np.eye(2)))
        with pytest.raises(ShapeMismatch):
            ContractionTuple((np.eye(2), np.eye(3)))
        with pytest.raises(ShapeMismatch):
            ContractionTuple(())


class TestDoublyCommuting:
    def test_single_zero_order_3(self):
        dil = doubly_commuting_dilation([np.zeros((1, 1))], 3)
        u = dil.unitary
        assert u.shape == (4, 4)
        for k in (1, 2, 3):
            assert abs(np.linalg.matrix_power(u, k)[0, 0]) <= 1e-15
        assert unitarity_residual(u) <= 1e-15

    def test_commuting_unitaries_stay_unitary(self, rng):
        q = haar_unitary(rng, 3)
        ops = [(q * np.exp(2j * np.pi * rng.random(3))) @ adjoint(q) for _ in range(2)]
        for stage in dilation_stages(ops, 2):
            for v in stage:
                assert unitarity_residual(v) <= 1e-12
        dil = doubly_commuting_dilation(ops, 2)
        rep = verify_dilation(dil, ops, 2)
        assert rep.passed and rep.max_residual <= 1e-14
        # H reduces every dilating unitary, which acts there as T_i
        for u, t in zip(dil.unitaries, ops):
            np.testing.assert_allclose(u[:3, :3], t, atol=1e-14)
            assert np.max(np.abs(u[:3, 3:])) <= 1e-14 and np.max(np.abs(u[3:, :3])) <= 1e-14

    def test_scalar_pair(self):
        t1, t2 = 0.5, 0.3j
        dil = doubly_commuting_dilation([np.array([[t1]]), np.array([[t2]])], 2)
        assert dil.dim == 9
        for a, b in graded_indices(2, 2):
            got = compressed_product(dil.unitaries, (a, b), 1)[0, 0]
            assert abs(got - t1**a * t2**b) <= 1e-10

    def test_rejects_non_doubly_commuting(self):
        with pytest.raises(NotDoublyCommuting):
            doubly_commuting_dilation([S, S], 1)

    def test_random_dimension_and_regularity(self, rng):
        for _ in range(25):
            k = int(rng.integers(1, 4))
            n = int(rng.integers(1, 4))
            order = int(rng.integers(1, 4))
            ops = doubly_commuting_tuple(rng, k, n)
            dil = doubly_commuting_dilation(ops, order)
            assert dil.dim == (order + 1) ** k * n
            reg = verify_regular(dil, ops, order)
            assert reg.passed, reg.max_residual
            # regular implies plain
            assert verify_dilation(dil, ops, order).passed
            for i, a in enumerate(dil.unitaries):
                for j, b in enumerate(dil.unitaries):
                    assert commutator_norm(a, b) <= 1e-10
                    if i != j:
                        assert commutator_norm(a, adjoint(b)) <= 1e-10


class TestTofM:
    def test_zero_index(self, rng):
        ops = doubly_commuting_tuple(rng, 3, 2)
        np.testing.assert_array_equal(t_of_m(ops, (0, 0, 0)), np.eye(2))

    def test_mixed_sign(self, rng):
        t1, t2 = random_contraction(rng, 3), random_contraction(rng, 3)
        np.testing.assert_allclose(t_of_m([t1, t2], (1, -1)), adjoint(t2) @ t1, atol=1e-15)

    def test_scalar_negative(self):
        assert t_of_m([np.array([[0.5]])], (-2,))[0, 0] == pytest.approx(0.25)

    def test_length_mismatch(self):
        with pytest.raises(ShapeMismatch):
            t_of_m([np.eye(2)], (1, 1))
        with pytest.raises(ShapeMismatch):
            u_of_m([np.eye(2)], (1, 1))

    def test_integer_indices(self):
        idx = integer_indices(2, 1)
        assert idx == [(0, 0), (-1, 0), (0, -1), (0, 1), (1, 0)]
        assert len(integer_indices(3, 2)) == 25


class TestVerifyRegular:
    def test_zero_index_residual(self, rng):
        ops = doubly_commuting_tuple(rng, 2, 2)
        rep = verify_regular(doubly_commuting_dilation(ops, 2), ops, 2)
        assert rep.residuals[(0, 0)] == 0.0

    def test_wrong_dilation_fails_at_unit_index(self, rng):
        t1 = np.diag([0.5, 0.2])
        t2 = np.diag([0.1, 0.9j])
        dil = doubly_commuting_dilation([t1, t2], 2)
        bad = NDilation((dil.unitaries[0], np.eye(dil.dim)), dil.h_dim, 2)
        rep = verify_regular(bad, [t1, t2], 2)
        assert not rep.passed
        assert rep.residuals[(0, 1)] == pytest.approx(operator_norm(t2 - np.eye(2)))
        assert rep.residuals[(1, 0)] <= 1e-12

    def test_egervary_need_not_be_regular_but_is_a_dilation(self):
        # for k = 1 the regular condition at -m is the adjoint of the one at m
        t = np.array([[0.0, 0.6], [0.0, 0.0]])
        dil = egervary_dilation(t, 3)
        assert verify_regular(dil, t, 3).passed


class TestBrehmer:
    def test_single_contraction(self, rng):
        for _ in range(10):
            t = random_contraction(rng, 3)
            rep = brehmer_check([t])
            assert rep.passed
            lam = np.linalg.eigvalsh(np.eye(3) - adjoint(t) @ t)[0]
            assert rep.min_eigenvalues[(0,)] == pytest.approx(lam, abs=1e-12)

    def test_doubly_commuting_passes(self, rng):
        for _ in range(20):
            ops = doubly_commuting_tuple(rng, int(rng.integers(1, 4)), int(rng.integers(1, 5)))
            rep = brehmer_check(ops)
            assert rep.passed
            assert min(rep.min_eigenvalues.values()) >= -1e-10

    def test_shift_pair_fails(self):
        # I - 2 S*S + (S^2)*(S^2) = diag(1, -1)
        assert np.allclose(np.eye(2) - 2 * adjoint(S) @ S, np.diag([1, -1]))
        rep = brehmer_check([S, S])
        assert not rep.passed
        assert rep.min_eigenvalues[(0, 1)] == pytest.approx(-1.0, abs=1e-12)
        assert list(rep.min_eigenvalues) == [(0,), (1,), (0, 1)]

    def test_cap(self):
        with pytest.raises(ValueError):
            brehmer_check([np.eye(1) * 0.5] * 3, max_k=2)


class TestCommutantPair:
    def test_identity_reduces_to_single(self, rng):
        v = random_contraction(rng, 2)
        dil = dilate_commutant_pair(np.eye(2), v, 3)
        assert dil.dim == 8
        assert verify_dilation(NDilation((dil.unitaries[1],), 2, 3), v, 3).passed
        np.testing.assert_allclose(dil.unitaries[0], np.eye(8))

    def test_diagonal(self):
        u = np.diag([1.0, 1j])
        v = np.diag([0.5, 0.2])
        dil = dilate_commutant_pair(u, v, 2)
        assert dil.dim == 6
        assert verify_dilation(dil, [u, v], 2).passed

    def test_rotation_and_scalar(self):
        th = 0.4
        u = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
        dil = dilate_commutant_pair(u, 0.7 * np.eye(2), 3)
        assert verify_dilation(dil, [u, 0.7 * np.eye(2)], 3).passed

    def test_errors(self):
        with pytest.raises(NotUnitary):
            dilate_commutant_pair(0.5 * np.eye(2), np.eye(2), 1)
        with pytest.raises(NotCommuting):
            dilate_commutant_pair(np.diag([1.0, -1.0]), 0.5 * np.array([[0, 1], [1, 0]]), 1)
        with pytest.raises(ShapeMismatch):
            dilate_commutant_pair(np.eye(2), np.eye(3) * 0.5, 1)

    def test_fuglede_residual(self):
        # exact unitaries give ||[u, v*]|| = ||u* [v, u] u*|| = ||[u, v]||, so
        # only an approximately unitary (here non-normal) u can trip this
        nil = np.array([[0.0, 1.0], [0.0, 0.0]])
        u = np.eye(2) + 1e-3 * nil
        u /= operator_norm(u)
        v = 0.5 * np.eye(2) + 0.3 * nil
        assert commutator_norm(u, v) <= 1e-16
        assert commutator_norm(u, adjoint(v)) > 1e-4
        with pytest.raises(FugledeResidual):
            dilate_commutant_pair(u, v, 1, eps_unit=1e-2)

    def test_unitary_u_has_equal_residuals(self, rng):
        u = haar_unitary(rng, 4)
        v = random_contraction(rng, 4)
        assert commutator_norm(u, adjoint(v)) == pytest.approx(commutator_norm(u, v), rel=1e-10)


# properties


@settings(max_examples=25, deadline=None)
@given(
    k=st.integers(min_value=1, max_value=3),
    n=st.integers(min_value=1, max_value=3),
    order=st.integers(min_value=1, max_value=3),
    seed=st.integers(min_value=0, max_value=2**32 - 1),
)
def test_stage_telescoping(k, n, order, seed):
    rng = np.random.default_rng(seed)
    ops = doubly_commuting_tuple(rng, k, n)
    stages = dilation_stages(ops, order)
    assert len(stages) == k + 1
    for j, stage in enumerate(stages):
        assert stage[0].shape[0] == (order + 1) ** j * n
        for m in integer_indices(k, order):
            # u_of_m is the literal signed product, valid for partial stages too
            assert operator_norm(t_of_m(ops, m) - u_of_m(stage, m)[:n, :n]) <= 1e-10


@settings(max_examples=25, deadline=None)
@given(
    n=st.integers(min_value=1, max_value=3),
    order=st.integers(min_value=1, max_value=4),
    seed=st.integers(min_value=0, max_value=2**32 - 1),
)
def test_commutant_pair_dimension(n, order, seed):
    rng = np.random.default_rng(seed)
    q = haar_unitary(rng, n)
    u = (q * np.exp(2j * np.pi * rng.random(n))) @ adjoint(q)
    v = (q * (0.9 * rng.random(n))) @ adjoint(q)
    dil = dilate_commutant_pair(u, v, order)
    assert dil.dim == (order + 1) * n
    assert verify_dilation(dil, [u, v], order).passed
