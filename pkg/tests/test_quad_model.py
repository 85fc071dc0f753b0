"""Quadratic objective: construction, calculus, and the spectral norm."""

import numpy as np
import pytest

from qcqo import QuadraticProgram, symmetrize


def finite_difference_gradient(qp, w, h=1e-5):
    """Independent central-difference oracle for the gradient."""
    w = np.asarray(w, dtype=np.float64)
    grad = np.zeros_like(w)
    for i in range(w.size):
        bump = np.zeros_like(w)
        bump[i] = h
        grad[i] = (qp.loss(w + bump) - qp.loss(w - bump)) / (2.0 * h)
    return grad


def jacobi_eigenvalues(matrix, max_sweeps=100):
    """Independent eigenvalue oracle: classical cyclic Jacobi rotations."""
    A = np.array(matrix, dtype=np.float64)
    n = A.shape[0]
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(A**2) - np.sum(np.diag(A) ** 2))
        if off < 1e-13:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if A[p, q] == 0.0:
                    continue
                tau = (A[q, q] - A[p, p]) / (2.0 * A[p, q])
                if tau >= 0.0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau**2))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau**2))
                c = 1.0 / np.sqrt(1.0 + t**2)
                s = t * c
                G = np.eye(n)
                G[p, p] = G[q, q] = c
                G[p, q] = s
                G[q, p] = -s
                A = G.T @ A @ G
    assert np.sqrt(np.sum(A**2) - np.sum(np.diag(A) ** 2)) < 1e-10
    return np.sort(np.diag(A))


class TestSymmetrize:
    def test_strictly_upper_triangular(self):
        result = symmetrize(np.array([[0.0, 2.0], [0.0, 0.0]]))
        assert np.array_equal(result, np.array([[0.0, 1.0], [1.0, 0.0]]))

    def test_symmetric_matrix_unchanged(self):
        m = np.array([[1.0, 2.0], [2.0, 5.0]])
        assert np.array_equal(symmetrize(m), m)

    def test_rejects_nonsquare(self):
        with pytest.raises(ValueError):
            symmetrize(np.zeros((2, 3)))

    def test_quadratic_form_invariant(self):
        rng = np.random.default_rng(11)
        m = rng.standard_normal((5, 5))
        sym = symmetrize(m)
        for _ in range(100):
            w = rng.standard_normal(5)
            assert w @ m @ w == pytest.approx(w @ sym @ w, abs=1e-12 * (1 + abs(w @ m @ w)))


class TestQuadraticProgram:
    def test_identity_loss(self):
        qp = QuadraticProgram(A=np.eye(2), a=np.zeros(2), c=0.0)
        assert qp.loss(np.array([3.0, 4.0])) == 25.0

    def test_loss_at_origin_is_constant(self):
        qp = QuadraticProgram(A=np.eye(3), a=np.ones(3), c=7.5)
        assert qp.loss(np.zeros(3)) == 7.5

    def test_hand_expanded_loss(self):
        qp = QuadraticProgram(A=np.diag([1.0, 2.0]), a=np.array([1.0, -1.0]), c=3.0)
        assert qp.loss(np.array([1.0, 1.0])) == pytest.approx(6.0)

    def test_asymmetric_input_same_loss(self):
        rng = np.random.default_rng(2)
        raw = rng.standard_normal((4, 4))
        qp_raw = QuadraticProgram(A=raw, a=np.zeros(4))
        qp_sym = QuadraticProgram(A=symmetrize(raw), a=np.zeros(4))
        for _ in range(50):
            w = rng.standard_normal(4)
            assert qp_raw.loss(w) == pytest.approx(qp_sym.loss(w), rel=1e-14, abs=1e-14)

    def test_stored_matrix_is_symmetric_and_readonly(self):
        qp = QuadraticProgram(A=np.array([[0.0, 2.0], [0.0, 0.0]]), a=np.zeros(2))
        assert np.array_equal(qp.A, qp.A.T)
        with pytest.raises(ValueError):
            qp.A[0, 0] = 1.0

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(ValueError):
            QuadraticProgram(A=np.eye(2), a=np.zeros(3))
        qp = QuadraticProgram(A=np.eye(2), a=np.zeros(2))
        with pytest.raises(ValueError):
            qp.loss(np.zeros(3))
        with pytest.raises(ValueError):
            qp.gradient(np.zeros(1))


class TestGradient:
    def test_identity_gradient(self):
        qp = QuadraticProgram(A=np.eye(2), a=np.zeros(2))
        assert np.array_equal(qp.gradient(np.array([1.0, 0.0])), np.array([2.0, 0.0]))

    def test_zero_at_stationary_point(self):
        # minimizer of w'Aw + a'w solves 2Aw = -a
        rng = np.random.default_rng(3)
        B = rng.standard_normal((4, 4))
        A = B @ B.T + 0.5 * np.eye(4)
        a = rng.standard_normal(4)
        w_star = np.linalg.solve(2.0 * A, -a)
        qp = QuadraticProgram(A=A, a=a)
        assert np.linalg.norm(qp.gradient(w_star)) < 1e-10

    def test_matches_finite_differences(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            d = int(rng.integers(1, 7))
            A = rng.uniform(-3.0, 3.0, size=(d, d))
            a = rng.uniform(-3.0, 3.0, size=d)
            qp = QuadraticProgram(A=A, a=a, c=float(rng.standard_normal()))
            w = rng.uniform(-2.0, 2.0, size=d)
            expected = finite_difference_gradient(qp, w)
            assert np.allclose(qp.gradient(w), expected, atol=1e-5, rtol=1e-5)

    def test_psd_minimum_is_global(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            d = int(rng.integers(2, 6))
            B = rng.standard_normal((d, d))
            A = B @ B.T + 0.1 * np.eye(d)
            a = rng.standard_normal(d)
            qp = QuadraticProgram(A=A, a=a)
            w_star = np.linalg.solve(2.0 * A, -a)
            loss_star = qp.loss(w_star)
            for _ in range(20):
                assert qp.loss(w_star + rng.standard_normal(d)) >= loss_star - 1e-9


class TestSpectralNorm:
    def test_diagonal(self):
        qp = QuadraticProgram(A=np.diag([3.0, -5.0]), a=np.zeros(2))
        assert qp.spectral_norm() == pytest.approx(5.0, rel=1e-8)

    def test_identity(self):
        qp = QuadraticProgram(A=np.eye(6), a=np.zeros(6))
        assert qp.spectral_norm() == pytest.approx(1.0, rel=1e-10)

    def test_zero_matrix(self):
        qp = QuadraticProgram(A=np.zeros((3, 3)), a=np.zeros(3))
        assert qp.spectral_norm() == 0.0

    def test_matches_jacobi_oracle(self):
        rng = np.random.default_rng(6)
        for trial in range(10):
            d = int(rng.integers(2, 9))
            A = symmetrize(rng.standard_normal((d, d)) * float(rng.uniform(0.1, 10.0)))
            qp = QuadraticProgram(A=A, a=np.zeros(d))
            eigenvalues = jacobi_eigenvalues(A)
            expected = max(abs(eigenvalues[0]), abs(eigenvalues[-1]))
            assert qp.spectral_norm() == pytest.approx(expected, rel=1e-8)

    def test_one_dimensional(self):
        qp = QuadraticProgram(A=np.array([[-4.0]]), a=np.zeros(1))
        assert qp.spectral_norm() == pytest.approx(4.0, rel=1e-10)
