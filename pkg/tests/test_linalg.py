import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from aiep_pso import linalg
from aiep_pso.aiep import toy_system
from aiep_pso.errors import DimensionMismatch, NotPositiveDefinite, NotSymmetric

from oracles import determinant_roots, random_spd, random_sym


class TestGeneralizedEig:
    def test_toy_first_two_eigenvalues(self):
        s = toy_system()
        spec = linalg.generalized_eig(s.M, s.K, 2)
        np.testing.assert_allclose(np.round(spec.eigenvalues, 2), [10.99, 19.12])

    def test_diagonal(self):
        spec = linalg.generalized_eig(np.eye(3), np.diag([4.0, 9.0, 25.0]), 3)
        np.testing.assert_allclose(spec.eigenvalues, [4, 9, 25], atol=1e-12)

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
    def test_matches_determinant_roots(self, rng, n):
        for _ in range(5):
            M = random_spd(n, rng)
            K = random_sym(n, rng)
            ours = linalg.generalized_eig(M, K).eigenvalues
            np.testing.assert_allclose(ours, determinant_roots(M, K), rtol=1e-8, atol=1e-8)

    def test_residual_bound(self, rng):
        M, K = random_spd(8, rng), random_sym(8, rng)
        spec = linalg.generalized_eig(M, K, 5)
        bound = 1e-8 * (np.linalg.norm(K) + np.abs(spec.eigenvalues) * np.linalg.norm(M))
        assert np.all(linalg.residuals(M, K, spec) <= bound)

    def test_m_orthonormal(self, rng):
        M, K = random_spd(7, rng), random_sym(7, rng)
        V = linalg.generalized_eig(M, K).eigenvectors
        np.testing.assert_allclose(V.T @ M @ V, np.eye(7), atol=1e-8)

    def test_full_solve_has_n_eigenvalues_sorted(self, rng):
        M, K = random_spd(9, rng), random_sym(9, rng)
        w = linalg.generalized_eig(M, K).eigenvalues
        assert w.size == 9
        assert np.all(np.diff(w) >= 0)

    def test_shift_consistency(self, rng):
        M, K = random_spd(6, rng), random_sym(6, rng)
        s = rng.uniform(-5, 5)
        a = linalg.generalized_eig(M, K).eigenvalues
        b = linalg.generalized_eig(M, K + s * M).eigenvalues
        np.testing.assert_allclose(b, a + s, atol=1e-8)

    def test_jacobi_agrees_with_lapack(self, rng):
        s = toy_system()
        a = linalg.generalized_eig(s.M, s.K, method="lapack")
        b = linalg.generalized_eig(s.M, s.K, method="jacobi")
        np.testing.assert_allclose(a.eigenvalues, b.eigenvalues, rtol=1e-12)
        # vectors agree up to sign
        signs = np.sign(np.sum(a.eigenvectors * b.eigenvectors, axis=0))
        np.testing.assert_allclose(a.eigenvectors, b.eigenvectors * signs, atol=1e-8)

    def test_eigvals_fast_path(self, rng):
        M, K = random_spd(12, rng), random_sym(12, rng)
        np.testing.assert_allclose(linalg.generalized_eigvals(M, K, 4),
                                   linalg.generalized_eig(M, K, 4).eigenvalues, atol=1e-9)

    def test_indefinite_mass_raises(self):
        with pytest.raises(NotPositiveDefinite):
            linalg.generalized_eig(np.diag([1.0, -1.0]), np.eye(2))

    def test_order_mismatch_raises(self):
        with pytest.raises(DimensionMismatch):
            linalg.generalized_eig(np.eye(2), np.eye(3))

    @pytest.mark.parametrize("k", [0, 4])
    def test_bad_count(self, k):
        with pytest.raises(DimensionMismatch):
            linalg.generalized_eig(np.eye(3), np.eye(3), k)


class TestStandardEig:
    def test_diagonal(self):
        np.testing.assert_allclose(linalg.standard_eig(np.diag([-1.0, 0.0, 7.0])).eigenvalues, [-1, 0, 7],
                                   atol=1e-14)

    def test_two_by_two(self):
        np.testing.assert_allclose(linalg.standard_eig([[2.0, 1.0], [1.0, 2.0]]).eigenvalues, [1, 3])

    def test_consistent_with_identity_mass(self):
        K = toy_system().K
        np.testing.assert_array_equal(linalg.standard_eig(K).eigenvalues,
                                      linalg.generalized_eig(np.eye(10), K).eigenvalues)

    def test_unit_vectors(self, rng):
        V = linalg.standard_eig(random_sym(5, rng)).eigenvectors
        np.testing.assert_allclose(np.linalg.norm(V, axis=0), 1.0)


class TestPositiveDefinite:
    def test_examples(self):
        assert linalg.is_positive_definite(np.diag(np.arange(1.0, 11.0)))
        assert not linalg.is_positive_definite(np.diag([1.0, -1.0]))

    def test_large_negative_perturbation(self, rng):
        M = np.diag(np.arange(1.0, 11.0))
        dM = -np.abs(random_sym(10, rng)) * 20
        dM = (dM + dM.T) / 2
        assert np.min(np.linalg.eigvalsh(M + dM)) < 0
        assert not linalg.is_positive_definite(M + dM)

    def test_tiny_pivot_rejected(self):
        assert not linalg.is_positive_definite(np.diag([1.0, 1e-13]))
        assert linalg.is_positive_definite(np.diag([1.0, 1e-11]))


class TestSymMatrix:
    def test_rejects_asymmetric(self):
        with pytest.raises(NotSymmetric):
            linalg.sym_matrix([[1.0, 2.0], [0.0, 1.0]])

    def test_upper_triangle_is_authoritative(self):
        a = np.array([[1.0, 2.0], [2.0 + 1e-14, 3.0]])
        out = linalg.sym_matrix(a)
        assert out[1, 0] == 2.0

    def test_system_pair_immutable(self):
        s = toy_system()
        with pytest.raises(ValueError):
            s.M[0, 0] = 5.0


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=1, max_value=6), st.integers(min_value=0, max_value=2**31 - 1))
def test_eigenvector_orthogonality_property(n, seed):
    rng = np.random.default_rng(seed)
    M, K = random_spd(n, rng), random_sym(n, rng)
    V = linalg.generalized_eig(M, K).eigenvectors
    off = V.T @ M @ V - np.eye(n)
    assert np.max(np.abs(off)) <= 1e-8


def test_matrix_file_roundtrip(tmp_path, rng):
    A = random_sym(4, rng)
    linalg.write_matrix(tmp_path / "a.txt", A)
    np.testing.assert_array_equal(linalg.read_matrix(tmp_path / "a.txt"), A)


def test_matrix_file_bad_shape(tmp_path):
    (tmp_path / "a.txt").write_text("3\n1 2 3\n4 5 6\n")
    with pytest.raises(DimensionMismatch):
        linalg.read_matrix(tmp_path / "a.txt")
