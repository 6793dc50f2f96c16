"""Symmetric functions against enumeration oracles and exact arithmetic."""

import numpy as np
import pytest

from hessianlab import oracles, symfun
from hessianlab.symfun import (
    Spectrum,
    SymmetricMatrixValue,
    check_identities,
    check_identities_exact,
    sigma,
    sigma_deleted,
    sigma_exact,
    sigma_matrix,
    sum_hessian_jet,
)


def random_orthogonal(rng, n):
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


class TestSigma:
    def test_conventions(self):
        assert sigma(0, [5.0, -3.0]) == 1.0
        assert sigma(4, [1.0, 2.0, 3.0]) == 0.0

    def test_binomial_count(self):
        assert sigma(2, [1.0, 1.0, 1.0]) == pytest.approx(3.0)

    def test_triple_product_vs_enumeration(self):
        lam = [1.0, 2.0, 3.0]
        assert sigma(3, lam) == pytest.approx(6.0)
        assert sigma(3, lam) == pytest.approx(oracles.sigma_subsets(3, lam))

    def test_negative_order_rejected(self):
        with pytest.raises(ValueError):
            sigma(-1, [1.0, 2.0])

    def test_matches_enumeration_on_random_spectra(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            n = rng.integers(2, 9)
            lam = rng.uniform(-3, 3, size=n)
            for k in range(n + 1):
                want = oracles.sigma_subsets(k, lam)
                assert sigma(k, lam) == pytest.approx(want, rel=1e-12, abs=1e-12)

    def test_exact_equals_enumeration_on_integer_spectra(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            n = int(rng.integers(2, 11))
            lam = [int(v) for v in rng.integers(-9, 10, size=n)]
            for k in range(n + 1):
                assert sigma_exact(k, lam) == oracles.sigma_subsets_exact(k, lam)


class TestSigmaMatrix:
    def test_identity_determinant(self):
        assert sigma_matrix(3, np.eye(3)) == pytest.approx(1.0)

    def test_order_one_is_trace(self):
        rng = np.random.default_rng(2)
        a = rng.standard_normal((4, 4))
        a = a + a.T
        assert sigma_matrix(1, a) == pytest.approx(np.trace(a), rel=1e-12)

    def test_matches_principal_minors(self):
        rng = np.random.default_rng(3)
        for _ in range(25):
            a = rng.standard_normal((5, 5))
            a = a + a.T
            want = oracles.principal_minor_sum(2, a)
            assert sigma_matrix(2, a) == pytest.approx(want, rel=1e-9)

    def test_order_out_of_range(self):
        with pytest.raises(ValueError):
            sigma_matrix(0, np.eye(3))
        with pytest.raises(ValueError):
            sigma_matrix(4, np.eye(3))

    def test_orthogonal_invariance(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            n = int(rng.integers(3, 7))
            a = rng.standard_normal((n, n))
            a = a + a.T
            q = random_orthogonal(rng, n)
            rotated = q @ a @ q.T
            for k in range(1, n + 1):
                base = sigma_matrix(k, a)
                assert sigma_matrix(k, rotated) == pytest.approx(
                    base, rel=1e-8, abs=1e-8
                )


class TestSigmaDeleted:
    def test_single_deletion(self):
        assert sigma_deleted(2, [10.0, 1.0, -0.4], [0]) == pytest.approx(-0.4)

    def test_double_deletion_leaves_one_variable(self):
        assert sigma_deleted(1, [7.0, 11.0, 5.0], [0, 1]) == pytest.approx(5.0)

    def test_order_beyond_remaining_size(self):
        assert sigma_deleted(3, [1.0, 2.0, 3.0], [1]) == 0.0

    def test_bad_indices(self):
        with pytest.raises(ValueError):
            sigma_deleted(1, [1.0, 2.0, 3.0], [0, 0])
        with pytest.raises(ValueError):
            sigma_deleted(1, [1.0, 2.0, 3.0], [5])
        with pytest.raises(ValueError):
            sigma_deleted(1, [1.0, 2.0, 3.0], [0, 1, 2])


class TestSumHessianJet:
    def test_all_ones_value(self):
        jet = sum_hessian_jet(3, [1.0, 1.0, 1.0])
        assert jet.value == pytest.approx(4.0)

    def test_gradient_by_deleted_expansion(self):
        jet = sum_hessian_jet(3, [10.0, 1.0, -0.4])
        assert jet.gradient[0] == pytest.approx(0.2)
        assert jet.gradient[1] == pytest.approx(5.6)
        assert jet.gradient[2] == pytest.approx(21.0)

    def test_hessian_diagonal_is_zero(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            n = int(rng.integers(2, 9))
            k = int(rng.integers(1, n + 1))
            jet = sum_hessian_jet(k, rng.uniform(-2, 4, size=n))
            assert np.all(np.diag(jet.hessian) == 0.0)
            assert np.allclose(jet.hessian, jet.hessian.T)

    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(6)
        for _ in range(60):
            n = int(rng.integers(3, 9))
            k = int(rng.integers(1, n + 1))
            lam = rng.uniform(-2, 4, size=n)
            jet = sum_hessian_jet(k, lam)
            fd = oracles.fd_gradient(
                lambda x: symfun.sum_hessian(k, x), lam, step=1e-5
            )
            assert np.allclose(jet.gradient, fd, rtol=1e-5, atol=1e-5)

    def test_hessian_matches_finite_differences(self):
        rng = np.random.default_rng(7)
        for _ in range(40):
            n = int(rng.integers(3, 9))
            k = int(rng.integers(1, n + 1))
            lam = rng.uniform(-2, 4, size=n)
            jet = sum_hessian_jet(k, lam)
            fd = oracles.fd_hessian_of_gradient(
                lambda x: sum_hessian_jet(k, x).gradient, lam, step=1e-5
            )
            np.fill_diagonal(fd, 0.0)  # S_k^{pp,pp} = 0 analytically
            assert np.allclose(jet.hessian, fd, rtol=1e-5, atol=1e-5)

    def test_order_validation(self):
        with pytest.raises(ValueError):
            sum_hessian_jet(0, [1.0, 2.0])
        with pytest.raises(ValueError):
            sum_hessian_jet(4, [1.0, 2.0, 3.0])


class TestIdentities:
    def test_zero_vector(self):
        res = check_identities(3, np.zeros(5))
        assert np.all(res == 0.0)

    def test_hand_expansion_n3_k2(self):
        # sum_p lam_p S_{1;p} at (1,1,1): each term lam_p (sigma_{1;p} + 1) = 3,
        # total 9 = 2 sigma_2 + sigma_1
        res = check_identities(2, [1.0, 1.0, 1.0])
        assert np.all(res < 1e-14)

    def test_trailing_sum_collapses_at_k_equals_n(self):
        # sum_p S_{3;p} over n=3 leaves only sigma_{2;p} terms: equals sigma_2
        rng = np.random.default_rng(8)
        for _ in range(20):
            res = check_identities(3, rng.uniform(-3, 3, size=3))
            sk = symfun.sum_hessian(3, rng.uniform(-3, 3, size=3))
            assert np.all(res <= 1e-10 * (1.0 + abs(sk)))

    def test_random_spectra_residual_bound(self):
        rng = np.random.default_rng(9)
        for _ in range(200):
            n = int(rng.integers(2, 9))
            k = int(rng.integers(1, n + 1))
            lam = rng.uniform(-5, 5, size=n) * rng.choice([1.0, 10.0, 100.0])
            sk = symfun.sum_hessian(k, lam)
            res = check_identities(k, lam)
            assert np.all(res <= 1e-10 * (1.0 + abs(sk)))

    def test_exact_certification_on_integer_spectra(self):
        rng = np.random.default_rng(10)
        for _ in range(20):
            n = int(rng.integers(2, 8))
            k = int(rng.integers(1, n + 1))
            lam = [int(v) for v in rng.integers(-6, 7, size=n)]
            assert all(r == 0 for r in check_identities_exact(k, lam))


class TestDomainTypes:
    def test_spectrum_sorted_view(self):
        s = Spectrum(np.array([1.0, 5.0, -2.0]))
        assert s.n == 3
        assert np.all(s.sorted_desc().values == [5.0, 1.0, -2.0])

    def test_spectrum_needs_two_entries(self):
        with pytest.raises(ValueError):
            Spectrum(np.array([1.0]))

    def test_matrix_symmetrized_on_construction(self):
        m = SymmetricMatrixValue(np.array([[1.0, 2.0], [0.0, 3.0]]))
        assert m.entries[0, 1] == m.entries[1, 0] == 1.0

    def test_matrix_eigenvalues_descending(self):
        m = SymmetricMatrixValue(np.diag([1.0, 3.0, 2.0]))
        assert np.all(m.eigenvalues().values == [3.0, 2.0, 1.0])
