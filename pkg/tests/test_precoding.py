import numpy as np
import pytest

from fcla.precoding import (RateReport, SingularMatrixError, normalize_columns,
                            rzf, rzf_objective, rzf_special, sinr)


def solve_gauss(A, B):
    """Partial-pivot Gaussian elimination, written independently of numpy.linalg."""
    A = np.array(A, dtype=complex)
    B = np.array(B, dtype=complex)
    n = A.shape[0]
    for col in range(n):
        pivot = col + np.argmax(np.abs(A[col:, col]))
        if abs(A[pivot, col]) < 1e-14 * max(1.0, np.abs(A).max()):
            raise ZeroDivisionError("pivot collapsed")
        if pivot != col:
            A[[col, pivot]] = A[[pivot, col]]
            B[[col, pivot]] = B[[pivot, col]]
        for row in range(col + 1, n):
            factor = A[row, col] / A[col, col]
            A[row, col:] -= factor * A[col, col:]
            B[row] -= factor * B[col]
    X = np.zeros_like(B)
    for row in range(n - 1, -1, -1):
        X[row] = (B[row] - A[row, row + 1:] @ X[row + 1:]) / A[row, row]
    return X


def rzf_oracle(H, alpha):
    K = H.shape[0]
    X = solve_gauss(H @ H.conj().T + alpha * np.eye(K), H)
    return X.conj().T


def random_channel(rng, k, n):
    return (rng.standard_normal((k, n)) + 1j * rng.standard_normal((k, n)))


class TestRzf:
    def test_identity_channel(self):
        assert np.allclose(rzf(np.eye(3), 0.0), np.eye(3))
        assert np.allclose(rzf(np.eye(3), 1.0), 0.5 * np.eye(3))

    def test_matches_elimination_oracle(self):
        rng = np.random.default_rng(0)
        for _ in range(10):
            H = random_channel(rng, 3, 5)
            F = rzf(H, 0.7)
            assert np.max(np.abs(F - rzf_oracle(H, 0.7))) < 1e-10

    def test_gram_forms_agree(self):
        rng = np.random.default_rng(1)
        for k, n in [(3, 5), (5, 3), (4, 4), (2, 9)]:
            H = random_channel(rng, k, n)
            Fk = rzf(H, 0.3, gram="k")
            Fn = rzf(H, 0.3, gram="n")
            assert np.max(np.abs(Fk - Fn)) < 1e-10
            assert np.max(np.abs(rzf(H, 0.3) - Fk)) < 1e-10

    def test_zero_alpha_inverts(self):
        rng = np.random.default_rng(2)
        H = random_channel(rng, 3, 6)
        F = rzf(H, 0.0)
        assert np.allclose(H @ F, np.eye(3), atol=1e-10)

    def test_rank_deficient_raises(self):
        H = np.ones((3, 4), dtype=complex)  # rank one
        with pytest.raises(SingularMatrixError):
            rzf(H, 0.0)

    def test_negative_alpha_rejected(self):
        with pytest.raises(ValueError):
            rzf(np.eye(2), -0.1)


class TestRzfSpecial:
    def test_matched_filter(self):
        H = np.eye(3) * 2.0
        assert np.allclose(rzf_special(H, "mrt"), H.conj().T)

    def test_mmse_identity(self):
        assert np.allclose(rzf_special(np.eye(3), "mmse", sigma2=1.0),
                           0.5 * np.eye(3))

    def test_zf_is_zero_alpha(self):
        rng = np.random.default_rng(3)
        H = random_channel(rng, 3, 5)
        assert np.allclose(rzf_special(H, "zf"), rzf(H, 0.0))

    def test_large_alpha_approaches_matched_filter(self):
        rng = np.random.default_rng(4)
        H = random_channel(rng, 3, 6)
        F = normalize_columns(rzf(H, 1e6), 3.0)
        F_mrt = normalize_columns(H.conj().T, 3.0)
        assert np.max(np.abs(F - F_mrt)) < 1e-4

    def test_matched_filter_direction_limit(self):
        rng = np.random.default_rng(5)
        H = random_channel(rng, 4, 7)
        F = rzf(H, 1e8)
        F_mrt = H.conj().T
        cosine = np.abs(np.sum(F.conj() * F_mrt, axis=0)) / (
            np.linalg.norm(F, axis=0) * np.linalg.norm(F_mrt, axis=0))
        assert np.all(cosine > 1.0 - 1e-6)

    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            rzf_special(np.eye(2), "dirty")


class TestNormalizeColumns:
    def test_scales_to_equal_share(self):
        F = normalize_columns(2.0 * np.eye(3, dtype=complex), 3.0)
        assert np.allclose(F, np.eye(3))

    def test_total_power_exact(self):
        rng = np.random.default_rng(6)
        F = normalize_columns(random_channel(rng, 5, 4), 2.5)
        assert abs(np.linalg.norm(F, "fro") ** 2 - 2.5) < 1e-12

    def test_column_norms(self):
        rng = np.random.default_rng(7)
        F = normalize_columns(random_channel(rng, 6, 2), 4.0)
        assert np.allclose(np.linalg.norm(F, axis=0), np.sqrt(2.0))

    def test_zero_column_rejected(self):
        F = np.zeros((3, 2), dtype=complex)
        F[:, 0] = 1.0
        with pytest.raises(ValueError):
            normalize_columns(F, 1.0)

    def test_zero_column_tolerated_when_allowed(self):
        F = np.zeros((3, 2), dtype=complex)
        F[:, 0] = 1.0
        out = normalize_columns(F, 1.0, allow_zero=True)
        assert np.all(out[:, 1] == 0.0)
        assert np.isclose(np.linalg.norm(out[:, 0]), np.sqrt(0.5))


def sinr_oracle(H, F, sigma2):
    """Scalar-loop link quality, term by term."""
    k = H.shape[0]
    out = []
    for i in range(k):
        signal = abs(sum(H[i, a] * F[a, i] for a in range(H.shape[1]))) ** 2
        interference = 0.0
        for j in range(k):
            if j != i:
                interference += abs(sum(H[i, a] * F[a, j]
                                        for a in range(H.shape[1]))) ** 2
        out.append(signal / (interference + sigma2))
    return np.array(out)


class TestSinr:
    def test_single_user_unit_vectors(self):
        H = np.array([[1.0, 0.0]])
        F = np.array([[1.0], [0.0]])
        report = sinr(H, F, 1.0)
        assert np.isclose(report.sinr[0], 1.0)
        assert np.isclose(report.sum_rate, 1.0)

    def test_orthonormal_zero_interference(self):
        H = np.eye(2, dtype=complex)
        report = sinr(H, H.conj().T, 1.0)
        assert np.allclose(report.sinr, 1.0)
        assert np.isclose(report.sum_rate, 2.0)

    def test_matches_scalar_oracle(self):
        rng = np.random.default_rng(8)
        H = random_channel(rng, 3, 5)
        F = random_channel(rng, 5, 3)
        report = sinr(H, F, 0.7)
        assert np.allclose(report.sinr, sinr_oracle(H, F, 0.7), atol=1e-12)
        assert np.allclose(report.rates, np.log2(1.0 + report.sinr))

    def test_user_permutation_invariance(self):
        rng = np.random.default_rng(9)
        H = random_channel(rng, 4, 6)
        F = random_channel(rng, 6, 4)
        perm = [2, 0, 3, 1]
        base = sinr(H, F, 1.0)
        shuffled = sinr(H[perm], F[:, perm], 1.0)
        assert np.isclose(base.sum_rate, shuffled.sum_rate)

    def test_rejects_bad_noise(self):
        with pytest.raises(ValueError):
            sinr(np.eye(2), np.eye(2), 0.0)


class TestObjective:
    def test_zero_precoder(self):
        H = np.zeros((3, 4))
        assert np.isclose(rzf_objective(H, np.zeros((4, 3)), 1.0), 3.0)

    def test_perfect_inversion(self):
        assert rzf_objective(np.eye(2), np.eye(2), 0.0) == 0.0

    def test_closed_form_is_global_minimum(self):
        rng = np.random.default_rng(10)
        H = random_channel(rng, 3, 5)
        alpha = 0.9
        F_star = rzf(H, alpha)
        best = rzf_objective(H, F_star, alpha)
        for _ in range(100):
            noise = (rng.standard_normal(F_star.shape)
                     + 1j * rng.standard_normal(F_star.shape))
            assert rzf_objective(H, F_star + 0.1 * noise, alpha) >= best

    def test_gradient_vanishes_at_solution(self):
        # central differences on the real/imaginary parts; the objective is
        # quadratic, so the finite-difference gradient is exact up to rounding
        rng = np.random.default_rng(11)
        H = random_channel(rng, 2, 4)
        alpha = 0.5
        F_star = rzf(H, alpha)
        h = 1e-3
        grad = []
        for idx in np.ndindex(F_star.shape):
            for delta in (h, 1j * h):
                up, down = F_star.copy(), F_star.copy()
                up[idx] += delta
                down[idx] -= delta
                grad.append((rzf_objective(H, up, alpha)
                             - rzf_objective(H, down, alpha)) / (2.0 * h))
        assert np.linalg.norm(grad) < 1e-8


def test_rate_report_fields():
    report = sinr(np.eye(2, dtype=complex), np.eye(2, dtype=complex), 2.0)
    assert isinstance(report, RateReport)
    assert report.sum_rate == pytest.approx(float(report.rates.sum()))
