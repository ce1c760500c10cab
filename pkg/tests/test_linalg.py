"""Tests for the complex-Hermitian linear algebra kernels."""

import numpy as np
import pytest
import scipy.linalg

from isacbeam import linalg


def random_hermitian(rng, n, scale=1.0):
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return linalg.as_hermitian(scale * 0.5 * (a + a.conj().T))


def random_psd(rng, n, scale=1.0):
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return linalg.as_hermitian(scale * (a @ a.conj().T) / n)


class TestAsHermitian:
    def test_rejects_non_square(self):
        with pytest.raises(linalg.NotHermitianError):
            linalg.as_hermitian(np.ones((2, 3)))

    def test_rejects_nan_and_inf(self):
        bad = np.eye(2, dtype=complex)
        bad[0, 1] = np.nan
        with pytest.raises(linalg.NotHermitianError):
            linalg.as_hermitian(bad)
        bad[0, 1] = np.inf
        with pytest.raises(linalg.NotHermitianError):
            linalg.as_hermitian(bad)

    def test_rejects_asymmetry_beyond_tolerance(self):
        a = np.eye(3, dtype=complex)
        a[0, 1] = 1e-6
        with pytest.raises(linalg.NotHermitianError):
            linalg.as_hermitian(a)

    def test_symmetrizes_exactly(self):
        rng = np.random.default_rng(0)
        a = random_hermitian(rng, 5)
        # perturb below tolerance, result must still be exactly Hermitian
        a_p = a + 1e-14 * (rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5)))
        h = linalg.as_hermitian(a_p, atol=1e-12)
        assert np.array_equal(h, h.conj().T)
        assert np.all(h.diagonal().imag == 0.0)


class TestEigHermitian:
    def test_identity(self):
        w, V = linalg.eig_hermitian(np.eye(3))
        assert np.allclose(w, [1, 1, 1])
        assert np.allclose(V @ V.conj().T, np.eye(3), atol=1e-9)

    def test_diagonal_ascending(self):
        w, _ = linalg.eig_hermitian(np.diag([2.0, -1.0]))
        assert np.allclose(w, [-1.0, 2.0])

    def test_reconstruction(self):
        rng = np.random.default_rng(1)
        a = random_hermitian(rng, 4)
        w, V = linalg.eig_hermitian(a)
        assert np.linalg.norm((V * w) @ V.conj().T - a) <= 1e-9
        assert np.linalg.norm(V @ V.conj().T - np.eye(4)) <= 1e-9

    def test_roundtrip_many_seeds(self):
        for seed in range(100):
            rng = np.random.default_rng(seed)
            n = int(rng.integers(1, 21))
            a = random_hermitian(rng, n, scale=rng.uniform(0.1, 10.0))
            w, V = linalg.eig_hermitian(a)
            scale = max(1.0, np.linalg.norm(a))
            assert np.linalg.norm((V * w) @ V.conj().T - a) <= 1e-9 * scale
            assert np.all(np.diff(w) >= -1e-12)


class TestCholesky:
    def test_identity(self):
        L = linalg.cholesky(np.eye(2))
        assert np.allclose(L, np.eye(2))

    def test_zero_matrix_rank_zero(self):
        L = linalg.cholesky(np.zeros((3, 3)))
        assert L.shape == (3, 0)

    def test_rank_one(self):
        rng = np.random.default_rng(2)
        v = rng.standard_normal(5) + 1j * rng.standard_normal(5)
        a = linalg.as_hermitian(np.outer(v, v.conj()))
        L = linalg.cholesky(a)
        assert L.shape == (5, 1)
        # column equals v up to unit phase
        phase = L[np.argmax(np.abs(v)), 0] / v[np.argmax(np.abs(v))]
        assert np.isclose(abs(phase), 1.0, atol=1e-9)
        assert np.allclose(L[:, 0], phase * v, atol=1e-9)
        assert np.linalg.norm(L @ L.conj().T - a) <= 1e-8 * np.linalg.norm(a)

    def test_indefinite_raises_with_eigenvalue(self):
        with pytest.raises(linalg.NotPSDError) as exc:
            linalg.cholesky(np.diag([1.0, -0.5]))
        assert exc.value.min_eigenvalue == pytest.approx(-0.5, abs=1e-12)

    def test_positive_definite_is_lower_triangular(self):
        rng = np.random.default_rng(3)
        a = random_psd(rng, 6) + 0.5 * np.eye(6)
        L = linalg.cholesky(a)
        assert np.allclose(L, np.tril(L))
        assert np.linalg.norm(L @ L.conj().T - a) <= 1e-8 * np.linalg.norm(a)

    def test_roundtrip_many_seeds(self):
        for seed in range(100):
            rng = np.random.default_rng(1000 + seed)
            n = int(rng.integers(1, 21))
            r = int(rng.integers(0, n + 1))
            b = rng.standard_normal((n, r)) + 1j * rng.standard_normal((n, r))
            a = linalg.as_hermitian(b @ b.conj().T)
            L = linalg.cholesky(a)
            scale = max(1.0, np.linalg.norm(a))
            assert np.linalg.norm(L @ L.conj().T - a) <= 1e-8 * scale


class TestProjectPsd:
    def test_clips_negative_eigenvalue(self):
        p = linalg.project_psd(np.diag([1.0, -1.0]))
        assert np.allclose(p, np.diag([1.0, 0.0]), atol=1e-12)

    def test_psd_unchanged(self):
        rng = np.random.default_rng(4)
        a = random_psd(rng, 5)
        assert np.linalg.norm(linalg.project_psd(a) - a) <= 1e-10

    def test_idempotent(self):
        rng = np.random.default_rng(5)
        a = random_hermitian(rng, 6)
        p = linalg.project_psd(a)
        assert np.linalg.norm(linalg.project_psd(p) - p) <= 1e-10

    def test_clipping_is_optimal_per_negative_eigenvalue(self):
        # replacing each negative eigenvalue with any t > 0 only increases
        # the Frobenius distance, so the minimizer over PSD matrices keeps t=0
        rng = np.random.default_rng(6)
        a = random_hermitian(rng, 5)
        w, V = linalg.eig_hermitian(a)
        p = linalg.project_psd(a)
        base = np.linalg.norm(p - a)
        for i in np.flatnonzero(w < 0):
            for t in np.linspace(1e-4, 2 * abs(w[i]), 40):
                wc = np.maximum(w, 0.0)
                wc[i] = t
                cand = (V * wc) @ V.conj().T
                assert np.linalg.norm(cand - a) >= base - 1e-12

    def test_non_expansive(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            a = random_hermitian(rng, 6)
            b = random_hermitian(rng, 6)
            lhs = np.linalg.norm(linalg.project_psd(a) - linalg.project_psd(b))
            assert lhs <= np.linalg.norm(a - b) + 1e-12


class TestRealify:
    def test_identity_one(self):
        assert np.array_equal(linalg.realify(np.eye(1)), np.eye(2))

    def test_pauli_like_matrix(self):
        a = np.array([[0, 1j], [-1j, 0]])
        expected = np.array(
            [
                [0, 0, 0, -1],
                [0, 0, 1, 0],
                [0, 1, 0, 0],
                [-1, 0, 0, 0],
            ],
            dtype=float,
        )
        assert np.allclose(linalg.realify(a), expected)

    def test_psd_preserved_both_directions(self):
        rng = np.random.default_rng(8)
        a = random_psd(rng, 4)
        wr = np.linalg.eigvalsh(linalg.realify(a))
        assert wr.min() >= -1e-10
        # indefinite stays indefinite
        b = random_hermitian(rng, 4)
        b = b - (np.linalg.eigvalsh(b).max() + 1.0) * np.eye(4)
        assert np.linalg.eigvalsh(linalg.realify(b)).max() < 0

    def test_trace_doubles_and_roundtrip(self):
        rng = np.random.default_rng(9)
        a = random_hermitian(rng, 7)
        r = linalg.realify(a)
        assert np.isclose(np.trace(r), 2 * np.trace(a).real)
        assert np.linalg.norm(linalg.unrealify(r) - a) <= 1e-12


class TestSolveHpd:
    def test_identity(self):
        b = np.array([1 + 2j, 3.0])
        assert np.allclose(linalg.solve_hpd(np.eye(2), b), b)

    def test_diagonal(self):
        x = linalg.solve_hpd(np.diag([2.0, 4.0]), np.array([2.0, 4.0]))
        assert np.allclose(x, [1.0, 1.0])

    def test_random_hpd_residual(self):
        rng = np.random.default_rng(10)
        a = random_psd(rng, 6) + 0.1 * np.eye(6)
        b = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        x = linalg.solve_hpd(a, b)
        assert np.linalg.norm(a @ x - b) <= 1e-9 * np.linalg.norm(b)

    def test_indefinite_raises(self):
        with pytest.raises(scipy.linalg.LinAlgError):
            linalg.solve_hpd(np.diag([1.0, -1.0]), np.array([1.0, 1.0]))

    def test_roundtrip_many_seeds(self):
        for seed in range(100):
            rng = np.random.default_rng(2000 + seed)
            n = int(rng.integers(1, 21))
            a = random_psd(rng, n) + 0.05 * np.eye(n)
            b = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            x = linalg.solve_hpd(a, b)
            assert np.linalg.norm(a @ x - b) <= 1e-9 * max(1.0, np.linalg.norm(b))
