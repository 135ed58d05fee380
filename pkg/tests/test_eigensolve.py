import math

import numpy as np
import pytest
import scipy.sparse as sp

from guidebound.eigensolve import (
    EigensolveError,
    Spectrum,
    eigen_below,
    inertia_below,
    sturm_count,
    tridiagonal_eigs_below,
)


def dirichlet_fd(n, h):
    diag = np.full(n, 2.0) / h**2
    off = np.full(n - 1, -1.0) / h**2
    return diag, off


def fd_closed_form(n, h):
    # vertex-centered Dirichlet second differences, walls one step outside
    k = np.arange(1, n + 1)
    return (4.0 / h**2) * np.sin(k * math.pi * h / 2) ** 2


class TestSturm:
    def test_counts_on_fd_matrix(self):
        n, h = 100, 1.0 / 101
        diag, off = dirichlet_fd(n, h)
        exact = fd_closed_form(n, h)
        assert sturm_count(diag, off, 50.0) == int(np.sum(exact < 50.0)) == 2

    def test_below_gershgorin_is_zero(self):
        diag, off = dirichlet_fd(50, 0.01)
        assert sturm_count(diag, off, -1.0) == 0

    def test_above_gershgorin_is_n(self):
        diag, off = dirichlet_fd(50, 0.01)
        assert sturm_count(diag, off, 5.0 / 0.01**2) == 50

    def test_exact_crossings(self):
        diag = np.array([1.0, 2.0, 3.0])
        off = np.zeros(2)
        assert sturm_count(diag, off, 2.5) == 2
        assert sturm_count(diag, off, 0.5) == 0

    def test_mismatched_lengths_rejected(self):
        with pytest.raises(ValueError):
            sturm_count(np.ones(3), np.ones(3), 0.0)


class TestTridiagonalExtraction:
    def test_matches_closed_form(self):
        n, h = 999, 1e-3
        diag, off = dirichlet_fd(n, h)
        vals = tridiagonal_eigs_below(diag, off, 50.0)
        exact = fd_closed_form(n, h)[:2]
        assert vals == pytest.approx(list(exact), rel=1e-10)
        # continuum proximity: FD dispersion error is k^4 pi^4 h^2 / 12
        assert abs(vals[0] - math.pi**2) < 1e-4
        assert abs(vals[1] - 4 * math.pi**2) < 2e-4

    def test_empty_when_none_below(self):
        diag, off = dirichlet_fd(100, 0.01)
        assert tridiagonal_eigs_below(diag, off, 1.0) == []


class TestInertia:
    def test_diagonal_matrix(self):
        A = sp.diags(np.arange(1.0, 11.0)).tocsr()
        assert inertia_below(A, 4.5) == 4
        assert inertia_below(A, 0.5) == 0
        assert inertia_below(A, 10.5) == 10

    def test_matches_dense_eigcount_random(self):
        rng = np.random.default_rng(11)
        for _ in range(8):
            n = rng.integers(8, 40)
            bw = int(rng.integers(1, 4))
            A = np.zeros((n, n))
            for d in range(bw + 1):
                v = rng.normal(size=n - d)
                A += np.diag(v, d) + (np.diag(v, -d) if d else 0)
            x = float(rng.normal())
            expected = int(np.sum(np.linalg.eigvalsh(A) < x))
            assert inertia_below(sp.csr_matrix(A), x) == expected

    def test_block_sizes_validated(self):
        A = sp.identity(5, format="csr")
        with pytest.raises(ValueError):
            inertia_below(A, 0.0, block_sizes=[2, 2])


class TestEigenBelow:
    def test_fd_matrix_closed_form(self):
        n, h = 999, 1e-3
        diag, off = dirichlet_fd(n, h)
        A = sp.diags([off, diag, off], [-1, 0, 1]).tocsr()
        spec = eigen_below(A, 50.0)
        assert spec.certified_count == 2
        exact = fd_closed_form(n, h)[:2]
        assert spec.eigenvalues == pytest.approx(exact, rel=1e-10)

    def test_empty_below_gershgorin(self):
        A = sp.diags(np.arange(1.0, 11.0)).tocsr()
        spec = eigen_below(A, 0.5)
        assert spec.certified_count == 0
        assert len(spec.eigenvalues) == 0

    def test_diagonal_case(self):
        A = sp.diags(np.arange(1.0, 11.0)).tocsr()
        spec = eigen_below(A, 4.5)
        assert spec.certified_count == 4
        assert spec.eigenvalues == pytest.approx([1.0, 2.0, 3.0, 4.0])

    def test_residuals_within_tolerance(self):
        n, h = 999, 1e-3
        diag, off = dirichlet_fd(n, h)
        A = sp.diags([off, diag, off], [-1, 0, 1]).tocsr()
        spec = eigen_below(A, 50.0, tol=1e-9)
        assert np.all(spec.residual_norms <= 1e-9 * 50.0)

    def test_shift_invariance(self):
        rng = np.random.default_rng(5)
        n = 60
        d = rng.uniform(1.0, 4.0, n)
        o = rng.uniform(-0.5, 0.5, n - 1)
        A = sp.diags([o, d, o], [-1, 0, 1]).tocsr()
        tau = 2.5
        c = 7.25
        s1 = eigen_below(A, tau)
        s2 = eigen_below((A + c * sp.identity(n)).tocsr(), tau + c)
        assert s1.certified_count == s2.certified_count
        assert s2.eigenvalues - c == pytest.approx(s1.eigenvalues, abs=1e-9)

    def test_dense_vs_sparse_paths_agree(self):
        # same matrix solved below and above the dense cutoff by forcing
        # the iterative path via a large-n embedding
        rng = np.random.default_rng(9)
        n = 2500  # above the dense cutoff: ARPACK path
        d = np.concatenate([rng.uniform(0.5, 0.9, 5), rng.uniform(5.0, 9.0, n - 5)])
        o = np.full(n - 1, 0.01)
        A = sp.diags([o, d, o], [-1, 0, 1]).tocsr()
        spec_sparse = eigen_below(A, 1.0)
        dense_vals = np.linalg.eigvalsh(A.toarray())
        expected = dense_vals[dense_vals < 1.0]
        assert spec_sparse.certified_count == len(expected)
        assert spec_sparse.eigenvalues == pytest.approx(expected, rel=1e-10)

    def test_inertia_consistency_on_random_problems(self):
        rng = np.random.default_rng(13)
        for _ in range(6):
            n = int(rng.integers(30, 120))
            d = rng.uniform(0.0, 3.0, n)
            o = rng.uniform(-1.0, 1.0, n - 1)
            A = sp.diags([o, d, o], [-1, 0, 1]).tocsr()
            tau = float(rng.uniform(0.5, 2.5))
            spec = eigen_below(A, tau)
            assert len(spec.eigenvalues) == spec.certified_count
            assert np.all(spec.eigenvalues < tau)

    def test_cluster_reporting(self):
        A = sp.diags(np.array([1.0, 1.0 + 1e-12, 3.0])).tocsr()
        spec = eigen_below(A, 2.0)
        assert spec.certified_count == 2
        assert len(spec.clusters) == 1
        value, mult = spec.clusters[0]
        assert mult == 2
        assert value == pytest.approx(1.0, abs=1e-9)

    def test_deterministic_reruns(self):
        n, h = 2500, 1e-3
        diag, off = dirichlet_fd(n, h)
        A = sp.diags([off, diag, off], [-1, 0, 1]).tocsr()
        s1 = eigen_below(A, 60.0)
        s2 = eigen_below(A, 60.0)
        assert np.array_equal(s1.eigenvalues, s2.eigenvalues)
