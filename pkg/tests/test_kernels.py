import numpy as np
import pytest

from uncon.errors import SingularShift
from uncon.kernels import (
    ChangepointKernelParams,
    CovMatrix,
    PolyKernelParams,
    apply_shift,
    build_cov,
    changepoint_kernel,
    poly_kernel,
)

RNG = np.random.default_rng(20240817)


def random_inputs(n):
    return np.sort(RNG.uniform(0.0, 1.0, n))


class TestPolyKernel:
    def test_scalar_matches_matrix(self):
        params = PolyKernelParams(sigma=1.3, c=0.4, p=2.7)
        xs = random_inputs(8)
        k = build_cov(xs, xs, params).entries
        for i in range(8):
            for j in range(8):
                np.testing.assert_allclose(
                    k[i, j], poly_kernel(xs[i], xs[j], params), rtol=1e-12)

    def test_symmetry_exact(self):
        for p in (0.25, 1.0, 1.7, 3.0, 4.0):
            xs = random_inputs(40)
            k = build_cov(xs, xs, PolyKernelParams(sigma=0.7, c=0.1, p=p)).entries
            assert np.array_equal(k, k.T)

    @pytest.mark.parametrize("p", [1, 2, 3, 4])
    def test_integer_degree_psd(self, p):
        xs = random_inputs(60)
        k = build_cov(xs, xs, PolyKernelParams(sigma=1.0, c=0.5, p=float(p))).entries
        eig = np.linalg.eigvalsh(k)
        assert eig.min() >= -1e-8 * np.trace(k)

    def test_non_integer_degree_indefinite(self):
        # the motivating pathology: fractional degrees yield negative eigenvalues
        xs = np.linspace(0.0, 1.0, 50)
        k = build_cov(xs, xs, PolyKernelParams(sigma=1.0, c=0.1, p=2.5)).entries
        assert np.linalg.eigvalsh(k).min() < -1e-10

    def test_rectangular_blocks(self):
        params = PolyKernelParams(sigma=2.0, c=0.2, p=1.5)
        a, b = random_inputs(5), random_inputs(9)
        k = build_cov(a, b, params).entries
        assert k.shape == (5, 9)
        np.testing.assert_allclose(
            k, build_cov(b, a, params).entries.T, rtol=0, atol=0)

    def test_param_validation(self):
        with pytest.raises(ValueError):
            PolyKernelParams(sigma=0.0, c=0.1, p=1.0)
        with pytest.raises(ValueError):
            PolyKernelParams(sigma=1.0, c=-0.1, p=1.0)
        with pytest.raises(ValueError):
            PolyKernelParams(sigma=1.0, c=0.1, p=0.0)
        with pytest.raises(ValueError):
            PolyKernelParams(sigma=np.inf, c=0.1, p=1.0)


class TestChangepointKernel:
    def params(self):
        return ChangepointKernelParams(
            before=PolyKernelParams(sigma=1.0, c=0.3, p=2.0),
            after=PolyKernelParams(sigma=0.5, c=0.05, p=1.2),
            xc=0.5,
        )

    def test_cross_block_exactly_zero(self):
        xs = random_inputs(40)
        k = build_cov(xs, xs, self.params()).entries
        left = xs < 0.5
        cross = k[np.ix_(left, ~left)]
        assert np.all(cross == 0.0)
        assert np.all(k[np.ix_(~left, left)] == 0.0)

    def test_sides_match_their_polynomials(self):
        params = self.params()
        xs = random_inputs(30)
        k = build_cov(xs, xs, params).entries
        left = xs < 0.5
        np.testing.assert_allclose(
            k[np.ix_(left, left)],
            build_cov(xs[left], xs[left], params.before).entries, rtol=1e-12)
        np.testing.assert_allclose(
            k[np.ix_(~left, ~left)],
            build_cov(xs[~left], xs[~left], params.after).entries, rtol=1e-12)

    def test_boundary_belongs_to_after_side(self):
        params = self.params()
        assert changepoint_kernel(0.5, 0.5, params) == poly_kernel(0.5, 0.5, params.after)
        assert changepoint_kernel(0.49, 0.5, params) == 0.0

    def test_scalar_matches_matrix(self):
        params = self.params()
        xs = np.array([0.1, 0.49, 0.5, 0.51, 0.9])
        k = build_cov(xs, xs, params).entries
        for i, xi in enumerate(xs):
            for j, xj in enumerate(xs):
                np.testing.assert_allclose(
                    k[i, j], changepoint_kernel(xi, xj, params), rtol=1e-12)


class TestApplyShift:
    def test_shift_moves_every_eigenvalue(self):
        xs = random_inputs(50)
        cov = build_cov(xs, xs, PolyKernelParams(sigma=1.0, c=0.1, p=2.5))
        base = np.linalg.eigvalsh(cov.entries)
        shifted = apply_shift(cov, 2.0)
        moved = np.linalg.eigvalsh(shifted.entries)
        np.testing.assert_allclose(moved, base + 2.0, atol=1e-10)
        assert shifted.shift == 2.0
        assert shifted.shifted

    def test_certified_cholesky_cached(self):
        xs = random_inputs(30)
        cov = build_cov(xs, xs, PolyKernelParams(sigma=1.0, c=0.1, p=1.5))
        shifted = apply_shift(cov, 1.0)
        assert shifted.chol is not None
        np.testing.assert_allclose(
            shifted.chol @ shifted.chol.T, shifted.entries, atol=1e-10)

    def test_doubling_recovers_harder_matrices(self):
        # a matrix needing more than the base shift: large negative eigenvalue
        k = np.diag([-2.5, 1.0, 1.0])
        shifted = apply_shift(CovMatrix(entries=k), 1.0)
        assert shifted.shift > 2.5
        assert np.linalg.eigvalsh(shifted.entries).min() > 0

    def test_singular_shift_raised_when_doublings_exhausted(self):
        k = np.diag([-100.0, 1.0])
        with pytest.raises(SingularShift):
            apply_shift(CovMatrix(entries=k), 1.0)

    def test_rejects_bad_inputs(self):
        cov = CovMatrix(entries=np.eye(3))
        with pytest.raises(ValueError):
            apply_shift(cov, 0.0)
        with pytest.raises(ValueError):
            apply_shift(CovMatrix(entries=np.ones((2, 3))), 1.0)
