"""Arcsine law and Bussgang cross-covariance tests."""

import math

import numpy as np
import pytest

from onebitlink import (
    DegenerateInputError,
    NotACovarianceError,
    arcsine_cov_exact,
    arcsine_cov_linearized,
    cross_cov_quantized,
    kappa,
)
from onebitlink.signals import _quantize_array


def random_covariance(rng, dim):
    """Random Hermitian PSD matrix with strictly positive diagonal."""
    g = rng.standard_normal((dim, dim + 2)) + 1j * rng.standard_normal((dim, dim + 2))
    c = g @ g.conj().T / (dim + 2)
    return c + 0.1 * np.eye(dim)


def draw_proper_gaussian(rng, cov, n):
    """n samples of a proper complex Gaussian with the given covariance."""
    chol = np.linalg.cholesky(cov)
    white = (
        rng.standard_normal((n, cov.shape[0])) + 1j * rng.standard_normal((n, cov.shape[0]))
    ) / math.sqrt(2.0)
    return white @ chol.T


class TestKappa:
    def test_known_diagonal(self):
        out = kappa(np.diag([4.0, 9.0]).astype(complex))
        assert np.allclose(out.values, [0.5, 1.0 / 3.0])

    def test_identity(self):
        assert np.allclose(kappa(np.eye(5, dtype=complex)).values, 1.0)

    def test_rejects_zero_diagonal(self):
        with pytest.raises(DegenerateInputError):
            kappa(np.diag([1.0, 0.0]).astype(complex))


class TestArcsineExact:
    def test_identity_maps_to_twice_identity(self):
        out = arcsine_cov_exact(np.eye(4, dtype=complex))
        assert np.allclose(out, 2.0 * np.eye(4))

    def test_half_correlation(self):
        c = np.array([[1.0, 0.5], [0.5, 1.0]], dtype=complex)
        out = arcsine_cov_exact(c)
        assert out[0, 1] == pytest.approx(2.0 / 3.0)  # (4/pi) asin(1/2)

    def test_monte_carlo_agreement(self, rng):
        cov = random_covariance(rng, 3)
        n = 1_000_000
        r = draw_proper_gaussian(rng, cov, n)
        q = _quantize_array(r)
        emp = q.T @ q.conj() / n
        model = arcsine_cov_exact(cov)
        products = q[:, :, None] * q[:, None, :].conj()
        se = products.std(axis=0) / math.sqrt(n)
        assert np.all(np.abs(emp.real - model.real) <= 3.0 * np.maximum(se, 1e-12))
        assert np.all(np.abs(emp.imag - model.imag) <= 3.0 * np.maximum(se, 1e-12))

    def test_hermitian_and_unit_rails(self, rng):
        for dim in (2, 5, 9):
            cov = random_covariance(rng, dim)
            out = arcsine_cov_exact(cov)
            assert np.allclose(out, out.conj().T)
            assert np.array_equal(np.diag(out).real, np.full(dim, 2.0))

    def test_positive_semidefinite_random(self, rng):
        for dim in (2, 8, 16, 32):
            out = arcsine_cov_exact(random_covariance(rng, dim))
            eigs = np.linalg.eigvalsh(out)
            assert eigs.min() >= -1e-8 * eigs.sum() / dim

    def test_elementwise_monotonicity(self):
        lower = arcsine_cov_exact(np.array([[1.0, 0.2], [0.2, 1.0]], dtype=complex))
        upper = arcsine_cov_exact(np.array([[1.0, 0.3], [0.3, 1.0]], dtype=complex))
        assert upper[0, 1].real > lower[0, 1].real

    def test_rejects_invalid_correlation(self):
        bad = np.array([[1.0, 1.5], [1.5, 1.0]], dtype=complex)
        with pytest.raises(NotACovarianceError):
            arcsine_cov_exact(bad)

    def test_clamps_rounding_slack(self):
        eps = 5e-10
        almost = np.array([[1.0, 1.0 + eps], [1.0 + eps, 1.0]], dtype=complex)
        out = arcsine_cov_exact(almost)
        assert out[0, 1] == pytest.approx(2.0)


class TestArcsineLinearized:
    def test_identity_agrees_with_exact(self):
        eye = np.eye(3, dtype=complex)
        assert np.allclose(arcsine_cov_linearized(eye), arcsine_cov_exact(eye))

    def test_small_correlation_values(self):
        c = np.array([[1.0, 0.1], [0.1, 1.0]], dtype=complex)
        lin = arcsine_cov_linearized(c)[0, 1].real
        exact = arcsine_cov_exact(c)[0, 1].real
        assert lin == pytest.approx(4.0 / math.pi * 0.1)
        assert exact == pytest.approx(4.0 / math.pi * math.asin(0.1))
        assert exact > lin

    def test_error_bounded_by_largest_correlation(self, rng):
        cov = random_covariance(rng, 6)
        k = kappa(cov).values
        norm = k[:, None] * cov * k[None, :]
        off = ~np.eye(6, dtype=bool)
        m = min(np.abs(norm[off]).max(), 1.0)
        bound = (4.0 / math.pi) * (math.asin(m) - m)
        gap = np.abs(arcsine_cov_linearized(cov) - arcsine_cov_exact(cov))
        assert gap[off].max() <= bound * (1 + 1e-9) + 1e-15

    def test_error_decays_cubically(self):
        def gap(eps):
            c = np.array([[1.0, eps], [eps, 1.0]], dtype=complex)
            return abs(
                (arcsine_cov_linearized(c) - arcsine_cov_exact(c))[0, 1].real
            )

        # arcsin(x) - x ~ x^3 / 6: halving the correlation divides the gap by ~8
        ratio = gap(0.2) / gap(0.1)
        assert 7.0 < ratio < 9.0


class TestCrossCovariance:
    def test_identity(self):
        out = cross_cov_quantized(np.eye(3, dtype=complex))
        assert np.allclose(out, math.sqrt(4.0 / math.pi) * np.eye(3))

    def test_scaling_by_power(self, rng):
        cov = random_covariance(rng, 4)
        a = 2.5
        assert np.allclose(
            cross_cov_quantized(a**2 * cov), a * cross_cov_quantized(cov)
        )

    def test_monte_carlo_agreement(self, rng):
        cov = random_covariance(rng, 3)
        n = 1_000_000
        r = draw_proper_gaussian(rng, cov, n)
        q = _quantize_array(r)
        emp = q.T @ r.conj() / n
        model = cross_cov_quantized(cov)
        products = q[:, :, None] * r[:, None, :].conj()
        se = products.std(axis=0) / math.sqrt(n)
        assert np.all(np.abs(emp.real - model.real) <= 3.0 * se)
        assert np.all(np.abs(emp.imag - model.imag) <= 3.0 * se)

    def test_rejects_non_hermitian(self):
        bad = np.array([[1.0, 0.5], [0.2, 1.0]], dtype=complex)
        with pytest.raises(NotACovarianceError):
            cross_cov_quantized(bad)
