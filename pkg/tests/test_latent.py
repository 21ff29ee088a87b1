"""
Latent-variable decomposition of a correlated pair.
"""
import math

import numpy as np
import pytest
from scipy import stats

from latentgsa.errors import DomainError
from latentgsa.services.latent import (
    ave_of_loadings,
    average_variance_extracted,
    decompose,
    reconstruct_original,
    reconstruct_pair,
)
from latentgsa.services.sampling import Marginal, RandomStream


def _pairs(rho: float, n: int, seed: int = 3):
    d = decompose(rho)
    z = RandomStream(seed).generator().standard_normal((n, 3))
    s1, s2 = d.unique_sd
    return d, reconstruct_pair(z[:, 0], s1 * z[:, 1], s2 * z[:, 2], d)


# --------------------------------------------------
# decompose
# --------------------------------------------------
class TestDecompose:
    def test_positive(self):
        d = decompose(0.49)
        assert (d.lambda1, d.lambda2) == pytest.approx((0.7, 0.7))
        assert (d.sigma1_sq, d.sigma2_sq) == pytest.approx((0.51, 0.51))
        assert d.ave == pytest.approx(0.49)

    def test_negative_sign_on_second_loading(self):
        d = decompose(-0.49)
        assert (d.lambda1, d.lambda2) == pytest.approx((0.7, -0.7))

    def test_cyp_correlation(self):
        d = decompose(0.52)
        assert d.lambda1 == pytest.approx(0.72111, abs=1e-5)
        assert d.sigma1_sq == pytest.approx(0.48)

    def test_zero(self):
        d = decompose(0.0)
        assert d.lambda1 == 0.0 and d.lambda2 == 0.0
        assert d.ave == 0.0

    @pytest.mark.parametrize("rho", [1.0, -1.0, 1.5, math.nan])
    def test_rejects_degenerate(self, rho):
        with pytest.raises(DomainError):
            decompose(rho)

    @pytest.mark.parametrize("rho", [r / 10 for r in range(-9, 10) if r])
    def test_loadings_minimise_ave(self, rho):
        best = decompose(rho).ave
        root = math.sqrt(abs(rho))
        for lambda1 in np.linspace(root / 4 + 1e-3, 1.0, 60):
            lambda2 = rho / lambda1
            if abs(lambda2) > 1.0:
                continue
            assert ave_of_loadings(lambda1, lambda2) >= best - 1e-12
        assert ave_of_loadings(root, rho / root) == pytest.approx(best)


# --------------------------------------------------
# AVE
# --------------------------------------------------
class TestAverageVarianceExtracted:
    def test_equal_loadings(self):
        assert ave_of_loadings(0.7, 0.7) == pytest.approx(0.49)

    def test_unbalanced_loadings_are_worse(self):
        value = ave_of_loadings(1.0, 0.49)
        assert value == pytest.approx(0.62005)
        assert value > decompose(0.49).ave

    def test_zero(self):
        assert ave_of_loadings(0.0, 0.0) == 0.0

    def test_many_indicators(self):
        assert average_variance_extracted([0.5, 0.5, 1.0]) == pytest.approx(0.5)

    def test_rejects_invalid_loadings(self):
        with pytest.raises(DomainError):
            average_variance_extracted([1.2, 0.1])
        with pytest.raises(DomainError):
            average_variance_extracted([])


# --------------------------------------------------
# Reconstruction
# --------------------------------------------------
class TestReconstruct:
    def test_origin(self):
        assert reconstruct_pair(0.0, 0.0, 0.0, decompose(0.3)) == (0.0, 0.0)

    @pytest.mark.parametrize("rho", [0.7, -0.9])
    def test_correlation_and_variance(self, rho):
        _, (x1, x2) = _pairs(rho, 1_000_000)
        assert np.corrcoef(x1, x2)[0, 1] == pytest.approx(rho, abs=0.005)
        assert x1.var() == pytest.approx(1.0, abs=0.01)
        assert x2.var() == pytest.approx(1.0, abs=0.01)

    @pytest.mark.parametrize("rho", [-0.6, 0.2, 0.8])
    def test_correlation_within_sampling_error(self, rho):
        n = 20_000
        _, (x1, x2) = _pairs(rho, n, seed=8)
        assert abs(np.corrcoef(x1, x2)[0, 1] - rho) < 3 * (1 - rho ** 2) / math.sqrt(n)

    def test_reconstructed_factors_are_normal(self):
        _, (x1, x2) = _pairs(0.5, 100_000)
        for x in (x1, x2):
            assert stats.kstest(x, "norm").pvalue > 0.001

    def test_original_units(self):
        d = decompose(0.52)
        m1 = Marginal.lognormal_from_mean_cv(137.0, 0.41)
        m2 = Marginal.normal(176.7, 6.15)
        x1, x2 = reconstruct_original(0.0, 0.0, 0.0, d, m1, m2)
        assert x1 == pytest.approx(math.exp(m1.a))
        assert x2 == pytest.approx(176.7)

    def test_lognormal_pair_correlated_on_log_scale(self):
        d = decompose(0.52)
        m = Marginal.lognormal_from_mean_cv(137.0, 0.41)
        z = RandomStream(4).generator().standard_normal((200_000, 3))
        s1, s2 = d.unique_sd
        x1, x2 = reconstruct_original(z[:, 0], s1 * z[:, 1], s2 * z[:, 2], d, m, m)
        assert np.corrcoef(np.log(x1), np.log(x2))[0, 1] == pytest.approx(0.52, abs=0.01)

    def test_uniform_marginal_rejected(self):
        with pytest.raises(DomainError):
            reconstruct_original(
                0.0, 0.0, 0.0, decompose(0.3), Marginal.uniform(0, 1), Marginal.normal(0, 1)
            )
