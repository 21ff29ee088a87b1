"""
Random streams, marginals and base matrices.
"""
import math

import numpy as np
import pytest
from scipy import stats
from scipy.special import erf, ndtr

from latentgsa.errors import DomainError
from latentgsa.services.sampling import (
    FactorSpace,
    Marginal,
    RandomStream,
    base_matrices,
    correlate,
    lognormal_params_from_mean_cv,
    standard_normal,
    to_marginal,
    to_standard_normal,
)


# --------------------------------------------------
# Streams
# --------------------------------------------------
class TestStandardNormal:
    def test_moments(self):
        z = standard_normal(RandomStream(1), 1_000_000)
        assert abs(z.mean()) < 0.005
        assert abs(z.var() - 1.0) < 0.01

    def test_same_stream_is_reproducible(self):
        a = standard_normal(RandomStream(1), 5)
        b = standard_normal(RandomStream(1), 5)
        np.testing.assert_array_equal(a, b)

    def test_distinct_streams_are_uncorrelated(self):
        a = standard_normal(RandomStream(1, stream_id=0), 100_000)
        b = standard_normal(RandomStream(1, stream_id=1), 100_000)
        assert abs(np.corrcoef(a, b)[0, 1]) < 0.015

    def test_substreams_differ_from_parent(self):
        parent = RandomStream(3)
        child = parent.substream(0)
        assert child.path == (0,)
        assert not np.array_equal(standard_normal(parent, 10), standard_normal(child, 10))

    def test_rejects_empty_draw(self):
        with pytest.raises(DomainError):
            standard_normal(RandomStream(1), 0)

    def test_rejects_negative_seed(self):
        with pytest.raises(DomainError):
            RandomStream(-1)


# --------------------------------------------------
# Marginals
# --------------------------------------------------
class TestLognormalParams:
    def test_mppgl(self):
        mu, sigma = lognormal_params_from_mean_cv(39.79, 0.27)
        assert mu == pytest.approx(3.6487, abs=1e-3)
        assert sigma == pytest.approx(0.26524, abs=1e-4)

    def test_degenerate_limit(self):
        mu, sigma = lognormal_params_from_mean_cv(1.0, 1e-9)
        assert mu == pytest.approx(0.0, abs=1e-12)
        assert sigma == pytest.approx(0.0, abs=1e-8)

    def test_arithmetic_mean_is_reproduced(self):
        m = Marginal.lognormal_from_mean_cv(137.0, 0.41)
        x = to_marginal(standard_normal(RandomStream(5), 1_000_000), m)
        assert x.mean() == pytest.approx(137.0, rel=0.01)
        assert x.std() / x.mean() == pytest.approx(0.41, rel=0.02)

    @pytest.mark.parametrize("mean,cv", [(0.0, 0.3), (-1.0, 0.3), (10.0, 0.0), (10.0, -0.1)])
    def test_rejects_non_positive(self, mean, cv):
        with pytest.raises(DomainError):
            lognormal_params_from_mean_cv(mean, cv)


class TestToMarginal:
    def test_normal_center(self):
        assert to_marginal(0.0, Marginal.normal(176.7, 6.15)) == pytest.approx(176.7)

    def test_uniform_midpoint(self):
        assert to_marginal(0.0, Marginal.uniform(18.5, 24.9)) == pytest.approx(21.7)

    def test_lognormal_one_sd(self):
        value = to_marginal(1.0, Marginal.lognormal_from_mean_cv(39.79, 0.27))
        assert value == pytest.approx(50.08, rel=5e-3)

    @pytest.mark.parametrize("m", [
        Marginal.normal(176.7, 6.15),
        Marginal.uniform(18.5, 24.9),
        Marginal.lognormal_from_mean_cv(103.0, 0.65),
    ])
    def test_standardization_round_trip(self, m):
        z = np.linspace(-3, 3, 13)
        np.testing.assert_allclose(to_standard_normal(to_marginal(z, m), m), z, atol=1e-9)

    @pytest.mark.parametrize("m", [
        Marginal.normal(176.7, 6.15),
        Marginal.uniform(18.5, 24.9),
        Marginal.lognormal_from_mean_cv(137.0, 0.41),
    ])
    def test_kolmogorov_smirnov(self, m):
        x = to_marginal(standard_normal(RandomStream(21), 1_000_000), m)
        assert stats.kstest(x, m.distribution().cdf).pvalue > 0.001

    @pytest.mark.parametrize("kind,a,b", [("uniform", 2.0, 1.0), ("normal", 0.0, 0.0), ("lognormal", 0.0, -1.0), ("beta", 0.0, 1.0)])
    def test_invalid_marginals(self, kind, a, b):
        with pytest.raises(DomainError):
            Marginal(kind, a, b)

    def test_uniform_values_outside_support(self):
        with pytest.raises(DomainError):
            to_standard_normal(30.0, Marginal.uniform(18.5, 24.9))


def test_normal_cdf_matches_erf():
    z = np.linspace(-8, 8, 1601)
    reference = 0.5 * (1.0 + erf(z / math.sqrt(2.0)))
    assert np.max(np.abs(ndtr(z) - reference)) < 1e-12


# --------------------------------------------------
# Base matrices
# --------------------------------------------------
class TestBaseMatrices:
    def test_shapes_and_determinism(self):
        A, B = base_matrices(3, 16, RandomStream(2))
        A2, B2 = base_matrices(3, 16, RandomStream(2))
        assert A.shape == B.shape == (16, 3)
        np.testing.assert_array_equal(A, A2)
        np.testing.assert_array_equal(B, B2)

    def test_a_and_b_independent(self):
        A, B = base_matrices(4, 10_000, RandomStream(9))
        for j in range(4):
            assert abs(np.corrcoef(A[:, j], B[:, j])[0, 1]) < 0.045

    def test_low_discrepancy_mode(self):
        A, B = base_matrices(4, 1024, RandomStream(9), sampling="sobol_sequence")
        assert np.all(np.isfinite(A)) and np.all(np.isfinite(B))
        assert abs(A.mean()) < 0.02
        assert abs(A.var() - 1.0) < 0.05

    def test_unknown_mode(self):
        with pytest.raises(DomainError):
            base_matrices(2, 10, RandomStream(1), sampling="latin")

    def test_correlate(self):
        A, _ = base_matrices(2, 100_000, RandomStream(4))
        corr = np.array([[1.0, 0.7], [0.7, 1.0]])
        x = correlate(A, corr)
        assert np.corrcoef(x.T)[0, 1] == pytest.approx(0.7, abs=0.01)


def test_factor_space_transform():
    space = FactorSpace(
        ("sex", "height"),
        (Marginal.uniform(0.0, 1.0), Marginal.normal(176.7, 6.15)),
    )
    x = space.transform(np.array([[0.0, 1.0]]))
    np.testing.assert_allclose(x, [[0.5, 182.85]])


def test_factor_space_checks_shapes():
    with pytest.raises(DomainError):
        FactorSpace(("a", "b"), (Marginal.normal(0, 1),))
    with pytest.raises(DomainError):
        FactorSpace(("a",), (Marginal.normal(0, 1),), np.eye(2))
