"""
Latent-variable decomposition of a correlated pair.

Two standardized factors X1, X2 with correlation rho are rewritten as

    X_i = lambda_i * eta + eps_i,   eta ~ N(0, 1),   eps_i ~ N(0, 1 - lambda_i^2)

with eta, eps_1, eps_2 mutually independent. The loadings are the ones
minimising the average variance extracted, |lambda_1| = |lambda_2| = sqrt(|rho|).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from latentgsa.errors import DomainError
from latentgsa.services.sampling import Marginal, to_marginal


@dataclass(frozen=True)
class LatentDecomposition:
    rho: float
    lambda1: float
    lambda2: float
    sigma1_sq: float
    sigma2_sq: float
    ave: float

    @property
    def unique_sd(self) -> tuple[float, float]:
        return math.sqrt(self.sigma1_sq), math.sqrt(self.sigma2_sq)


def decompose(rho: float) -> LatentDecomposition:
    """
    Minimum-AVE loadings for a pair with Pearson correlation ``rho``.

    lambda1 is always non-negative, lambda2 carries the sign of rho.
    """
    if not -1.0 < rho < 1.0:
        raise DomainError(f"correlation must lie in (-1, 1), got {rho}")
    magnitude = math.sqrt(abs(rho))
    lambda1 = magnitude
    lambda2 = math.copysign(magnitude, rho) if rho != 0 else 0.0
    return LatentDecomposition(
        rho=rho,
        lambda1=lambda1,
        lambda2=lambda2,
        sigma1_sq=1.0 - lambda1 * lambda1,
        sigma2_sq=1.0 - lambda2 * lambda2,
        ave=ave_of_loadings(lambda1, lambda2),
    )


def reconstruct_pair(eta, eps1, eps2, d: LatentDecomposition):
    """Standardized pair from the latent and unique components."""
    x1 = d.lambda1 * np.asarray(eta, dtype=float) + eps1
    x2 = d.lambda2 * np.asarray(eta, dtype=float) + eps2
    return x1, x2


def average_variance_extracted(loadings: Sequence[float]) -> float:
    """
    AVE of one latent variable over k standardized indicators.

    With unique variances 1 - lambda^2 the ratio sum(l^2) / (sum(l^2) + sum(s^2))
    reduces to the mean squared loading.
    """
    lam = np.asarray(loadings, dtype=float)
    if lam.size == 0:
        raise DomainError("at least one loading is required")
    if np.any(np.abs(lam) > 1.0):
        raise DomainError("loadings of standardized factors satisfy |lambda| <= 1")
    explained = float(np.sum(lam ** 2))
    unique = float(np.sum(1.0 - lam ** 2))
    return explained / (explained + unique)


def ave_of_loadings(lambda1: float, lambda2: float) -> float:
    return average_variance_extracted((lambda1, lambda2))


def reconstruct_original(
    eta,
    eps1,
    eps2,
    d: LatentDecomposition,
    m1: Marginal,
    m2: Marginal,
):
    """
    Pair in original units.

    Normal factors are de-standardized affinely; lognormal factors are
    reconstructed on the log scale, where the correlation is assumed linear.
    """
    for m in (m1, m2):
        if m.kind == "uniform":
            raise DomainError(
                "latent reconstruction requires normal or lognormal factors"
            )
    z1, z2 = reconstruct_pair(eta, eps1, eps2, d)
    return to_marginal(z1, m1), to_marginal(z2, m2)
