"""
Seedable random streams and marginal distributions.

Every factor is represented on a standard-normal scale; marginals map that
representation to native units (uniform factors go through the normal CDF).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy import stats
from scipy.special import ndtr, ndtri
from scipy.stats import qmc

from latentgsa.errors import DomainError

SamplingMode = Literal["pseudo_random", "sobol_sequence"]

# keeps ndtri finite for low-discrepancy points on the cube boundary
_UNIT_EPS = 1e-15


@dataclass(frozen=True)
class RandomStream:
    """
    Splittable stream keyed by (seed, stream_id).

    Generators are built from a Philox counter-based bit generator, so two
    streams with different ids never share state.
    """
    seed: int
    stream_id: int = 0
    path: tuple[int, ...] = ()

    def __post_init__(self):
        if self.seed < 0 or self.stream_id < 0:
            raise DomainError("seed and stream_id must be unsigned")

    def generator(self) -> np.random.Generator:
        """Return a fresh generator positioned at the start of the stream."""
        seq = np.random.SeedSequence(
            self.seed, spawn_key=(self.stream_id, *self.path)
        )
        return np.random.Generator(np.random.Philox(seq))

    def substream(self, index: int) -> "RandomStream":
        if index < 0:
            raise DomainError("substream index must be unsigned")
        return RandomStream(self.seed, self.stream_id, (*self.path, index))


def standard_normal(stream: RandomStream, n: int) -> np.ndarray:
    """I.i.d. N(0, 1) draws, identical for identical (seed, stream_id)."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    return stream.generator().standard_normal(n)


def lognormal_params_from_mean_cv(mean: float, cv: float) -> tuple[float, float]:
    """
    Log-scale parameters of a lognormal with the given arithmetic mean and CV.
    """
    if mean <= 0 or cv <= 0:
        raise DomainError(f"mean and cv must be positive (mean={mean}, cv={cv})")
    sigma_log = math.sqrt(math.log1p(cv * cv))
    mu_log = math.log(mean) - 0.5 * sigma_log * sigma_log
    return mu_log, sigma_log


@dataclass(frozen=True)
class Marginal:
    """
    One-dimensional input distribution.

    kind="uniform":   a=lo, b=hi
    kind="normal":    a=mean, b=sd
    kind="lognormal": a=mu_log, b=sigma_log
    """
    kind: Literal["uniform", "normal", "lognormal"]
    a: float
    b: float

    def __post_init__(self):
        if self.kind == "uniform":
            if not self.a < self.b:
                raise DomainError(f"uniform requires lo < hi, got ({self.a}, {self.b})")
        elif self.kind in ("normal", "lognormal"):
            if not self.b > 0:
                raise DomainError(f"{self.kind} requires a positive scale, got {self.b}")
        else:
            raise DomainError(f"unknown marginal kind '{self.kind}'")

    @classmethod
    def uniform(cls, lo: float, hi: float) -> "Marginal":
        return cls("uniform", lo, hi)

    @classmethod
    def normal(cls, mean: float, sd: float) -> "Marginal":
        return cls("normal", mean, sd)

    @classmethod
    def lognormal(cls, mu_log: float, sigma_log: float) -> "Marginal":
        return cls("lognormal", mu_log, sigma_log)

    @classmethod
    def lognormal_from_mean_cv(cls, mean: float, cv: float) -> "Marginal":
        return cls("lognormal", *lognormal_params_from_mean_cv(mean, cv))

    def distribution(self):
        """Frozen scipy.stats distribution with the same law."""
        if self.kind == "uniform":
            return stats.uniform(loc=self.a, scale=self.b - self.a)
        if self.kind == "normal":
            return stats.norm(loc=self.a, scale=self.b)
        return stats.lognorm(s=self.b, scale=math.exp(self.a))


def to_marginal(z, m: Marginal):
    """Map standard-normal values to the native scale of ``m``."""
    z = np.asarray(z, dtype=float)
    if m.kind == "normal":
        out = m.a + m.b * z
    elif m.kind == "lognormal":
        out = np.exp(m.a + m.b * z)
    else:
        out = m.a + (m.b - m.a) * ndtr(z)
    return out if out.ndim else float(out)


def to_standard_normal(x, m: Marginal):
    """Inverse of :func:`to_marginal`."""
    x = np.asarray(x, dtype=float)
    if m.kind == "normal":
        out = (x - m.a) / m.b
    elif m.kind == "lognormal":
        if np.any(x <= 0):
            raise DomainError("lognormal values must be positive")
        out = (np.log(x) - m.a) / m.b
    else:
        if np.any((x <= m.a) | (x >= m.b)):
            raise DomainError(f"values must lie inside ({m.a}, {m.b})")
        out = ndtri((x - m.a) / (m.b - m.a))
    return out if out.ndim else float(out)


def correlate(z: np.ndarray, corr: np.ndarray | None) -> np.ndarray:
    """Impose a Gaussian correlation on independent standard-normal rows."""
    if corr is None:
        return z
    chol = np.linalg.cholesky(np.asarray(corr, dtype=float))
    return z @ chol.T


def base_matrices(
    k: int,
    n: int,
    stream: RandomStream,
    sampling: SamplingMode = "pseudo_random",
) -> tuple[np.ndarray, np.ndarray]:
    """
    Two independent n×k standard-normal matrices for pick-freeze plans.
    """
    if sampling == "pseudo_random":
        draws = standard_normal(stream, n * 2 * k).reshape(n, 2 * k)
    elif sampling == "sobol_sequence":
        engine = qmc.Sobol(d=2 * k, scramble=True, seed=stream.generator())
        with warnings.catch_warnings():
            # balance properties need a power of two; any n is accepted
            warnings.simplefilter("ignore", UserWarning)
            unit = engine.random(n)
        draws = ndtri(np.clip(unit, _UNIT_EPS, 1.0 - _UNIT_EPS))
    else:
        raise DomainError(f"unknown sampling mode '{sampling}'")
    return draws[:, :k].copy(), draws[:, k:].copy()


@dataclass(frozen=True)
class FactorSpace:
    """Named factors with marginals and a Gaussian-copula correlation."""
    names: tuple[str, ...]
    marginals: tuple[Marginal, ...]
    corr: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        if len(self.names) != len(self.marginals):
            raise DomainError("one marginal per factor is required")
        if self.corr is not None and np.shape(self.corr) != (self.k, self.k):
            raise DomainError(f"correlation must be {self.k}x{self.k}")

    @property
    def k(self) -> int:
        return len(self.names)

    def transform(self, z: np.ndarray) -> np.ndarray:
        """Columnwise standard-normal → native units."""
        z = np.atleast_2d(z)
        out = np.empty_like(z, dtype=float)
        for j, m in enumerate(self.marginals):
            out[:, j] = to_marginal(z[:, j], m)
        return out
