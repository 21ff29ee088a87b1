"""
Variance-based indices for dependent inputs with a Gaussian joint law.

All factors live on the standard-normal scale, so the Gaussian copula reduces
to ordinary conditioning of a multivariate normal.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from loguru import logger
from scipy import linalg

from latentgsa.errors import DegenerateOutputError, DomainError
from latentgsa.models.schemas import (
    ConvergencePoint,
    FactorIndices,
    ReportMetadata,
    SensitivityReport,
)
from latentgsa.services.evaluation import Problem
from latentgsa.services.sampling import RandomStream

MIN_SAMPLES = 1000


@dataclass(frozen=True)
class GaussianJoint:
    k: int
    corr: np.ndarray = field(repr=False)

    def __post_init__(self):
        corr = np.asarray(self.corr, dtype=float)
        if corr.shape != (self.k, self.k):
            raise DomainError(f"correlation must be {self.k}x{self.k}")
        if not np.allclose(corr, corr.T, atol=1e-12):
            raise DomainError("correlation matrix must be symmetric")
        if not np.allclose(np.diag(corr), 1.0, atol=1e-12):
            raise DomainError("correlation matrix must have a unit diagonal")
        try:
            np.linalg.cholesky(corr)
        except np.linalg.LinAlgError as e:
            raise DomainError("correlation matrix is not positive definite") from e
        object.__setattr__(self, "corr", corr)

    @classmethod
    def independent(cls, k: int) -> "GaussianJoint":
        return cls(k, np.eye(k))

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        return rng.standard_normal((n, self.k)) @ np.linalg.cholesky(self.corr).T


@dataclass(frozen=True)
class ConditionalNormal:
    """Law of the ``free`` coordinates given fixed values: N(mean, cov)."""
    free: tuple[int, ...]
    mean: np.ndarray
    cov: np.ndarray

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        shape = self.mean.shape
        z = rng.standard_normal(shape)
        return self.mean + z @ np.linalg.cholesky(self.cov).T


def conditional(joint: GaussianJoint, fixed: Sequence[int], values) -> ConditionalNormal:
    """
    Conditional law of the remaining coordinates given ``X[fixed] = values``.

    ``values`` may be one point of length len(fixed) or an (m, len(fixed))
    matrix, in which case one conditional mean per row is returned.
    """
    fixed = tuple(int(j) for j in fixed)
    if not fixed:
        raise DomainError("at least one coordinate must be fixed")
    if len(set(fixed)) != len(fixed) or any(not 0 <= j < joint.k for j in fixed):
        raise DomainError(f"invalid fixed index set {fixed}")
    values = np.asarray(values, dtype=float)
    if values.shape[-1] != len(fixed) or not np.all(np.isfinite(values)):
        raise DomainError("one finite value per fixed coordinate is required")

    free = tuple(j for j in range(joint.k) if j not in fixed)
    s_ff = joint.corr[np.ix_(fixed, fixed)]
    s_fr = joint.corr[np.ix_(fixed, free)]
    s_rr = joint.corr[np.ix_(free, free)]
    try:
        factor = linalg.cho_factor(s_ff)
    except linalg.LinAlgError as e:
        raise DomainError("conditioning block is singular") from e
    weights = linalg.cho_solve(factor, s_fr)

    return ConditionalNormal(
        free=free,
        mean=values @ weights,
        cov=s_rr - s_fr.T @ weights,
    )


@dataclass(frozen=True)
class _Design:
    """Base sample and the three conditional resamples per factor."""
    base: np.ndarray
    main_a: tuple[np.ndarray, ...]
    main_b: tuple[np.ndarray, ...]
    total: tuple[np.ndarray, ...]

    def stacked(self) -> np.ndarray:
        return np.vstack((self.base, *self.main_a, *self.main_b, *self.total))


def _resample_rest(joint: GaussianJoint, x: np.ndarray, i: int, rng) -> np.ndarray:
    out = x.copy()
    if joint.k == 1:
        return out
    cond = conditional(joint, (i,), x[:, [i]])
    out[:, list(cond.free)] = cond.sample(rng)
    return out


def _resample_one(joint: GaussianJoint, x: np.ndarray, i: int, rng) -> np.ndarray:
    out = x.copy()
    rest = [j for j in range(joint.k) if j != i]
    if rest:
        cond = conditional(joint, rest, x[:, rest])
        out[:, [i]] = cond.sample(rng)
    else:
        out[:, i] = rng.standard_normal(len(x))
    return out


def build_design(joint: GaussianJoint, n: int, stream: RandomStream) -> _Design:
    base = joint.sample(n, stream.generator())
    main_a, main_b, total = [], [], []
    for i in range(joint.k):
        rng = stream.substream(i + 1).generator()
        main_a.append(_resample_rest(joint, base, i, rng))
        main_b.append(_resample_rest(joint, base, i, rng))
        total.append(_resample_one(joint, base, i, rng))
    return _Design(base, tuple(main_a), tuple(main_b), tuple(total))


def _indices(f0: np.ndarray, fa: np.ndarray, fb: np.ndarray, ft: np.ndarray):
    """f0 has shape (n,), fa/fb/ft shape (k, n)."""
    mean = f0.mean()
    variance = f0.var(ddof=1)
    if not variance > 0.0:
        raise DegenerateOutputError("output variance is zero; indices are undefined")
    main = np.mean((fa - mean) * (fb - mean), axis=1) / variance
    total = np.mean((f0 - ft) ** 2, axis=1) / (2.0 * variance)
    return main, total, variance


def convergence(
    outputs: tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray],
    sizes: Sequence[int],
    labels: Sequence[str],
) -> list[ConvergencePoint]:
    """Indices recomputed on nested prefixes of one sample."""
    f0, fa, fb, ft = outputs
    points = []
    for m in sorted(set(int(s) for s in sizes)):
        if not 2 <= m <= len(f0):
            continue
        main, total, _ = _indices(f0[:m], fa[:, :m], fb[:, :m], ft[:, :m])
        points.extend(
            ConvergencePoint(n=m, factor=name, main=float(mi), total=float(ti))
            for name, mi, ti in zip(labels, main, total)
        )
    return points


def estimate_kucherenko(
    problem: Problem,
    n: int,
    stream: RandomStream,
    joint: Optional[GaussianJoint] = None,
    convergence_sizes: Sequence[int] = (),
    workers: int = 1,
    rho: Optional[float] = None,
) -> SensitivityReport:
    """
    First-order and total indices that account for input dependence.

    main_i uses two independent draws of X_~i given x_i; total_i redraws x_i
    given X_~i. Costs n(3k + 1) model evaluations.
    """
    if n < MIN_SAMPLES:
        raise DomainError(f"kucherenko estimation needs n >= {MIN_SAMPLES}, got {n}")
    k = problem.k
    if joint is None:
        corr = problem.space.corr
        joint = GaussianJoint(k, corr if corr is not None else np.eye(k))
    if joint.k != k:
        raise DomainError(f"joint has dimension {joint.k}, model has {k} factors")

    evaluations = n * (3 * k + 1)
    logger.info(f"kucherenko on {problem.name}: n={n}, evaluations={evaluations}")

    design = build_design(joint, n, stream)
    out = problem.evaluate(design.stacked(), workers)
    f0 = out[:n]
    fa = out[n:n * (k + 1)].reshape(k, n)
    fb = out[n * (k + 1):n * (2 * k + 1)].reshape(k, n)
    ft = out[n * (2 * k + 1):].reshape(k, n)

    main, total, variance = _indices(f0, fa, fb, ft)
    labels = [problem.space.names[j] for j in range(k)]
    sizes = [s for s in convergence_sizes if s < n] + [n]

    return SensitivityReport(
        indices=[
            FactorIndices(factor=name, main=float(m), total=float(t))
            for name, m, t in zip(labels, main, total)
        ],
        metadata=ReportMetadata(
            method="kucherenko",
            model=problem.name,
            rho=rho,
            n=n,
            seed=stream.seed,
            stream_id=stream.stream_id,
            evaluations=evaluations,
            factors=labels,
            assumptions=list(problem.assumptions),
        ),
        variance=float(variance),
        convergence=convergence((f0, fa, fb, ft), sizes, labels),
    )
