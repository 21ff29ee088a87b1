"""
Pick-freeze Sobol indices for independent factors or independent groups.

Main effects use the Homma-Saltelli product estimator, total effects the
Jansen form. Groups are 0-based index tuples.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Protocol, Sequence

import numpy as np
from loguru import logger

from latentgsa.errors import DegenerateOutputError, DomainError, PartitionError
from latentgsa.models.schemas import FactorIndices, ReportMetadata, SensitivityReport
from latentgsa.services.evaluation import Problem, validate_groups
from latentgsa.services.sampling import (
    FactorSpace,
    Marginal,
    RandomStream,
    SamplingMode,
    base_matrices,
    correlate,
)

_BOOTSTRAP_CHUNK = 50


@dataclass(frozen=True)
class SamplePlan:
    k: int
    n: int
    A: np.ndarray = field(repr=False)
    B: np.ndarray = field(repr=False)
    groups: tuple[tuple[int, ...], ...]
    AB: tuple[np.ndarray, ...] = field(repr=False)
    corr: Optional[np.ndarray] = field(default=None, repr=False)
    seed: int = 0
    stream_id: int = 0
    sampling: str = "pseudo_random"

    @property
    def g(self) -> int:
        return len(self.groups)

    @property
    def evaluations(self) -> int:
        return self.n * (self.g + 2)

    def stacked(self) -> np.ndarray:
        """A, B and every AB_j stacked row-wise for one evaluation pass."""
        return np.vstack((self.A, self.B, *self.AB))


def _check_block_diagonal(corr: np.ndarray, groups: tuple[tuple[int, ...], ...]) -> None:
    owner = np.empty(corr.shape[0], dtype=int)
    for gi, g in enumerate(groups):
        owner[list(g)] = gi
    cross = owner[:, None] != owner[None, :]
    if np.any(np.abs(corr[cross]) > 0.0):
        raise PartitionError("correlated factors must belong to the same group")


def build_plan(
    k: int,
    n: int,
    groups: Optional[Sequence[Sequence[int]]],
    stream: RandomStream,
    corr: Optional[np.ndarray] = None,
    sampling: SamplingMode = "pseudo_random",
) -> SamplePlan:
    """
    Base matrices A, B and one hybrid AB_j per group.

    AB_j is A with the columns of group j taken from B. With ``corr`` the rows of
    A and B are correlated first; the correlation must not cross groups.
    """
    if n < 2:
        raise DomainError(f"n must be >= 2, got {n}")
    groups = validate_groups(k, groups if groups is not None else [(j,) for j in range(k)])
    if corr is not None:
        corr = np.asarray(corr, dtype=float)
        if corr.shape != (k, k):
            raise DomainError(f"correlation must be {k}x{k}")
        _check_block_diagonal(corr, groups)

    A, B = base_matrices(k, n, stream, sampling)
    A, B = correlate(A, corr), correlate(B, corr)

    hybrids = []
    for g in groups:
        ab = A.copy()
        ab[:, list(g)] = B[:, list(g)]
        hybrids.append(ab)

    return SamplePlan(
        k=k,
        n=n,
        A=A,
        B=B,
        groups=groups,
        AB=tuple(hybrids),
        corr=corr,
        seed=stream.seed,
        stream_id=stream.stream_id,
        sampling=sampling,
    )


def _indices(f_A: np.ndarray, f_B: np.ndarray, f_AB: np.ndarray):
    """
    Main/total indices along the last axis.

    f_A, f_B have shape (..., n); f_AB has shape (g, ..., n).
    Returns main and total of shape (g, ...) and the variance of shape (...).
    """
    pooled = np.concatenate((f_A, f_B), axis=-1)
    center = pooled.mean(axis=-1, keepdims=True)
    variance = pooled.var(axis=-1, ddof=1)

    a = f_A - center
    b = f_B - center
    ab = f_AB - center

    with np.errstate(divide="ignore", invalid="ignore"):
        main = (np.mean(b * ab, axis=-1) - a.mean(axis=-1) * b.mean(axis=-1)) / variance
        total = np.mean((a - ab) ** 2, axis=-1) / (2.0 * variance)
    return main, total, variance


def _check_evaluations(plan: SamplePlan, f_A, f_B, f_AB) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    f_A = np.asarray(f_A, dtype=float)
    f_B = np.asarray(f_B, dtype=float)
    f_AB = np.asarray(f_AB, dtype=float)
    if f_A.shape != (plan.n,) or f_B.shape != (plan.n,) or f_AB.shape != (plan.g, plan.n):
        raise DomainError(
            f"expected evaluations of length {plan.n} for A, B and {plan.g} hybrids"
        )
    if not (np.all(np.isfinite(f_A)) and np.all(np.isfinite(f_B)) and np.all(np.isfinite(f_AB))):
        raise DomainError("evaluations must be finite")
    return f_A, f_B, f_AB


def estimate(
    plan: SamplePlan,
    f_A,
    f_B,
    f_AB,
    labels: Optional[Sequence[str]] = None,
    method: str = "sobol",
    model: str = "",
    rho: Optional[float] = None,
    assumptions: Sequence[str] = (),
) -> SensitivityReport:
    """Point estimates of the main and total index of every group."""
    f_A, f_B, f_AB = _check_evaluations(plan, f_A, f_B, f_AB)
    main, total, variance = _indices(f_A, f_B, f_AB)
    if not variance > 0.0:
        raise DegenerateOutputError("output variance is zero; indices are undefined")

    labels = list(labels) if labels is not None else [
        "+".join(f"X{j + 1}" for j in g) for g in plan.groups
    ]
    if len(labels) != plan.g:
        raise DomainError("one label per group is required")

    return SensitivityReport(
        indices=[
            FactorIndices(factor=name, main=float(m), total=float(t))
            for name, m, t in zip(labels, main, total)
        ],
        metadata=ReportMetadata(
            method=method,
            model=model,
            rho=rho,
            n=plan.n,
            seed=plan.seed,
            stream_id=plan.stream_id,
            evaluations=plan.evaluations,
            sampling=plan.sampling,
            factors=labels,
            assumptions=list(assumptions),
        ),
        variance=float(variance),
    )


def bootstrap(
    plan: SamplePlan,
    evaluations: tuple,
    b: int,
    stream: RandomStream,
) -> tuple[np.ndarray, np.ndarray]:
    """
    2.5/97.5 percentile intervals of main and total indices.

    Rows are resampled jointly across A, B and every AB_j so pick-freeze pairs
    stay intact. Returns two (g, 2) arrays.
    """
    if b < 100:
        raise DomainError(f"bootstrap needs at least 100 resamples, got {b}")
    if plan.n < 2:
        raise DomainError("bootstrap needs n > 1")
    f_A, f_B, f_AB = _check_evaluations(plan, *evaluations)

    rng = stream.generator()
    mains = np.empty((b, plan.g))
    totals = np.empty((b, plan.g))

    logger.debug(f"Bootstrapping {b} resamples of {plan.n} rows")
    for start in range(0, b, _BOOTSTRAP_CHUNK):
        stop = min(start + _BOOTSTRAP_CHUNK, b)
        rows = rng.integers(0, plan.n, size=(stop - start, plan.n))
        m, t, _ = _indices(f_A[rows], f_B[rows], f_AB[:, rows])
        mains[start:stop] = m.T
        totals[start:stop] = t.T

    main_ci = np.nanpercentile(mains, [2.5, 97.5], axis=0).T
    total_ci = np.nanpercentile(totals, [2.5, 97.5], axis=0).T
    return main_ci, total_ci


def with_intervals(report: SensitivityReport, main_ci: np.ndarray, total_ci: np.ndarray, b: int) -> SensitivityReport:
    indices = [
        fi.model_copy(update={
            "main_ci": (float(mc[0]), float(mc[1])),
            "total_ci": (float(tc[0]), float(tc[1])),
        })
        for fi, mc, tc in zip(report.indices, main_ci, total_ci)
    ]
    metadata = report.metadata.model_copy(update={"bootstrap": b})
    return report.model_copy(update={"indices": indices, "metadata": metadata})


def evaluate_plan(plan: SamplePlan, problem: Problem, workers: int = 1):
    """Model outputs on A, B and each AB_j."""
    out = problem.evaluate(plan.stacked(), workers)
    n = plan.n
    return out[:n], out[n:2 * n], out[2 * n:].reshape(plan.g, n)


def analyze(
    problem: Problem,
    n: int,
    stream: RandomStream,
    bootstrap_samples: int = 0,
    sampling: SamplingMode = "pseudo_random",
    workers: int = 1,
    method: str = "sobol_independent",
    rho: Optional[float] = None,
) -> SensitivityReport:
    """
    Build a plan for ``problem``, evaluate it and estimate indices.

    Bootstrap resampling draws from a separate substream of ``stream``.
    """
    plan = build_plan(problem.k, n, problem.partition, stream, problem.space.corr, sampling)
    logger.info(
        f"{method} on {problem.name}: n={n}, groups={plan.g}, evaluations={plan.evaluations}"
    )
    evaluations = evaluate_plan(plan, problem, workers)
    report = estimate(
        plan,
        *evaluations,
        labels=problem.labels,
        method=method,
        model=problem.name,
        rho=rho,
        assumptions=problem.assumptions,
    )
    if bootstrap_samples:
        main_ci, total_ci = bootstrap(plan, evaluations, bootstrap_samples, stream.substream(1))
        report = with_intervals(report, main_ci, total_ci, bootstrap_samples)
    return report


class PairModel(Protocol):
    """A model with one known correlated pair of factors."""
    name: str
    names: tuple[str, ...]
    correlated_pair: tuple[int, int]

    def marginals(self) -> tuple[Marginal, ...]: ...

    def __call__(self, x: np.ndarray) -> np.ndarray: ...


def grouped_problem(model: PairModel, rho: float) -> Problem:
    """The pair as one jointly sampled group, every other factor on its own."""
    if not -1.0 < rho < 1.0:
        raise DomainError(f"correlation must lie in (-1, 1), got {rho}")
    k = len(model.names)
    i, j = model.correlated_pair
    corr = np.eye(k)
    corr[i, j] = corr[j, i] = rho
    groups = ((i, j), *((m,) for m in range(k) if m not in (i, j)))
    return Problem(
        name=model.name,
        space=FactorSpace(tuple(model.names), tuple(model.marginals()), corr),
        func=model,
        groups=groups,
    )


def estimate_grouped_pair(
    model: PairModel,
    rho: float,
    n: int,
    stream: RandomStream,
    bootstrap_samples: int = 0,
    sampling: SamplingMode = "pseudo_random",
    workers: int = 1,
) -> SensitivityReport:
    """Sobol indices with the correlated pair pick-frozen as one group."""
    return analyze(
        grouped_problem(model, rho),
        n,
        stream,
        bootstrap_samples=bootstrap_samples,
        sampling=sampling,
        workers=workers,
        method="sobol_grouped",
        rho=rho,
    )
