"""
Model evaluation over sample matrices, optionally spread over worker processes.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import partial
from typing import Callable, Optional, Sequence

import anyio
import anyio.to_process
import numpy as np
from loguru import logger

from latentgsa.errors import DomainError, PartitionError
from latentgsa.services.sampling import FactorSpace

ModelFunc = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Problem:
    """
    A model bound to its input space.

    ``func`` maps an m×k matrix in native units to m outputs and must be
    picklable when evaluated with more than one worker.
    """
    name: str
    space: FactorSpace
    func: ModelFunc
    groups: Optional[tuple[tuple[int, ...], ...]] = None
    assumptions: tuple[str, ...] = field(default=())

    @property
    def k(self) -> int:
        return self.space.k

    @property
    def partition(self) -> tuple[tuple[int, ...], ...]:
        return self.groups if self.groups is not None else tuple((j,) for j in range(self.k))

    @property
    def labels(self) -> list[str]:
        return ["+".join(self.space.names[j] for j in g) for g in self.partition]

    def evaluate(self, z: np.ndarray, workers: int = 1) -> np.ndarray:
        return evaluate_rows(self.func, self.space.transform(z), workers)


def validate_groups(k: int, groups: Sequence[Sequence[int]]) -> tuple[tuple[int, ...], ...]:
    """Check that ``groups`` (0-based) partitions range(k)."""
    seen: set[int] = set()
    out = []
    for g in groups:
        g = tuple(int(j) for j in g)
        if not g:
            raise PartitionError("empty group")
        for j in g:
            if not 0 <= j < k:
                raise PartitionError(f"factor index {j} outside 0..{k - 1}")
            if j in seen:
                raise PartitionError(f"factor {j} appears in more than one group")
            seen.add(j)
        out.append(g)
    if len(seen) != k:
        missing = sorted(set(range(k)) - seen)
        raise PartitionError(f"groups do not cover factors {missing}")
    return tuple(out)


def _chunks(n_rows: int, workers: int) -> list[slice]:
    size = max(1, -(-n_rows // (workers * 4)))
    return [slice(i, min(i + size, n_rows)) for i in range(0, n_rows, size)]


async def _evaluate_parallel(func: ModelFunc, x: np.ndarray, workers: int) -> np.ndarray:
    limiter = anyio.CapacityLimiter(workers)
    slices = _chunks(len(x), workers)
    results: list[Optional[np.ndarray]] = [None] * len(slices)

    async def _run(i: int, rows: slice):
        results[i] = await anyio.to_process.run_sync(
            partial(_call, func), x[rows], limiter=limiter
        )

    async with anyio.create_task_group() as tg:
        for i, rows in enumerate(slices):
            tg.start_soon(_run, i, rows)

    return np.concatenate(results)


def _call(func: ModelFunc, rows: np.ndarray) -> np.ndarray:
    out = np.asarray(func(rows), dtype=float)
    if out.ndim > 1:
        return out.reshape(len(rows), -1)
    return out.reshape(len(rows))


def evaluate_rows(func: ModelFunc, x: np.ndarray, workers: int = 1) -> np.ndarray:
    """
    Evaluate ``func`` on every row of ``x``.

    ``func`` returns one value per row, or one vector per row as an (m, p)
    matrix. Rows are split in order and re-assembled in order, so the result does not
    depend on ``workers``.
    """
    if workers < 1:
        raise DomainError("workers must be >= 1")
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if workers == 1 or len(x) < 2 * workers:
        out = _call(func, x)
    else:
        logger.debug(f"Evaluating {len(x)} rows on {workers} workers")
        out = anyio.run(_evaluate_parallel, func, x, workers)
    if not np.all(np.isfinite(out)):
        raise DomainError("model returned non-finite outputs")
    return out
