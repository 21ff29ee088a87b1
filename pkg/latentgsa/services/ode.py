"""
Adaptive ODE integration with augmented-state integrals.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from loguru import logger
from scipy.integrate import solve_ivp
from tenacity import Retrying, retry_if_exception, stop_after_attempt

from latentgsa.errors import (
    DomainError,
    IntegrationError,
    NonFiniteDerivativeError,
    StepSizeUnderflowError,
)

Rhs = Callable[[float, np.ndarray], np.ndarray]

RTOL_RANGE = (1e-10, 1e-3)


@dataclass(frozen=True)
class OdeProblem:
    rhs: Rhs
    y0: np.ndarray
    t_span: tuple[float, float] = (0.0, 168.0)
    rtol: float = 1e-8
    atol: float = 1e-10
    method: str = "BDF"
    fallback_method: Optional[str] = "DOP853"
    t_eval: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def dimension(self) -> int:
        return len(self.y0)


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    auxiliaries: Optional[np.ndarray] = None
    method: str = ""
    nfev: int = 0

    @property
    def final_state(self) -> np.ndarray:
        return self.states[:, -1]


def _guarded(rhs: Rhs) -> Rhs:
    def f(t, y):
        dy = np.asarray(rhs(t, y), dtype=float)
        if not np.all(np.isfinite(dy)):
            raise NonFiniteDerivativeError(f"non-finite derivative at t={t:.6g} h")
        return dy
    return f


def _validate(problem: OdeProblem) -> np.ndarray:
    lo, hi = RTOL_RANGE
    if not lo <= problem.rtol <= hi:
        raise DomainError(f"rtol must lie in [{lo:g}, {hi:g}], got {problem.rtol:g}")
    if not problem.atol > 0:
        raise DomainError("atol must be positive")
    y0 = np.asarray(problem.y0, dtype=float)
    if y0.ndim != 1 or not np.all(np.isfinite(y0)):
        raise DomainError("initial state must be a finite vector")
    t0, t1 = problem.t_span
    if not t1 > t0:
        raise DomainError(f"empty time span ({t0}, {t1})")
    return y0


def _solve(problem: OdeProblem, y0: np.ndarray, method: str) -> Trajectory:
    sol = solve_ivp(
        _guarded(problem.rhs),
        problem.t_span,
        y0,
        method=method,
        t_eval=problem.t_eval,
        rtol=problem.rtol,
        atol=problem.atol,
    )
    if sol.status == -1:
        if "step size" in sol.message.lower():
            raise StepSizeUnderflowError(f"{method}: {sol.message}")
        raise IntegrationError(f"{method}: {sol.message}")
    if not np.all(np.isfinite(sol.y)):
        raise NonFiniteDerivativeError(f"{method}: non-finite state")
    return Trajectory(times=sol.t, states=sol.y, method=method, nfev=int(sol.nfev))


def _retryable(e: BaseException) -> bool:
    return isinstance(e, IntegrationError) and not isinstance(e, NonFiniteDerivativeError)


def integrate(problem: OdeProblem) -> Trajectory:
    """
    Solve ``problem`` over its time span.

    The primary method is tried first; on solver failure the fallback method
    takes over. ``Trajectory.nfev`` counts right-hand-side evaluations.
    """
    y0 = _validate(problem)
    methods = [problem.method]
    if problem.fallback_method and problem.fallback_method != problem.method:
        methods.append(problem.fallback_method)

    def _log_fallback(state):
        logger.warning(
            f"{methods[state.attempt_number - 1]} failed "
            f"({state.outcome.exception()}), retrying with {methods[state.attempt_number]}"
        )

    for attempt in Retrying(
        stop=stop_after_attempt(len(methods)),
        retry=retry_if_exception(_retryable),
        before_sleep=_log_fallback,
        reraise=True,
    ):
        with attempt:
            method = methods[attempt.retry_state.attempt_number - 1]
            trajectory = _solve(problem, y0, method)
    return trajectory


def auc_augmented(problem: OdeProblem, observe: Callable[[np.ndarray], float]) -> tuple[Trajectory, float]:
    """
    Integrate with an extra coordinate dA/dt = observe(y).

    Returns the trajectory (with A as its single auxiliary row) and A(t_end).
    """
    d = problem.dimension
    rhs = problem.rhs

    def augmented(t, y):
        return np.append(rhs(t, y[:d]), observe(y[:d]))

    y0 = np.append(np.asarray(problem.y0, dtype=float), 0.0)
    t_eval = problem.t_eval
    if t_eval is not None and t_eval[-1] < problem.t_span[1]:
        # the integral is read at the last output time
        t_eval = np.append(t_eval, problem.t_span[1])
    full = integrate(dataclasses.replace(problem, rhs=augmented, y0=y0, t_eval=t_eval))
    trajectory = Trajectory(
        times=full.times,
        states=full.states[:d],
        auxiliaries=full.states[d:],
        method=full.method,
        nfev=full.nfev,
    )
    return trajectory, float(full.states[d, -1])
