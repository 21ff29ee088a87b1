"""
Algebraic benchmark models with one correlated pair (X1, X4).

    model1: Y = X1 + X2 + X2*X3
    model2: Y = X1 + X2 + X1*X3
    model3: Y = X1 + X2 + X3 + X4

All factors are standard normal; X4 is inert in models 1 and 2.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from latentgsa.errors import DomainError
from latentgsa.services.evaluation import Problem
from latentgsa.services.latent import LatentDecomposition, decompose
from latentgsa.services.sampling import FactorSpace, Marginal
from latentgsa.services.sobol import grouped_problem

AlgebraicId = Literal["model1", "model2", "model3"]
ALGEBRAIC_MODELS = ("model1", "model2", "model3")

FACTORS = ("X1", "X2", "X3", "X4")
LATENT_FACTORS = ("eps1", "X2", "X3", "eps4", "eta")

# X1 and X4 (0-based)
CORRELATED_PAIR = (0, 3)


@dataclass(frozen=True)
class AlgebraicModel:
    name: AlgebraicId
    names: tuple[str, ...] = field(default=FACTORS, init=False)
    correlated_pair: tuple[int, int] = field(default=CORRELATED_PAIR, init=False)

    def __post_init__(self):
        if self.name not in ALGEBRAIC_MODELS:
            raise DomainError(f"unknown algebraic model '{self.name}'")

    def marginals(self) -> tuple[Marginal, ...]:
        return (Marginal.normal(0.0, 1.0),) * 4

    def eval(self, x) -> float:
        """Output for a single 4-vector."""
        x = np.asarray(x, dtype=float)
        if x.shape != (4,):
            raise DomainError("algebraic models take exactly 4 factors")
        return float(self(x[None, :])[0])

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(x)
        x1, x2, x3, x4 = x[:, 0], x[:, 1], x[:, 2], x[:, 3]
        if self.name == "model1":
            return x1 + x2 + x2 * x3
        if self.name == "model2":
            return x1 + x2 + x1 * x3
        return x1 + x2 + x3 + x4


@dataclass(frozen=True)
class LatentLift:
    """
    A model re-parameterized over (eps1, X2, X3, eps4, eta).

    The eps columns arrive in native units with variance 1 - |rho|.
    """
    model: AlgebraicModel
    decomposition: LatentDecomposition

    @property
    def name(self) -> str:
        return self.model.name

    @property
    def names(self) -> tuple[str, ...]:
        return LATENT_FACTORS

    def marginals(self) -> tuple[Marginal, ...]:
        s1, s2 = self.decomposition.unique_sd
        return (
            Marginal.normal(0.0, s1),
            Marginal.normal(0.0, 1.0),
            Marginal.normal(0.0, 1.0),
            Marginal.normal(0.0, s2),
            Marginal.normal(0.0, 1.0),
        )

    def __call__(self, u: np.ndarray) -> np.ndarray:
        u = np.atleast_2d(u)
        eta = u[:, 4]
        x = np.column_stack((
            self.decomposition.lambda1 * eta + u[:, 0],
            u[:, 1],
            u[:, 2],
            self.decomposition.lambda2 * eta + u[:, 3],
        ))
        return self.model(x)


def latent_lift(model: AlgebraicModel, rho: float) -> LatentLift:
    return LatentLift(model, decompose(rho))


def _standard_space(names, corr=None) -> FactorSpace:
    return FactorSpace(tuple(names), (Marginal.normal(0.0, 1.0),) * len(names), corr)


def _pair_corr(rho: float) -> np.ndarray:
    corr = np.eye(4)
    i, j = CORRELATED_PAIR
    corr[i, j] = corr[j, i] = rho
    return corr


def build_problem(model_id: str, method: str, rho: float = 0.0) -> Problem:
    """
    The factor space and evaluator a method works on.

    sobol_independent ignores ``rho``; the other methods carry it through a
    joint law, a group or a latent lift.
    """
    if not -1.0 < rho < 1.0:
        raise DomainError(f"correlation must lie in (-1, 1), got {rho}")
    model = AlgebraicModel(model_id)

    if method == "sobol_independent":
        return Problem(model_id, _standard_space(FACTORS), model)
    if method == "sobol_grouped":
        return grouped_problem(model, rho)
    if method == "kucherenko":
        return Problem(model_id, _standard_space(FACTORS, _pair_corr(rho)), model)
    if method == "latent":
        lift = latent_lift(model, rho)
        d = lift.decomposition
        return Problem(
            model_id,
            FactorSpace(LATENT_FACTORS, lift.marginals()),
            lift,
            assumptions=(
                f"X1 and X4 decomposed with loadings ({d.lambda1:.6g}, {d.lambda2:.6g})",
            ),
        )
    raise DomainError(f"unknown method '{method}'")


def analytic_indices(model_id: str, method: str, rho: float = 0.0) -> dict[str, tuple[float, float]]:
    """
    Closed-form (main, total) per factor for standard normal inputs.

    Obtained from the variance algebra of each model; used as reference values.
    """
    if model_id not in ALGEBRAIC_MODELS:
        raise DomainError(f"unknown algebraic model '{model_id}'")
    if not -1.0 < rho < 1.0:
        raise DomainError(f"correlation must lie in (-1, 1), got {rho}")
    r = abs(rho)

    if model_id == "model1":
        table = {
            "sobol_independent": {
                "X1": (1, 1), "X2": (1, 2), "X3": (0, 1), "X4": (0, 0),
            },
            "sobol_grouped": {
                "X1+X4": (1, 1), "X2": (1, 2), "X3": (0, 1),
            },
            "kucherenko": {
                "X1": (1, 1 - rho ** 2), "X2": (1, 2), "X3": (0, 1), "X4": (rho ** 2, 0),
            },
            "latent": {
                "eps1": (1 - r, 1 - r), "X2": (1, 2), "X3": (0, 1), "eps4": (0, 0), "eta": (r, r),
            },
        }
        variance = 3.0
    elif model_id == "model2":
        table = {
            "sobol_independent": {
                "X1": (1, 2), "X2": (1, 1), "X3": (0, 1), "X4": (0, 0),
            },
            "sobol_grouped": {
                "X1+X4": (1, 2), "X2": (1, 1), "X3": (0, 1),
            },
            "kucherenko": {
                "X1": (1, 2 * (1 - rho ** 2)), "X2": (1, 1), "X3": (0, 1), "X4": (rho ** 2, 0),
            },
            "latent": {
                "eps1": (1 - r, 2 * (1 - r)), "X2": (1, 1), "X3": (0, 1), "eps4": (0, 0),
                "eta": (r, 2 * r),
            },
        }
        variance = 3.0
    else:
        eta = 4 * rho if rho > 0 else 0.0
        table = {
            "sobol_independent": {f: (1, 1) for f in FACTORS},
            "sobol_grouped": {
                "X1+X4": (2 + 2 * rho, 2 + 2 * rho), "X2": (1, 1), "X3": (1, 1),
            },
            "kucherenko": {
                "X1": ((1 + rho) ** 2, 1 - rho ** 2),
                "X2": (1, 1),
                "X3": (1, 1),
                "X4": ((1 + rho) ** 2, 1 - rho ** 2),
            },
            "latent": {
                "eps1": (1 - r, 1 - r), "X2": (1, 1), "X3": (1, 1), "eps4": (1 - r, 1 - r),
                "eta": (eta, eta),
            },
        }
        variance = 4.0 if method == "sobol_independent" else 4.0 + 2.0 * rho

    if method not in table:
        raise DomainError(f"unknown method '{method}'")
    return {
        name: (float(m) / variance, float(t) / variance)
        for name, (m, t) in table[method].items()
    }
