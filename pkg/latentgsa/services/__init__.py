"""
Service modules for sampling, estimators, benchmark models, PBPK simulation and reporting.
"""
from .sampling import FactorSpace, Marginal, RandomStream
from .latent import LatentDecomposition, decompose
from .evaluation import Problem, evaluate_rows
from .sobol import SamplePlan, build_plan, estimate, estimate_grouped_pair
from .kucherenko import GaussianJoint, conditional, estimate_kucherenko
from .algebraic import AlgebraicModel, analytic_indices, build_problem, latent_lift
from .ode import OdeProblem, Trajectory, auc_augmented, integrate
from .pbpk import PBPKModel, PBPKSystem, build_system, generate_individual, simulate_subject
from . import reporting
from . import runner

__all__ = [
    "FactorSpace",
    "Marginal",
    "RandomStream",
    "LatentDecomposition",
    "decompose",
    "Problem",
    "evaluate_rows",
    "SamplePlan",
    "build_plan",
    "estimate",
    "estimate_grouped_pair",
    "GaussianJoint",
    "conditional",
    "estimate_kucherenko",
    "AlgebraicModel",
    "analytic_indices",
    "build_problem",
    "latent_lift",
    "OdeProblem",
    "Trajectory",
    "auc_augmented",
    "integrate",
    "PBPKModel",
    "PBPKSystem",
    "build_system",
    "generate_individual",
    "simulate_subject",
    "reporting",
    "runner",
]
