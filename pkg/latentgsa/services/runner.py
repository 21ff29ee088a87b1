"""
Batch runs: method dispatch, rho sweeps and population simulation.
"""
from __future__ import annotations

import os
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd
from loguru import logger

from latentgsa.errors import ConfigError, GSAError
from latentgsa.models.schemas import (
    AUCSummary,
    ErrorRecord,
    RunConfig,
    SensitivityReport,
    WideningTest,
)
from latentgsa.services import reporting
from latentgsa.services.algebraic import ALGEBRAIC_MODELS, analytic_indices, build_problem
from latentgsa.services.evaluation import Problem, evaluate_rows
from latentgsa.services.kucherenko import estimate_kucherenko
from latentgsa.services.pbpk import (
    PopulationSimulator,
    covariates_from_coordinates,
    pbpk_problem,
    population_grid,
    sample_coordinates,
)
from latentgsa.services.sampling import RandomStream
from latentgsa.services.sobol import analyze

# stream ids; each method keeps its stream across rho values
METHOD_STREAMS = {
    "sobol_independent": 0,
    "sobol_grouped": 1,
    "kucherenko": 2,
    "latent": 3,
}
POPULATION_STREAM = 10

BAND_PERCENTILES = (2.5, 25.0, 50.0, 75.0, 97.5)


@dataclass
class RunOutcome:
    reports: list[SensitivityReport] = field(default_factory=list)
    errors: list[ErrorRecord] = field(default_factory=list)
    timings: dict[str, float] = field(default_factory=dict)
    files: list[Path] = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        if not self.errors:
            return 0
        return 3 if not self.reports else 4


def _reference(model: str, method: str, rho: float) -> Optional[dict]:
    if model not in ALGEBRAIC_MODELS:
        return None
    return analytic_indices(model, method, rho)


def method_problem(config: RunConfig, method: str, rho: Optional[float]) -> Problem:
    if config.model == "pbpk_mdz":
        pbpk = config.pbpk if rho is None else config.pbpk.model_copy(update={"rho_cyp": rho})
        return pbpk_problem(method, pbpk)
    return build_problem(config.model, method, 0.0 if rho is None else rho)


def _workers(config: RunConfig) -> int:
    # process fan-out for ODE models only
    if config.model == "pbpk_mdz":
        return config.workers or os.cpu_count() or 1
    return config.workers or 1


def run_method(config: RunConfig, method: str, rho: Optional[float]) -> SensitivityReport:
    """One (model, method, rho) analysis."""
    stream = RandomStream(config.seed, METHOD_STREAMS[method])
    problem = method_problem(config, method, rho)
    n = config.sample_size
    if method == "kucherenko":
        return estimate_kucherenko(
            problem,
            n,
            stream,
            convergence_sizes=config.kucherenko.convergence,
            workers=_workers(config),
            rho=rho,
        )
    return analyze(
        problem,
        n,
        stream,
        bootstrap_samples=config.bootstrap_count,
        sampling=config.sampling,
        workers=_workers(config),
        method=method,
        rho=rho,
    )


def _plan(config: RunConfig, rhos: list[float]) -> list[tuple[str, Optional[float]]]:
    keys = []
    for method in config.methods:
        if method == "sobol_independent":
            keys.append((method, None))
        else:
            keys.extend((method, r) for r in rhos)
    return keys


def _execute(config: RunConfig, keys, out_dir: Path) -> RunOutcome:
    out_dir.mkdir(parents=True, exist_ok=True)
    outcome = RunOutcome()
    logger.info(f"Running {len(keys)} analyses of {config.model} into {out_dir}")

    for method, rho in keys:
        stem = reporting.run_stem(config.model, method, rho)
        start = time.perf_counter()
        try:
            report = run_method(config, method, rho)
        except GSAError as e:
            logger.error(f"{stem} failed: {type(e).__name__}: {e}")
            record = ErrorRecord(
                model=config.model, method=method, rho=rho, error=type(e).__name__, detail=str(e)
            )
            outcome.errors.append(record)
            outcome.files.append(reporting.write_error(record, out_dir))
        else:
            outcome.reports.append(report)
            outcome.files.extend(reporting.write_report(report, out_dir))
        outcome.timings[stem] = time.perf_counter() - start

    outcome.files.append(reporting.write_schema(out_dir))
    if outcome.reports:
        outcome.files.append(reporting.write_summary(outcome.reports, out_dir, _reference))
    outcome.files.append(reporting.write_timings(outcome.timings, out_dir))
    logger.info(f"Finished: {len(outcome.reports)} reports, {len(outcome.errors)} errors")
    return outcome


def _rhos(config: RunConfig) -> list[float]:
    if config.model == "pbpk_mdz":
        return [config.pbpk.rho_cyp]
    return config.rho_values


def run(config: RunConfig, out_dir: Path) -> RunOutcome:
    """
    Every configured method at every configured rho.

    For the PBPK model the correlation is ``pbpk.rho_cyp``.
    """
    return _execute(config, _plan(config, _rhos(config)), out_dir)


def sweep(config: RunConfig, out_dir: Path) -> RunOutcome:
    """All methods over ``rho_sweep`` plus one combined sweep table."""
    outcome = _execute(config, _plan(config, list(config.rho_sweep)), out_dir)
    if outcome.reports:
        outcome.files.append(reporting.write_sweep(outcome.reports, config.model, out_dir))
    return outcome


# --------------------------------------------------
# Population
# --------------------------------------------------
def widening_test(log_auc_correlated, log_auc_independent, b: int, stream: RandomStream) -> WideningTest:
    """
    One-sided paired bootstrap test of var(log AUC) correlated > independent.

    Subjects are resampled jointly across both arms; the p-value is the share
    of resamples in which the difference is not positive.
    """
    a = np.asarray(log_auc_correlated, dtype=float)
    c = np.asarray(log_auc_independent, dtype=float)
    if a.shape != c.shape or len(a) < 2:
        raise ConfigError("widening test needs paired samples of at least two subjects")
    if b < 100:
        raise ConfigError("widening test needs at least 100 bootstrap resamples")

    rng = stream.generator()
    diffs = np.empty(b)
    chunk = 100
    for start in range(0, b, chunk):
        stop = min(start + chunk, b)
        rows = rng.integers(0, len(a), size=(stop - start, len(a)))
        diffs[start:stop] = a[rows].var(axis=1, ddof=1) - c[rows].var(axis=1, ddof=1)

    var_a = float(a.var(ddof=1))
    var_c = float(c.var(ddof=1))
    p_value = float(np.mean(diffs <= 0.0))
    return WideningTest(
        variance_correlated=var_a,
        variance_independent=var_c,
        difference=var_a - var_c,
        p_value=p_value,
        bootstrap=b,
        significant=p_value < 0.05,
    )


@dataclass
class PopulationOutcome:
    auc: pd.DataFrame
    summaries: list[AUCSummary]
    widening: Optional[WideningTest] = None
    files: list[Path] = field(default_factory=list)
    timings: dict[str, float] = field(default_factory=dict)


def _bands(grid, conc: np.ndarray) -> pd.DataFrame:
    pct = np.percentile(conc, BAND_PERCENTILES, axis=0)
    frame = {"time_h": np.asarray(grid)}
    for p, row in zip(BAND_PERCENTILES, pct):
        frame[f"p{p:g}".replace(".", "_")] = row
    return pd.DataFrame(frame)


def simulate_population(config: RunConfig, out_dir: Path) -> PopulationOutcome:
    """
    Virtual population per configured mode: AUCs, concentration bands and
    optionally per-subject profiles.

    All modes draw from one stream, so subject i differs between modes only in
    its CYP abundances.
    """
    if config.model != "pbpk_mdz":
        raise ConfigError("population simulation requires model 'pbpk_mdz'")
    pop = config.population
    pbpk = config.pbpk
    out_dir.mkdir(parents=True, exist_ok=True)

    stream = RandomStream(config.seed, POPULATION_STREAM)
    grid = population_grid(pbpk.t_end_h, pop.grid_points)
    logger.info(f"Simulating {pop.subjects} subjects for modes {pop.modes}")

    frames, summaries, files = [], [], []
    timings: dict[str, float] = {}
    log_auc: dict[str, np.ndarray] = {}
    for mode in pop.modes:
        start = time.perf_counter()
        u = sample_coordinates(pop.subjects, mode, stream, pbpk)
        out = evaluate_rows(PopulationSimulator(mode, grid, pbpk), u, _workers(config))
        auc, conc = out[:, 0], out[:, 1:]
        cov = covariates_from_coordinates(u, mode, pbpk)

        frames.append(pd.DataFrame({
            "subject": np.arange(pop.subjects),
            "mode": mode,
            "sex": cov.sex,
            "height_cm": cov.height_cm,
            "bmi": cov.bmi,
            "cyp3a4": cov.cyp3a4,
            "cyp3a5": cov.cyp3a5,
            "mppgl": cov.mppgl,
            "auc": auc,
        }))
        files.append(reporting.write_bands(_bands(grid, conc), mode, out_dir))
        if pop.export_profiles:
            profiles = pd.DataFrame(conc, columns=[f"{t:.6g}" for t in grid])
            profiles.insert(0, "subject", np.arange(pop.subjects))
            files.append(reporting.write_profiles(profiles, mode, out_dir))

        log_auc[mode] = np.log(np.clip(auc, np.finfo(float).tiny, None))
        summaries.append(AUCSummary(
            mode=mode,
            subjects=pop.subjects,
            median=float(np.median(auc)),
            p2_5=float(np.percentile(auc, 2.5)),
            p97_5=float(np.percentile(auc, 97.5)),
            log_auc_variance=float(log_auc[mode].var(ddof=1)) if pop.subjects > 1 else 0.0,
        ))
        timings[f"population_{mode}"] = time.perf_counter() - start
        logger.info(f"{mode}: median AUC {summaries[-1].median:.4g} mg*h/L")

    auc_frame = pd.concat(frames, ignore_index=True)
    files.append(reporting.write_population_auc(auc_frame, out_dir))
    files.append(reporting.write_auc_summary(summaries, out_dir))

    widening = None
    if {"independent", "correlated"} <= set(pop.modes) and pop.bootstrap >= 100 and pop.subjects > 1:
        widening = widening_test(
            log_auc["correlated"], log_auc["independent"], pop.bootstrap, stream.substream(1)
        )
        files.append(reporting.write_widening(widening, out_dir))
        logger.info(f"Widening test: difference {widening.difference:.4g}, p = {widening.p_value:.4g}")
    files.append(reporting.write_timings(timings, out_dir))

    return PopulationOutcome(auc_frame, summaries, widening, files, timings)


class AnalysisService:
    """Runs one validated configuration into one output directory."""

    def __init__(self, config: RunConfig, out_dir: Path):
        self.config = config
        self.out_dir = Path(out_dir)

    def run(self) -> RunOutcome:
        return run(self.config, self.out_dir)

    def sweep(self) -> RunOutcome:
        return sweep(self.config, self.out_dir)

    def population(self) -> PopulationOutcome:
        return simulate_population(self.config, self.out_dir)