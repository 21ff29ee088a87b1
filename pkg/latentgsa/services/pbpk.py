"""
Whole-body PBPK model of intravenous midazolam.

Units: amounts mg, volumes L, flows L/h, time h, concentrations mg/L.
State layout: 15 tissues, arterial blood, venous blood and two cumulative
metabolism states (CYP3A4, CYP3A5).
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Literal, Optional, Sequence

import numpy as np
import pandas as pd
from loguru import logger
from scipy.special import ndtr

from latentgsa.errors import DomainError, ModelStructureError
from latentgsa.models.schemas import PBPKConfig
from latentgsa.services.evaluation import Problem
from latentgsa.services.latent import decompose, reconstruct_original
from latentgsa.services.ode import OdeProblem, Trajectory, auc_augmented
from latentgsa.services.sampling import FactorSpace, Marginal, RandomStream, to_marginal
from latentgsa.services.sobol import grouped_problem

DATA_DIR = Path(__file__).resolve().parent.parent / "data"

ORGANS = (
    "adipose", "bone", "brain", "heart", "muscle", "skin", "spleen", "kidney",
    "gonads", "lung", "stomach", "small_intestine", "large_intestine", "liver",
    "pancreas",
)
SPLANCHNIC = ("spleen", "pancreas", "stomach", "small_intestine", "large_intestine")
# organs draining straight into venous blood, liver excluded
PERIPHERAL = ("adipose", "bone", "brain", "heart", "muscle", "skin", "kidney", "gonads")

N_TISSUE = len(ORGANS)
LUNG = ORGANS.index("lung")
LIVER = ORGANS.index("liver")
ART, VEN, MET_3A4, MET_3A5 = N_TISSUE, N_TISSUE + 1, N_TISSUE + 2, N_TISSUE + 3
N_STATE = N_TISSUE + 4
STATE_NAMES = ORGANS + ("arterial", "venous", "met_cyp3a4", "met_cyp3a5")

_SPLANCHNIC_IDX = np.array([ORGANS.index(o) for o in SPLANCHNIC])
_PERIPHERAL_IDX = np.array([ORGANS.index(o) for o in PERIPHERAL])
_ARTERIAL_FED = np.array([i for i in range(N_TISSUE) if i != LUNG])

FEMALE, MALE = 0, 1
ENZYMES = ("CYP3A4", "CYP3A5")
TISSUE_COLUMNS = ["organ", "f_nl", "f_ph", "f_w", "density", "wfrac_m", "wfrac_f", "qfrac_m", "qfrac_f"]

PopulationMode = Literal["independent", "correlated", "latent"]
MODES = ("independent", "correlated", "latent")

FACTORS = ("sex", "height", "bmi", "cyp3a4", "cyp3a5", "mppgl")
LATENT_FACTORS = ("sex", "height", "bmi", "eps_cyp3a4", "eps_cyp3a5", "mppgl", "eta")
# CYP3A4 and CYP3A5 (0-based)
CORRELATED_PAIR = (3, 4)


# --------------------------------------------------
# Tables
# --------------------------------------------------
@dataclass(frozen=True)
class TissueComposition:
    f_nl: float
    f_ph: float
    f_w: float


@dataclass(frozen=True)
class TissueData:
    """Composition, density and sex-specific weight/flow fractions in ORGANS order."""
    organs: tuple[str, ...]
    f_nl: np.ndarray = field(repr=False)
    f_ph: np.ndarray = field(repr=False)
    f_w: np.ndarray = field(repr=False)
    density: np.ndarray = field(repr=False)
    wfrac: dict = field(repr=False)
    qfrac: dict = field(repr=False)
    plasma: TissueComposition = field(repr=False)

    def composition(self, organ: str) -> TissueComposition:
        i = self.organs.index(organ)
        return TissueComposition(float(self.f_nl[i]), float(self.f_ph[i]), float(self.f_w[i]))

    def weight_fractions(self, sex: int) -> np.ndarray:
        return self.wfrac[sex]

    def flow_fractions(self, sex: int, normalize: bool = True) -> np.ndarray:
        """
        Fractions of cardiac output per organ.

        The lung carries the full output. With ``normalize`` the arterially fed
        organs are rescaled to sum to one.
        """
        q = self.qfrac[sex].copy()
        if normalize:
            q[_ARTERIAL_FED] /= q[_ARTERIAL_FED].sum()
        return q


def _tissues_from_frame(df: pd.DataFrame) -> TissueData:
    if list(df.columns) != TISSUE_COLUMNS:
        raise ModelStructureError(f"tissue table columns must be {TISSUE_COLUMNS}")
    df = df.set_index("organ")
    expected = set(ORGANS) | {"plasma"}
    if set(df.index) != expected or df.index.has_duplicates:
        raise ModelStructureError(
            f"tissue table organs differ from the model: {sorted(set(df.index) ^ expected)}"
        )
    fractions = df[["f_nl", "f_ph", "f_w", "wfrac_m", "wfrac_f", "qfrac_m", "qfrac_f"]]
    if ((fractions < 0) | (fractions > 1)).any().any():
        raise ModelStructureError("tissue fractions must lie in [0, 1]")
    if ((df["density"] < 0.9) | (df["density"] > 1.5)).any():
        raise ModelStructureError("tissue densities must lie in [0.9, 1.5] kg/L")

    plasma = df.loc["plasma"]
    t = df.loc[list(ORGANS)]
    return TissueData(
        organs=ORGANS,
        f_nl=t["f_nl"].to_numpy(float),
        f_ph=t["f_ph"].to_numpy(float),
        f_w=t["f_w"].to_numpy(float),
        density=t["density"].to_numpy(float),
        wfrac={MALE: t["wfrac_m"].to_numpy(float), FEMALE: t["wfrac_f"].to_numpy(float)},
        qfrac={MALE: t["qfrac_m"].to_numpy(float), FEMALE: t["qfrac_f"].to_numpy(float)},
        plasma=TissueComposition(float(plasma["f_nl"]), float(plasma["f_ph"]), float(plasma["f_w"])),
    )


@lru_cache(maxsize=4)
def load_tissues(path: Optional[str] = None) -> TissueData:
    """Read a tissue table; the shipped ``tissues_v1.csv`` by default."""
    source = Path(path) if path else DATA_DIR / "tissues_v1.csv"
    return _tissues_from_frame(pd.read_csv(source))


@dataclass(frozen=True)
class MichaelisMenten:
    enzyme: str
    metabolite: str
    vmax: float
    km: float


@dataclass(frozen=True)
class DrugParams:
    name: str
    molecular_weight: float
    log_pow: float
    b_to_p: float
    fu_p: float
    kinetics: tuple[MichaelisMenten, ...] = ()

    def __post_init__(self):
        for attr in ("molecular_weight", "b_to_p", "fu_p"):
            if not getattr(self, attr) > 0:
                raise DomainError(f"{attr} must be positive")
        if self.fu_p > 1:
            raise DomainError("fu_p must not exceed 1")
        for mm in self.kinetics:
            if mm.enzyme not in ENZYMES:
                raise DomainError(f"unsupported enzyme '{mm.enzyme}'")
            if not (mm.vmax > 0 and mm.km > 0):
                raise DomainError(f"{mm.enzyme}/{mm.metabolite}: vmax and km must be positive")

    @property
    def fu_t(self) -> float:
        return fraction_unbound_tissue(self.fu_p)


@lru_cache(maxsize=4)
def load_drug(name: str = "midazolam") -> DrugParams:
    params = pd.read_csv(DATA_DIR / f"{name}_v1.csv").set_index("parameter")["value"]
    kinetics = pd.read_csv(DATA_DIR / f"{name}_kinetics_v1.csv")
    return DrugParams(
        name=name,
        molecular_weight=float(params["molecular_weight"]),
        log_pow=float(params["log_pow"]),
        b_to_p=float(params["b_to_p"]),
        fu_p=float(params["fu_p"]),
        kinetics=tuple(
            MichaelisMenten(r.enzyme, r.metabolite, float(r.vmax), float(r.km))
            for r in kinetics.itertuples(index=False)
        ),
    )


# --------------------------------------------------
# Drug-tissue parameters
# --------------------------------------------------
def fraction_unbound_tissue(fu_p: float) -> float:
    return 1.0 / (1.0 + 0.5 * (1.0 - fu_p) / fu_p)


def partition_coefficient(
    drug: DrugParams,
    tissue: TissueComposition,
    plasma: TissueComposition,
    dvow_intercept: float = 0.0,
) -> float:
    """
    Tissue-to-plasma partition coefficient (Berezhkovskiy).

    log10 D_vow = 1.115 log10 P_ow + ``dvow_intercept``.
    """
    d_vow = 10.0 ** (1.115 * drug.log_pow + dvow_intercept)
    num = d_vow * (tissue.f_nl + 0.3 * tissue.f_ph) + (tissue.f_w / drug.fu_t + 0.7 * tissue.f_ph)
    den = d_vow * (plasma.f_nl + 0.3 * plasma.f_ph) + (plasma.f_w / drug.fu_p + 0.7 * plasma.f_ph)
    return num / den


def vmax_invivo(
    vmax_invitro: float,
    cyp_abundance: float,
    mppgl: float,
    liver_weight_g: float,
    mw: float,
) -> float:
    """In-vivo maximum rate in mg/h from pmol/min/(pmol CYP)."""
    pmol_per_min = vmax_invitro * cyp_abundance * mppgl * liver_weight_g
    return pmol_per_min * 60.0 * mw * 1e-9


def km_mg_per_l(km_um: float, mw: float) -> float:
    return km_um * mw / 1000.0


# --------------------------------------------------
# Individuals
# --------------------------------------------------
@dataclass(frozen=True)
class Individual:
    sex: int
    height_cm: float
    bmi: float
    bw: float
    cardiac_output: float
    volumes: np.ndarray = field(repr=False)
    flows: np.ndarray = field(repr=False)
    v_art: float
    v_ven: float
    liver_weight_g: float
    mppgl: float
    cyp3a4: float
    cyp3a5: float


def individual_from_covariates(
    sex: int,
    height_cm: float,
    bmi: float,
    cyp3a4: float,
    cyp3a5: float,
    mppgl: float,
    config: Optional[PBPKConfig] = None,
    tissues: Optional[TissueData] = None,
) -> Individual:
    """Organ volumes and flows of one subject from its covariates."""
    cfg = config or PBPKConfig()
    phys = cfg.physiology
    tissues = tissues or load_tissues()
    if sex not in (FEMALE, MALE):
        raise DomainError(f"sex must be 0 (female) or 1 (male), got {sex}")
    if not (height_cm > 0 and bmi > 0):
        raise DomainError("height and BMI must be positive")
    if min(cyp3a4, cyp3a5, mppgl) < 0:
        raise DomainError("enzyme abundances and MPPGL must be non-negative")

    male = sex == MALE
    h_mean = (phys.height_male_cm if male else phys.height_female_cm).mean
    co_mean = cfg.co_mean_l_min.male if male else cfg.co_mean_l_min.female

    bw = bmi * (height_cm / 100.0) ** 2
    cardiac_output = (height_cm / h_mean) ** 0.75 * co_mean * 60.0
    weights = tissues.weight_fractions(sex) * bw
    blood = (phys.blood_fraction_male if male else phys.blood_fraction_female) * bw

    return Individual(
        sex=sex,
        height_cm=float(height_cm),
        bmi=float(bmi),
        bw=float(bw),
        cardiac_output=float(cardiac_output),
        volumes=weights / tissues.density,
        flows=tissues.flow_fractions(sex, cfg.normalize_flows) * cardiac_output,
        v_art=phys.arterial_fraction * blood / phys.blood_density,
        v_ven=phys.venous_fraction * blood / phys.blood_density,
        liver_weight_g=float(weights[LIVER] * 1000.0),
        mppgl=float(mppgl),
        cyp3a4=float(cyp3a4),
        cyp3a5=float(cyp3a5),
    )


@dataclass(frozen=True)
class Covariates:
    sex: np.ndarray
    height_cm: np.ndarray
    bmi: np.ndarray
    cyp3a4: np.ndarray
    cyp3a5: np.ndarray
    mppgl: np.ndarray

    def __len__(self) -> int:
        return len(self.sex)

    def row(self, i: int) -> dict:
        return {f.name: getattr(self, f.name)[i].item() for f in dataclasses.fields(self)}


def _check_mode(mode: str) -> None:
    if mode not in MODES:
        raise DomainError(f"unknown population mode '{mode}', expected one of {MODES}")


def abundance_marginals(config: PBPKConfig) -> tuple[Marginal, Marginal, Marginal]:
    """Lognormal laws of CYP3A4, CYP3A5 and MPPGL."""
    phys = config.physiology
    return (
        Marginal.lognormal_from_mean_cv(phys.cyp3a4.mean, phys.cyp3a4.cv),
        Marginal.lognormal_from_mean_cv(phys.cyp3a5.mean, phys.cyp3a5.cv),
        Marginal.lognormal_from_mean_cv(phys.mppgl.mean, phys.mppgl.cv),
    )


def covariates_from_coordinates(u, mode: str, config: Optional[PBPKConfig] = None) -> Covariates:
    """
    Map GSA coordinates to covariates, row by row.

    Columns: sex in (0, 1), height, BMI, CYP3A4, CYP3A5, MPPGL, eta. Height and
    BMI are standard normal; the CYP columns are standard normal, or the unique
    parts with variance 1 - |rho| in latent mode, where the seventh column is
    the latent factor.
    """
    _check_mode(mode)
    cfg = config or PBPKConfig()
    phys = cfg.physiology
    u = np.atleast_2d(np.asarray(u, dtype=float))
    width = 7 if mode == "latent" else 6
    if u.shape[1] < width:
        raise DomainError(f"{mode} mode needs {width} coordinates, got {u.shape[1]}")

    sex = (u[:, 0] >= phys.sex_threshold).astype(int)
    male = sex == MALE
    h_mean = np.where(male, phys.height_male_cm.mean, phys.height_female_cm.mean)
    h_sd = np.where(male, phys.height_male_cm.sd, phys.height_female_cm.sd)
    lo, hi = phys.bmi_range

    m4, m5, m_mppgl = abundance_marginals(cfg)
    if mode == "latent":
        cyp3a4, cyp3a5 = reconstruct_original(
            u[:, 6], u[:, 3], u[:, 4], decompose(cfg.rho_cyp), m4, m5
        )
    else:
        cyp3a4, cyp3a5 = to_marginal(u[:, 3], m4), to_marginal(u[:, 4], m5)

    return Covariates(
        sex=sex,
        height_cm=h_mean + h_sd * u[:, 1],
        bmi=lo + (hi - lo) * ndtr(u[:, 2]),
        cyp3a4=np.atleast_1d(cyp3a4),
        cyp3a5=np.atleast_1d(cyp3a5),
        mppgl=np.atleast_1d(to_marginal(u[:, 5], m_mppgl)),
    )


def sample_coordinates(n: int, mode: str, stream: RandomStream, config: Optional[PBPKConfig] = None) -> np.ndarray:
    """
    n rows of GSA coordinates with the dependence of ``mode``.

    All modes are built from the same standard-normal draws of ``stream``, so
    subject i shares sex, height, BMI and MPPGL across modes.
    """
    _check_mode(mode)
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    cfg = config or PBPKConfig()
    z = stream.generator().standard_normal((n, 7))
    u = z.copy()
    u[:, 0] = ndtr(z[:, 0])
    rho = cfg.rho_cyp
    if mode == "correlated":
        u[:, 4] = rho * z[:, 3] + math.sqrt(1.0 - rho * rho) * z[:, 4]
    elif mode == "latent":
        s1, s2 = decompose(rho).unique_sd
        u[:, 3] = s1 * z[:, 3]
        u[:, 4] = s2 * z[:, 4]
    return u


def gsa_input_map(u, mode: str, config: Optional[PBPKConfig] = None, tissues: Optional[TissueData] = None) -> Individual:
    """One row of GSA coordinates to a virtual subject."""
    cov = covariates_from_coordinates(u, mode, config)
    if len(cov) != 1:
        raise DomainError("gsa_input_map takes a single coordinate vector")
    return individual_from_covariates(**cov.row(0), config=config, tissues=tissues)


def generate_individual(stream: RandomStream, config: Optional[PBPKConfig] = None, mode: str = "independent") -> Individual:
    """Draw one subject from the population distributions."""
    u = sample_coordinates(1, mode, stream, config)
    return gsa_input_map(u[0], mode, config)


# --------------------------------------------------
# ODE system
# --------------------------------------------------
@dataclass(frozen=True)
class PBPKSystem:
    individual: Individual
    drug: DrugParams
    dose_mg: float
    kp: np.ndarray = field(repr=False)
    vmax: np.ndarray = field(repr=False)
    km: np.ndarray = field(repr=False)
    enzyme: np.ndarray = field(repr=False)
    out_coef: np.ndarray = field(repr=False)

    @property
    def q_total(self) -> float:
        return self.individual.cardiac_output

    @property
    def q_liver_out(self) -> float:
        """Hepatic artery plus portal (splanchnic) flow."""
        flows = self.individual.flows
        return float(flows[LIVER] + flows[_SPLANCHNIC_IDX].sum())

    @property
    def y0(self) -> np.ndarray:
        y = np.zeros(N_STATE)
        y[VEN] = self.dose_mg
        return y

    def metabolism(self, x_liver: float) -> np.ndarray:
        """(MET_3A4, MET_3A5) in mg/h at the given liver amount."""
        c_u = x_liver * self.drug.fu_t / self.individual.volumes[LIVER]
        rates = self.vmax * c_u / (self.km + c_u)
        return np.bincount(self.enzyme, weights=rates, minlength=2)

    def rhs(self, t: float, y: np.ndarray) -> np.ndarray:
        ind = self.individual
        q = ind.flows
        c = y[:N_TISSUE] * self.out_coef
        c_art = y[ART] / ind.v_art
        c_ven = y[VEN] / ind.v_ven
        met = self.metabolism(y[LIVER])

        dy = np.empty(N_STATE)
        dy[:N_TISSUE] = q * (c_art - c)
        dy[LUNG] = self.q_total * (c_ven - c[LUNG])
        dy[LIVER] = (
            q[LIVER] * c_art
            + q[_SPLANCHNIC_IDX] @ c[_SPLANCHNIC_IDX]
            - self.q_liver_out * c[LIVER]
            - met.sum()
        )
        dy[ART] = self.q_total * (c[LUNG] - c_art)
        dy[VEN] = (
            q[_PERIPHERAL_IDX] @ c[_PERIPHERAL_IDX]
            + self.q_liver_out * c[LIVER]
            - self.q_total * c_ven
        )
        dy[MET_3A4], dy[MET_3A5] = met
        return dy

    def plasma_concentration(self, states: np.ndarray) -> np.ndarray:
        return states[VEN] / (self.individual.v_ven * self.drug.b_to_p)

    def arterial_inflow(self) -> float:
        """Sum of organ inflows from arterial blood in L/h."""
        return float(self.individual.flows[_ARTERIAL_FED].sum())


def build_system(
    individual: Individual,
    drug: DrugParams,
    dose_mg: float,
    tissues: Optional[TissueData] = None,
    dvow_intercept: float = 0.0,
) -> PBPKSystem:
    tissues = tissues or load_tissues()
    if tissues.organs != ORGANS or len(individual.volumes) != N_TISSUE or len(individual.flows) != N_TISSUE:
        raise ModelStructureError("individual and tissue table do not match the organ set")
    if dose_mg < 0:
        raise DomainError("dose must be non-negative")

    kp = np.array([
        partition_coefficient(drug, tissues.composition(o), tissues.plasma, dvow_intercept)
        for o in ORGANS
    ])
    abundance = {"CYP3A4": individual.cyp3a4, "CYP3A5": individual.cyp3a5}
    mw = drug.molecular_weight
    return PBPKSystem(
        individual=individual,
        drug=drug,
        dose_mg=float(dose_mg),
        kp=kp,
        vmax=np.array([
            vmax_invivo(mm.vmax, abundance[mm.enzyme], individual.mppgl, individual.liver_weight_g, mw)
            for mm in drug.kinetics
        ]),
        km=np.array([km_mg_per_l(mm.km, mw) for mm in drug.kinetics]),
        enzyme=np.array([ENZYMES.index(mm.enzyme) for mm in drug.kinetics], dtype=int),
        out_coef=drug.b_to_p / (individual.volumes * kp),
    )


def simulate_subject(
    individual: Individual,
    drug: DrugParams,
    dose_mg: float,
    t_end_h: float,
    config: Optional[PBPKConfig] = None,
    t_eval: Optional[Sequence[float]] = None,
) -> tuple[Trajectory, float]:
    """Trajectory and plasma AUC (mg·h/L) over [0, t_end_h]."""
    cfg = config or PBPKConfig()
    system = build_system(individual, drug, dose_mg, dvow_intercept=cfg.dvow_intercept)
    problem = OdeProblem(
        rhs=system.rhs,
        y0=system.y0,
        t_span=(0.0, float(t_end_h)),
        rtol=cfg.rtol,
        atol=cfg.atol,
        method=cfg.method,
        fallback_method=cfg.fallback_method,
        t_eval=None if t_eval is None else np.asarray(t_eval, dtype=float),
    )
    scale = 1.0 / (individual.v_ven * drug.b_to_p)
    return auc_augmented(problem, lambda y: y[VEN] * scale)


def mass_balance(trajectory: Trajectory, dose_mg: float) -> float:
    """Largest deviation of total drug (including metabolized) from the dose, relative when dose > 0."""
    total = trajectory.states.sum(axis=0)
    deviation = float(np.max(np.abs(total - dose_mg)))
    return deviation / dose_mg if dose_mg > 0 else deviation


# --------------------------------------------------
# GSA and population evaluators
# --------------------------------------------------
def factor_names(mode: str) -> tuple[str, ...]:
    _check_mode(mode)
    return LATENT_FACTORS if mode == "latent" else FACTORS


def coordinate_marginals(mode: str, config: PBPKConfig) -> tuple[Marginal, ...]:
    _check_mode(mode)
    unit = Marginal.normal(0.0, 1.0)
    if mode != "latent":
        return (Marginal.uniform(0.0, 1.0), unit, unit, unit, unit, unit)
    s1, s2 = decompose(config.rho_cyp).unique_sd
    return (
        Marginal.uniform(0.0, 1.0), unit, unit,
        Marginal.normal(0.0, s1), Marginal.normal(0.0, s2),
        unit, unit,
    )


@dataclass(frozen=True)
class PBPKModel:
    """AUC of one subject per row of GSA coordinates."""
    mode: str = "independent"
    config: PBPKConfig = field(default_factory=PBPKConfig)
    name: str = "pbpk_mdz"
    correlated_pair: tuple[int, int] = CORRELATED_PAIR

    def __post_init__(self):
        _check_mode(self.mode)

    @property
    def names(self) -> tuple[str, ...]:
        return factor_names(self.mode)

    def marginals(self) -> tuple[Marginal, ...]:
        return coordinate_marginals(self.mode, self.config)

    def __call__(self, u: np.ndarray) -> np.ndarray:
        cfg = self.config
        drug = load_drug()
        cov = covariates_from_coordinates(u, self.mode, cfg)
        out = np.empty(len(cov))
        for i in range(len(cov)):
            ind = individual_from_covariates(**cov.row(i), config=cfg)
            _, out[i] = simulate_subject(ind, drug, cfg.dose_mg, cfg.t_end_h, cfg)
        return out


@dataclass(frozen=True)
class PopulationSimulator:
    """Per row: AUC followed by plasma concentrations on ``grid``."""
    mode: str
    grid: tuple[float, ...]
    config: PBPKConfig = field(default_factory=PBPKConfig)

    def __call__(self, u: np.ndarray) -> np.ndarray:
        cfg = self.config
        drug = load_drug()
        cov = covariates_from_coordinates(u, self.mode, cfg)
        out = np.empty((len(cov), 1 + len(self.grid)))
        for i in range(len(cov)):
            ind = individual_from_covariates(**cov.row(i), config=cfg)
            traj, auc = simulate_subject(ind, drug, cfg.dose_mg, cfg.t_end_h, cfg, t_eval=self.grid)
            out[i, 0] = auc
            out[i, 1:] = traj.states[VEN] / (ind.v_ven * drug.b_to_p)
        return out


def assumptions(config: PBPKConfig) -> tuple[str, ...]:
    notes = [
        f"CO_mean {config.co_mean_l_min.male} L/min (male), "
        f"{config.co_mean_l_min.female} L/min (female)",
        "all subjects express CYP3A5",
        f"log-scale correlation CYP3A4/CYP3A5 = {config.rho_cyp}",
    ]
    if config.normalize_flows:
        notes.append("blood-flow fractions renormalized per sex")
    if config.dvow_intercept:
        notes.append(f"log D_vow intercept {config.dvow_intercept}")
    return tuple(notes)


def pbpk_problem(method: str, config: Optional[PBPKConfig] = None) -> Problem:
    """The PBPK factor space and evaluator a method works on."""
    cfg = config or PBPKConfig()
    notes = assumptions(cfg)
    if method == "sobol_independent":
        model = PBPKModel("independent", cfg)
        return Problem(model.name, FactorSpace(model.names, model.marginals()), model, assumptions=notes)
    if method == "sobol_grouped":
        problem = grouped_problem(PBPKModel("correlated", cfg), cfg.rho_cyp)
        return dataclasses.replace(problem, assumptions=notes)
    if method == "kucherenko":
        model = PBPKModel("correlated", cfg)
        corr = np.eye(len(FACTORS))
        i, j = CORRELATED_PAIR
        corr[i, j] = corr[j, i] = cfg.rho_cyp
        return Problem(model.name, FactorSpace(model.names, model.marginals(), corr), model, assumptions=notes)
    if method == "latent":
        model = PBPKModel("latent", cfg)
        return Problem(model.name, FactorSpace(model.names, model.marginals()), model, assumptions=notes)
    raise DomainError(f"unknown method '{method}'")


def population_grid(t_end_h: float, points: int) -> tuple[float, ...]:
    grid = np.linspace(0.0, t_end_h, points)
    logger.debug(f"Population grid: {points} points over [0, {t_end_h}] h")
    return tuple(float(t) for t in grid)
