"""
Pydantic schemas for run configuration and report files.
"""
from typing import Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator

ModelId = Literal["model1", "model2", "model3", "pbpk_mdz"]
Method = Literal["sobol_independent", "sobol_grouped", "kucherenko", "latent"]
PopulationMode = Literal["independent", "correlated", "latent"]

DEFAULT_RHO_SWEEP = [-0.9, -0.7, -0.5, -0.3, 0.0, 0.3, 0.5, 0.7, 0.9]


class StrictModel(BaseModel):
    """Configuration base: unknown keys are rejected."""
    model_config = ConfigDict(extra="forbid", frozen=True)


# --------------------------------------------------
# Configuration
# --------------------------------------------------
class MeanCV(StrictModel):
    mean: float = Field(..., gt=0)
    cv: float = Field(..., gt=0)


class NormalParams(StrictModel):
    mean: float
    sd: float = Field(..., gt=0)


class PhysiologyConfig(StrictModel):
    """Population distributions used to generate virtual subjects."""
    sex_threshold: float = Field(default=0.5, gt=0, lt=1)
    height_male_cm: NormalParams = NormalParams(mean=176.7, sd=6.15)
    height_female_cm: NormalParams = NormalParams(mean=163.3, sd=5.85)
    bmi_range: Tuple[float, float] = (18.5, 24.9)
    cyp3a4: MeanCV = MeanCV(mean=137.0, cv=0.41)
    cyp3a5: MeanCV = MeanCV(mean=103.0, cv=0.65)
    mppgl: MeanCV = MeanCV(mean=39.79, cv=0.27)
    blood_fraction_male: float = Field(default=0.0767, gt=0, lt=1)
    blood_fraction_female: float = Field(default=0.0683, gt=0, lt=1)
    arterial_fraction: float = Field(default=0.06, gt=0, lt=1)
    venous_fraction: float = Field(default=0.18, gt=0, lt=1)
    blood_density: float = Field(default=1.0, gt=0)

    @field_validator("bmi_range")
    @classmethod
    def _ordered(cls, v):
        if not v[0] < v[1]:
            raise ValueError("bmi_range must be (low, high) with low < high")
        return v


class COMean(StrictModel):
    male: float = Field(default=5.6, gt=0)
    female: float = Field(default=4.9, gt=0)


class PBPKConfig(StrictModel):
    dose_mg: float = Field(default=5.0, ge=0)
    t_end_h: float = Field(default=168.0, gt=0)
    co_mean_l_min: COMean = COMean()
    rtol: float = Field(default=1e-8, ge=1e-10, le=1e-3)
    atol: float = Field(default=1e-10, gt=0)
    method: Literal["BDF", "Radau", "LSODA"] = "BDF"
    fallback_method: Optional[Literal["DOP853", "RK45", "RK23", "Radau", "LSODA"]] = "DOP853"
    rho_cyp: float = Field(default=0.52, gt=-1, lt=1)
    dvow_intercept: float = 0.0
    normalize_flows: bool = True
    physiology: PhysiologyConfig = PhysiologyConfig()


class KucherenkoConfig(StrictModel):
    convergence: List[int] = Field(default_factory=lambda: [1000, 2000, 5000])

    @field_validator("convergence")
    @classmethod
    def _sizes(cls, v):
        if any(n < 2 for n in v):
            raise ValueError("convergence sizes must be >= 2")
        return sorted(set(v))


class PopulationConfig(StrictModel):
    subjects: int = Field(default=2000, ge=1)
    grid_points: int = Field(default=200, ge=2)
    modes: List[PopulationMode] = Field(default_factory=lambda: ["independent", "correlated"])
    export_profiles: bool = True
    bootstrap: int = Field(default=1000, ge=0)


class RunConfig(StrictModel):
    model: ModelId
    methods: List[Method] = Field(
        default_factory=lambda: ["sobol_independent", "sobol_grouped", "kucherenko", "latent"]
    )
    rho: Union[float, List[float]] = 0.7
    rho_sweep: List[float] = Field(default_factory=lambda: list(DEFAULT_RHO_SWEEP))
    n: int = Field(default=10_000, ge=100)
    bootstrap: int = Field(default=1000, ge=0)
    seed: int = Field(default=42, ge=0)
    output_dir: Optional[str] = None
    workers: Optional[int] = Field(default=None, ge=1)
    sampling: Literal["pseudo_random", "sobol_sequence"] = "pseudo_random"
    full_protocol: bool = False
    kucherenko: KucherenkoConfig = KucherenkoConfig()
    pbpk: PBPKConfig = PBPKConfig()
    population: PopulationConfig = PopulationConfig()

    @field_validator("methods")
    @classmethod
    def _methods(cls, v):
        if not v:
            raise ValueError("methods must not be empty")
        return list(dict.fromkeys(v))

    @field_validator("rho", "rho_sweep")
    @classmethod
    def _rho(cls, v):
        values = v if isinstance(v, list) else [v]
        if not values:
            raise ValueError("at least one correlation value is required")
        for r in values:
            if not -1.0 < r < 1.0:
                raise ValueError(f"correlation {r} outside (-1, 1)")
        return v

    @field_validator("bootstrap")
    @classmethod
    def _bootstrap(cls, v):
        if 0 < v < 100:
            raise ValueError("bootstrap must be 0 (disabled) or >= 100")
        return v

    @property
    def sample_size(self) -> int:
        return 10_000 if self.full_protocol else self.n

    @property
    def bootstrap_count(self) -> int:
        return 1000 if self.full_protocol else self.bootstrap

    @property
    def rho_values(self) -> List[float]:
        return self.rho if isinstance(self.rho, list) else [self.rho]


# --------------------------------------------------
# Reports
# --------------------------------------------------
class FactorIndices(BaseModel):
    """Main/total indices of one factor or group."""
    factor: str
    main: float
    total: float
    main_ci: Optional[Tuple[float, float]] = None
    total_ci: Optional[Tuple[float, float]] = None


class ConvergencePoint(BaseModel):
    n: int
    factor: str
    main: float
    total: float


class ReportMetadata(BaseModel):
    method: str
    model: str = ""
    rho: Optional[float] = None
    n: int
    seed: int
    stream_id: int = 0
    bootstrap: int = 0
    evaluations: int
    sampling: str = "pseudo_random"
    factors: List[str] = Field(default_factory=list)
    assumptions: List[str] = Field(default_factory=list)


class SensitivityReport(BaseModel):
    indices: List[FactorIndices]
    metadata: ReportMetadata
    variance: float
    convergence: Optional[List[ConvergencePoint]] = None

    def by_factor(self) -> Dict[str, FactorIndices]:
        return {fi.factor: fi for fi in self.indices}

    def main(self, factor: str) -> float:
        return self.by_factor()[factor].main

    def total(self, factor: str) -> float:
        return self.by_factor()[factor].total


class ReportSidecar(BaseModel):
    """The JSON file written next to each index table."""
    metadata: ReportMetadata
    variance: float
    indices: List[FactorIndices]

    @classmethod
    def from_report(cls, report: SensitivityReport) -> "ReportSidecar":
        return cls(metadata=report.metadata, variance=report.variance, indices=report.indices)


class ErrorRecord(BaseModel):
    model: str
    method: str
    rho: Optional[float] = None
    error: str
    detail: Optional[str] = None


class AUCSummary(BaseModel):
    mode: str
    subjects: int
    median: float
    p2_5: float
    p97_5: float
    log_auc_variance: float


class WideningTest(BaseModel):
    """Paired bootstrap comparison of var(log AUC) with and without correlation."""
    variance_correlated: float
    variance_independent: float
    difference: float
    p_value: float
    bootstrap: int
    significant: bool
