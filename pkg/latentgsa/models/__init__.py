"""
Pydantic schemas for run configuration and report files.
"""
from .schemas import (
    AUCSummary,
    ConvergencePoint,
    ErrorRecord,
    FactorIndices,
    KucherenkoConfig,
    PBPKConfig,
    PhysiologyConfig,
    PopulationConfig,
    ReportMetadata,
    ReportSidecar,
    RunConfig,
    SensitivityReport,
    WideningTest,
)

__all__ = [
    "AUCSummary",
    "ConvergencePoint",
    "ErrorRecord",
    "FactorIndices",
    "KucherenkoConfig",
    "PBPKConfig",
    "PhysiologyConfig",
    "PopulationConfig",
    "ReportMetadata",
    "ReportSidecar",
    "RunConfig",
    "SensitivityReport",
    "WideningTest",
]
