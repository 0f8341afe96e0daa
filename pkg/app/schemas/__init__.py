# app/schemas/__init__.py


from .ensemble import (
    EntryDistribution,
    EnsembleSpec,
    SeedSpec
)
from .experiment import (
    ExperimentSpec,
    ExperimentResult,
    SummaryStats,
    TrialRecord
)
from .geometry import (
    LcdParams,
    LcdReport,
    ThresholdParams,
    VectorClass
)
from .spectral import SpectralSummary
from .config import ConfigDocument

__all__ = [
    "EntryDistribution",
    "EnsembleSpec",
    "SeedSpec",
    "ExperimentSpec",
    "ExperimentResult",
    "SummaryStats",
    "TrialRecord",
    "LcdParams",
    "LcdReport",
    "ThresholdParams",
    "VectorClass",
    "SpectralSummary",
    "ConfigDocument"
]
