"""Domain models."""

from .plan import PhaseSchedule, SweepPlan
from .records import (
    MOTION_MODELS,
    RECEIVER_MODES,
    BreakpointFit,
    MonteCarloSummary,
    MotionFit,
    MotionModel,
    RangeReport,
    ReceiverMode,
    SpectrumNulls,
    SweepRecord,
    TheoryCurve,
    VelocityEstimate,
)
from .scene import Scene, Target

__all__ = [
    "MOTION_MODELS",
    "RECEIVER_MODES",
    "BreakpointFit",
    "MonteCarloSummary",
    "MotionFit",
    "MotionModel",
    "PhaseSchedule",
    "RangeReport",
    "ReceiverMode",
    "Scene",
    "SpectrumNulls",
    "SweepPlan",
    "SweepRecord",
    "Target",
    "TheoryCurve",
    "VelocityEstimate",
]
