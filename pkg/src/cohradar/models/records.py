"""Result records: sweep measurements, theory curves and fits."""

from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from .plan import SweepPlan
from .scene import Scene

ReceiverMode = Literal["semianalytic", "sampled"]
MotionModel = Literal["frozen", "continuous"]
RECEIVER_MODES: tuple[str, ...] = ("semianalytic", "sampled")
MOTION_MODELS: tuple[str, ...] = ("frozen", "continuous")


class SweepRecord(BaseModel):
    """Per-sweep-point receiver outputs.

    ``c_norm`` is always ``l_m * c_raw`` computed elementwise, so the
    normalization identity holds bit for bit. ``slow_time`` (shape M x N,
    complex) is present only when requested.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    m: np.ndarray
    l_m: np.ndarray
    c_raw: np.ndarray
    c_norm: np.ndarray
    plan: SweepPlan
    scene: Scene
    mode: ReceiverMode
    slow_time: Optional[np.ndarray] = None

    @classmethod
    def from_raw(
        cls,
        plan: SweepPlan,
        scene: Scene,
        mode: ReceiverMode,
        l_m: np.ndarray,
        c_raw: np.ndarray,
        slow_time: Optional[np.ndarray] = None,
    ) -> "SweepRecord":
        l_m = np.asarray(l_m, dtype=np.float64)
        c_raw = np.asarray(c_raw, dtype=np.float64)
        return cls(
            m=np.arange(l_m.size),
            l_m=l_m,
            c_raw=c_raw,
            c_norm=l_m * c_raw,
            plan=plan,
            scene=scene,
            mode=mode,
            slow_time=slow_time,
        )

    @property
    def num_points(self) -> int:
        return int(self.l_m.size)


class TheoryCurve(BaseModel):
    """Expected C̃ and its standard deviation on a coherence-length grid."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    l_m: np.ndarray
    mean: np.ndarray
    std: np.ndarray


class BreakpointFit(BaseModel):
    """Piecewise-linear fit of C̃ against l_m.

    ``break_indices[i]`` is the first grid index of segment i+1;
    ``segments[i]`` is the (slope, intercept) of segment i.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    breakpoints: list[float]
    break_indices: list[int]
    segments: list[tuple[float, float]]
    sse: float = Field(ge=0)
    single_line_sse: float = Field(ge=0)
    num_samples: int
    candidate_grid: np.ndarray

    @property
    def num_breaks(self) -> int:
        return len(self.breakpoints)


class RangeReport(BaseModel):
    """Physical ranges and separations recovered from breakpoints [m]."""

    model_config = ConfigDict(frozen=True)

    breakpoints: list[float]
    ranges: list[float]
    separations: list[float]
    accuracy: Optional[float] = Field(default=None, ge=0)
    trials: int = Field(default=1, ge=1)


class VelocityEstimate(BaseModel):
    """Slow-time Doppler estimate from one sweep point."""

    model_config = ConfigDict(frozen=True)

    velocity_mps: float
    phase_step_rad: float
    resolution_mps: float
    max_unambiguous_mps: float
    peak_ratio: float
    ambiguous: bool = False


class MotionFit(BaseModel):
    """Moving-target closed-form fit over start length and radial velocity."""

    model_config = ConfigDict(frozen=True)

    roundtrip_length: float
    velocity_mps: float
    seed_velocity_mps: float
    amplitude: float
    sse: float


class SpectrumNulls(BaseModel):
    """First spectral nulls either side of the carrier [Hz]."""

    model_config = ConfigDict(frozen=True)

    lower_hz: float
    upper_hz: float

    @property
    def width_hz(self) -> float:
        """Null-to-null bandwidth."""
        return self.upper_hz - self.lower_hz


class MonteCarloSummary(BaseModel):
    """Per-point statistics of C̃ across trials, next to the closed forms.

    ``max_mean_error`` is max |mean − theory_mean|/theory_std and
    ``max_std_error`` is max |std/theory_std − 1|, both over the points with a
    finite, positive theory_std. Both are None when there is no such point
    (no closed form, or a noiseless scene without targets).
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    l_m: np.ndarray
    mean: np.ndarray
    std: np.ndarray
    theory_mean: np.ndarray
    theory_std: np.ndarray
    trials: int = Field(ge=2)
    max_mean_error: Optional[float] = None
    max_std_error: Optional[float] = None
