"""Scenario file schema and JSON report models.

All quantities are SI and carry a unit suffix in their key: ``_s`` seconds,
``_m`` meters, ``_hz`` hertz, ``_mps`` meters per second.
"""

import math
from typing import Any, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.constants import c as SPEED_OF_LIGHT

from ..core.config import get_settings
from ..models import MotionModel, ReceiverMode, Scene, SweepPlan, Target


class PlanConfig(BaseModel):
    """Sweep plan, given either in coherence times or coherence lengths."""

    model_config = ConfigDict(extra="forbid")

    tau0_s: Optional[float] = Field(default=None, gt=0)
    delta_tau_s: Optional[float] = Field(default=None, ge=0)
    l0_m: Optional[float] = Field(default=None, gt=0)
    delta_l_m: Optional[float] = Field(default=None, ge=0)
    num_points: int = Field(ge=2)
    num_jumps: int = Field(ge=2)
    carrier_hz: Optional[float] = Field(default=None, gt=0)
    seed: int = Field(default=0, ge=0)

    @model_validator(mode="after")
    def _one_unit_each(self) -> "PlanConfig":
        if (self.tau0_s is None) == (self.l0_m is None):
            raise ValueError("give exactly one of tau0_s and l0_m")
        if self.delta_tau_s is not None and self.delta_l_m is not None:
            raise ValueError("give at most one of delta_tau_s and delta_l_m")
        return self

    def to_plan(self) -> SweepPlan:
        if self.tau0_s is not None:
            tau0 = self.tau0_s
        else:
            assert self.l0_m is not None
            tau0 = self.l0_m / SPEED_OF_LIGHT
        if self.delta_tau_s is not None:
            delta_tau = self.delta_tau_s
        elif self.delta_l_m is not None:
            delta_tau = self.delta_l_m / SPEED_OF_LIGHT
        else:
            delta_tau = 0.0
        return SweepPlan(
            tau0=tau0,
            delta_tau=delta_tau,
            num_points=self.num_points,
            num_jumps=self.num_jumps,
            carrier_hz=self.carrier_hz or get_settings().default_carrier_hz,
            seed=self.seed,
        )


class TargetConfig(BaseModel):
    """Point target; ``roundtrip=false`` means ``length_m`` is a physical range."""

    model_config = ConfigDict(extra="forbid")

    length_m: float = Field(ge=0)
    roundtrip: bool = True
    attenuation: float = Field(default=1.0, gt=0, le=1)
    velocity_mps: float = 0.0

    def to_target(self) -> Target:
        length = self.length_m if self.roundtrip else 2.0 * self.length_m
        return Target(
            roundtrip_length=length,
            attenuation=self.attenuation,
            radial_velocity=self.velocity_mps,
        )


class SceneConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    targets: list[TargetConfig] = Field(default_factory=list)
    snr: Optional[Union[float, str]] = None
    snr_db: Optional[float] = None
    noise_seed: int = Field(default=0, ge=0)
    dc_bias: float = 0.0

    @model_validator(mode="after")
    def _one_snr(self) -> "SceneConfig":
        if self.snr is not None and self.snr_db is not None:
            raise ValueError("give at most one of snr and snr_db")
        if isinstance(self.snr, str) and self.snr.lower() != "noiseless":
            raise ValueError("snr must be a number or 'noiseless'")
        if isinstance(self.snr, float) and self.snr <= 0:
            raise ValueError("snr must be positive")
        return self

    def linear_snr(self) -> Optional[float]:
        if self.snr_db is not None:
            return math.pow(10.0, self.snr_db / 10.0)
        if isinstance(self.snr, str):
            return None
        return self.snr

    def to_scene(self) -> Scene:
        return Scene(
            targets=[t.to_target() for t in self.targets],
            snr=self.linear_snr(),
            noise_seed=self.noise_seed,
            dc_bias=self.dc_bias,
        )


class ScenarioConfig(BaseModel):
    """One scenario file."""

    model_config = ConfigDict(extra="forbid")

    plan: PlanConfig
    scene: SceneConfig = Field(default_factory=SceneConfig)
    mode: ReceiverMode = "semianalytic"
    motion: MotionModel = "frozen"
    include_double_frequency: bool = True
    trials: int = Field(default=1, ge=1)
    delay_offset_m: float = Field(default=0.0, ge=0)
    fs_hz: Optional[float] = Field(default=None, gt=0)
    k: Optional[int] = Field(
        default=None, ge=0, description="Targets to fit; unset means detect"
    )
    baseline: bool = True
    continuous: Optional[bool] = Field(
        default=None, description="Hinge-refine breaks; unset uses the setting"
    )
    spectrum_points: list[int] = Field(default_factory=list)
    out_dir: Optional[str] = None

    def with_overrides(
        self,
        seed: Optional[int] = None,
        mode: Optional[str] = None,
        trials: Optional[int] = None,
    ) -> "ScenarioConfig":
        """Copy with command-line overrides applied and re-validated."""
        data: dict[str, Any] = self.model_dump()
        if seed is not None:
            data["plan"]["seed"] = seed
            data["scene"]["noise_seed"] = seed
        if mode is not None:
            data["mode"] = mode
        if trials is not None:
            data["trials"] = trials
        return ScenarioConfig.model_validate(data)


class ErrorDetail(BaseModel):
    """Error detail schema."""

    code: str
    message: str
    details: Optional[dict[str, Any]] = None


class ErrorResponse(BaseModel):
    """Error response schema."""

    error: ErrorDetail


class MonteCarloReport(BaseModel):
    config: ScenarioConfig
    trials: int
    max_mean_error: Optional[float] = None
    max_std_error: Optional[float] = None


class AnalysisReport(BaseModel):
    config: dict[str, Any]
    verdict: str
    num_targets: int
    breakpoints_m: list[float]
    ranges_m: list[float]
    separations_m: list[float]
    accuracy_m: Optional[float] = None
    trials: int
    sse: float
    single_line_sse: float


class PlanReport(BaseModel):
    config: PlanConfig
    total_time_s: float
    summed_schedule_time_s: float
    bw_max_hz: float
    tradeoff_bw_hz: float
    carrier_hop_hz: float
    hop_carriers_hz: list[float]
    suggested_carrier_hz: Optional[float] = None
    baseline_resolution_m: float
    separation_m: Optional[float] = None
    resolution_ratio: Optional[float] = None


class SpectrumPoint(BaseModel):
    m: int
    tau_s: float
    expected_width_hz: float
    measured_width_hz: float
    lower_null_hz: float
    upper_null_hz: float
    total_power: float


class SpectrumReport(BaseModel):
    config: ScenarioConfig
    fs_hz: float
    points: list[SpectrumPoint]


class VelocityReport(BaseModel):
    config: ScenarioConfig
    doppler_m: int
    doppler_velocity_mps: float
    doppler_resolution_mps: float
    max_unambiguous_mps: float
    peak_ratio: float
    velocity_mps: float
    roundtrip_length_m: float
    range_m: float
    amplitude: float
    sse: float
