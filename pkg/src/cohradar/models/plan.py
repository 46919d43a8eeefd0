"""Sweep plan and phase schedule models."""

from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from scipy.constants import c as SPEED_OF_LIGHT

from ..core.config import get_settings
from ..core.errors import PreconditionError
from ..core.logging import get_logger

logger = get_logger(__name__)


class SweepPlan(BaseModel):
    """Full parameterization of one coherence sweep.

    Times are in seconds, the carrier in Hz. The coherence time of sweep
    point m runs from ``tau0`` (m = 0) to ``tau0 + delta_tau`` (m = M-1).
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    tau0: float = Field(gt=0, description="Initial coherence time [s]")
    delta_tau: float = Field(ge=0, description="Coherence-time span [s]")
    num_points: int = Field(ge=2, description="Coherence sweep points M")
    num_jumps: int = Field(ge=2, description="Phase jumps per point N")
    carrier_hz: float = Field(gt=0, description="Carrier frequency [Hz]")
    seed: int = Field(default=0, ge=0, description="Phase stream seed")

    @model_validator(mode="after")
    def _check_cycles(self) -> "SweepPlan":
        cycles = self.carrier_hz * self.tau0
        minimum = get_settings().min_cycles_per_pulse
        if cycles < minimum:
            logger.warning(
                "Carrier too slow for the closed forms cycles_per_pulse=%.2f min=%.1f",
                cycles,
                minimum,
            )
        return self

    @property
    def omega(self) -> float:
        """Angular carrier frequency [rad/s]."""
        return 2.0 * np.pi * self.carrier_hz

    @property
    def wavenumber(self) -> float:
        """k = ω/c [rad/m]."""
        return self.omega / SPEED_OF_LIGHT

    @property
    def l0(self) -> float:
        """Shortest coherence length c·τ₀ [m]."""
        return SPEED_OF_LIGHT * self.tau0

    @property
    def delta_l(self) -> float:
        """Coherence-length span c·Δτ [m]."""
        return SPEED_OF_LIGHT * self.delta_tau

    @property
    def tau_step(self) -> float:
        """Coherence-time increment between adjacent sweep points."""
        return self.delta_tau / (self.num_points - 1)

    def with_seed(self, seed: int) -> "SweepPlan":
        return self.model_copy(update={"seed": seed})


class PhaseSchedule(BaseModel):
    """Constant-phase pulses of one sweep point.

    ``phases[n]`` holds φ_{n,m} for n = 0..N-1. ``phantoms[j-1]`` holds the
    pre-window phase φ_{-j,m} used for echoes emitted before the window
    opened.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    phases: np.ndarray
    pulse_duration: float = Field(gt=0)
    start_time: float = Field(ge=0)
    index: int = Field(default=0, ge=0)
    seed: int = Field(default=0, ge=0)
    phantoms: np.ndarray = Field(default_factory=lambda: np.zeros(0))

    @field_validator("phases", "phantoms", mode="before")
    @classmethod
    def _as_phase_array(cls, value: Any) -> np.ndarray:
        arr = np.asarray(value, dtype=np.float64)
        if arr.ndim != 1:
            raise ValueError("phase arrays must be one-dimensional")
        if arr.size and (arr.min() < 0.0 or arr.max() >= 2.0 * np.pi):
            raise ValueError("phases must lie in [0, 2π)")
        return arr

    @property
    def num_jumps(self) -> int:
        return int(self.phases.size)

    @property
    def end_time(self) -> float:
        """First instant after the transmission window."""
        return self.start_time + self.num_jumps * self.pulse_duration

    def phase_at(self, pulse: np.ndarray) -> np.ndarray:
        """Phase of (possibly negative) pulse indices; negatives use phantoms."""
        pulse = np.asarray(pulse, dtype=np.int64)
        depth = int(-pulse.min()) if pulse.size else 0
        if depth > self.phantoms.size:
            raise PreconditionError(
                f"schedule carries {self.phantoms.size} phantom phases, "
                f"{depth} required"
            )
        if pulse.size and pulse.max() >= self.num_jumps:
            raise PreconditionError("pulse index beyond the transmission window")
        # phantoms reversed so that index -j lands on phantoms[j-1]
        table = np.concatenate([self.phantoms[::-1], self.phases])
        return table[pulse + self.phantoms.size]
