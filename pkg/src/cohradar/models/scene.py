"""Targets and the noisy channel."""

from typing import Any, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator
from scipy.constants import c as SPEED_OF_LIGHT

MAX_RADIAL_VELOCITY = 1.0e3


class Target(BaseModel):
    """Point scatterer.

    ``roundtrip_length`` is the two-way path l = c·τ; the physical range is
    l/2. Positive ``radial_velocity`` means receding (delay grows).
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    roundtrip_length: float = Field(ge=0, description="Two-way path length [m]")
    attenuation: float = Field(default=1.0, gt=0, le=1)
    radial_velocity: float = Field(
        default=0.0,
        gt=-MAX_RADIAL_VELOCITY,
        lt=MAX_RADIAL_VELOCITY,
        description="Radial velocity [m/s]",
    )

    @property
    def delay(self) -> float:
        """Round-trip delay τ = l/c [s]."""
        return self.roundtrip_length / SPEED_OF_LIGHT

    @property
    def physical_range(self) -> float:
        return self.roundtrip_length / 2.0

    @property
    def moving(self) -> bool:
        return self.radial_velocity != 0.0


class Scene(BaseModel):
    """Targets plus receiver noise.

    ``snr`` is the linear receive-channel SNR; ``None`` means noiseless.
    ``dc_bias`` is a constant added to every receiver output C_m.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    targets: list[Target] = Field(default_factory=list)
    snr: Optional[float] = Field(default=None, gt=0)
    noise_seed: int = Field(default=0, ge=0)
    dc_bias: float = 0.0

    @field_validator("snr", mode="before")
    @classmethod
    def _parse_noiseless(cls, value: Any) -> Any:
        if isinstance(value, str) and value.lower() == "noiseless":
            return None
        return value

    @property
    def noiseless(self) -> bool:
        return self.snr is None

    @property
    def stationary(self) -> bool:
        return not any(t.moving for t in self.targets)

    @property
    def reference_attenuation(self) -> float:
        """Amplitude the per-sample noise level is referenced to."""
        return max((t.attenuation for t in self.targets), default=1.0)

    def with_noise_seed(self, seed: int) -> "Scene":
        return self.model_copy(update={"noise_seed": seed})
