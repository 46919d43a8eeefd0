"""Application configuration."""

from functools import lru_cache
from typing import Optional

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings.

    Values come from the environment (prefix ``COHRADAR_``) or a ``.env``
    file. Scenario parameters (plan, scene, trials) live in the JSON
    scenario files instead.
    """

    model_config = SettingsConfigDict(
        env_prefix="COHRADAR_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
    )

    # Application
    project_name: str = "cohradar"
    debug: bool = Field(default=False, description="Enable debug mode")
    log_level: str = Field(default="INFO", description="Logging level")

    # Execution
    threads: Optional[int] = Field(
        default=None,
        ge=1,
        description="Worker pool cap (COHRADAR_THREADS); unset means machine default",
    )
    output_dir: str = Field(default="out", description="Default output directory")

    # Waveform
    default_carrier_hz: float = Field(
        default=2.4e9, gt=0, description="Carrier used when a scenario omits one"
    )
    min_cycles_per_pulse: float = Field(
        default=10.0,
        gt=0,
        description="Warn when carrier_hz * tau0 falls below this many cycles",
    )
    sampled_oversampling: float = Field(
        default=8.0, gt=2, description="Minimum fs / carrier for the sampled receiver"
    )

    # Estimation
    min_segment_points: int = Field(
        default=3, ge=2, description="Minimum points per fitted linear segment"
    )
    detection_f_threshold: float = Field(
        default=10.0,
        gt=0,
        description="F-ratio above which an extra breakpoint counts as a target",
    )
    continuous_breaks: bool = Field(
        default=False,
        description="Refine breaks with a continuous hinge fit after the split search",
    )
    max_targets: int = Field(
        default=2, ge=1, description="Largest K tried by automatic target counting"
    )
    velocity_detection_ratio: float = Field(
        default=25.0,
        gt=1,
        description="Slow-time peak to noise-floor power ratio needed for Doppler",
    )
    doppler_zero_pad: int = Field(
        default=64, ge=1, description="Zero-padding factor of the slow-time spectrum"
    )
    velocity_window_mps: float = Field(
        default=10.0,
        ge=0,
        description="Half-width of the velocity search around a plain speed seed",
    )


@lru_cache()
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()
