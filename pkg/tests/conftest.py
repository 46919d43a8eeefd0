"""Test configuration and fixtures."""

import json
import pathlib
import sys
from typing import Any, Callable, Generator

import pytest

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from scipy.constants import c as SPEED_OF_LIGHT  # noqa: E402

from cohradar.core.config import get_settings  # noqa: E402
from cohradar.models import Scene, SweepPlan, Target  # noqa: E402


@pytest.fixture(autouse=True)
def fresh_settings(monkeypatch: pytest.MonkeyPatch) -> Generator[None, None, None]:
    """Drop cached settings so environment changes take effect."""
    monkeypatch.delenv("COHRADAR_THREADS", raising=False)
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def small_plan() -> SweepPlan:
    """Sweep over 22-27 m with few points and jumps."""
    return SweepPlan(
        tau0=22.0 / SPEED_OF_LIGHT,
        delta_tau=5.0 / SPEED_OF_LIGHT,
        num_points=20,
        num_jumps=200,
        carrier_hz=2.4e9,
        seed=7,
    )


@pytest.fixture
def single_target_scene() -> Scene:
    """Noiseless unit target at 25 m round trip."""
    return Scene(targets=[Target(roundtrip_length=25.0)])


@pytest.fixture
def noisy_scene() -> Scene:
    """Half-amplitude target at 25 m with 30 dB SNR."""
    return Scene(
        targets=[Target(roundtrip_length=25.0, attenuation=0.5)],
        snr=1000.0,
        noise_seed=11,
    )


@pytest.fixture
def scenario_file(tmp_path: pathlib.Path) -> Callable[..., pathlib.Path]:
    """Write a scenario dict as JSON and return its path."""

    def write(data: dict[str, Any], name: str = "scenario.json") -> pathlib.Path:
        path = tmp_path / name
        path.write_text(json.dumps(data), encoding="utf-8")
        return path

    return write


@pytest.fixture
def basic_scenario() -> dict[str, Any]:
    """Small single-target scenario in file form."""
    return {
        "plan": {
            "l0_m": 22.0,
            "delta_l_m": 5.0,
            "num_points": 20,
            "num_jumps": 200,
            "seed": 3,
        },
        "scene": {"targets": [{"length_m": 25.0}], "snr_db": 30.0, "noise_seed": 3},
        "trials": 4,
    }
