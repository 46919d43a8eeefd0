"""Channel model: delayed, attenuated echoes plus receiver noise."""

import math
from typing import Optional, Union, overload

import numpy as np
from scipy.constants import c as SPEED_OF_LIGHT

from ..core.config import get_settings
from ..core.errors import DomainError, PreconditionError
from ..core.rng import Stream, gaussian_at
from ..models import PhaseSchedule, Scene, SweepPlan, Target
from .waveform import coherence_time, pulse_index, start_time

ArrayLike = Union[float, np.ndarray]


def noise_std_from_snr(attenuation: float, snr: float) -> float:
    """σ = A/√(2·SNR), the noise level giving SNR = A²/(2σ²)."""
    if snr <= 0:
        raise PreconditionError("snr must be positive")
    if math.isinf(snr):
        return 0.0
    return attenuation / math.sqrt(2.0 * snr)


def echo_delay(target: Target, t: np.ndarray) -> np.ndarray:
    """τ(t) = τ + 2vt/c with t the absolute scan time."""
    return target.delay + 2.0 * target.radial_velocity / SPEED_OF_LIGHT * t


def required_phantom_depth(plan: SweepPlan, scene: Scene, m: int) -> int:
    """Pre-window phases needed so every echo of sweep point m has a source."""
    tau_m = coherence_time(plan, m)
    t_end = start_time(plan, m) + plan.num_jumps * tau_m
    depth = 1
    for target in scene.targets:
        longest = max(
            float(echo_delay(target, np.array(start_time(plan, m)))),
            float(echo_delay(target, np.array(t_end))),
        )
        depth = max(depth, int(math.ceil(max(longest, 0.0) / tau_m)) + 1)
    return depth


def target_echo(
    target: Target, schedule: PhaseSchedule, carrier_hz: float, t: np.ndarray
) -> np.ndarray:
    """A·S(t − τ(t)) for one target; pre-window emission uses phantom phases."""
    emission = t - echo_delay(target, t)
    phase = schedule.phase_at(pulse_index(schedule, emission))
    return target.attenuation * np.cos(2.0 * np.pi * carrier_hz * emission + phase)


def noise_rate(carrier_hz: float) -> float:
    """Default receiver sampling rate, the minimum oversampled rate."""
    return get_settings().sampled_oversampling * carrier_hz


def noise_index(schedule: PhaseSchedule, t: np.ndarray, fs: float) -> np.ndarray:
    """Receiver sample index of each instant on a grid of rate fs."""
    return np.floor((t - schedule.start_time) * fs + 0.5).astype(np.int64)


def receiver_noise(
    scene: Scene, schedule: PhaseSchedule, sample: np.ndarray
) -> np.ndarray:
    """Gaussian noise at receiver sample indices, keyed by (noise_seed, m, n)."""
    sample = np.asarray(sample, dtype=np.int64)
    if scene.snr is None:
        return np.zeros(sample.shape)
    sigma = noise_std_from_snr(scene.reference_attenuation, scene.snr)
    return sigma * gaussian_at(scene.noise_seed, Stream.NOISE, schedule.index, sample)


@overload
def received_sample(
    scene: Scene,
    schedule: PhaseSchedule,
    carrier_hz: float,
    t: float,
    *,
    fs: Optional[float] = None,
) -> float: ...


@overload
def received_sample(
    scene: Scene,
    schedule: PhaseSchedule,
    carrier_hz: float,
    t: np.ndarray,
    *,
    fs: Optional[float] = None,
) -> np.ndarray: ...


def received_sample(
    scene: Scene,
    schedule: PhaseSchedule,
    carrier_hz: float,
    t: ArrayLike,
    *,
    fs: Optional[float] = None,
) -> ArrayLike:
    """Σ_i A_i·S(t − τ_i(t)) + n(t) over the transmission window.

    n(t) is drawn for the receiver sample nearest t on a grid of rate ``fs``
    (default ``noise_rate(carrier_hz)``) starting at the window start. The
    same instant always gets the same noise, whatever else is requested
    with it; instants in different receiver samples get independent draws.
    """
    times = np.atleast_1d(np.asarray(t, dtype=np.float64))
    if times.min() < schedule.start_time or times.max() >= schedule.end_time:
        raise DomainError(
            f"time outside transmission window "
            f"[{schedule.start_time}, {schedule.end_time})"
        )
    total = np.zeros(times.size)
    for target in scene.targets:
        total = total + target_echo(target, schedule, carrier_hz, times)
    if not scene.noiseless:
        rate = fs if fs is not None else noise_rate(carrier_hz)
        total = total + receiver_noise(
            scene, schedule, noise_index(schedule, times, rate)
        )
    if np.ndim(t) == 0:
        return float(total[0])
    return total
