"""Partially coherent transmit waveform.

A continuous carrier whose phase jumps to an i.i.d. uniform value every
τ_m seconds; sweep point m holds τ_m for N jumps, and τ_m steps linearly
from τ₀ to τ₀ + Δτ over the M sweep points.
"""

import math
from typing import Union, overload

import numpy as np
from scipy import signal as sp_signal

from ..core.errors import DomainError, PreconditionError, SweepIndexError
from ..core.logging import get_logger
from ..core.rng import Stream, uniform_phases
from ..models import PhaseSchedule, SpectrumNulls, SweepPlan

logger = get_logger(__name__)

ArrayLike = Union[float, np.ndarray]


def _check_index(plan: SweepPlan, m: int, allow_end: bool = False) -> None:
    upper = plan.num_points if allow_end else plan.num_points - 1
    if not 0 <= m <= upper:
        raise SweepIndexError(f"sweep index m={m} outside [0, {upper}]")


def coherence_time(plan: SweepPlan, m: int) -> float:
    """τ_m = τ₀ + m·Δτ/(M−1)."""
    _check_index(plan, m)
    if m == plan.num_points - 1:
        return plan.tau0 + plan.delta_tau
    return plan.tau0 + m * plan.delta_tau / (plan.num_points - 1)


def coherence_times(plan: SweepPlan) -> np.ndarray:
    """τ_m for every sweep point."""
    return np.array([coherence_time(plan, m) for m in range(plan.num_points)])


def start_time(plan: SweepPlan, m: int) -> float:
    """T_m = N·Σ_{q<m} τ_q, the scan time elapsed before sweep point m.

    ``m`` may equal M, in which case the result is the whole sweep time.
    """
    _check_index(plan, m, allow_end=True)
    return plan.num_jumps * math.fsum(coherence_time(plan, q) for q in range(m))


def make_phase_schedule(
    plan: SweepPlan, m: int, phantom_depth: int = 1
) -> PhaseSchedule:
    """Draw the N phases of sweep point m from the (seed, m) stream.

    ``phantom_depth`` pre-window phases φ_{-1,m}..φ_{-depth,m} come from a
    separate stream and are prefix-stable in the depth.
    """
    _check_index(plan, m)
    if phantom_depth < 0:
        raise PreconditionError("phantom_depth must be non-negative")
    return PhaseSchedule(
        phases=uniform_phases(plan.seed, Stream.PHASE, m, plan.num_jumps),
        pulse_duration=coherence_time(plan, m),
        start_time=start_time(plan, m),
        index=m,
        seed=plan.seed,
        phantoms=uniform_phases(plan.seed, Stream.PHANTOM, m, phantom_depth),
    )


def pulse_index(schedule: PhaseSchedule, t: np.ndarray) -> np.ndarray:
    """Pulse index in effect at time t (left-closed intervals, may be negative).

    Boundaries are b_n = start + n·τ; the floor estimate is corrected against
    them so that t == b_n always selects pulse n.
    """
    tau = schedule.pulse_duration
    start = schedule.start_time
    n = np.floor((t - start) / tau).astype(np.int64)
    n = n + (t >= start + (n + 1) * tau)
    n = n - (t < start + n * tau)
    return n


@overload
def sample_signal(schedule: PhaseSchedule, carrier_hz: float, t: float) -> float: ...


@overload
def sample_signal(
    schedule: PhaseSchedule, carrier_hz: float, t: np.ndarray
) -> np.ndarray: ...


def sample_signal(
    schedule: PhaseSchedule, carrier_hz: float, t: ArrayLike
) -> ArrayLike:
    """S(t) = cos(ωt + φ_n) inside the transmission window."""
    times = np.asarray(t, dtype=np.float64)
    if times.size and (
        times.min() < schedule.start_time or times.max() >= schedule.end_time
    ):
        raise DomainError(
            f"time outside transmission window "
            f"[{schedule.start_time}, {schedule.end_time})"
        )
    phase = schedule.phase_at(pulse_index(schedule, times))
    values = np.cos(2.0 * np.pi * carrier_hz * times + phase)
    if np.ndim(t) == 0:
        return float(values)
    return values


def time_grid(schedule: PhaseSchedule, fs: float) -> np.ndarray:
    """Sample instants start + k/fs covering the transmission window."""
    if fs <= 0:
        raise PreconditionError("fs must be positive")
    duration = schedule.end_time - schedule.start_time
    count = int(math.ceil(duration * fs))
    times = schedule.start_time + np.arange(count) / fs
    return times[times < schedule.end_time]


def periodogram(samples: np.ndarray, fs: float) -> tuple[np.ndarray, np.ndarray]:
    """One-sided power spectrum whose bins sum to the mean square of samples."""
    samples = np.asarray(samples, dtype=np.float64)
    if samples.size < 2:
        raise PreconditionError("periodogram needs at least two samples")
    if fs <= 0:
        raise PreconditionError("fs must be positive")
    freqs, power = sp_signal.periodogram(
        samples,
        fs=fs,
        window="boxcar",
        detrend=False,
        return_onesided=True,
        scaling="spectrum",
    )
    return freqs, power


def _refine_minimum(freqs: np.ndarray, values: np.ndarray, idx: int) -> float:
    if idx <= 0 or idx >= values.size - 1:
        return float(freqs[idx])
    left, mid, right = values[idx - 1], values[idx], values[idx + 1]
    denom = left - 2.0 * mid + right
    if denom <= 0:
        return float(freqs[idx])
    offset = 0.5 * (left - right) / denom
    step = freqs[idx + 1] - freqs[idx]
    return float(freqs[idx] + offset * step)


def measure_null_width(
    samples: np.ndarray,
    fs: float,
    carrier_hz: float,
    tau: float,
    segment_pulses: int = 64,
) -> SpectrumNulls:
    """Locate the first spectral nulls of a constant-τ pulse train.

    A Hann-windowed Welch average over segments of ``segment_pulses`` pulses
    smooths the periodogram; the minima are searched within 0.5/τ..1.5/τ of
    the carrier on either side and refined parabolically.
    """
    samples = np.asarray(samples, dtype=np.float64)
    nperseg = min(samples.size, max(8, int(round(segment_pulses * tau * fs))))
    freqs, psd = sp_signal.welch(
        samples,
        fs=fs,
        window="hann",
        nperseg=nperseg,
        noverlap=nperseg // 2,
        detrend=False,
        scaling="density",
    )

    def _null(lo: float, hi: float) -> float:
        mask = np.flatnonzero((freqs >= lo) & (freqs <= hi))
        if mask.size == 0:
            raise PreconditionError("spectrum does not cover the expected null")
        idx = int(mask[np.argmin(psd[mask])])
        return _refine_minimum(freqs, psd, idx)

    upper = _null(carrier_hz + 0.5 / tau, carrier_hz + 1.5 / tau)
    lower = _null(carrier_hz - 1.5 / tau, carrier_hz - 0.5 / tau)
    logger.debug(
        "Null search tau=%.4g lower_hz=%.6g upper_hz=%.6g", tau, lower, upper
    )
    return SpectrumNulls(lower_hz=lower, upper_hz=upper)
