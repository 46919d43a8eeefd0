"""Cross-correlation receiver.

The receiver mixes the echo with the still-transmitting carrier and averages
the product over the N·τ_m window of one sweep point. Two evaluations are
provided: an exact piecewise closed form (no time grid) and a brute-force
trapezoid quadrature on a sampled grid used as an independent check.
"""

import math
from typing import Optional

import numpy as np
from scipy.constants import c as SPEED_OF_LIGHT
from scipy.integrate import trapezoid

from ..core.config import get_settings
from ..core.errors import PreconditionError
from ..core.logging import get_logger
from ..core.rng import Stream, generator
from ..models import (
    MOTION_MODELS,
    RECEIVER_MODES,
    MotionModel,
    PhaseSchedule,
    ReceiverMode,
    Scene,
    SweepPlan,
    SweepRecord,
    Target,
)
from .scene import received_sample, required_phantom_depth
from .waveform import (
    coherence_time,
    coherence_times,
    make_phase_schedule,
    sample_signal,
    start_time,
)

logger = get_logger(__name__)


def integrated_noise_std(scene: Scene) -> float:
    """Std of the noise on C_m: √(Σ_i (A_i/2)²/SNR), A = 1 for an empty scene."""
    if scene.snr is None:
        return 0.0
    amplitudes = [t.attenuation for t in scene.targets] or [1.0]
    power = math.fsum((a / 2.0) ** 2 for a in amplitudes)
    return math.sqrt(power / scene.snr)


def _segment_integral(
    omega: float,
    t0: np.ndarray,
    t1: np.ndarray,
    a: np.ndarray,
    b: np.ndarray,
    d: np.ndarray,
    include_double_frequency: bool,
) -> np.ndarray:
    """∫ e^{j(ωt+a)}-referenced product with cos(ω(t−d)+b) over [t0, t1).

    The real part is the in-phase integral ∫cos(ωt+a)cos(ω(t−d)+b)dt, the
    imaginary part the quadrature integral against sin(ωt+a).
    """
    value = 0.5 * (t1 - t0) * np.exp(1j * (omega * d + a - b))
    if include_double_frequency:
        base = a + b - omega * d
        value = value - 0.25j / omega * (
            np.exp(1j * (2.0 * omega * t1 + base))
            - np.exp(1j * (2.0 * omega * t0 + base))
        )
    return value


def _echo_delays(
    plan: SweepPlan, target: Target, m: int, motion: MotionModel
) -> tuple[np.ndarray, np.ndarray]:
    """Per-pulse echo delay and the delay at which the pulse window is split.

    ``frozen`` holds the target still within each pulse and advances its
    delay by 2τ_m·v/c per pulse; the coherence gate opens only once
    l_m > l + 2mN(v/c)l_m, as the sequential scan has moved the target by
    then. ``continuous`` lets the delay follow the absolute scan time.
    """
    tau_m = coherence_time(plan, m)
    n = np.arange(plan.num_jumps)
    beta = target.radial_velocity / SPEED_OF_LIGHT
    if motion == "continuous":
        delays = target.delay + 2.0 * beta * (start_time(plan, m) + n * tau_m)
        return delays, np.maximum(delays, 0.0)
    delays = target.delay + 2.0 * n * tau_m * beta
    l_m = SPEED_OF_LIGHT * tau_m
    gate_open = l_m > target.roundtrip_length + 2.0 * m * plan.num_jumps * beta * l_m
    split = np.maximum(delays, 0.0)
    if not gate_open:
        split = np.maximum(split, tau_m)
    return delays, split


def correlate_point_semianalytic(
    plan: SweepPlan,
    scene: Scene,
    m: int,
    *,
    schedule: Optional[PhaseSchedule] = None,
    include_double_frequency: bool = True,
    motion: MotionModel = "frozen",
) -> tuple[float, np.ndarray]:
    """Exact C_m of sweep point m and its complex per-pulse slow time.

    Each pulse [t_n, t_n + τ_m) is split at the echo delay d = qτ_m + r:
    the first r seconds see the echo of pulse n−q−1, the rest that of pulse
    n−q. ``slow_time[n]`` is (1/τ_m)·Σ_i A_i·(I + jQ) for pulse n; its real
    parts average to C_m before ``dc_bias`` is added.

    A caller-supplied ``schedule`` replaces the seeded phase draw and must
    carry enough phantom phases for the longest delay.
    """
    if motion not in MOTION_MODELS:
        raise PreconditionError(f"unknown motion model {motion!r}")
    tau_m = coherence_time(plan, m)
    omega = plan.omega
    delays = [_echo_delays(plan, target, m, motion) for target in scene.targets]

    if schedule is None:
        longest = max((float(split.max()) for _, split in delays), default=0.0)
        depth = int(math.floor(longest / tau_m)) + 1
        schedule = make_phase_schedule(plan, m, phantom_depth=depth)

    n = np.arange(schedule.num_jumps)
    t_n = schedule.start_time + n * tau_m
    a = schedule.phases
    slow_time = np.zeros(schedule.num_jumps, dtype=np.complex128)
    for target, (delay, split) in zip(scene.targets, delays):
        q = np.floor(split / tau_m).astype(np.int64)
        r = split - q * tau_m
        early = _segment_integral(
            omega, t_n, t_n + r, a, schedule.phase_at(n - q - 1), delay,
            include_double_frequency,
        )
        late = _segment_integral(
            omega, t_n + r, t_n + tau_m, a, schedule.phase_at(n - q), delay,
            include_double_frequency,
        )
        slow_time = slow_time + target.attenuation / tau_m * (early + late)

    clean = float(np.mean(slow_time.real))
    sigma = integrated_noise_std(scene)
    if sigma > 0.0:
        rng = generator(scene.noise_seed, Stream.NOISE, m)
        offset = rng.normal()
        # per-pulse noise keeps the integrated level; its pulse mean is the offset draw
        in_phase = rng.normal(size=slow_time.size)
        quadrature = rng.normal(size=slow_time.size)
        slow_time = slow_time + sigma * (
            offset + (in_phase - in_phase.mean()) + 1j * quadrature
        )
        clean += sigma * offset
    return clean + scene.dc_bias, slow_time


def correlate_point_sampled(
    plan: SweepPlan, scene: Scene, m: int, fs: float
) -> float:
    """Trapezoid-rule C_m on a grid of spacing ≈ 1/fs over the whole window."""
    minimum = get_settings().sampled_oversampling * plan.carrier_hz
    if fs < minimum:
        raise PreconditionError(
            f"fs={fs:.6g} Hz below the required {minimum:.6g} Hz",
            details={"fs_hz": fs, "min_fs_hz": minimum},
        )
    schedule = make_phase_schedule(
        plan, m, phantom_depth=required_phantom_depth(plan, scene, m)
    )
    window = schedule.end_time - schedule.start_time
    count = int(math.ceil(window * fs))
    grid = schedule.start_time + np.linspace(0.0, window, count + 1)
    # the window is half-open; the last node sits just inside it
    grid[-1] = np.nextafter(schedule.end_time, schedule.start_time)
    product = sample_signal(schedule, plan.carrier_hz, grid) * received_sample(
        scene, schedule, plan.carrier_hz, grid, fs=count / window
    )
    return float(trapezoid(product, grid) / window) + scene.dc_bias


def run_sweep(
    plan: SweepPlan,
    scene: Scene,
    mode: ReceiverMode = "semianalytic",
    *,
    fs: Optional[float] = None,
    motion: MotionModel = "frozen",
    include_double_frequency: bool = True,
    keep_slow_time: bool = False,
) -> SweepRecord:
    """Evaluate every sweep point m = 0..M−1 in order."""
    if mode not in RECEIVER_MODES:
        raise PreconditionError(f"unknown receiver mode {mode!r}")
    if mode == "sampled" and fs is None:
        raise PreconditionError("sampled mode needs a sampling rate fs")
    logger.debug(
        "Sweep started points=%d jumps=%d mode=%s seed=%d",
        plan.num_points,
        plan.num_jumps,
        mode,
        plan.seed,
    )
    c_raw = np.empty(plan.num_points)
    slow: list[np.ndarray] = []
    for m in range(plan.num_points):
        if mode == "sampled":
            assert fs is not None
            c_raw[m] = correlate_point_sampled(plan, scene, m, fs)
            continue
        c_raw[m], pulses = correlate_point_semianalytic(
            plan,
            scene,
            m,
            include_double_frequency=include_double_frequency,
            motion=motion,
        )
        if keep_slow_time:
            slow.append(pulses)
    l_m = SPEED_OF_LIGHT * coherence_times(plan)
    logger.debug("Sweep finished points=%d mode=%s", plan.num_points, mode)
    return SweepRecord.from_raw(
        plan, scene, mode, l_m, c_raw, slow_time=np.vstack(slow) if slow else None
    )
