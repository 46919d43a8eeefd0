"""Closed-form expectations, deviations and sweep/bandwidth tradeoffs."""

import math
from typing import Optional, Sequence, Union

import numpy as np
from scipy.constants import c as SPEED_OF_LIGHT

from ..core.errors import DomainError, PreconditionError
from ..core.logging import get_logger
from ..core.rng import Stream, generator
from ..models import Scene, SweepPlan, Target, TheoryCurve
from .waveform import coherence_times

logger = get_logger(__name__)

ArrayLike = Union[float, np.ndarray]


def _result(value: np.ndarray, *inputs: ArrayLike) -> ArrayLike:
    if all(np.ndim(x) == 0 for x in inputs):
        return float(value)
    return value


def sst_mean(l_m: ArrayLike, l: float, attenuation: float, k: float) -> ArrayLike:
    """E[C̃] of a stationary target: (A/2)(l_m − l)cos(kl) for l_m > l, else 0."""
    lm = np.asarray(l_m, dtype=np.float64)
    value = np.where(lm > l, 0.5 * attenuation * (lm - l) * np.cos(k * l), 0.0)
    return _result(value, l_m)


def _std_terms(
    l_m: np.ndarray,
    l: float,
    attenuation: float,
    num_jumps: int,
    snr: Optional[float],
    inside: np.ndarray,
) -> np.ndarray:
    noise = 0.0 if snr is None else 1.0 / snr
    jitter = np.where(inside, (l / l_m) ** 2, 1.0) / (2.0 * num_jumps)
    return 0.5 * attenuation * np.sqrt(jitter + noise)


def sst_std(
    l_m: ArrayLike,
    l: float,
    attenuation: float,
    num_jumps: int,
    snr: Optional[float] = None,
) -> ArrayLike:
    """Standard deviation of C_m for a stationary target.

    Inside the window the phase jitter contributes (1/2N)(l/l_m)², outside
    it 1/2N; ``snr=None`` drops the 1/SNR noise term.
    """
    if num_jumps < 1:
        raise PreconditionError("num_jumps must be at least 1")
    lm = np.asarray(l_m, dtype=np.float64)
    value = _std_terms(lm, l, attenuation, num_jumps, snr, lm > l)
    return _result(value, l_m)


def mst_mean(l_m: ArrayLike, targets: Sequence[Target], k: float) -> ArrayLike:
    """Sum of the stationary expectations of every target inside the window."""
    lm = np.asarray(l_m, dtype=np.float64)
    total = np.zeros(lm.shape)
    for target in targets:
        total = total + np.asarray(
            sst_mean(lm, target.roundtrip_length, target.attenuation, k)
        )
    return _result(total, l_m)


def mst_std(
    l_m: ArrayLike,
    targets: Sequence[Target],
    num_jumps: int,
    snr: Optional[float] = None,
) -> ArrayLike:
    """Root-sum-square of the per-target deviations.

    An empty target list leaves the noise of a unit-amplitude reference.
    """
    lm = np.asarray(l_m, dtype=np.float64)
    if not targets:
        floor = 0.0 if snr is None else 0.5 / math.sqrt(snr)
        return _result(np.full(lm.shape, floor), l_m)
    power = np.zeros(lm.shape)
    for target in targets:
        sigma = np.asarray(
            sst_std(lm, target.roundtrip_length, target.attenuation, num_jumps, snr)
        )
        power = power + sigma**2
    return _result(np.sqrt(power), l_m)


def dirichlet_kernel(x: np.ndarray, num_jumps: int) -> np.ndarray:
    """sin(Nx)/(N sin x), with the limit cos(Nx)/cos(x) where sin x vanishes."""
    x = np.asarray(x, dtype=np.float64)
    s = np.sin(x)
    singular = np.abs(s) < 1e-12
    safe = np.where(singular, 1.0, s)
    regular = np.sin(num_jumps * x) / (num_jumps * safe)
    return np.where(singular, np.cos(num_jumps * x) / np.cos(x), regular)


def smt_mean(
    l_m: ArrayLike,
    l: float,
    attenuation: float,
    k: float,
    velocity_mps: float,
    num_jumps: int,
    m: ArrayLike,
) -> ArrayLike:
    """E[C̃] for one target moving at ``velocity_mps``.

    The per-pulse phase drift averages into a Dirichlet kernel and the
    coherence gate opens only once l_m > l + 2mN(v/c)l_m.
    """
    lm = np.asarray(l_m, dtype=np.float64)
    mm = np.asarray(m, dtype=np.float64)
    beta = velocity_mps / SPEED_OF_LIGHT
    kernel = dirichlet_kernel(k * lm * beta, num_jumps)
    phase = np.cos(k * (l + (num_jumps - 1) * beta * lm))
    gate = lm > l + 2.0 * mm * num_jumps * beta * lm
    value = np.where(gate, 0.5 * attenuation * (lm - l) * phase * kernel, 0.0)
    return _result(value, l_m, m)


def smt_std(
    l_m: ArrayLike,
    l: float,
    attenuation: float,
    velocity_mps: float,
    num_jumps: int,
    m: ArrayLike,
    snr: Optional[float] = None,
) -> ArrayLike:
    """Stationary deviation branches selected by the moving-target gate."""
    lm = np.asarray(l_m, dtype=np.float64)
    mm = np.asarray(m, dtype=np.float64)
    beta = velocity_mps / SPEED_OF_LIGHT
    gate = lm > l + 2.0 * mm * num_jumps * beta * lm
    return _result(_std_terms(lm, l, attenuation, num_jumps, snr, gate), l_m, m)


def total_sweep_time(
    tau0: float, delta_tau: float, num_jumps: int, num_points: int
) -> float:
    """T_tot = N·Σ_m τ_m = ((2τ₀ + Δτ)/2)·N·M."""
    return (2.0 * tau0 + delta_tau) / 2.0 * num_jumps * num_points


def plan_total_time(plan: SweepPlan) -> float:
    return total_sweep_time(
        plan.tau0, plan.delta_tau, plan.num_jumps, plan.num_points
    )


def max_bandwidth(tau0: float) -> float:
    """BW_max = 2/τ₀ [Hz]."""
    if tau0 <= 0:
        raise DomainError("tau0 must be positive", details={"tau0": tau0})
    return 2.0 / tau0


def tradeoff_bandwidth(
    total_time: float, num_jumps: int, num_points: int, delta_tau: float
) -> float:
    """BW_max expressed through the total sweep time: 2/(T_tot/NM − Δτ/2)."""
    denominator = total_time / (num_jumps * num_points) - delta_tau / 2.0
    if denominator <= 0:
        raise DomainError(
            "total sweep time too short for the coherence span",
            details={"denominator_s": denominator},
        )
    return 2.0 / denominator


def carrier_hop_bandwidth(tau0: float) -> float:
    """Extra sweep bandwidth needed to step off a correlation null: 1/(2τ₀)."""
    if tau0 <= 0:
        raise DomainError("tau0 must be positive", details={"tau0": tau0})
    return 1.0 / (2.0 * tau0)


def hop_carriers(carrier_hz: float, tau0: float, count: int) -> np.ndarray:
    """``count`` carriers spread evenly over the hop bandwidth above ``carrier_hz``."""
    if count < 1:
        raise PreconditionError("count must be at least 1")
    return carrier_hz + np.linspace(0.0, carrier_hop_bandwidth(tau0), count)


def pick_carrier(candidates: Sequence[float], target_lengths: Sequence[float]) -> float:
    """Candidate maximizing min_i |cos(k·l_i)|; ties go to the lowest frequency."""
    if len(candidates) == 0:
        raise PreconditionError("no candidate carriers given")
    freqs = np.sort(np.asarray(candidates, dtype=np.float64))
    lengths = np.asarray(target_lengths, dtype=np.float64)
    if lengths.size == 0:
        return float(freqs[0])
    k = 2.0 * np.pi * freqs / SPEED_OF_LIGHT
    score = np.abs(np.cos(np.outer(k, lengths))).min(axis=1)
    best = int(np.argmax(score))
    logger.debug(
        "Carrier picked carrier_hz=%.6g min_abs_cos=%.4f candidates=%d",
        freqs[best],
        score[best],
        freqs.size,
    )
    return float(freqs[best])


def baseline_resolution(bandwidth_hz: float) -> float:
    """Conventional range resolution c/(2·BW) at equal bandwidth [m]."""
    if bandwidth_hz <= 0:
        raise DomainError("bandwidth must be positive")
    return SPEED_OF_LIGHT / (2.0 * bandwidth_hz)


def sweep_index(plan: SweepPlan) -> np.ndarray:
    """Continuous sweep index (M−1)(τ_m − τ₀)/Δτ; zero for a flat sweep."""
    if plan.delta_tau == 0:
        return np.zeros(plan.num_points)
    taus = coherence_times(plan)
    return (plan.num_points - 1) * (taus - plan.tau0) / plan.delta_tau


def theory_curve(plan: SweepPlan, scene: Scene) -> TheoryCurve:
    """Expected C̃ and its deviation on the sweep's own l_m grid.

    Stationary scenes use the multi-target sums, a single moving target the
    moving-target form. Several targets with any motion have no closed form;
    the curve is then NaN.
    """
    l_m = SPEED_OF_LIGHT * coherence_times(plan)
    k = plan.wavenumber
    n = plan.num_jumps
    if scene.stationary:
        mean = np.asarray(mst_mean(l_m, scene.targets, k))
        sigma = np.asarray(mst_std(l_m, scene.targets, n, scene.snr))
    elif len(scene.targets) == 1:
        target = scene.targets[0]
        m = sweep_index(plan)
        v = target.radial_velocity
        l = target.roundtrip_length
        mean = np.asarray(smt_mean(l_m, l, target.attenuation, k, v, n, m))
        sigma = np.asarray(smt_std(l_m, l, target.attenuation, v, n, m, scene.snr))
    else:
        logger.warning(
            "No closed form for several targets with motion targets=%d",
            len(scene.targets),
        )
        nan = np.full(l_m.shape, np.nan)
        return TheoryCurve(l_m=l_m, mean=nan, std=nan.copy())
    return TheoryCurve(l_m=l_m, mean=mean + l_m * scene.dc_bias, std=l_m * sigma)


def draw_theory_sweep(curve: TheoryCurve, seed: int) -> np.ndarray:
    """One Gaussian sample of C̃ per grid point from the theory mean and std."""
    rng = generator(seed, Stream.THEORY, 0)
    return curve.mean + curve.std * rng.standard_normal(curve.l_m.size)
