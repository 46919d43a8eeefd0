"""Command implementations: scenario in, CSV and JSON files out."""

from pathlib import Path
from typing import Optional, Sequence

import numpy as np
import pandas as pd

from ..core.config import get_settings
from ..core.errors import EstimationFailed, NumericalError, PreconditionError
from ..core.logging import get_logger
from ..models import VelocityEstimate
from ..services.analytic import (
    baseline_resolution,
    carrier_hop_bandwidth,
    hop_carriers,
    max_bandwidth,
    pick_carrier,
    plan_total_time,
    theory_curve,
    tradeoff_bandwidth,
)
from ..services.correlator import run_sweep
from ..services.estimator import (
    accuracy_from_trials,
    detect_targets,
    estimate_velocity,
    fit_k_breakpoints,
    ranges_from_fit,
    refine_with_velocity,
    zero_break_sse,
)
from ..services.montecarlo import MonteCarloRunner, c_norm_matrix, summarize
from ..services.waveform import (
    coherence_time,
    make_phase_schedule,
    measure_null_width,
    periodogram,
    sample_signal,
    start_time,
    time_grid,
)
from .io import read_sweep_csv, to_domain, write_csv, write_json
from .schemas import (
    AnalysisReport,
    MonteCarloReport,
    PlanReport,
    ScenarioConfig,
    SpectrumPoint,
    SpectrumReport,
    VelocityReport,
)

logger = get_logger(__name__)

HOP_GRID_SIZE = 5
SPECTRUM_BAND_WIDTHS = 3.0


def cmd_sweep(config: ScenarioConfig, out_dir: Path) -> Path:
    """One sweep with the closed-form curve alongside; writes sweep.csv."""
    plan, scene = to_domain(config)
    record = run_sweep(
        plan,
        scene,
        config.mode,
        fs=config.fs_hz,
        motion=config.motion,
        include_double_frequency=config.include_double_frequency,
    )
    curve = theory_curve(plan, scene)
    frame = pd.DataFrame(
        {
            "m": record.m,
            "l_m_meters": record.l_m,
            "c_raw_unitless": record.c_raw,
            "c_norm_meters": record.c_norm,
            "theory_mean_meters": curve.mean,
            "theory_std_meters": curve.std,
        }
    )
    return write_csv(frame, out_dir / "sweep.csv")


def cmd_montecarlo(
    config: ScenarioConfig, out_dir: Path, workers: Optional[int] = None
) -> MonteCarloReport:
    """Repeated sweeps; writes montecarlo.csv, trials.csv and montecarlo.json."""
    if config.trials < 2:
        raise PreconditionError(
            "Monte Carlo needs at least two trials", details={"trials": config.trials}
        )
    plan, scene = to_domain(config)
    records = MonteCarloRunner(workers).run(
        plan,
        scene,
        config.trials,
        config.mode,
        fs=config.fs_hz,
        motion=config.motion,
        include_double_frequency=config.include_double_frequency,
    )
    summary = summarize(records, theory_curve(plan, scene))
    write_csv(
        pd.DataFrame(
            {
                "m": np.arange(plan.num_points),
                "l_m_meters": summary.l_m,
                "mean_c_norm_meters": summary.mean,
                "std_c_norm_meters": summary.std,
                "theory_mean_meters": summary.theory_mean,
                "theory_std_meters": summary.theory_std,
            }
        ),
        out_dir / "montecarlo.csv",
    )
    values = c_norm_matrix(records)
    write_csv(
        pd.DataFrame(
            {
                "trial": np.repeat(np.arange(config.trials), plan.num_points),
                "m": np.tile(np.arange(plan.num_points), config.trials),
                "l_m_meters": np.tile(summary.l_m, config.trials),
                "c_norm_meters": values.ravel(),
            }
        ),
        out_dir / "trials.csv",
    )
    report = MonteCarloReport(
        config=config,
        trials=config.trials,
        max_mean_error=summary.max_mean_error,
        max_std_error=summary.max_std_error,
    )
    write_json(report, out_dir / "montecarlo.json")
    return report


def _load_sweeps(inputs: Sequence[Path]) -> list[tuple[np.ndarray, np.ndarray]]:
    sweeps = []
    for path in inputs:
        frame = read_sweep_csv(path)
        if "trial" in frame.columns:
            for _, group in frame.groupby("trial", sort=True):
                sweeps.append(
                    (group["l_m_meters"].to_numpy(), group["c_norm_meters"].to_numpy())
                )
        else:
            sweeps.append(
                (frame["l_m_meters"].to_numpy(), frame["c_norm_meters"].to_numpy())
            )
    if not sweeps:
        raise PreconditionError("no sweeps to analyze")
    return sweeps


def _pooled_curve(
    sweeps: list[tuple[np.ndarray, np.ndarray]]
) -> tuple[np.ndarray, np.ndarray]:
    xs = sweeps[0][0]
    for index, (x, _) in enumerate(sweeps[1:], start=1):
        if x.shape != xs.shape or not np.allclose(x, xs):
            raise PreconditionError(
                "sweeps must share one l_m grid to be analyzed together",
                details={"sweep": index, "points": int(x.size)},
            )
    return xs, np.mean([y for _, y in sweeps], axis=0)


def cmd_analyze(
    inputs: Sequence[Path],
    out_dir: Path,
    *,
    k: Optional[int] = None,
    delay_offset: float = 0.0,
    baseline: bool = True,
    continuous: Optional[bool] = None,
) -> AnalysisReport:
    """Breakpoint analysis of sweep or trials tables; writes analysis.json.

    Breakpoints, ranges and separations come from one fit of the
    trial-averaged curve; with ``k`` unset the target count is detected on
    that curve too. With several sweeps each is also fitted on its own and
    the largest per-break standard deviation is reported as the accuracy.
    """
    sweeps = _load_sweeps(inputs)
    xs, pooled = _pooled_curve(sweeps)
    if k is None:
        num_targets, _ = detect_targets(xs, pooled, baseline=baseline)
    else:
        num_targets = k
    audit = {
        "inputs": [str(p) for p in inputs],
        "k": k,
        "delay_offset_m": delay_offset,
        "baseline": baseline,
        "continuous": continuous,
    }

    if num_targets == 0:
        single = zero_break_sse(xs, pooled, baseline)
        report = AnalysisReport(
            config=audit,
            verdict="no target",
            num_targets=0,
            breakpoints_m=[],
            ranges_m=[],
            separations_m=[],
            trials=len(sweeps),
            sse=single,
            single_line_sse=single,
        )
    else:
        fit = fit_k_breakpoints(
            xs, pooled, num_targets, baseline=baseline, continuous=continuous
        )
        accuracy = None
        if len(sweeps) >= 2:
            breaks = np.array(
                [
                    fit_k_breakpoints(
                        x, y, num_targets, baseline=baseline, continuous=continuous
                    ).breakpoints
                    for x, y in sweeps
                ]
            )
            accuracy = max(
                accuracy_from_trials(breaks[:, i], delay_offset)[1]
                for i in range(num_targets)
            )
        ranges = ranges_from_fit(
            fit, delay_offset, accuracy=accuracy, trials=len(sweeps)
        )
        report = AnalysisReport(
            config=audit,
            verdict="targets",
            num_targets=num_targets,
            breakpoints_m=ranges.breakpoints,
            ranges_m=ranges.ranges,
            separations_m=ranges.separations,
            accuracy_m=ranges.accuracy,
            trials=ranges.trials,
            sse=fit.sse,
            single_line_sse=fit.single_line_sse,
        )
    logger.info(
        "Analysis finished verdict=%s targets=%d trials=%d",
        report.verdict,
        report.num_targets,
        report.trials,
    )
    write_json(report, out_dir / "analysis.json")
    return report


def cmd_plan(
    config: ScenarioConfig, out_dir: Path, separation_m: Optional[float] = None
) -> PlanReport:
    """Sweep time, bandwidths and resolution figures of a plan; writes plan.json."""
    if separation_m is not None and separation_m <= 0:
        raise PreconditionError("separation must be positive")
    plan, scene = to_domain(config)
    total = plan_total_time(plan)
    bw_max = max_bandwidth(plan.tau0)
    carriers = hop_carriers(plan.carrier_hz, plan.tau0, HOP_GRID_SIZE)
    lengths = [t.roundtrip_length for t in scene.targets]
    baseline = baseline_resolution(bw_max)
    suggested = pick_carrier(carriers.tolist(), lengths) if lengths else None
    report = PlanReport(
        config=config.plan,
        total_time_s=total,
        summed_schedule_time_s=start_time(plan, plan.num_points),
        bw_max_hz=bw_max,
        tradeoff_bw_hz=tradeoff_bandwidth(
            total, plan.num_jumps, plan.num_points, plan.delta_tau
        ),
        carrier_hop_hz=carrier_hop_bandwidth(plan.tau0),
        hop_carriers_hz=carriers.tolist(),
        suggested_carrier_hz=suggested,
        baseline_resolution_m=baseline,
        separation_m=separation_m,
        resolution_ratio=baseline / separation_m if separation_m else None,
    )
    write_json(report, out_dir / "plan.json")
    return report


def cmd_spectrum(
    config: ScenarioConfig, out_dir: Path, fs: Optional[float] = None
) -> SpectrumReport:
    """Transmit periodograms of selected sweep points and their null widths.

    Writes spectrum_mNNNN.csv per point (bins within three nominal widths of
    the carrier) and spectrum.json.
    """
    plan, _ = to_domain(config)
    fs = fs or config.fs_hz
    if fs is None:
        raise PreconditionError("spectrum needs a sampling rate fs_hz")
    minimum = get_settings().sampled_oversampling * plan.carrier_hz
    if fs < minimum:
        raise PreconditionError(
            f"fs={fs:.6g} Hz below the required {minimum:.6g} Hz",
            details={"fs_hz": fs, "min_fs_hz": minimum},
        )
    points = config.spectrum_points or [0, plan.num_points - 1]
    results = []
    for m in points:
        tau_m = coherence_time(plan, m)
        schedule = make_phase_schedule(plan, m, phantom_depth=0)
        samples = sample_signal(schedule, plan.carrier_hz, time_grid(schedule, fs))
        freqs, power = periodogram(samples, fs)
        nulls = measure_null_width(samples, fs, plan.carrier_hz, tau_m)
        band = np.abs(freqs - plan.carrier_hz) <= SPECTRUM_BAND_WIDTHS / tau_m
        write_csv(
            pd.DataFrame({"frequency_hz": freqs[band], "power_unitless": power[band]}),
            out_dir / f"spectrum_m{m:04d}.csv",
        )
        results.append(
            SpectrumPoint(
                m=m,
                tau_s=tau_m,
                expected_width_hz=2.0 / tau_m,
                measured_width_hz=nulls.width_hz,
                lower_null_hz=nulls.lower_hz,
                upper_null_hz=nulls.upper_hz,
                total_power=float(power.sum()),
            )
        )
        logger.info(
            "Spectrum point m=%d expected_hz=%.6g measured_hz=%.6g",
            m,
            2.0 / tau_m,
            nulls.width_hz,
        )
    report = SpectrumReport(config=config, fs_hz=fs, points=results)
    write_json(report, out_dir / "spectrum.json")
    return report


def cmd_velocity(config: ScenarioConfig, out_dir: Path) -> VelocityReport:
    """Doppler speed from slow time, then a joint (l, v) moving-target fit.

    The Doppler estimate comes from the sweep point with the strongest
    slow-time line and seeds the fit of the whole sweep; writes
    velocity.json.
    """
    if config.mode != "semianalytic":
        raise PreconditionError("velocity needs the semianalytic receiver")
    plan, scene = to_domain(config)
    record = run_sweep(
        plan,
        scene,
        motion=config.motion,
        include_double_frequency=config.include_double_frequency,
        keep_slow_time=True,
    )
    if record.slow_time is None:
        raise NumericalError("sweep returned no slow time")
    best: Optional[tuple[int, VelocityEstimate]] = None
    for m in range(plan.num_points):
        try:
            estimate = estimate_velocity(
                record.slow_time[m], coherence_time(plan, m), plan.carrier_hz
            )
        except EstimationFailed:
            continue
        if best is None or estimate.peak_ratio > best[1].peak_ratio:
            best = (m, estimate)
    if best is None:
        raise EstimationFailed("no sweep point shows a Doppler line")
    m, estimate = best
    fit = refine_with_velocity(
        record.l_m, record.c_norm, plan, estimate, baseline=config.baseline
    )
    report = VelocityReport(
        config=config,
        doppler_m=m,
        doppler_velocity_mps=estimate.velocity_mps,
        doppler_resolution_mps=estimate.resolution_mps,
        max_unambiguous_mps=estimate.max_unambiguous_mps,
        peak_ratio=estimate.peak_ratio,
        velocity_mps=fit.velocity_mps,
        roundtrip_length_m=fit.roundtrip_length,
        range_m=(fit.roundtrip_length - config.delay_offset_m) / 2.0,
        amplitude=fit.amplitude,
        sse=fit.sse,
    )
    logger.info(
        "Velocity finished doppler_mps=%.4g fitted_mps=%.4g length_m=%.4f",
        estimate.velocity_mps,
        fit.velocity_mps,
        fit.roundtrip_length,
    )
    write_json(report, out_dir / "velocity.json")
    return report
