"""Range and velocity estimation from a coherence sweep.

Target ranges show up as slope changes of C̃ against l_m. Breaks are found
by exhaustive least squares over every admissible split index, using prefix
sums so each candidate costs O(1); further breaks are added one at a time,
each addition followed by a repartition pass over all breaks.
"""

import math
from typing import Optional, Sequence, Union

import numpy as np
from scipy import optimize, stats
from scipy.constants import c as SPEED_OF_LIGHT

from ..core.config import get_settings
from ..core.errors import DomainError, EstimationFailed, PreconditionError
from ..core.logging import get_logger
from ..models import BreakpointFit, MotionFit, RangeReport, SweepPlan, VelocityEstimate
from .analytic import smt_mean, sweep_index

logger = get_logger(__name__)

PARALLEL_SLOPE_TOL = 1e-12
VELOCITY_GRID_SIZE = 9


class _SegmentCosts:
    """Residual sums of squares of segment fits over index ranges [i, j).

    Data are centered before the prefix sums are taken to keep the
    cancellation in the closed-form SSE small.
    """

    def __init__(self, xs: np.ndarray, ys: np.ndarray):
        self.y_mean = float(ys.mean())
        xc = xs - xs.mean()
        yc = ys - self.y_mean
        self.sx = self._prefix(xc)
        self.sy = self._prefix(yc)
        self.sxx = self._prefix(xc * xc)
        self.sxy = self._prefix(xc * yc)
        self.syy = self._prefix(yc * yc)

    @staticmethod
    def _prefix(values: np.ndarray) -> np.ndarray:
        return np.concatenate(([0.0], np.cumsum(values)))

    def line(self, i: np.ndarray, j: np.ndarray) -> np.ndarray:
        """SSE of the least-squares line through points i..j-1."""
        count = (j - i).astype(np.float64)
        sx = self.sx[j] - self.sx[i]
        sy = self.sy[j] - self.sy[i]
        sxx = self.sxx[j] - self.sxx[i] - sx * sx / count
        sxy = self.sxy[j] - self.sxy[i] - sx * sy / count
        syy = self.syy[j] - self.syy[i] - sy * sy / count
        return np.maximum(syy - sxy * sxy / sxx, 0.0)

    def zero(self, i: np.ndarray, j: np.ndarray) -> np.ndarray:
        """Σ y² over points i..j-1 (segment pinned to zero)."""
        count = (j - i).astype(np.float64)
        sy = self.sy[j] - self.sy[i]
        syy = self.syy[j] - self.syy[i]
        return syy + 2.0 * self.y_mean * sy + count * self.y_mean**2

    def cost(self, i: np.ndarray, j: np.ndarray, pinned: bool) -> np.ndarray:
        return self.zero(i, j) if pinned else self.line(i, j)


def _validate(
    xs: Sequence[float], ys: Sequence[float], min_points: int
) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if x.ndim != 1 or x.shape != y.shape:
        raise PreconditionError("xs and ys must be one-dimensional and equally long")
    if x.size < min_points:
        raise PreconditionError(
            f"{x.size} points given, at least {min_points} needed",
            details={"points": int(x.size), "required": min_points},
        )
    if not np.all(np.isfinite(x)) or not np.all(np.isfinite(y)):
        raise PreconditionError("xs and ys must be finite")
    if np.any(np.diff(x) <= 0):
        raise PreconditionError("xs must be strictly increasing")
    return x, y


def _best_split(
    costs: _SegmentCosts, lo: int, hi: int, pinned_left: bool, min_points: int
) -> Optional[tuple[int, float]]:
    """Split index in [lo, hi) minimizing the two-segment SSE; smallest wins ties."""
    candidates = np.arange(lo + min_points, hi - min_points + 1)
    if candidates.size == 0:
        return None
    total = costs.cost(np.full(candidates.size, lo), candidates, pinned_left)
    total = total + costs.line(candidates, np.full(candidates.size, hi))
    best = int(np.argmin(total))
    return int(candidates[best]), float(total[best])


def _line_fit(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    design = np.vstack([x, np.ones(x.size)]).T
    slope, intercept = np.linalg.lstsq(design, y, rcond=None)[0]
    return float(slope), float(intercept)


def _intersection(
    left: tuple[float, float], right: tuple[float, float], lo: float, hi: float
) -> float:
    """Abscissa where two lines meet, clamped to [lo, hi]; midpoint if parallel."""
    slope_gap = left[0] - right[0]
    if abs(slope_gap) <= PARALLEL_SLOPE_TOL * max(1.0, abs(left[0]), abs(right[0])):
        return 0.5 * (lo + hi)
    crossing = (right[1] - left[1]) / slope_gap
    return float(min(max(crossing, lo), hi))


def zero_break_sse(x: np.ndarray, y: np.ndarray, baseline: bool) -> float:
    """SSE of the model without breaks: one free line, or zero when pinned."""
    if not baseline:
        return float(np.sum(y * y))
    slope, intercept = _line_fit(x, y)
    return float(np.sum((y - (slope * x + intercept)) ** 2))


def _assemble(
    x: np.ndarray, y: np.ndarray, bounds: list[int], baseline: bool, min_points: int
) -> BreakpointFit:
    segments: list[tuple[float, float]] = []
    sse = 0.0
    for s, (lo, hi) in enumerate(zip(bounds[:-1], bounds[1:])):
        if s == 0 and not baseline:
            line = (0.0, 0.0)
        else:
            line = _line_fit(x[lo:hi], y[lo:hi])
        segments.append(line)
        residual = y[lo:hi] - (line[0] * x[lo:hi] + line[1])
        sse += float(np.sum(residual * residual))
    breakpoints = [
        _intersection(segments[s - 1], segments[s], float(x[j - 1]), float(x[j]))
        for s, j in enumerate(bounds[1:-1], start=1)
    ]
    return BreakpointFit(
        breakpoints=breakpoints,
        break_indices=list(bounds[1:-1]),
        segments=segments,
        sse=sse,
        single_line_sse=max(zero_break_sse(x, y, baseline), sse),
        num_samples=int(x.size),
        candidate_grid=np.arange(min_points, x.size - min_points + 1),
    )


def fit_k_breakpoints(
    xs: Sequence[float],
    ys: Sequence[float],
    num_breaks: int,
    *,
    baseline: bool = True,
    continuous: Optional[bool] = None,
) -> BreakpointFit:
    """Least-squares fit with ``num_breaks`` slope changes.

    Breaks are added one at a time at the split that lowers the total SSE
    most, and after each addition every break is re-estimated with its
    neighbours held fixed. With ``baseline=False`` the first segment is
    pinned to zero instead of being a free line. With ``continuous`` the
    breaks are finished by :func:`refine_breakpoints`.
    """
    if num_breaks < 1:
        raise PreconditionError("num_breaks must be at least 1")
    p = get_settings().min_segment_points
    x, y = _validate(xs, ys, (num_breaks + 1) * p)
    costs = _SegmentCosts(x, y)

    def pinned(segment: int) -> bool:
        return segment == 0 and not baseline

    bounds = [0, x.size]
    for _ in range(num_breaks):
        best: Optional[tuple[float, int]] = None
        for s, (lo, hi) in enumerate(zip(bounds[:-1], bounds[1:])):
            split = _best_split(costs, lo, hi, pinned(s), p)
            if split is None:
                continue
            whole = float(costs.cost(np.array([lo]), np.array([hi]), pinned(s))[0])
            gain = split[1] - whole
            if best is None or gain < best[0]:
                best = (gain, split[0])
        if best is None:
            raise EstimationFailed(
                "no segment long enough for another break",
                details={"breaks_found": len(bounds) - 2},
            )
        bounds = sorted(bounds + [best[1]])
        for i in range(1, len(bounds) - 1):
            split = _best_split(costs, bounds[i - 1], bounds[i + 1], pinned(i - 1), p)
            if split is not None:
                bounds[i] = split[0]

    fit = _assemble(x, y, bounds, baseline, p)
    if continuous is None:
        continuous = get_settings().continuous_breaks
    if continuous:
        fit = refine_breakpoints(x, y, fit, baseline=baseline)
    logger.debug(
        "Breakpoint fit breaks=%s sse=%.6g single_line_sse=%.6g",
        [round(b, 4) for b in fit.breakpoints],
        fit.sse,
        fit.single_line_sse,
    )
    return fit


def fit_single_breakpoint(
    xs: Sequence[float], ys: Sequence[float], *, baseline: bool = True
) -> BreakpointFit:
    """Best two-segment fit over every split leaving ≥3 points per side."""
    return fit_k_breakpoints(xs, ys, 1, baseline=baseline)


def _hinge_sse(
    x: np.ndarray, y: np.ndarray, breaks: np.ndarray, baseline: bool
) -> float:
    """SSE of the continuous model Σ c_i·max(x − ψ_i, 0), plus a line if free."""
    columns = [np.maximum(x - b, 0.0) for b in breaks]
    if baseline:
        columns += [x, np.ones(x.size)]
    design = np.vstack(columns).T
    coef = np.linalg.lstsq(design, y, rcond=None)[0]
    residual = y - design @ coef
    return float(residual @ residual)


def refine_breakpoints(
    xs: Sequence[float],
    ys: Sequence[float],
    fit: BreakpointFit,
    *,
    baseline: bool = True,
    passes: int = 3,
) -> BreakpointFit:
    """Move each break to the minimum of a continuous hinge fit.

    Breaks are updated one at a time with the others held fixed: a scan over
    the data abscissae between the neighbouring splits, then a bounded scalar
    search around the best sample. A move is kept only if it lowers the
    hinge SSE. Segment lines and split indices are left as fitted.
    """
    x, y = _validate(xs, ys, 2 * get_settings().min_segment_points)
    bounds = [0, *fit.break_indices, x.size]
    breaks = np.asarray(fit.breakpoints, dtype=np.float64)
    current = _hinge_sse(x, y, breaks, baseline)
    for _ in range(passes):
        moved = False
        for i in range(breaks.size):
            lo = float(x[bounds[i]])
            hi = float(x[bounds[i + 2] - 1])

            def loss(value: float) -> float:
                trial = breaks.copy()
                trial[i] = value
                return _hinge_sse(x, y, trial, baseline)

            window = x[(x > lo) & (x < hi)]
            if window.size == 0:
                continue
            scan = np.array([loss(float(v)) for v in window])
            best = int(np.argmin(scan))
            left = float(window[best - 1]) if best > 0 else lo
            right = float(window[best + 1]) if best + 1 < window.size else hi
            result = optimize.minimize_scalar(
                loss, bounds=(left, right), method="bounded"
            )
            value, sse = float(result.x), float(result.fun)
            if scan[best] < sse:
                value, sse = float(window[best]), float(scan[best])
            if sse < current:
                moved = True
                breaks[i], current = value, sse
        if not moved:
            break
    logger.debug(
        "Hinge refinement breaks=%s hinge_sse=%.6g",
        [round(float(b), 4) for b in breaks],
        current,
    )
    return fit.model_copy(update={"breakpoints": sorted(breaks.tolist())})


def _num_params(num_breaks: int, baseline: bool) -> int:
    return 3 * num_breaks + (2 if baseline else 0)


def detect_targets(
    xs: Sequence[float],
    ys: Sequence[float],
    *,
    baseline: bool = True,
    max_targets: Optional[int] = None,
    threshold: Optional[float] = None,
    continuous: Optional[bool] = None,
) -> tuple[int, Optional[BreakpointFit]]:
    """Number of breaks supported by the data, with the corresponding fit.

    Breaks are accepted one at a time while the F-ratio of the SSE drop
    (3 extra parameters per break) exceeds ``threshold``.
    """
    settings = get_settings()
    max_targets = settings.max_targets if max_targets is None else max_targets
    threshold = settings.detection_f_threshold if threshold is None else threshold
    p = settings.min_segment_points
    x, y = _validate(xs, ys, 2 * p)

    chosen, fit = 0, None
    previous = zero_break_sse(x, y, baseline)
    for k in range(1, max_targets + 1):
        dof = x.size - _num_params(k, baseline)
        if x.size < (k + 1) * p or dof <= 0:
            break
        try:
            candidate = fit_k_breakpoints(
                x, y, k, baseline=baseline, continuous=continuous
            )
        except EstimationFailed:
            break
        if candidate.sse == 0.0:
            ratio = math.inf if previous > 0.0 else 0.0
        else:
            ratio = ((previous - candidate.sse) / 3.0) / (candidate.sse / dof)
        logger.debug(
            "Break test k=%d f_ratio=%.4g p_value=%.3g threshold=%.4g",
            k,
            ratio,
            float(stats.f.sf(ratio, 3, dof)),
            threshold,
        )
        if not ratio > threshold:
            break
        chosen, fit, previous = k, candidate, candidate.sse
    logger.info("Targets detected count=%d points=%d", chosen, x.size)
    return chosen, fit


def ranges_from_fit(
    fit: BreakpointFit,
    delay_offset: float = 0.0,
    *,
    accuracy: Optional[float] = None,
    trials: int = 1,
) -> RangeReport:
    """Physical ranges (l − offset)/2 and half the spacing between breaks."""
    if delay_offset < 0:
        raise PreconditionError("delay_offset must be non-negative")
    below = [b for b in fit.breakpoints if b < delay_offset]
    if below:
        raise DomainError(
            "breakpoint below the delay offset gives a negative range",
            details={"breakpoints": below, "delay_offset": delay_offset},
        )
    ranges = [(b - delay_offset) / 2.0 for b in fit.breakpoints]
    separations = [
        (right - left) / 2.0
        for left, right in zip(fit.breakpoints[:-1], fit.breakpoints[1:])
    ]
    return RangeReport(
        breakpoints=list(fit.breakpoints),
        ranges=ranges,
        separations=separations,
        accuracy=accuracy,
        trials=trials,
    )


def accuracy_from_trials(
    breakpoints: Sequence[float], delay_offset: float = 0.0
) -> tuple[float, float]:
    """Mean range and unbiased range std over repeated sweeps [m]."""
    samples = np.asarray(breakpoints, dtype=np.float64)
    if samples.size < 2:
        raise PreconditionError("accuracy needs at least two trials")
    mean = (float(samples.mean()) - delay_offset) / 2.0
    std = float(samples.std(ddof=1)) / 2.0
    return mean, std


def _parabolic_offset(left: float, mid: float, right: float) -> float:
    denom = left - 2.0 * mid + right
    if denom >= 0:
        return 0.0
    return 0.5 * (left - right) / denom


def estimate_velocity(
    slow_time: np.ndarray,
    tau_m: float,
    carrier_hz: float,
    *,
    zero_pad: Optional[int] = None,
    detection_ratio: Optional[float] = None,
) -> VelocityEstimate:
    """Radial velocity from the pulse-to-pulse phase advance of one sweep point.

    The phase advance Δφ = 2k·v·τ_m is read off the peak of the zero-padded
    slow-time spectrum (parabolic interpolation between bins); a complex
    slow time gives the sign of v.
    """
    settings = get_settings()
    zero_pad = settings.doppler_zero_pad if zero_pad is None else zero_pad
    if detection_ratio is None:
        detection_ratio = settings.velocity_detection_ratio
    samples = np.asarray(slow_time)
    if samples.ndim != 1 or samples.size < 8:
        raise PreconditionError("velocity estimation needs 8 or more slow-time samples")
    if tau_m <= 0 or carrier_hz <= 0:
        raise PreconditionError("tau_m and carrier_hz must be positive")

    n = samples.size
    nfft = n * zero_pad
    power = np.abs(np.fft.fft(samples, n=nfft)) ** 2
    floor = float(np.median(np.abs(np.fft.fft(samples)) ** 2)) / math.log(2.0)
    peak = int(np.argmax(power))
    if power[peak] == 0.0:
        raise EstimationFailed("slow time is identically zero")
    ratio = float(power[peak] / floor) if floor > 0 else math.inf
    if ratio < detection_ratio:
        raise EstimationFailed(
            "no correlated slow-time component",
            details={"peak_ratio": ratio, "required": detection_ratio},
        )

    offset = _parabolic_offset(
        float(power[(peak - 1) % nfft]),
        float(power[peak]),
        float(power[(peak + 1) % nfft]),
    )
    cycles = np.fft.fftfreq(nfft)[peak] + offset / nfft
    phase_step = 2.0 * math.pi * float(cycles)
    omega = 2.0 * math.pi * carrier_hz
    scale = SPEED_OF_LIGHT / (2.0 * omega * tau_m)
    bin_width = 2.0 * math.pi / n
    estimate = VelocityEstimate(
        velocity_mps=phase_step * scale,
        phase_step_rad=phase_step,
        resolution_mps=bin_width * scale,
        max_unambiguous_mps=math.pi * scale,
        peak_ratio=ratio,
        ambiguous=abs(phase_step) >= math.pi - bin_width,
    )
    if estimate.ambiguous:
        logger.warning(
            "Velocity near the unambiguous limit velocity_mps=%.4g limit_mps=%.4g",
            estimate.velocity_mps,
            estimate.max_unambiguous_mps,
        )
    return estimate


def _motion_basis(
    x: np.ndarray, m: np.ndarray, plan: SweepPlan, l: float, velocity: float
) -> np.ndarray:
    return np.asarray(
        smt_mean(x, l, 1.0, plan.wavenumber, velocity, plan.num_jumps, m)
    )


class _MotionObjective:
    """Least-squares cost of the moving-target curve at a given (l, v).

    The amplitude enters linearly and is held non-negative; ``baseline``
    adds a free line a·l_m + b.
    """

    def __init__(
        self, x: np.ndarray, y: np.ndarray, plan: SweepPlan, baseline: bool
    ):
        self.x, self.y, self.plan = x, y, plan
        self.m = sweep_index(plan)
        self.extra = [x, np.ones(x.size)] if baseline else []
        self.floor = self._solve(self.extra)

    def _solve(self, columns: list[np.ndarray]) -> tuple[float, np.ndarray]:
        if not columns:
            return float(self.y @ self.y), np.zeros(0)
        design = np.vstack(columns).T
        coef = np.linalg.lstsq(design, self.y, rcond=None)[0]
        residual = self.y - design @ coef
        return float(residual @ residual), coef

    def __call__(self, l: float, velocity: float) -> tuple[float, float]:
        """SSE and amplitude of the best fit with (l, v) fixed."""
        basis = _motion_basis(self.x, self.m, self.plan, l, velocity)
        sse, coef = self._solve([basis, *self.extra])
        if coef[0] <= 0.0:
            return self.floor[0], 0.0
        return sse, float(coef[0])

    def best_length(
        self, velocity: float, candidates: np.ndarray
    ) -> tuple[float, float, float]:
        """(sse, l, amplitude) from a grid scan then a bounded polish."""
        costs = [self(float(l), velocity)[0] for l in candidates]
        i = int(np.argmin(costs))
        lo = float(candidates[max(i - 1, 0)])
        hi = float(candidates[min(i + 1, candidates.size - 1)])
        l_best = float(candidates[i])
        if hi > lo:
            polished = optimize.minimize_scalar(
                lambda l: self(l, velocity)[0], bounds=(lo, hi), method="bounded"
            )
            if polished.fun < costs[i]:
                l_best = float(polished.x)
        sse, amplitude = self(l_best, velocity)
        return sse, l_best, amplitude


def _length_candidates(x: np.ndarray, wavenumber: float) -> np.ndarray:
    # 16 nodes per carrier period of cos(kl), from one sweep span below l0
    span = x[-1] - x[0]
    step = 2.0 * math.pi / wavenumber / 16.0
    return np.arange(max(x[0] - span, 0.0), x[-1], step)


def refine_with_velocity(
    xs: Sequence[float],
    ys: Sequence[float],
    plan: SweepPlan,
    seed: Union[float, VelocityEstimate],
    *,
    window_mps: Optional[float] = None,
    candidates: Optional[np.ndarray] = None,
    baseline: bool = True,
) -> MotionFit:
    """Fit ``smt_mean`` to a sweep with start length l and velocity v free.

    v is searched within ``window_mps`` of the seed (a Doppler estimate or a
    plain speed): a coarse grid, then a bounded scalar minimization around
    the best node. For each v, l is scanned on ``candidates`` (default: 16
    nodes per carrier period) and polished the same way. ``window_mps=0``
    holds v at the seed.
    """
    p = get_settings().min_segment_points
    x, y = _validate(xs, ys, 2 * p)
    if x.size != plan.num_points:
        raise PreconditionError(
            "the sweep must have one value per plan point",
            details={"points": int(x.size), "num_points": plan.num_points},
        )
    if isinstance(seed, VelocityEstimate):
        v0 = seed.velocity_mps
        if window_mps is None:
            window_mps = max(
                get_settings().velocity_window_mps, 4.0 * seed.resolution_mps
            )
    else:
        v0 = float(seed)
    if window_mps is None:
        window_mps = get_settings().velocity_window_mps
    if window_mps < 0:
        raise PreconditionError("window_mps must be non-negative")
    if candidates is None:
        candidates = _length_candidates(x, plan.wavenumber)
    candidates = np.sort(np.asarray(candidates, dtype=np.float64))

    objective = _MotionObjective(x, y, plan, baseline)

    def cost(velocity: float) -> float:
        return objective.best_length(velocity, candidates)[0]

    velocity = v0
    if window_mps > 0:
        grid = np.linspace(v0 - window_mps, v0 + window_mps, VELOCITY_GRID_SIZE)
        costs = [cost(float(v)) for v in grid]
        i = int(np.argmin(costs))
        velocity = float(grid[i])
        polished = optimize.minimize_scalar(
            cost,
            bounds=(float(grid[max(i - 1, 0)]), float(grid[min(i + 1, grid.size - 1)])),
            method="bounded",
        )
        if polished.fun < costs[i]:
            velocity = float(polished.x)

    sse, l, amplitude = objective.best_length(velocity, candidates)
    fit = MotionFit(
        roundtrip_length=l,
        velocity_mps=velocity,
        seed_velocity_mps=v0,
        amplitude=amplitude,
        sse=sse,
    )
    logger.debug(
        "Motion fit l=%.4f v=%.4g seed_v=%.4g amplitude=%.4g sse=%.6g",
        fit.roundtrip_length,
        velocity,
        v0,
        fit.amplitude,
        sse,
    )
    return fit
