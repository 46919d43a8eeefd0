"""Repeated independent sweeps on a worker pool."""

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Sequence

import numpy as np

from ..core.config import get_settings
from ..core.errors import PreconditionError
from ..core.logging import get_logger
from ..core.rng import trial_seed
from ..models import (
    MonteCarloSummary,
    MotionModel,
    ReceiverMode,
    Scene,
    SweepPlan,
    SweepRecord,
    TheoryCurve,
)
from .analytic import theory_curve
from .correlator import run_sweep

logger = get_logger(__name__)


class MonteCarloRunner:
    """Runs independent sweeps and returns them in trial order.

    Trial t re-seeds the phase and noise streams with ``trial_seed`` of the
    base seeds, so results do not depend on the number of workers.
    """

    def __init__(self, workers: Optional[int] = None):
        if workers is None:
            workers = get_settings().threads or os.cpu_count() or 1
        if workers < 1:
            raise PreconditionError("workers must be at least 1")
        self.workers = workers

    @staticmethod
    def trial_inputs(
        plan: SweepPlan, scene: Scene, trial: int
    ) -> tuple[SweepPlan, Scene]:
        """Plan and scene of one trial."""
        return (
            plan.with_seed(trial_seed(plan.seed, trial)),
            scene.with_noise_seed(trial_seed(scene.noise_seed, trial)),
        )

    def run(
        self,
        plan: SweepPlan,
        scene: Scene,
        trials: int,
        mode: ReceiverMode = "semianalytic",
        *,
        fs: Optional[float] = None,
        motion: MotionModel = "frozen",
        include_double_frequency: bool = True,
    ) -> list[SweepRecord]:
        if trials < 1:
            raise PreconditionError("trials must be at least 1")
        logger.info(
            "Monte Carlo started trials=%d points=%d mode=%s workers=%d",
            trials,
            plan.num_points,
            mode,
            self.workers,
        )

        def one(trial: int) -> SweepRecord:
            trial_plan, trial_scene = self.trial_inputs(plan, scene, trial)
            return run_sweep(
                trial_plan,
                trial_scene,
                mode,
                fs=fs,
                motion=motion,
                include_double_frequency=include_double_frequency,
            )

        with ThreadPoolExecutor(max_workers=self.workers) as pool:
            records = list(pool.map(one, range(trials)))
        logger.info("Monte Carlo finished trials=%d", trials)
        return records


def c_norm_matrix(records: Sequence[SweepRecord]) -> np.ndarray:
    """C̃ of every trial stacked as (trials, M)."""
    return np.vstack([record.c_norm for record in records])


def summarize(
    records: Sequence[SweepRecord], curve: Optional[TheoryCurve] = None
) -> MonteCarloSummary:
    """Sample mean and unbiased std of C̃ per sweep point against theory."""
    if len(records) < 2:
        raise PreconditionError("a Monte Carlo summary needs at least two trials")
    first = records[0]
    if curve is None:
        curve = theory_curve(first.plan, first.scene)
    values = c_norm_matrix(records)
    mean = values.mean(axis=0)
    std = values.std(axis=0, ddof=1)
    scored = np.isfinite(curve.mean) & np.isfinite(curve.std) & (curve.std > 0)
    mean_error: Optional[float] = None
    std_error: Optional[float] = None
    if scored.any():
        scale = curve.std[scored]
        mean_error = float(np.max(np.abs(mean[scored] - curve.mean[scored]) / scale))
        std_error = float(np.max(np.abs(std[scored] / scale - 1.0)))
    else:
        logger.warning("No sweep point has a positive closed-form deviation")
    return MonteCarloSummary(
        l_m=first.l_m,
        mean=mean,
        std=std,
        theory_mean=curve.mean,
        theory_std=curve.std,
        trials=len(records),
        max_mean_error=mean_error,
        max_std_error=std_error,
    )
