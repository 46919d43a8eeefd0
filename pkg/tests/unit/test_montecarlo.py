"""Unit tests for the Monte Carlo runner."""

import numpy as np
import pytest

from cohradar.core.errors import PreconditionError
from cohradar.models import Scene, SweepPlan
from cohradar.services import MonteCarloRunner
from cohradar.services.montecarlo import c_norm_matrix, summarize


def test_workers_from_environment(monkeypatch: pytest.MonkeyPatch):
    """Test COHRADAR_THREADS caps the pool."""
    monkeypatch.setenv("COHRADAR_THREADS", "2")

    assert MonteCarloRunner().workers == 2


def test_workers_must_be_positive():
    """Test a zero-worker pool is rejected."""
    with pytest.raises(PreconditionError):
        MonteCarloRunner(0)


def test_trial_inputs_reseed(small_plan: SweepPlan, noisy_scene: Scene):
    """Test every trial gets its own phase and noise seeds."""
    first = MonteCarloRunner.trial_inputs(small_plan, noisy_scene, 0)
    second = MonteCarloRunner.trial_inputs(small_plan, noisy_scene, 1)

    assert first[0].seed != second[0].seed
    assert first[1].noise_seed != second[1].noise_seed
    assert first[0].num_jumps == small_plan.num_jumps


def test_results_independent_of_worker_count(
    small_plan: SweepPlan, noisy_scene: Scene
):
    """Test trial order and values do not depend on the pool size."""
    serial = MonteCarloRunner(1).run(small_plan, noisy_scene, 6)
    pooled = MonteCarloRunner(4).run(small_plan, noisy_scene, 6)

    np.testing.assert_array_equal(c_norm_matrix(serial), c_norm_matrix(pooled))
    assert c_norm_matrix(serial).shape == (6, small_plan.num_points)


def test_trials_differ(small_plan: SweepPlan, noisy_scene: Scene):
    """Test independent trials give different sweeps."""
    records = MonteCarloRunner(2).run(small_plan, noisy_scene, 2)

    assert not np.array_equal(records[0].c_norm, records[1].c_norm)


def test_run_needs_a_trial(small_plan: SweepPlan, noisy_scene: Scene):
    """Test zero trials are rejected."""
    with pytest.raises(PreconditionError):
        MonteCarloRunner(1).run(small_plan, noisy_scene, 0)


def test_summarize(small_plan: SweepPlan, noisy_scene: Scene):
    """Test per-point statistics against the closed forms."""
    records = MonteCarloRunner(2).run(small_plan, noisy_scene, 8)

    summary = summarize(records)

    values = c_norm_matrix(records)
    np.testing.assert_allclose(summary.mean, values.mean(axis=0))
    np.testing.assert_allclose(summary.std, values.std(axis=0, ddof=1))
    assert summary.trials == 8
    assert np.isfinite(summary.max_mean_error)
    assert summary.max_std_error >= 0.0


def test_summarize_needs_two_trials(small_plan: SweepPlan, noisy_scene: Scene):
    """Test a single trial has no sample deviation."""
    records = MonteCarloRunner(1).run(small_plan, noisy_scene, 1)

    with pytest.raises(PreconditionError):
        summarize(records)


def test_summarize_noiseless_empty_scene(small_plan: SweepPlan):
    """Test a zero closed-form deviation leaves the error scores unset."""
    records = MonteCarloRunner(1).run(small_plan, Scene(), 3)

    summary = summarize(records)

    assert np.all(summary.theory_std == 0.0)
    assert summary.max_mean_error is None
    assert summary.max_std_error is None
