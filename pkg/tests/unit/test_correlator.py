"""Unit tests for the cross-correlation receiver."""

import numpy as np
import pytest
from scipy.constants import c as SPEED_OF_LIGHT

from cohradar.core.errors import PreconditionError
from cohradar.models import PhaseSchedule, Scene, SweepPlan, Target
from cohradar.services.analytic import sst_mean, sst_std
from cohradar.services.correlator import (
    correlate_point_sampled,
    correlate_point_semianalytic,
    integrated_noise_std,
    run_sweep,
)
from cohradar.services.waveform import coherence_time, start_time


def _single_point_plan(l_m: float, num_jumps: int, seed: int = 0) -> SweepPlan:
    return SweepPlan(
        tau0=l_m / SPEED_OF_LIGHT,
        delta_tau=1.0 / SPEED_OF_LIGHT,
        num_points=2,
        num_jumps=num_jumps,
        carrier_hz=2.4e9,
        seed=seed,
    )


def test_integrated_noise_std():
    """Test the C_m noise level adds per-target terms in quadrature."""
    empty = Scene(snr=100.0)
    pair = Scene(
        targets=[
            Target(roundtrip_length=1.0, attenuation=0.5),
            Target(roundtrip_length=2.0, attenuation=0.5),
        ],
        snr=100.0,
    )

    assert integrated_noise_std(empty) == pytest.approx(0.05)
    assert integrated_noise_std(pair) == pytest.approx(np.sqrt(2 * 0.0625 / 100.0))
    assert integrated_noise_std(Scene()) == 0.0


def test_coherent_phases_give_full_correlation(small_plan: SweepPlan):
    """Test equal phases everywhere leave (A/2)cos(ωτ)."""
    target = Target(roundtrip_length=25.0, attenuation=0.8)
    m = 3
    schedule = PhaseSchedule(
        phases=np.full(small_plan.num_jumps, 1.0),
        pulse_duration=coherence_time(small_plan, m),
        start_time=start_time(small_plan, m),
        index=m,
        phantoms=np.full(3, 1.0),
    )

    c_m, _ = correlate_point_semianalytic(
        small_plan, Scene(targets=[target]), m, schedule=schedule
    )

    assert c_m == pytest.approx(0.4 * np.cos(small_plan.omega * target.delay), abs=1e-3)


def test_empty_noiseless_scene_is_zero(small_plan: SweepPlan):
    """Test no targets and no noise give C_m = 0."""
    c_m, slow_time = correlate_point_semianalytic(small_plan, Scene(), 0)

    assert c_m == 0.0
    assert np.all(slow_time == 0)


def test_dc_bias_is_added(small_plan: SweepPlan, single_target_scene: Scene):
    """Test the bias shifts C_m by a constant."""
    biased = single_target_scene.model_copy(update={"dc_bias": 0.25})

    plain, _ = correlate_point_semianalytic(small_plan, single_target_scene, 4)
    shifted, _ = correlate_point_semianalytic(small_plan, biased, 4)

    assert shifted - plain == pytest.approx(0.25)


def test_slow_time_averages_to_output(small_plan: SweepPlan, noisy_scene: Scene):
    """Test the real slow time averages to C_m with noise included."""
    c_m, slow_time = correlate_point_semianalytic(small_plan, noisy_scene, 10)

    assert slow_time.shape == (small_plan.num_jumps,)
    assert np.mean(slow_time.real) == pytest.approx(c_m, abs=1e-12)


def test_unknown_motion_model(small_plan: SweepPlan, single_target_scene: Scene):
    """Test motion models are validated."""
    with pytest.raises(PreconditionError):
        correlate_point_semianalytic(
            small_plan, single_target_scene, 0, motion="drifting"  # type: ignore
        )


def test_stationary_mean_matches_closed_form():
    """Test C̃ averaged over seeds approaches (A/2)(l_m − l)cos(kl)."""
    l, l_m, trials = 25.0, 26.0, 500
    scene = Scene(targets=[Target(roundtrip_length=l)])
    values = [
        l_m
        * correlate_point_semianalytic(_single_point_plan(l_m, 200, seed), scene, 0)[0]
        for seed in range(trials)
    ]
    plan = _single_point_plan(l_m, 200)
    expected = sst_mean(l_m, l, 1.0, plan.wavenumber)
    sigma = l_m * sst_std(l_m, l, 1.0, plan.num_jumps)

    assert abs(np.mean(values) - expected) < 4 * sigma / np.sqrt(trials)


@pytest.mark.slow
def test_stationary_deviation_matches_closed_form():
    """Test the std of C over 10⁴ seeds matches sst_std within 5%."""
    l, l_m, trials = 25.0, 25.0 / 0.9, 10_000
    scene = Scene(targets=[Target(roundtrip_length=l)])
    plan = _single_point_plan(l_m, 1000)
    values = [
        correlate_point_semianalytic(plan.with_seed(seed), scene, 0)[0]
        for seed in range(trials)
    ]

    expected = sst_std(l_m, l, 1.0, plan.num_jumps)

    assert np.std(values, ddof=1) == pytest.approx(expected, rel=0.05)


def test_double_frequency_terms_are_small(
    small_plan: SweepPlan, single_target_scene: Scene
):
    """Test dropping the 2ω terms changes C by at most 10/(ω·τ₀) relative."""
    with_terms = run_sweep(small_plan, single_target_scene).c_raw
    without = run_sweep(
        small_plan, single_target_scene, include_double_frequency=False
    ).c_raw

    bound = 10.0 / (small_plan.omega * small_plan.tau0)
    assert np.max(np.abs(with_terms - without)) <= bound * np.max(np.abs(without))
    assert not np.array_equal(with_terms, without)


def test_frozen_and_continuous_agree_when_still(
    small_plan: SweepPlan, single_target_scene: Scene
):
    """Test both motion models reduce to the stationary receiver at v = 0."""
    frozen = run_sweep(small_plan, single_target_scene, motion="frozen")
    continuous = run_sweep(small_plan, single_target_scene, motion="continuous")

    np.testing.assert_allclose(frozen.c_raw, continuous.c_raw, atol=1e-12)


def test_closed_gate_is_uncorrelated():
    """Test a receding target outside the moving gate has no coherent part."""
    plan = SweepPlan(
        tau0=28.0 / SPEED_OF_LIGHT,
        delta_tau=5.0 / SPEED_OF_LIGHT,
        num_points=100,
        num_jumps=1000,
        carrier_hz=2.4e9,
    )
    target = Target(roundtrip_length=30.0, radial_velocity=400.0)
    m = 50
    l_m = SPEED_OF_LIGHT * coherence_time(plan, m)
    assert l_m > 30.0
    assert l_m < 30.0 + 2 * m * plan.num_jumps * 400.0 / SPEED_OF_LIGHT * l_m

    values = [
        correlate_point_semianalytic(plan.with_seed(s), Scene(targets=[target]), m)[0]
        for s in range(200)
    ]

    sigma = 0.5 / np.sqrt(2 * plan.num_jumps)
    assert abs(np.mean(values)) < 4 * sigma / np.sqrt(200)


def test_run_sweep_record(small_plan: SweepPlan, noisy_scene: Scene):
    """Test a sweep fills every point and normalizes exactly."""
    record = run_sweep(small_plan, noisy_scene, keep_slow_time=True)

    assert record.num_points == small_plan.num_points
    np.testing.assert_array_equal(record.c_norm, record.l_m * record.c_raw)
    np.testing.assert_allclose(record.l_m[[0, -1]], [22.0, 27.0])
    assert record.slow_time is not None
    assert record.slow_time.shape == (small_plan.num_points, small_plan.num_jumps)


def test_run_sweep_is_deterministic(small_plan: SweepPlan, noisy_scene: Scene):
    """Test identical seeds give identical sweeps, slow time kept or not."""
    first = run_sweep(small_plan, noisy_scene)
    second = run_sweep(small_plan, noisy_scene, keep_slow_time=True)

    np.testing.assert_array_equal(first.c_norm, second.c_norm)


def test_flat_sweep_shares_coherence_length(single_target_scene: Scene):
    """Test Δτ = 0 repeats one coherence length."""
    plan = SweepPlan(
        tau0=26.0 / SPEED_OF_LIGHT,
        delta_tau=0.0,
        num_points=5,
        num_jumps=100,
        carrier_hz=2.4e9,
    )

    record = run_sweep(plan, single_target_scene)

    np.testing.assert_allclose(record.l_m, 26.0)
    assert len(set(record.c_raw.tolist())) == 5


def test_run_sweep_mode_checks(small_plan: SweepPlan, single_target_scene: Scene):
    """Test unknown modes and a missing rate are rejected."""
    with pytest.raises(PreconditionError):
        run_sweep(small_plan, single_target_scene, "fancy")  # type: ignore[arg-type]
    with pytest.raises(PreconditionError):
        run_sweep(small_plan, single_target_scene, "sampled")


def test_sampled_rate_too_low(small_plan: SweepPlan, single_target_scene: Scene):
    """Test the sampled receiver needs fs ≥ 8·carrier."""
    with pytest.raises(PreconditionError):
        correlate_point_sampled(small_plan, single_target_scene, 0, fs=1e10)


@pytest.mark.slow
def test_sampled_matches_semianalytic():
    """Test the quadrature receiver agrees with the closed form."""
    plan = SweepPlan(
        tau0=22.0 / SPEED_OF_LIGHT,
        delta_tau=5.0 / SPEED_OF_LIGHT,
        num_points=10,
        num_jumps=100,
        carrier_hz=2.4e9,
        seed=4,
    )
    scene = Scene(targets=[Target(roundtrip_length=25.0)])

    exact = run_sweep(plan, scene).c_raw
    sampled = run_sweep(plan, scene, "sampled", fs=8 * plan.carrier_hz).c_raw

    relative_rms = np.sqrt(np.mean((exact - sampled) ** 2) / np.mean(exact**2))
    assert relative_rms <= 2e-2
