"""Unit tests for the channel model."""

import numpy as np
import pytest
from scipy.constants import c as SPEED_OF_LIGHT

from cohradar.core.errors import DomainError, PreconditionError
from cohradar.models import Scene, SweepPlan, Target
from cohradar.services.scene import (
    echo_delay,
    noise_std_from_snr,
    received_sample,
    required_phantom_depth,
)
from cohradar.services.waveform import make_phase_schedule, sample_signal, time_grid


def test_noise_std_from_snr():
    """Test σ = A/√(2·SNR) at 30 dB."""
    assert noise_std_from_snr(0.5, 1000.0) == pytest.approx(0.01118, rel=1e-3)
    assert noise_std_from_snr(1.0, float("inf")) == 0.0


def test_noise_std_rejects_non_positive_snr():
    """Test SNR must be positive."""
    with pytest.raises(PreconditionError):
        noise_std_from_snr(1.0, 0.0)


def test_echo_delay_law():
    """Test τ(t) = τ + 2vt/c."""
    target = Target(roundtrip_length=30.0, radial_velocity=10.0)

    delay = echo_delay(target, np.array([0.0, 1e-3]))

    assert delay[0] == pytest.approx(30.0 / SPEED_OF_LIGHT)
    assert delay[1] - delay[0] == pytest.approx(2.0 * 10.0 * 1e-3 / SPEED_OF_LIGHT)


def test_zero_delay_echo_is_scaled_signal(small_plan: SweepPlan):
    """Test a zero-length noiseless target returns A·S(t)."""
    scene = Scene(targets=[Target(roundtrip_length=0.0, attenuation=0.7)])
    schedule = make_phase_schedule(small_plan, 2)
    t = time_grid(schedule, 1e10)[::97]

    received = received_sample(scene, schedule, small_plan.carrier_hz, t)

    np.testing.assert_allclose(
        received, 0.7 * sample_signal(schedule, small_plan.carrier_hz, t), atol=1e-12
    )


def test_early_echo_uses_phantom_phase(small_plan: SweepPlan):
    """Test an echo emitted before the window carries φ_{-1,m}."""
    target = Target(roundtrip_length=10.0)
    scene = Scene(targets=[target])
    schedule = make_phase_schedule(small_plan, 0, phantom_depth=1)
    t = schedule.start_time + 0.5 * target.delay

    value = received_sample(scene, schedule, small_plan.carrier_hz, t)

    expected = np.cos(small_plan.omega * (t - target.delay) + schedule.phantoms[0])
    assert value == pytest.approx(expected, abs=1e-9)


def test_superposition(small_plan: SweepPlan):
    """Test the echo of two targets is the sum of the single echoes."""
    a = Target(roundtrip_length=23.0, attenuation=0.4)
    b = Target(roundtrip_length=25.0, attenuation=0.6)
    schedule = make_phase_schedule(small_plan, 5, phantom_depth=3)
    t = time_grid(schedule, 1e10)[::53]
    f = small_plan.carrier_hz

    both = received_sample(Scene(targets=[a, b]), schedule, f, t)
    single = received_sample(Scene(targets=[a]), schedule, f, t) + received_sample(
        Scene(targets=[b]), schedule, f, t
    )

    np.testing.assert_allclose(both, single, atol=1e-12)


def test_noise_is_reproducible(small_plan: SweepPlan, noisy_scene: Scene):
    """Test repeated calls on the same grid give the same noise."""
    schedule = make_phase_schedule(small_plan, 1, phantom_depth=3)
    t = time_grid(schedule, 1e10)[:500]

    first = received_sample(noisy_scene, schedule, small_plan.carrier_hz, t)
    second = received_sample(noisy_scene, schedule, small_plan.carrier_hz, t)

    np.testing.assert_array_equal(first, second)


def test_noise_depends_on_the_instant(small_plan: SweepPlan):
    """Test scalar calls at distinct instants draw distinct noise."""
    scene = Scene(snr=2.0, noise_seed=11)
    schedule = make_phase_schedule(small_plan, 4)
    grid = time_grid(schedule, 1e10)
    instants = grid[[0, 3, 40, 977]]

    values = [
        received_sample(scene, schedule, small_plan.carrier_hz, float(t))
        for t in instants
    ]

    assert len(set(values)) == len(values)
    np.testing.assert_array_equal(
        values, received_sample(scene, schedule, small_plan.carrier_hz, instants)
    )


def test_sub_grid_sees_the_same_noise(small_plan: SweepPlan):
    """Test a sub-grid gets the noise of the same instants on the full grid."""
    scene = Scene(snr=2.0, noise_seed=11)
    schedule = make_phase_schedule(small_plan, 4)
    grid = time_grid(schedule, 1e10)[:2000]
    f = small_plan.carrier_hz

    full = received_sample(scene, schedule, f, grid)
    part = received_sample(scene, schedule, f, grid[1500:])

    np.testing.assert_array_equal(part, full[1500:])


def test_noise_samples_are_white(small_plan: SweepPlan):
    """Test per-sample noise has σ = 1/√(2·SNR) and no lag-one correlation."""
    scene = Scene(snr=2.0, noise_seed=5)
    schedule = make_phase_schedule(small_plan, 9)
    grid = time_grid(schedule, 2e10)[:40_000]

    noise = received_sample(scene, schedule, small_plan.carrier_hz, grid, fs=2e10)

    assert noise.std() == pytest.approx(0.5, rel=0.02)
    assert abs(np.corrcoef(noise[:-1], noise[1:])[0, 1]) < 4.0 / np.sqrt(noise.size)


def test_received_outside_window(small_plan: SweepPlan, noisy_scene: Scene):
    """Test the receiver rejects instants outside the window."""
    schedule = make_phase_schedule(small_plan, 0, phantom_depth=3)

    with pytest.raises(DomainError):
        received_sample(noisy_scene, schedule, small_plan.carrier_hz, schedule.end_time)


def test_required_phantom_depth(small_plan: SweepPlan):
    """Test delays beyond one pulse need several phantom phases."""
    scene = Scene(targets=[Target(roundtrip_length=25.0)])

    assert required_phantom_depth(small_plan, scene, 0) == 3
    assert required_phantom_depth(small_plan, Scene(), 0) == 1
