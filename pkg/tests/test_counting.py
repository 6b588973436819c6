"""Attenuation, 3-arm probabilities, Poisson bound, Monte Carlo, demodulation."""

import io
import math

import numpy as np
import pytest

from gravmzi.counting import (
    AttenuationModel,
    CountRecords,
    DetectorParams,
    SourceParams,
    SwitchSchedule,
    SwitchState,
    arm_pair_probabilities,
    attenuation_factor,
    demodulate,
    integration_time,
    integration_time_table,
    max_finite_time,
    simulate_counts,
)
from gravmzi.errors import ConfigurationError, InsufficientDataError, NoSignalError

PHASE12 = 6.495339073438411e-05   # 100 km x 1 m vertical arm pair
PHASE13 = 2.0 * PHASE12
ATTENUATION_REFERENCE = 0.017782794100389228  # 10^(-1.75), 17.5 dB total

SOURCE = SourceParams(rate=1e6)
DETECTOR = DetectorParams(efficiency=0.9, dark_rate=1.0)
ATTN = AttenuationModel(fiber_db_per_km=0.17, component_losses_db=0.5, arm_length=1e5)
SWITCH = SwitchSchedule(modulation_frequency=0.5)


# ------------------------------------------------------------ attenuation


def test_attenuation_lossless():
    assert attenuation_factor(AttenuationModel(0.0, 0.0, 1e5)) == 1.0


def test_attenuation_reference_and_decibel_identity():
    assert attenuation_factor(ATTN) == pytest.approx(ATTENUATION_REFERENCE, rel=1e-14)
    ten_db = AttenuationModel(fiber_db_per_km=0.1, component_losses_db=0.0, arm_length=1e5)
    assert attenuation_factor(ten_db) == pytest.approx(0.1, rel=1e-14)


# ------------------------------------------------------------ probabilities


def test_calibration_baselines_exact():
    assert arm_pair_probabilities(SwitchState.ARM2_OPEN, 0.0, 0.0, 0.0) == (0.5, 0.25, 0.25)
    assert arm_pair_probabilities(SwitchState.ARM3_OPEN, 0.0, 0.0, 0.0) == (0.25, 0.375, 0.375)


def test_probabilities_shift_with_phase():
    theta = math.pi / 2
    v = 0.9
    p1, p2, p3 = arm_pair_probabilities(SwitchState.ARM2_OPEN, theta, PHASE12, PHASE13, v)
    assert p1 == pytest.approx(0.5 * (1 - v * math.sin(PHASE12)), rel=1e-12)
    assert p2 == pytest.approx(0.25 * (1 + v * math.sin(PHASE12)), rel=1e-12)
    assert p2 == p3
    q1, q2, q3 = arm_pair_probabilities(SwitchState.ARM3_OPEN, theta, PHASE12, PHASE13, v)
    assert q1 == 0.25
    cross = math.sqrt(2.0) / 4.0 * v * math.sin(PHASE13)
    assert q2 == pytest.approx(0.375 - cross, rel=1e-12)
    assert q3 == pytest.approx(0.375 + cross, rel=1e-12)


def test_probability_bookkeeping():
    rng = np.random.default_rng(6)
    for _ in range(300):
        theta = rng.uniform(1e-6, math.pi / 2)
        p12 = rng.uniform(-0.5, 0.5)
        p13 = rng.uniform(-0.5, 0.5)
        v = rng.uniform(0.0, 1.0)
        for state in SwitchState:
            probs = arm_pair_probabilities(state, theta, p12, p13, v)
            assert all(p >= 0.0 for p in probs)
            assert sum(probs) <= 1.0 + 1e-12


def test_calibration_with_nonzero_phase_rejected():
    with pytest.raises(ConfigurationError):
        arm_pair_probabilities(SwitchState.ARM2_OPEN, 0.0, 1e-5, 0.0)


# ------------------------------------------------------------ integration time


def test_integration_time_reference_parameters():
    """1e6/s source, eta 0.9, 1 Hz dark rate, 17.5 dB loss, base-1/4 channel
    at quadrature: the bound comes out just under 0.7 days."""
    p = 0.25 * (1.0 - math.sin(PHASE12))
    t = integration_time(p, 0.25, SOURCE, DETECTOR, ATTENUATION_REFERENCE)
    assert t == pytest.approx(59250.791274819996, rel=1e-9)
    assert 0.5 <= t / 86400.0 <= 8.0


def test_integration_time_diverges_without_signal():
    with pytest.raises(NoSignalError):
        integration_time(0.25, 0.25, SOURCE, DETECTOR, 0.5)
    # vanishing signal: time grows without bound
    t_small = integration_time(0.25 * (1 - 1e-12), 0.25, SOURCE, DETECTOR, 0.5)
    assert t_small > 1e15


def test_integration_time_rate_rescaling_invariance():
    rng = np.random.default_rng(12)
    for _ in range(50):
        nbar = 10 ** rng.uniform(3, 8)
        dark = 10 ** rng.uniform(-1, 2)
        k = 10 ** rng.uniform(-2, 2)
        p, a_cal = 0.2499, 0.25
        t1 = integration_time(p, a_cal, SourceParams(rate=nbar),
                              DetectorParams(efficiency=0.9, dark_rate=dark), 0.02)
        t2 = integration_time(p, a_cal, SourceParams(rate=k * nbar),
                              DetectorParams(efficiency=0.9, dark_rate=k * dark), 0.02)
        assert t2 == pytest.approx(t1 / k, rel=1e-12)


def test_integration_time_table_channels():
    table = integration_time_table(PHASE12, PHASE13, SOURCE, DETECTOR, ATTENUATION_REFERENCE)
    assert len(table) == 6
    flat = {(row.detector, row.switch_state): row for row in table}
    assert math.isinf(flat[("D1", SwitchState.ARM3_OPEN)].time)  # no interference there
    t_req = max_finite_time(table)
    # binding channel is the base-1/4 pair (the conservative bound)
    assert 0.5 <= t_req / 86400.0 <= 8.0
    d2a2 = flat[("D2", SwitchState.ARM2_OPEN)]
    assert t_req == d2a2.time or t_req == flat[("D3", SwitchState.ARM2_OPEN)].time


# ------------------------------------------------------------ simulation


def test_simulation_deterministic():
    kw = dict(phase12=PHASE12, phase13=PHASE13, duration=400.0, bin_width=1.0, seed=77)
    a = simulate_counts(SOURCE, DETECTOR, ATTN, SWITCH, **kw)
    b = simulate_counts(SOURCE, DETECTOR, ATTN, SWITCH, **kw)
    assert np.array_equal(a.counts, b.counts)
    assert np.array_equal(a.exposures, b.exposures)
    c = simulate_counts(SOURCE, DETECTOR, ATTN, SWITCH, **{**kw, "seed": 78})
    assert not np.array_equal(a.counts, c.counts)


def test_simulation_zero_source():
    quiet = simulate_counts(
        SourceParams(rate=0.0), DetectorParams(efficiency=0.9, dark_rate=0.0),
        ATTN, SWITCH, PHASE12, PHASE13, duration=100.0, bin_width=1.0, seed=0,
    )
    assert quiet.counts.sum() == 0


def test_simulation_dark_counts_only():
    opaque = AttenuationModel(fiber_db_per_km=10.0, component_losses_db=1000.0, arm_length=1e5)
    dark = simulate_counts(
        SOURCE, DetectorParams(efficiency=0.9, dark_rate=5.0),
        opaque, SWITCH, PHASE12, PHASE13, duration=400.0, bin_width=1.0, seed=3,
    )
    for detector in range(3):
        total = dark.counts[:, :, detector].sum()
        mean = 5.0 * dark.duration
        assert abs(total - mean) <= 4.0 * math.sqrt(mean)


def test_simulation_means_match_probabilities():
    """Long-run per-state rates agree with arm_pair_probabilities to 3 sigma,
    pinning the vectorized sampler to the scalar reference."""
    theta = math.pi / 2
    v = 0.8
    run = simulate_counts(SOURCE, DETECTOR, ATTN, SWITCH, PHASE12, PHASE13,
                          duration=2000.0, bin_width=1.0, seed=11, theta=theta, visibility=v)
    rate0 = SOURCE.rate * attenuation_factor(ATTN) * DETECTOR.efficiency
    for arm2, state in ((True, SwitchState.ARM2_OPEN), (False, SwitchState.ARM3_OPEN)):
        exposure = run.state_exposure(arm2)
        probs = arm_pair_probabilities(state, theta, PHASE12, PHASE13, v)
        for det, p in enumerate(probs):
            mean = (rate0 * p + DETECTOR.dark_rate) * exposure
            observed = run.state_totals(arm2)[det]
            assert abs(observed - mean) <= 3.5 * math.sqrt(mean)


def test_simulation_split_bins_cover_both_states():
    # bins wider than the switch period carry exact per-state exposures
    run = simulate_counts(SOURCE, DETECTOR, ATTN, SWITCH, PHASE12, PHASE13,
                          duration=100.0, bin_width=10.0, seed=5)
    assert run.n_bins == 10
    assert np.allclose(run.exposures, 5.0)
    assert run.state_exposure(True) == pytest.approx(50.0)


def test_records_iteration_and_csv():
    run = simulate_counts(SOURCE, DETECTOR, ATTN, SWITCH, PHASE12, PHASE13,
                          duration=4.0, bin_width=1.0, seed=2)
    rows = list(run)
    assert len(rows) == len(run) == 4 * 3  # pure bins: one state each
    buffer = io.StringIO()
    run.to_csv(buffer)
    lines = buffer.getvalue().splitlines()
    assert lines[0] == "bin_index,detector,switch_state,counts"
    assert len(lines) == 1 + len(rows)
    first = lines[1].split(",")
    assert first[0] == "0" and first[1] == "D1" and first[2] in ("arm2_open", "arm3_open")


def test_count_records_validation():
    with pytest.raises(ConfigurationError):
        CountRecords(np.arange(2), np.ones((2, 2)), -np.ones((2, 2, 3)), 1.0)


# ------------------------------------------------------------ demodulation


def analytic_records(duration, phase12, phase13, visibility=1.0, dark=1.0,
                     rate0=None, bin_width=1.0):
    """Expectation-valued records: the noiseless demodulation input."""
    if rate0 is None:
        rate0 = SOURCE.rate * attenuation_factor(ATTN) * DETECTOR.efficiency
    n_bins = int(duration / bin_width)
    exposures = np.empty((n_bins, 2))
    exposures[:, 0] = np.where(np.arange(n_bins) % 2 == 0, bin_width, 0.0)
    exposures[:, 1] = bin_width - exposures[:, 0]
    counts = np.empty((n_bins, 2, 3))
    p2 = arm_pair_probabilities(SwitchState.ARM2_OPEN, math.pi / 2, phase12, phase13, visibility)
    p3 = arm_pair_probabilities(SwitchState.ARM3_OPEN, math.pi / 2, phase12, phase13, visibility)
    for s, probs in enumerate((p2, p3)):
        for d in range(3):
            counts[:, s, d] = (rate0 * probs[d] + dark) * exposures[:, s]
    return CountRecords(np.arange(n_bins), exposures, counts, bin_width)


def test_demodulate_unbiased_on_analytic_means():
    records = analytic_records(4000.0, PHASE12, PHASE13)
    estimate = demodulate(records, SWITCH, visibility=1.0, dark_rate=1.0)
    assert estimate.sigma > 0
    assert abs(estimate.phase - PHASE12) <= estimate.sigma / 10.0


def test_demodulate_null_scenario():
    run = simulate_counts(SOURCE, DETECTOR, ATTN, SWITCH, 0.0, 0.0,
                          duration=20000.0, bin_width=1.0, seed=19)
    estimate = demodulate(run, SWITCH, dark_rate=DETECTOR.dark_rate)
    assert abs(estimate.phase) <= 3.0 * estimate.sigma


def test_demodulate_requires_enough_periods():
    run = simulate_counts(SOURCE, DETECTOR, ATTN, SWITCH, PHASE12, PHASE13,
                          duration=40.0, bin_width=1.0, seed=1)
    with pytest.raises(InsufficientDataError):
        demodulate(run, SWITCH, dark_rate=DETECTOR.dark_rate)


def test_demodulate_requires_both_states():
    # records stuck in the arm-2 state carry no demodulation information
    exposures = np.column_stack([np.ones(300), np.zeros(300)])
    counts = np.zeros((300, 2, 3))
    counts[:, 0, :] = 100.0
    stuck = CountRecords(np.arange(300), exposures, counts, 1.0)
    with pytest.raises(InsufficientDataError):
        demodulate(stuck, SWITCH, min_periods=0)


def test_demodulate_moderate_phase_inversion():
    # the asin inversion must hold away from the small-angle regime
    phase12 = 0.2
    records = analytic_records(4000.0, phase12, 2 * phase12)
    estimate = demodulate(records, SWITCH, visibility=1.0, dark_rate=1.0)
    assert estimate.phase == pytest.approx(phase12, rel=1e-6)


def test_simulation_with_residual_noise_runs_deterministically():
    kw = dict(phase12=PHASE12, phase13=PHASE13, duration=300.0, bin_width=1.0,
              seed=41, residual_noise_rms=0.01)
    a = simulate_counts(SOURCE, DETECTOR, ATTN, SWITCH, **kw)
    b = simulate_counts(SOURCE, DETECTOR, ATTN, SWITCH, **kw)
    assert np.array_equal(a.counts, b.counts)
    assert a.counts.sum() > 0


def test_demodulate_sigma_scales_as_inverse_root_duration():
    durations = [2000.0, 20000.0, 200000.0]
    sigmas = []
    for duration in durations:
        run = simulate_counts(SOURCE, DETECTOR, ATTN, SWITCH, PHASE12, PHASE13,
                              duration=duration, bin_width=duration / 2000.0, seed=23)
        sigmas.append(demodulate(run, SWITCH, dark_rate=DETECTOR.dark_rate).sigma)
    slope = np.polyfit(np.log10(durations), np.log10(sigmas), 1)[0]
    assert slope == pytest.approx(-0.5, abs=0.05)


def test_parameter_validation():
    with pytest.raises(ConfigurationError):
        SourceParams(rate=-1.0)
    with pytest.raises(ConfigurationError):
        DetectorParams(efficiency=0.0)
    with pytest.raises(ConfigurationError):
        SwitchSchedule(modulation_frequency=0.0)
    with pytest.raises(ConfigurationError):
        SwitchSchedule(modulation_frequency=1.0, duty=1.0)
