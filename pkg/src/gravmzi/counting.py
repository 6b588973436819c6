"""Photon counting for the 3-arm interferometer: attenuation, per-detector
probabilities under optical-switch modulation, the Poisson-limited integration
time, and a seeded Monte Carlo counting simulator with demodulation.

Topology and baselines
----------------------
D1 sits on one output of the splitter merging arms 1 and 2; the other output
feeds the splitter of arm 3, whose two outputs are D2 and D3.  The optical
switch opens either arm 2 or arm 3, so each switch state realizes a two-arm
interferometer held at quadrature:

* arm 2 open:  D1 = 1/2 (1 - V sin phi12),  D2 = D3 = 1/4 (1 + V sin phi12)
* arm 3 open:  D1 = 1/4 (splitter only, no interference),
               D2/D3 = 3/8 -+ (sqrt(2)/4) V sin phi13

The arm-3 cross amplitude sqrt(2)/4 is the geometric mean of the interfering
intensities 1/4 and 1/2; with it the three probabilities sum to one exactly
in both states.  At the horizontal calibration (phases zero) the baselines
are (1/2, 1/4, 1/4) and (1/4, 3/8, 3/8).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, InsufficientDataError, NoSignalError

__all__ = [
    "SourceParams",
    "DetectorParams",
    "AttenuationModel",
    "SwitchSchedule",
    "SwitchState",
    "CountRecord",
    "CountRecords",
    "PhaseEstimate",
    "ChannelTime",
    "DETECTORS",
    "attenuation_factor",
    "arm_pair_probabilities",
    "integration_time",
    "integration_time_table",
    "max_finite_time",
    "simulate_counts",
    "demodulate",
]

DETECTORS = ("D1", "D2", "D3")
_RNG_CHUNK_BINS = 4096  # one counter-based stream per chunk of bins


class SwitchState(enum.Enum):
    ARM2_OPEN = "arm2_open"
    ARM3_OPEN = "arm3_open"


@dataclass(frozen=True, slots=True)
class SourceParams:
    """Single-photon source: mean rate and spectral bandwidth."""

    rate: float           # photons/s
    bandwidth: float = 1e11  # Hz

    def __post_init__(self):
        if self.rate < 0:
            raise ConfigurationError("rate must be >= 0", field="source.rate")
        if self.bandwidth < 0:
            raise ConfigurationError("bandwidth must be >= 0", field="source.bandwidth")


@dataclass(frozen=True, slots=True)
class DetectorParams:
    efficiency: float     # quantum efficiency, (0, 1]
    dark_rate: float = 0.0  # counts/s

    def __post_init__(self):
        if not 0.0 < self.efficiency <= 1.0:
            raise ConfigurationError("efficiency must be in (0, 1]", field="detectors.efficiency")
        if self.dark_rate < 0:
            raise ConfigurationError("dark_rate must be >= 0", field="detectors.dark_rate")


@dataclass(frozen=True, slots=True)
class AttenuationModel:
    """Fiber plus component losses along one arm pair."""

    fiber_db_per_km: float
    component_losses_db: float
    arm_length: float  # m

    def __post_init__(self):
        for name in ("fiber_db_per_km", "component_losses_db", "arm_length"):
            if getattr(self, name) < 0:
                raise ConfigurationError("must be >= 0", field=f"attenuation.{name}")

    @property
    def total_db(self) -> float:
        return self.fiber_db_per_km * self.arm_length / 1000.0 + self.component_losses_db


@dataclass(frozen=True, slots=True)
class SwitchSchedule:
    """Optical-switch modulation: arm 2 open for the ``duty`` fraction of each period."""

    modulation_frequency: float  # Hz
    duty: float = 0.5
    phase: float = 0.0  # rad

    def __post_init__(self):
        if not self.modulation_frequency > 0:
            raise ConfigurationError("modulation_frequency must be > 0", field="switch.modulation_frequency")
        if not 0.0 < self.duty < 1.0:
            raise ConfigurationError("duty must be in (0, 1)", field="switch.duty")

    def state_at(self, t):
        """Switch state at time t (vectorized): True where arm 2 is open."""
        cycle = (np.asarray(t, dtype=float) * self.modulation_frequency + self.phase / (2.0 * math.pi)) % 1.0
        return cycle < self.duty

    def arm2_exposure(self, t):
        """Accumulated arm-2-open time in [0, t] (vectorized, exact).

        Lets count bins span any number of switch periods: a bin's live time
        per state is the difference of this function at its edges.
        """
        x = np.asarray(t, dtype=float) * self.modulation_frequency + self.phase / (2.0 * math.pi)
        x0 = self.phase / (2.0 * math.pi)
        period = 1.0 / self.modulation_frequency

        def accum(y):
            full, frac = np.divmod(y, 1.0)
            return (full * self.duty + np.minimum(frac, self.duty)) * period

        return accum(x) - accum(x0)


def attenuation_factor(model: AttenuationModel) -> float:
    """Power transmission a = 10^(-total_dB / 10), in (0, 1]."""
    return 10.0 ** (-model.total_db / 10.0)


def arm_pair_probabilities(
    switch_state: SwitchState,
    theta: float,
    phase12: float,
    phase13: float,
    visibility: float = 1.0,
    quadrature_offset: float = math.pi / 2,
) -> tuple[float, float, float]:
    """Detection probabilities (p_D1, p_D2, p_D3) for one switch state.

    ``phase12``/``phase13`` are the gravitational phases of the arm-1/2 and
    arm-1/3 pairs at inclination ``theta``; the interferometer is held at the
    quadrature point (offset pi/2), where cos(phase + offset) = -sin(phase).
    At theta = 0 both phases must vanish and the calibration baselines come
    out exact: the quadrature cosine is evaluated through the sine identity
    so no pi/2 rounding leaks into them.
    """
    if not 0.0 <= visibility <= 1.0:
        raise ConfigurationError("visibility must be in [0, 1]", field="visibility")
    if not 0.0 <= theta <= math.pi / 2:
        raise ConfigurationError("theta must be in [0, pi/2]", field="theta")
    if theta == 0.0 and (phase12 != 0.0 or phase13 != 0.0):
        raise ConfigurationError("horizontal calibration requires zero phases", field="theta")
    detuning = quadrature_offset - math.pi / 2
    s12 = -visibility * math.sin(phase12 + detuning)
    s13 = -visibility * math.sin(phase13 + detuning)
    if switch_state is SwitchState.ARM2_OPEN:
        p1 = 0.5 * (1.0 + s12)
        p2 = p3 = 0.25 * (1.0 - s12)
    else:
        p1 = 0.25
        cross = (math.sqrt(2.0) / 4.0) * s13
        p2 = 3.0 / 8.0 + cross
        p3 = 3.0 / 8.0 - cross
    return p1, p2, p3


def integration_time(
    probability: float,
    calibration_probability: float,
    source: SourceParams,
    detector: DetectorParams,
    attenuation: float,
) -> float:
    """Poisson-limited integration time, seconds.

    t = (Nbar a eta P + n_d) / (Nbar a eta (A - P))^2: the time after which
    the count difference from the gravitational shift exceeds the shot noise
    sqrt(n) of the detector in question.
    """
    if not 0.0 < attenuation <= 1.0:
        raise ConfigurationError("attenuation factor must be in (0, 1]", field="attenuation")
    rate = source.rate * attenuation * detector.efficiency
    signal = rate * (calibration_probability - probability)
    if signal == 0.0:
        raise NoSignalError("P equals the calibration probability; no signal at this angle")
    return (rate * probability + detector.dark_rate) / signal**2


@dataclass(frozen=True, slots=True)
class ChannelTime:
    """Integration-time entry for one (detector, switch state) channel."""

    detector: str
    switch_state: SwitchState
    calibration_probability: float
    probability: float
    time: float  # s; inf where the channel carries no signal


def integration_time_table(
    phase12: float,
    phase13: float,
    source: SourceParams,
    detector: DetectorParams,
    attenuation: float,
    visibility: float = 1.0,
    theta: float = math.pi / 2,
) -> list[ChannelTime]:
    """Per-detector, per-switch-state integration times.

    Channels without phase dependence (D1 with arm 3 open) come out infinite.
    The binding requirement is the largest finite entry; see
    ``max_finite_time``.
    """
    table = []
    for state in SwitchState:
        base = arm_pair_probabilities(state, 0.0, 0.0, 0.0, visibility)
        probs = arm_pair_probabilities(state, theta, phase12, phase13, visibility)
        for det, a_cal, p in zip(DETECTORS, base, probs):
            try:
                t = integration_time(p, a_cal, source, detector, attenuation)
            except NoSignalError:
                t = math.inf
            table.append(ChannelTime(det, state, a_cal, p, t))
    return table


def max_finite_time(table: list[ChannelTime]) -> float:
    """Largest finite channel time: the conservative integration requirement."""
    finite = [row.time for row in table if math.isfinite(row.time)]
    if not finite:
        raise NoSignalError("no channel carries a gravitational signal")
    return max(finite)


@dataclass(frozen=True, slots=True)
class CountRecord:
    bin_index: int
    detector: str
    switch_state: str
    counts: int

    def __post_init__(self):
        if self.counts < 0:
            raise ConfigurationError("counts must be >= 0", field="counts")


class CountRecords:
    """Columnar set of per-bin, per-switch-state, per-detector counts.

    ``counts`` has shape (n_bins, 2, 3): axis 1 is the switch state
    (arm 2 open, then arm 3 open), axis 2 the detector.  ``exposures``
    (n_bins, 2) holds the live seconds each bin spent in each state; bins
    narrower than the switch half-period are pure (one exposure is zero),
    wider bins carry both states, as time-tagged counts post-selected on the
    switch drive would.  Iteration yields one ``CountRecord`` per cell with
    nonzero exposure, ordered by (bin, state, detector).  Analysis code may
    build instances with float expectation-valued counts; the simulator
    always writes integers.
    """

    def __init__(self, bin_index: np.ndarray, exposures: np.ndarray, counts: np.ndarray, bin_width: float):
        self.bin_index = np.asarray(bin_index, dtype=np.int64)
        self.exposures = np.asarray(exposures, dtype=float)
        self.counts = np.asarray(counts)
        self.bin_width = float(bin_width)
        n = self.bin_index.size
        if self.exposures.shape != (n, 2):
            raise ConfigurationError("exposures must have shape (n_bins, 2)", field="exposures")
        if self.counts.shape != (n, 2, len(DETECTORS)):
            raise ConfigurationError("counts must have shape (n_bins, 2, 3)", field="counts")
        if np.any(self.counts < 0) or np.any(self.exposures < 0):
            raise ConfigurationError("counts and exposures must be >= 0", field="counts")
        if not self.bin_width > 0:
            raise ConfigurationError("bin_width must be > 0", field="bin_width")

    def __len__(self) -> int:
        return int(np.count_nonzero(self.exposures > 0)) * len(DETECTORS)

    def __iter__(self):
        states = (SwitchState.ARM2_OPEN.value, SwitchState.ARM3_OPEN.value)
        for i in range(self.bin_index.size):
            for s, state in enumerate(states):
                if self.exposures[i, s] <= 0:
                    continue
                for d, name in enumerate(DETECTORS):
                    yield CountRecord(int(self.bin_index[i]), name, state, int(self.counts[i, s, d]))

    @property
    def n_bins(self) -> int:
        return self.bin_index.size

    @property
    def duration(self) -> float:
        return self.n_bins * self.bin_width

    def state_exposure(self, arm2: bool) -> float:
        """Total live time spent in one switch state, seconds."""
        return float(self.exposures[:, 0 if arm2 else 1].sum())

    def state_totals(self, arm2: bool) -> np.ndarray:
        """Summed counts per detector for one switch state, shape (3,)."""
        return self.counts[:, 0 if arm2 else 1, :].sum(axis=0)

    def to_csv(self, path_or_stream) -> None:
        """Write rows as ``bin_index,detector,switch_state,counts``."""
        if hasattr(path_or_stream, "write"):
            self._write_csv(path_or_stream)
        else:
            with open(path_or_stream, "w", newline="") as fh:
                self._write_csv(fh)

    def _write_csv(self, fh) -> None:
        fh.write("bin_index,detector,switch_state,counts\n")
        for rec in self:
            fh.write(f"{rec.bin_index},{rec.detector},{rec.switch_state},{rec.counts}\n")


def simulate_counts(
    source: SourceParams,
    detector: DetectorParams,
    attenuation: AttenuationModel,
    switch: SwitchSchedule,
    phase12: float,
    phase13: float,
    duration: float,
    bin_width: float | None = None,
    seed: int = 0,
    theta: float = math.pi / 2,
    visibility: float = 1.0,
    residual_noise_rms: float = 0.0,
) -> CountRecords:
    """Poisson counting run over ``duration`` seconds.

    Counts per (bin, switch state, detector) cell are Poisson with mean
    (Nbar a eta p_det + n_d) * exposure, where p_det comes from
    ``arm_pair_probabilities`` for that state and the exposure is the exact
    live time the bin spent in the state.  ``bin_width`` defaults to the
    switch half-period (pure one-state bins); wider bins carry both states.

    Reproducibility: bins are partitioned into fixed chunks, each drawing
    from its own counter-based stream spawned from (seed, chunk index), so
    identical seeds give identical records regardless of how chunks are
    scheduled.  ``residual_noise_rms`` jitters the quadrature point per bin
    with Gaussian phase noise from the same stream family.
    """
    if not duration > 0:
        raise ConfigurationError("duration must be > 0", field="duration")
    if bin_width is None:
        bin_width = 0.5 / switch.modulation_frequency
    if not 0 < bin_width <= duration:
        raise ConfigurationError("bin_width must be in (0, duration]", field="bin_width")
    n_bins = int(duration / bin_width + 1e-9)
    if n_bins < 1:
        raise ConfigurationError("duration shorter than one bin", field="duration")

    a = attenuation_factor(attenuation)
    rate0 = source.rate * a * detector.efficiency
    bin_index = np.arange(n_bins, dtype=np.int64)
    edges = np.arange(n_bins + 1, dtype=float) * bin_width
    cumulative = switch.arm2_exposure(edges)
    exp2 = np.diff(cumulative)
    exposures = np.stack([exp2, bin_width - exp2], axis=1)
    exposures[exposures < 0] = 0.0  # guard float dust from the duty accumulation

    counts = np.empty((n_bins, 2, len(DETECTORS)), dtype=np.int64)
    root = np.random.SeedSequence(seed)
    n_chunks = (n_bins + _RNG_CHUNK_BINS - 1) // _RNG_CHUNK_BINS
    children = root.spawn(n_chunks)
    # phases are validated once through the scalar reference implementation
    arm_pair_probabilities(SwitchState.ARM2_OPEN, theta, phase12, phase13, visibility)
    for chunk, seq in enumerate(children):
        lo = chunk * _RNG_CHUNK_BINS
        hi = min(lo + _RNG_CHUNK_BINS, n_bins)
        rng = np.random.Generator(np.random.Philox(seq))
        offsets = (
            rng.normal(0.0, residual_noise_rms, hi - lo)
            if residual_noise_rms > 0
            else np.zeros(hi - lo)
        )
        # vectorized mirror of arm_pair_probabilities over the chunk
        s12 = -visibility * np.sin(phase12 + offsets)
        s13 = -visibility * np.sin(phase13 + offsets)
        cross = (math.sqrt(2.0) / 4.0) * s13
        ones = np.ones_like(s12)
        probs = np.stack(
            [
                np.stack([0.5 * (1.0 + s12), 0.25 * (1.0 - s12), 0.25 * (1.0 - s12)], axis=1),
                np.stack([0.25 * ones, 3.0 / 8.0 + cross, 3.0 / 8.0 - cross], axis=1),
            ],
            axis=1,
        )  # (chunk, 2 states, 3 detectors)
        means = (rate0 * probs + detector.dark_rate) * exposures[lo:hi, :, None]
        counts[lo:hi] = rng.poisson(means)
    return CountRecords(bin_index, exposures, counts, bin_width)


@dataclass(frozen=True, slots=True)
class PhaseEstimate:
    phase: float  # rad
    sigma: float  # rad, one standard error


def _channel_phase(u: float, var_u: float, visibility: float, phase_scale: float) -> tuple[float, float]:
    """Invert u = V sin(phase_scale * phase) to (phase, sigma)."""
    s = min(1.0, max(-1.0, u / visibility))
    phase = math.asin(s) / phase_scale
    slope = visibility * math.sqrt(max(1.0 - s * s, 1e-12))
    sigma = math.sqrt(max(var_u, 0.0)) / (slope * phase_scale)
    return phase, sigma


def demodulate(
    records: CountRecords,
    schedule: SwitchSchedule,
    visibility: float = 1.0,
    dark_rate: float = 0.0,
    arm3_phase_ratio: float = 2.0,
    min_periods: int = 100,
) -> PhaseEstimate:
    """Estimate the arm-1/2 gravitational phase from a counting run.

    Two dark-count-free rate combinations carry the signal:

    * arm-2 state: r_D1 - r_D2 - r_D3, mean -(R0 V sin phi12 + n_d);
    * arm-3 state: r_D3 - r_D2, mean (sqrt(2)/2) R0 V sin(phi13).

    The overall rate R0 = Nbar a eta is estimated dark-free from the arm-3
    state as 4 (r_D2 + r_D3 - 2 r_D1).  Each channel is inverted through the
    quadrature relation (phi13 = arm3_phase_ratio * phi12 for equally spaced
    arms) and the two estimates are combined with inverse-variance weights;
    the quoted sigma is the Poisson-propagated standard error.
    """
    if not 0.0 < visibility <= 1.0:
        raise ConfigurationError("visibility must be in (0, 1]", field="visibility")
    periods = records.duration * schedule.modulation_frequency
    if periods < min_periods:
        raise InsufficientDataError(
            f"need >= {min_periods} switch periods, got {periods:.1f}"
        )
    t2 = records.state_exposure(arm2=True)
    t3 = records.state_exposure(arm2=False)
    if t2 <= 0 or t3 <= 0:
        raise InsufficientDataError("records must cover both switch states")
    c2 = records.state_totals(arm2=True).astype(float)
    c3 = records.state_totals(arm2=False).astype(float)
    r2, r3 = c2 / t2, c3 / t3
    # Poisson variance of each rate, with a one-count floor so empty channels
    # do not report zero uncertainty
    v2 = np.maximum(c2, 1.0) / t2**2
    v3 = np.maximum(c3, 1.0) / t3**2

    rate0 = 4.0 * (r3[1] + r3[2] - 2.0 * r3[0])
    if rate0 <= 0:
        raise InsufficientDataError("cannot establish the photon rate from the arm-3 state")

    y_a = r2[0] - r2[1] - r2[2]
    u_a = -(y_a + dark_rate) / rate0
    var_a = (v2[0] + v2[1] + v2[2]) / rate0**2
    phase_a, sigma_a = _channel_phase(u_a, var_a, visibility, 1.0)

    y_b = r3[2] - r3[1]
    u_b = math.sqrt(2.0) * y_b / rate0
    var_b = 2.0 * (v3[1] + v3[2]) / rate0**2
    phase_b, sigma_b = _channel_phase(u_b, var_b, visibility, arm3_phase_ratio)

    w_a = 1.0 / sigma_a**2
    w_b = 1.0 / sigma_b**2
    phase = (w_a * phase_a + w_b * phase_b) / (w_a + w_b)
    sigma = 1.0 / math.sqrt(w_a + w_b)
    return PhaseEstimate(phase=phase, sigma=sigma)
