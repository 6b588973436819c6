"""Scenario orchestration: inclination sweeps, scenario-level counting runs,
and CSV/JSON emission of every analysis product.
"""

from __future__ import annotations

import json
import math
import sys
from contextlib import contextmanager
from dataclasses import asdict, dataclass, fields, replace

from . import counting
from .counting import CountRecords, PhaseEstimate
from .dispersion import temporal_width, visibility_factor
from .earth_rotation import rotation_phase_parts
from .errors import ConfigurationError, NoSignalError, UnsupportedBandError
from .noise import NoisePsdModel, band_rms_phase, noise_margin, psd_table
from .phase import gravitational_phase
from .scenario import ExperimentScenario

__all__ = [
    "SweepRow",
    "SweepResult",
    "run_sweep",
    "arm_pair_phases",
    "scenario_visibility",
    "simulate_scenario_counts",
    "demodulate_scenario",
    "emit",
    "load_sweep_json",
]

SWEEP_SCHEMA = "gravmzi.sweep/1"
PSD_SCHEMA = "gravmzi.psd/1"
COUNTS_SCHEMA = "gravmzi.counts/1"
_MAX_SIM_BINS = 10_000_000


def arm_pair_phases(scenario: ExperimentScenario, theta: float) -> tuple[float, float]:
    """Gravitational phases (arm-1/2, arm-1/3) at inclination theta.

    Arms are equally spaced, so the 1/3 pair encloses twice the area of the
    1/2 pair.
    """
    geom12 = replace(scenario.geometry, inclination=theta)
    geom13 = replace(geom12, arm_separation=2.0 * scenario.geometry.arm_separation)
    return (
        gravitational_phase(geom12, scenario.fiber, scenario.constants),
        gravitational_phase(geom13, scenario.fiber, scenario.constants),
    )


def scenario_visibility(scenario: ExperimentScenario, phase12: float) -> float:
    """Dispersion overlap times the polarization scalar."""
    tau1 = temporal_width(scenario.pulse, scenario.dispersion1)
    tau3 = temporal_width(scenario.pulse, scenario.dispersion3)
    v_disp = visibility_factor(tau1, tau3, phase12, scenario.pulse.central_frequency)
    return v_disp * scenario.polarization_visibility


@dataclass(frozen=True, slots=True)
class SweepRow:
    theta: float
    phase12: float
    phase13: float
    rotation_linear: float
    rotation_oscillating: float
    rotation_secular: float
    rotation_total: float
    tau1: float
    tau3: float
    visibility: float
    p_d1_arm2: float
    p_d2_arm2: float
    p_d3_arm2: float
    p_d1_arm3: float
    p_d2_arm3: float
    p_d3_arm3: float
    integration_time: float
    noise_rms: float
    noise_margin_ratio: float
    noise_margin_pass: bool


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]

    @property
    def columns(self) -> tuple[str, ...]:
        return tuple(f.name for f in fields(SweepRow))


def run_sweep(scenario: ExperimentScenario, margin_bandwidth: float = 1.0) -> SweepResult:
    """One row per scheduled inclination; deterministic, no sampling.

    The noise margin integrates the arm-noise PSD over ``margin_bandwidth``
    centered on the switch modulation frequency; rows at theta = 0 carry an
    infinite integration time (no gravitational signal) and a zero margin.
    """
    psd = scenario.noise_psd()
    attenuation = counting.attenuation_factor(scenario.attenuation)
    rows = []
    for theta in scenario.theta_schedule:
        sc = scenario.at_inclination(theta)
        phase12, phase13 = arm_pair_phases(scenario, theta)
        parts = rotation_phase_parts(
            sc.spool1, sc.kinematics1, sc.spool3, sc.kinematics3,
            sc.fiber.wavelength, sc.constants,
        )
        tau1 = temporal_width(sc.pulse, sc.dispersion1)
        tau3 = temporal_width(sc.pulse, sc.dispersion3)
        visibility = scenario_visibility(sc, phase12)
        probs2 = counting.arm_pair_probabilities(
            counting.SwitchState.ARM2_OPEN, theta, phase12, phase13, visibility
        )
        probs3 = counting.arm_pair_probabilities(
            counting.SwitchState.ARM3_OPEN, theta, phase12, phase13, visibility
        )
        try:
            table = counting.integration_time_table(
                phase12, phase13, sc.source, sc.detectors, attenuation, visibility, theta
            )
            t_int = counting.max_finite_time(table)
        except NoSignalError:
            t_int = math.inf
        f_mod = sc.switch.modulation_frequency
        half = margin_bandwidth / 2.0
        lo, hi = psd.support
        try:
            rms = band_rms_phase(psd, max(lo, f_mod - half), min(hi, f_mod + half))
            margin = noise_margin(phase12, rms) if rms > 0 else None
        except UnsupportedBandError:
            rms, margin = math.nan, None
        rows.append(
            SweepRow(
                theta=theta,
                phase12=phase12,
                phase13=phase13,
                rotation_linear=parts.linear,
                rotation_oscillating=parts.oscillating,
                rotation_secular=parts.secular,
                rotation_total=parts.total,
                tau1=tau1,
                tau3=tau3,
                visibility=visibility,
                p_d1_arm2=probs2[0],
                p_d2_arm2=probs2[1],
                p_d3_arm2=probs2[2],
                p_d1_arm3=probs3[0],
                p_d2_arm3=probs3[1],
                p_d3_arm3=probs3[2],
                integration_time=t_int,
                noise_rms=rms,
                noise_margin_ratio=margin.ratio if margin else 0.0,
                noise_margin_pass=bool(margin.passed) if margin else False,
            )
        )
    return SweepResult(rows=tuple(rows))


def simulate_scenario_counts(
    scenario: ExperimentScenario,
    duration: float,
    seed: int = 0,
    theta: float | None = None,
    bin_width: float | None = None,
) -> CountRecords:
    """Counting run for the scenario at one inclination (default: the
    scenario geometry's own).

    Bin width defaults to the switch half-period (pure one-state bins); for
    fast modulation over long runs it falls back to a whole number of switch
    periods keeping the bin count tractable.
    """
    if theta is None:
        theta = scenario.geometry.inclination
    period = 1.0 / scenario.switch.modulation_frequency
    if bin_width is None:
        bin_width = 0.5 * period
        if duration / bin_width > _MAX_SIM_BINS:
            bin_width = period * math.ceil(duration / (_MAX_SIM_BINS * period))
    n_bins = duration / bin_width
    if n_bins > _MAX_SIM_BINS:
        raise ConfigurationError(
            f"{n_bins:.0f} bins exceed the {_MAX_SIM_BINS} limit; lower the "
            "modulation frequency, shorten the run, or widen the bins",
            field="duration",
        )
    phase12, phase13 = arm_pair_phases(scenario, theta)
    visibility = scenario_visibility(scenario, phase12)
    return counting.simulate_counts(
        scenario.source,
        scenario.detectors,
        scenario.attenuation,
        scenario.switch,
        phase12,
        phase13,
        duration,
        bin_width=bin_width,
        seed=seed,
        theta=theta,
        visibility=visibility,
        residual_noise_rms=scenario.residual_noise_rms,
    )


def demodulate_scenario(scenario: ExperimentScenario, records: CountRecords) -> PhaseEstimate:
    """Demodulate with the scenario's own visibility and dark rate."""
    phase12, _ = arm_pair_phases(scenario, scenario.geometry.inclination)
    return counting.demodulate(
        records,
        scenario.switch,
        visibility=scenario_visibility(scenario, phase12),
        dark_rate=scenario.detectors.dark_rate,
    )


def _format(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


@contextmanager
def open_output(path):
    """Writable text stream for ``path``; None or "-" selects stdout."""
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def emit(result, fmt: str, path) -> None:
    """Write a SweepResult, NoisePsdModel or CountRecords as csv or json.

    CSV files carry a header row and full float precision; JSON documents are
    schema-versioned (non-finite floats use Python's extended ``Infinity``
    literals so round trips are exact).  Identical inputs produce
    byte-identical files.  ``path`` may be "-" for stdout.
    """
    if fmt not in ("csv", "json"):
        raise ConfigurationError("format must be csv or json", field="format")
    with open_output(path) as fh:
        if isinstance(result, SweepResult):
            _emit_sweep(result, fmt, fh)
        elif isinstance(result, NoisePsdModel):
            _emit_psd(result, fmt, fh)
        elif isinstance(result, CountRecords):
            _emit_counts(result, fmt, fh)
        else:
            raise ConfigurationError(f"cannot emit {type(result).__name__}", field="result")


def _emit_sweep(result: SweepResult, fmt: str, fh) -> None:
    if fmt == "csv":
        fh.write(",".join(result.columns) + "\n")
        for row in result.rows:
            d = asdict(row)
            fh.write(",".join(_format(d[c]) for c in result.columns) + "\n")
    else:
        doc = {"schema": SWEEP_SCHEMA, "rows": [asdict(row) for row in result.rows]}
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def load_sweep_json(path) -> SweepResult:
    """Inverse of ``emit(..., "json", ...)`` for sweep results."""
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("schema") != SWEEP_SCHEMA:
        raise ConfigurationError(f"expected schema {SWEEP_SCHEMA}", field=str(path))
    return SweepResult(rows=tuple(SweepRow(**row) for row in doc["rows"]))


def _emit_psd(psd: NoisePsdModel, fmt: str, fh, f_lo: float = 1.0, f_hi: float = 1e6) -> None:
    rows = psd_table(psd, f_lo, f_hi)
    if fmt == "csv":
        fh.write("freq_hz,amp_rad_per_sqrthz\n")
        for f, a in rows:
            fh.write(f"{_format(f)},{_format(a)}\n")
    else:
        doc = {
            "schema": PSD_SCHEMA,
            "provenance": psd.provenance,
            "rows": [{"freq_hz": f, "amp_rad_per_sqrthz": a} for f, a in rows],
        }
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def _emit_counts(records: CountRecords, fmt: str, fh) -> None:
    if fmt == "csv":
        records.to_csv(fh)
    else:
        doc = {
            "schema": COUNTS_SCHEMA,
            "bin_width": records.bin_width,
            "records": [asdict(rec) for rec in records],
        }
        json.dump(doc, fh, indent=1)
        fh.write("\n")
