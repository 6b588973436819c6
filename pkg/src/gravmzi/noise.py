"""Phase-noise spectral density of the long fiber arms.

The measured phase noise of km-scale fiber interferometers follows 1/f in
power at low Fourier frequencies (mechanical dissipation), a thermal plateau
between roughly 1 kHz and 100 kHz, and a rapid roll-off above.  The toolkit
models this as a three-segment power law in the amplitude spectral density
(rad/sqrt(Hz)), anchored at 1e-6 rad/sqrt(Hz) at 100 kHz for a 200 km total
path, with noise power scaling linearly in fiber length.  The construction is
a parametric reconstruction, tagged as such; a measured table can be loaded
from CSV instead.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, UnsupportedBandError

__all__ = [
    "FiberThermalParams",
    "PsdSegment",
    "NoisePsdModel",
    "NoiseMargin",
    "default_psd",
    "band_rms_phase",
    "noise_margin",
    "choose_modulation_frequency",
    "load_psd_csv",
    "psd_table",
]

PSD_CSV_HEADER = ("freq_hz", "amp_rad_per_sqrthz")


@dataclass(frozen=True, slots=True)
class FiberThermalParams:
    """Thermal and geometric fiber parameters (defaults: SMF-28 class fiber,
    1550 nm, 200 km total path)."""

    thermal_conductivity: float = 1.37      # kappa, W/(m K)
    dn_dt: float = 9.52e-6                  # 1/K
    refractive_index: float = 1.468
    linear_expansion: float = 5e-7          # 1/K
    thermal_diffusivity: float = 0.82e-6    # m^2/s
    mode_field_radius: float = 5.2e-6       # m
    fiber_outer_radius: float = 62.5e-6     # m
    total_length: float = 2e5               # both interfering arms, m
    wavelength: float = 1.55e-6             # m

    def __post_init__(self):
        for name in (
            "thermal_conductivity", "dn_dt", "refractive_index", "linear_expansion",
            "thermal_diffusivity", "mode_field_radius", "fiber_outer_radius",
            "total_length", "wavelength",
        ):
            if not getattr(self, name) > 0:
                raise ConfigurationError("must be strictly positive", field=f"thermal.{name}")


@dataclass(frozen=True, slots=True)
class PsdSegment:
    """One power-law segment: amplitude(f) = amplitude_at_ref * (f/ref_freq)**slope."""

    f_lo: float
    f_hi: float
    amplitude_at_ref: float
    ref_freq: float
    slope: float

    def __post_init__(self):
        if not 0 < self.f_lo < self.f_hi:
            raise ConfigurationError("need 0 < f_lo < f_hi", field="psd.segment")
        if self.amplitude_at_ref < 0:
            raise ConfigurationError("amplitude must be >= 0", field="psd.segment.amplitude")
        if not self.ref_freq > 0:
            raise ConfigurationError("ref_freq must be > 0", field="psd.segment.ref_freq")

    def amplitude(self, f):
        return self.amplitude_at_ref * (np.asarray(f, dtype=float) / self.ref_freq) ** self.slope

    def power_integral(self, f_lo: float, f_hi: float) -> float:
        """Integral of amplitude(f)^2 over [f_lo, f_hi] within this segment."""
        a2 = self.amplitude_at_ref**2
        p = 2.0 * self.slope
        if math.isclose(p, -1.0, abs_tol=1e-12):
            return a2 * self.ref_freq * math.log(f_hi / f_lo)
        q = p + 1.0
        return a2 / self.ref_freq**p * (f_hi**q - f_lo**q) / q


@dataclass(frozen=True)
class NoisePsdModel:
    """Piecewise power-law (or tabulated) phase-noise amplitude density."""

    segments: tuple[PsdSegment, ...]
    provenance: str = "parametric"  # or "tabulated"
    table: tuple[tuple[float, float], ...] | None = None  # (Hz, rad/sqrt(Hz)) rows

    def __post_init__(self):
        if self.provenance not in ("parametric", "tabulated"):
            raise ConfigurationError("provenance must be parametric|tabulated", field="psd.provenance")
        if not self.segments:
            raise ConfigurationError("need at least one segment", field="psd.segments")
        for a, b in zip(self.segments, self.segments[1:]):
            if not math.isclose(a.f_hi, b.f_lo, rel_tol=1e-12):
                raise ConfigurationError("segments must be contiguous", field="psd.segments")

    @property
    def support(self) -> tuple[float, float]:
        return self.segments[0].f_lo, self.segments[-1].f_hi

    def amplitude(self, f):
        """Amplitude spectral density, rad/sqrt(Hz); vectorized."""
        ff = np.asarray(f, dtype=float)
        lo, hi = self.support
        if np.any(ff < lo) or np.any(ff > hi):
            raise UnsupportedBandError(f"frequency outside support [{lo}, {hi}] Hz")
        if self.table is not None:
            logf = np.log10([row[0] for row in self.table])
            loga = np.log10([max(row[1], 1e-300) for row in self.table])
            out = 10.0 ** np.interp(np.log10(ff), logf, loga)
        else:
            out = np.empty_like(ff)
            for seg in self.segments:
                mask = (ff >= seg.f_lo) & (ff <= seg.f_hi)
                out[mask] = seg.amplitude(ff[mask])
        return out if np.ndim(f) else float(out)


def default_psd(
    params: FiberThermalParams = FiberThermalParams(),
    low_knee: float = 1e3,
    high_knee: float = 1e5,
    plateau_anchor: float = 1e-6,
    anchor_length: float = 2e5,
    f_min: float = 1e-3,
    f_max: float = 1e8,
    rolloff_slope: float = -2.0,
) -> NoisePsdModel:
    """Three-segment parametric model of the arm phase noise.

    Below ``low_knee`` the power density falls as 1/f (amplitude slope -1/2);
    between the knees the amplitude is flat at the plateau; above
    ``high_knee`` the amplitude rolls off steeply (slope <= -2).  The plateau
    is ``plateau_anchor`` for ``anchor_length`` of fiber and scales as
    sqrt(length): noise power adds linearly along the path.
    """
    if not f_min < low_knee < high_knee < f_max:
        raise ConfigurationError("need f_min < low_knee < high_knee < f_max", field="psd.knees")
    if rolloff_slope > -2.0:
        raise ConfigurationError("rolloff_slope must be <= -2", field="psd.rolloff_slope")
    plateau = plateau_anchor * math.sqrt(params.total_length / anchor_length)
    segments = (
        PsdSegment(f_min, low_knee, plateau, low_knee, -0.5),
        PsdSegment(low_knee, high_knee, plateau, high_knee, 0.0),
        PsdSegment(high_knee, f_max, plateau, high_knee, rolloff_slope),
    )
    return NoisePsdModel(segments=segments, provenance="parametric")


def band_rms_phase(psd: NoisePsdModel, f_lo: float, f_hi: float) -> float:
    """sqrt of the power PSD integrated over [f_lo, f_hi], radians rms."""
    if not f_lo <= f_hi:
        raise ConfigurationError("need f_lo <= f_hi", field="band")
    lo, hi = psd.support
    if f_lo < lo or f_hi > hi:
        raise UnsupportedBandError(f"band [{f_lo}, {f_hi}] outside support [{lo}, {hi}] Hz")
    if f_lo == f_hi:
        return 0.0
    if psd.table is not None:
        # trapezoid on a log-dense grid through the tabulated support
        grid = np.geomspace(f_lo, f_hi, 4097)
        return float(math.sqrt(np.trapezoid(psd.amplitude(grid) ** 2, grid)))
    total = 0.0
    for seg in psd.segments:
        a = max(f_lo, seg.f_lo)
        b = min(f_hi, seg.f_hi)
        if a < b:
            total += seg.power_integral(a, b)
    return math.sqrt(total)


@dataclass(frozen=True, slots=True)
class NoiseMargin:
    ratio: float
    passed: bool
    threshold: float


def noise_margin(gravitational_shift: float, rms: float, threshold: float = 10.0) -> NoiseMargin:
    """Signal-to-noise margin dphi/rms with a pass flag at ratio >= threshold."""
    if not rms > 0:
        raise ConfigurationError("rms must be > 0", field="rms")
    ratio = gravitational_shift / rms
    return NoiseMargin(ratio=ratio, passed=ratio >= threshold, threshold=threshold)


def choose_modulation_frequency(
    psd: NoisePsdModel,
    candidate_lo: float,
    candidate_hi: float,
    measurement_bandwidth: float = 1.0,
    grid_points: int = 200,
) -> float:
    """Candidate frequency minimizing the in-band rms phase noise.

    Grid search over a log-spaced candidate grid; each candidate is scored by
    ``band_rms_phase`` over a ``measurement_bandwidth`` window centered on it.
    Ties break toward the lowest frequency (cheaper electronics).
    """
    lo, hi = psd.support
    half = measurement_bandwidth / 2.0
    if not lo <= candidate_lo - half or not candidate_hi + half <= hi:
        raise UnsupportedBandError("candidate band (plus measurement bandwidth) outside PSD support")
    if not candidate_lo < candidate_hi:
        raise ConfigurationError("need candidate_lo < candidate_hi", field="candidate_band")
    grid = np.geomspace(candidate_lo, candidate_hi, grid_points)
    best_f = grid[0]
    best_rms = math.inf
    for f in grid:
        rms = band_rms_phase(psd, f - half, f + half)
        if rms < best_rms * (1.0 - 1e-12):
            best_f, best_rms = f, rms
    return float(best_f)


def load_psd_csv(path) -> NoisePsdModel:
    """Tabulated PSD from a two-column CSV ``freq_hz,amp_rad_per_sqrthz``.

    Frequencies must increase strictly; interpolation is linear in log-log
    space.
    """
    rows: list[tuple[float, float]] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != PSD_CSV_HEADER:
            raise ConfigurationError(
                f"expected header {','.join(PSD_CSV_HEADER)}", field=str(path)
            )
        for i, row in enumerate(reader):
            try:
                f, a = float(row[0]), float(row[1])
            except (ValueError, IndexError) as exc:
                raise ConfigurationError(f"bad row {i + 2}: {row}", field=str(path)) from exc
            if f <= 0 or a < 0:
                raise ConfigurationError(f"row {i + 2}: need f > 0 and amp >= 0", field=str(path))
            if rows and f <= rows[-1][0]:
                raise ConfigurationError(
                    f"row {i + 2}: frequencies must increase strictly", field=str(path)
                )
            rows.append((f, a))
    if len(rows) < 2:
        raise ConfigurationError("need at least two rows", field=str(path))
    segments = tuple(
        PsdSegment(
            f_lo=a[0],
            f_hi=b[0],
            amplitude_at_ref=a[1],
            ref_freq=a[0],
            slope=(
                (math.log10(max(b[1], 1e-300)) - math.log10(max(a[1], 1e-300)))
                / (math.log10(b[0]) - math.log10(a[0]))
            ),
        )
        for a, b in zip(rows, rows[1:])
    )
    return NoisePsdModel(segments=segments, provenance="tabulated", table=tuple(rows))


def psd_table(
    psd: NoisePsdModel,
    f_lo: float = 1.0,
    f_hi: float = 1e6,
    points_per_decade: int = 50,
) -> list[tuple[float, float]]:
    """(frequency, amplitude) rows on a log grid hitting decades exactly."""
    decades = math.log10(f_hi / f_lo)
    n = int(round(points_per_decade * decades)) + 1
    freqs = np.geomspace(f_lo, f_hi, n)
    # snap near-decade points so anchor frequencies like 1e5 Hz appear exactly
    exponents = np.round(np.log10(freqs))
    snapped = 10.0**exponents
    freqs = np.where(np.isclose(freqs, snapped, rtol=1e-9), snapped, freqs)
    amps = psd.amplitude(freqs)
    return list(zip(freqs.tolist(), np.asarray(amps).tolist()))
