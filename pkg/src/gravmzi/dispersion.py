"""Gaussian single-photon pulses in dispersive fiber and the visibility
penalty they impose on the detection probabilities.

The photon has a Gaussian spectral amplitude of standard deviation sigma
around omega_0; the fiber propagation constant is expanded to second order,
k(w) = k0 + (w - w0)/v_g + rho (w - w0)^2 / 2.  After a length z the pulse
stays Gaussian with temporal width

    tau(z)^2 = tau_0^2 + (rho z / (2 tau_0))^2,        tau_0 = 1/(2 sigma),

and acquires a chirp.  When the two arms broaden the pulse differently the
wave packets only partially overlap at the merging splitter, multiplying the
interference term by a visibility below one.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import ConfigurationError
from .phase import PhysicalConstants

__all__ = [
    "PulseModel",
    "FiberDispersion",
    "BeamSplitterCoeffs",
    "spectral_amplitude",
    "temporal_width",
    "conventional_broadening",
    "visibility_factor",
    "dispersive_detection_probability",
    "chirp_phase",
    "time_domain_envelope",
]

_C_VACUUM = PhysicalConstants().c


@dataclass(frozen=True, slots=True)
class PulseModel:
    """Gaussian single-photon wave packet in the frequency domain."""

    central_frequency: float  # omega_0, rad/s
    spectral_std: float       # sigma, rad/s
    peak_time: float = 0.0    # t_0, s

    def __post_init__(self):
        if not self.central_frequency > 0:
            raise ConfigurationError("central_frequency must be > 0", field="pulse.central_frequency")
        if not self.spectral_std > 0:
            raise ConfigurationError("spectral_std must be > 0", field="pulse.spectral_std")

    @property
    def initial_temporal_width(self) -> float:
        """tau_0 = 1/(2 sigma), so that tau_0 * sigma = 1/2 exactly."""
        return 0.5 / self.spectral_std

    @classmethod
    def from_source(
        cls,
        wavelength: float,
        bandwidth_hz: float,
        peak_time: float = 0.0,
        constants: PhysicalConstants = PhysicalConstants(),
    ) -> "PulseModel":
        """Pulse with sigma_nu = bandwidth_hz at the given vacuum wavelength."""
        if not wavelength > 0:
            raise ConfigurationError("wavelength must be > 0", field="pulse.wavelength")
        return cls(
            central_frequency=2.0 * math.pi * constants.c / wavelength,
            spectral_std=2.0 * math.pi * bandwidth_hz,
            peak_time=peak_time,
        )


@dataclass(frozen=True, slots=True)
class FiberDispersion:
    """Second-order dispersion of one fiber arm.

    ``dispersion_ps_km_nm`` is the conventional coefficient D_m; the
    curvature rho = d^2k/dw^2 follows from D_m = -2 pi c rho / lambda^2 (with
    the 1e6 factor absorbed by the ps/(km nm) units).  Use ``from_rho`` to go
    the other way.
    """

    dispersion_ps_km_nm: float  # D_m
    group_velocity: float       # v_g, m/s
    length: float               # z, m
    wavelength: float           # lambda, m (reference for the D_m <-> rho relation)
    source_bandwidth_nm: float = 0.0  # dlambda for the conventional broadening
    propagation_constant: float | None = None  # k_0, rad/m; defaults to 2 pi / lambda

    def __post_init__(self):
        if not 0 < self.group_velocity <= _C_VACUUM:
            raise ConfigurationError("group_velocity must be in (0, c]", field="dispersion.group_velocity")
        if self.length < 0:
            raise ConfigurationError("length must be >= 0", field="dispersion.length")
        if not self.wavelength > 0:
            raise ConfigurationError("wavelength must be > 0", field="dispersion.wavelength")
        if self.source_bandwidth_nm < 0:
            raise ConfigurationError("source_bandwidth_nm must be >= 0", field="dispersion.source_bandwidth_nm")

    @property
    def k0(self) -> float:
        if self.propagation_constant is not None:
            return self.propagation_constant
        return 2.0 * math.pi / self.wavelength

    @property
    def rho(self) -> float:
        """Group-velocity dispersion d^2k/dw^2 at omega_0, s^2/m."""
        d_si = self.dispersion_ps_km_nm * 1e-6  # ps/(km nm) -> s/m^2
        return -d_si * self.wavelength**2 / (2.0 * math.pi * _C_VACUUM)

    @classmethod
    def from_rho(
        cls,
        rho: float,
        group_velocity: float,
        length: float,
        wavelength: float,
        source_bandwidth_nm: float = 0.0,
        propagation_constant: float | None = None,
    ) -> "FiberDispersion":
        d_m = -2.0 * math.pi * _C_VACUUM * rho / wavelength**2 * 1e6
        return cls(d_m, group_velocity, length, wavelength, source_bandwidth_nm, propagation_constant)


@dataclass(frozen=True, slots=True)
class BeamSplitterCoeffs:
    """Reflection/transmission amplitudes of a lossless splitter."""

    reflection: complex
    transmission: complex

    def __post_init__(self):
        norm = abs(self.reflection) ** 2 + abs(self.transmission) ** 2
        if not math.isclose(norm, 1.0, rel_tol=1e-12, abs_tol=1e-12):
            raise ConfigurationError(
                f"|R|^2 + |T|^2 must equal 1, got {norm}", field="beam_splitter"
            )

    @classmethod
    def balanced(cls) -> "BeamSplitterCoeffs":
        r = 1.0 / math.sqrt(2.0)
        return cls(reflection=complex(r), transmission=complex(r))


def spectral_amplitude(pulse: PulseModel, omega: float) -> complex:
    """Gaussian spectral amplitude f(omega), unit-normalized: int |f|^2 dw = 1.

    The prefactor is (2 pi sigma^2)^(-1/4); anything else fails the
    normalization integral.
    """
    sigma = pulse.spectral_std
    du = omega - pulse.central_frequency
    return (2.0 * math.pi * sigma**2) ** -0.25 * cmath.exp(
        -1j * du * pulse.peak_time - du**2 / (4.0 * sigma**2)
    )


def temporal_width(pulse: PulseModel, disp: FiberDispersion) -> float:
    """Width tau(z) = sqrt(tau_0^2 + (rho z / (2 tau_0))^2) after the fiber.

    For a Gaussian pulse this equals sqrt(tau_0^2 + dtau^2) with the
    conventional broadening dtau = D_m l dlambda, provided dlambda is the
    wavelength width equivalent to the sigma_nu spectral standard deviation
    (dlambda = lambda^2 sigma_nu / c).
    """
    tau0 = pulse.initial_temporal_width
    spread = disp.rho * disp.length / (2.0 * tau0)
    return math.hypot(tau0, spread)


def conventional_broadening(disp: FiberDispersion) -> float:
    """dtau = D_m l dlambda from the stored source bandwidth, seconds."""
    d_si = abs(disp.dispersion_ps_km_nm) * 1e-6
    return d_si * disp.length * disp.source_bandwidth_nm * 1e-9


def visibility_factor(
    tau: float,
    tau_prime: float,
    gravitational_shift: float,
    central_frequency: float,
) -> float:
    """Fringe-contrast multiplier from mismatched wave packets.

    V = sqrt(2 tau tau' / (tau^2 + tau'^2)) * exp(-dphi^2 / (4 w0^2 (tau^2 + tau'^2))).
    The exponent is the squared arrival-time offset dphi/w0 of the packet
    centers against the combined width; V <= 1 with equality only for
    identical widths and zero offset.
    """
    if not (tau > 0 and tau_prime > 0):
        raise ConfigurationError("widths must be > 0", field="tau")
    if not central_frequency > 0:
        raise ConfigurationError("central_frequency must be > 0", field="central_frequency")
    ssq = tau**2 + tau_prime**2
    overlap = math.sqrt(2.0 * tau * tau_prime / ssq)
    delay = gravitational_shift / central_frequency
    return overlap * math.exp(-(delay**2) / (4.0 * ssq))


def dispersive_detection_probability(
    tau: float,
    tau_prime: float,
    gravitational_shift: float,
    noise_phase: float,
    central_frequency: float,
) -> tuple[float, float]:
    """Detection probabilities with dispersion-degraded visibility.

    P_pm = 1/2 (1 +- V cos(dphi + phi_noise)) with V from
    ``visibility_factor``; reduces to the ideal probabilities when both arms
    broaden identically and the packet offset is negligible.
    """
    v = visibility_factor(tau, tau_prime, gravitational_shift, central_frequency)
    c = v * math.cos(gravitational_shift + noise_phase)
    return 0.5 * (1.0 + c), 0.5 * (1.0 - c)


def chirp_phase(disp: FiberDispersion, pulse: PulseModel, t: float) -> float:
    """Residual phase Xi(z, t) beyond the carrier and noise terms, radians.

    Xi = -arctan(rho z / (2 tau_0^2)) / 2 + rho z (t - z/v_g - t_0)^2 /
    (8 tau_0^2 tau(z)^2).  The offset from the pulse center enters squared
    (the chirp is quadratic across the envelope); it vanishes at the center,
    leaving only the arctangent (Gouy-like) term.
    """
    tau0 = pulse.initial_temporal_width
    rho_z = disp.rho * disp.length
    if rho_z == 0.0:
        return 0.0
    tau_sq = temporal_width(pulse, disp) ** 2
    dt = t - disp.length / disp.group_velocity - pulse.peak_time
    return -0.5 * math.atan(rho_z / (2.0 * tau0**2)) + rho_z * dt**2 / (8.0 * tau0**2 * tau_sq)


def time_domain_envelope(pulse: PulseModel, disp: FiberDispersion, t: float) -> float:
    """Real Gaussian envelope (2 pi tau^2)^(-1/4) exp(-dt^2 / (4 tau^2)) at z.

    The intensity |envelope|^2 integrates to 1 over t.  Carrier, noise and
    chirp phases are deliberately excluded; combine with ``chirp_phase`` when
    the full field is needed.
    """
    tau = temporal_width(pulse, disp)
    dt = t - disp.length / disp.group_velocity - pulse.peak_time
    return (2.0 * math.pi * tau**2) ** -0.25 * math.exp(-(dt**2) / (4.0 * tau**2))
