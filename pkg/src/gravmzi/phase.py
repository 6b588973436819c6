"""Gravitational phase shift and ideal detection probabilities.

A fiber Mach-Zehnder interferometer with arms of length l separated in height
by h encloses an area A = l*h.  Placed in the Earth's gravitational field, the
photon energy couples to the potential difference between the arms and the
two output ports see a relative phase

    dphi = 2 pi A N g / (lambda c^2) * sin(theta),

maximal when the enclosed area is vertical (theta = pi/2) and zero in the
horizontal calibration position.  The sin(theta) factor follows from the
vertical projection h*sin(theta) of the arm separation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigurationError

__all__ = [
    "PhysicalConstants",
    "InterferometerGeometry",
    "FiberOptical",
    "gravitational_phase",
    "detection_probabilities",
    "effective_photon_mass",
]


@dataclass(frozen=True, slots=True)
class PhysicalConstants:
    """Environment constants, overridable from a scenario file.

    Defaults are standard values: c and h (Planck) exact SI, g a conventional
    local gravity, R the mean Earth radius and Omega the sidereal rotation
    rate.
    """

    c: float = 2.99792458e8          # speed of light in vacuum, m/s
    g: float = 9.81                  # local gravitational acceleration, m/s^2
    planck: float = 6.62607015e-34   # Planck constant, J s
    earth_radius: float = 6.371e6    # R, m
    earth_angular_speed: float = 7.2921e-5  # Omega, rad/s

    def __post_init__(self):
        for name in ("c", "g", "planck", "earth_radius", "earth_angular_speed"):
            if not getattr(self, name) > 0:
                raise ConfigurationError("must be strictly positive", field=f"constants.{name}")

    @property
    def epsilon(self) -> float:
        """Dimensionless rotation parameter R*Omega/c (about 1.55e-6 for Earth)."""
        return self.earth_radius * self.earth_angular_speed / self.c


@dataclass(frozen=True, slots=True)
class InterferometerGeometry:
    """Arm layout of the two-arm interferometer (or one arm pair of the 3-arm MZI)."""

    arm_length: float                 # l, m
    arm_separation: float             # h, m
    inclination: float = math.pi / 2  # theta, rad; 0 = horizontal (area parallel to ground)

    def __post_init__(self):
        if not self.arm_length > 0:
            raise ConfigurationError("arm_length must be > 0", field="geometry.arm_length")
        if self.arm_separation < 0:
            raise ConfigurationError("arm_separation must be >= 0", field="geometry.arm_separation")
        if not 0.0 <= self.inclination <= math.pi / 2:
            raise ConfigurationError("inclination must be in [0, pi/2]", field="geometry.inclination")

    @property
    def enclosed_area(self) -> float:
        """A = l*h, m^2."""
        return self.arm_length * self.arm_separation


@dataclass(frozen=True, slots=True)
class FiberOptical:
    """Optical properties of the fiber used for both arms."""

    group_index: float                  # N, dimensionless
    wavelength: float                   # lambda, m
    attenuation_db_per_km: float = 0.0  # alpha, dB/km

    def __post_init__(self):
        if self.group_index < 1.0:
            raise ConfigurationError("group_index must be >= 1", field="fiber.group_index")
        if not self.wavelength > 0:
            raise ConfigurationError("wavelength must be > 0", field="fiber.wavelength")
        if self.attenuation_db_per_km < 0:
            raise ConfigurationError("attenuation must be >= 0", field="fiber.attenuation_db_per_km")


def gravitational_phase(
    geometry: InterferometerGeometry,
    fiber: FiberOptical,
    constants: PhysicalConstants = PhysicalConstants(),
) -> float:
    """Gravitational phase difference between the two arms, in radians.

    Returns (2 pi A N g / (lambda c^2)) * sin(theta).  At theta = pi/2 this is
    the closed-form vertical-interferometer result; at theta = 0 the phase
    vanishes (horizontal calibration position).
    """
    area = geometry.enclosed_area
    return (
        2.0 * math.pi * area * fiber.group_index * constants.g
        / (fiber.wavelength * constants.c**2)
        * math.sin(geometry.inclination)
    )


def detection_probabilities(
    gravitational_shift: float,
    noise_phase: float,
    base: float = 0.5,
) -> tuple[float, float]:
    """Ideal output-port probabilities P_plus, P_minus of a two-arm MZI.

    P_pm = base * (1 +- cos(dphi + phi_noise)).  ``base`` is 1/2 for the plain
    two-arm interferometer and 1/4 for an arm pair of the 3-arm variant, where
    the first splitter diverts half the probability elsewhere.
    """
    if not 0.0 < base <= 0.5:
        raise ConfigurationError("base must lie in (0, 1/2]", field="base")
    c = math.cos(gravitational_shift + noise_phase)
    return base * (1.0 + c), base * (1.0 - c)


def effective_photon_mass(
    wavelength: float,
    constants: PhysicalConstants = PhysicalConstants(),
) -> float:
    """Effective gravitational mass h/(c*lambda) of a photon, in kg."""
    if not wavelength > 0:
        raise ConfigurationError("wavelength must be > 0", field="wavelength")
    return constants.planck / (constants.c * wavelength)
