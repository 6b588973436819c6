"""Scenario ingestion: a TOML file with unit-suffixed values describing the
full experiment, validated into the toolkit's domain types.

Every field is optional; missing entries fall back to the bundled baseline
(100 km arms, 1 m spacing, 1550 nm, 0.2 m spool at 48.21 deg latitude,
1e6 photons/s source, 90% efficient detectors with 1 Hz dark rate).
"""

from __future__ import annotations

import math
import os
import sys
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .counting import AttenuationModel, DetectorParams, SourceParams, SwitchSchedule
from .dispersion import FiberDispersion, PulseModel
from .earth_rotation import PhotonKinematics, SpoolGeometry
from .errors import ConfigurationError
from .noise import FiberThermalParams, NoisePsdModel, default_psd
from .phase import FiberOptical, InterferometerGeometry, PhysicalConstants
from .units import parse_quantity

__all__ = ["ExperimentScenario", "load_scenario", "baseline_scenario_path", "SCENARIO_DIR_ENV"]

SCENARIO_DIR_ENV = "GRAVMZI_SCENARIO_DIR"


@dataclass(frozen=True)
class ExperimentScenario:
    """Validated experiment description.

    Arms are equally spaced: arm 2 sits ``arm_separation`` below arm 1 and
    arm 3 twice that, so the arm-1/3 pair encloses double the area.  Spool 1
    and spool 3 share geometry except for their entry planes; the optical
    lengths may differ by ``length_mismatch``.
    """

    geometry: InterferometerGeometry
    fiber: FiberOptical
    spool1: SpoolGeometry
    spool3: SpoolGeometry
    kinematics1: PhotonKinematics
    kinematics3: PhotonKinematics
    pulse: PulseModel
    dispersion1: FiberDispersion
    dispersion3: FiberDispersion
    thermal: FiberThermalParams
    source: SourceParams
    detectors: DetectorParams
    attenuation: AttenuationModel
    switch: SwitchSchedule
    constants: PhysicalConstants
    theta_schedule: tuple[float, ...]
    residual_noise_rms: float = 0.0
    polarization_visibility: float = 1.0
    noise_low_knee: float = 1e3
    noise_high_knee: float = 1e5
    noise_plateau_anchor: float = 1e-6

    def __post_init__(self):
        if not self.theta_schedule:
            raise ConfigurationError("theta_schedule must not be empty", field="run.theta_schedule")
        for i, theta in enumerate(self.theta_schedule):
            if not 0.0 <= theta <= math.pi / 2:
                raise ConfigurationError(
                    f"entry {i} = {theta} rad outside [0, pi/2]", field="run.theta_schedule"
                )
        if self.residual_noise_rms < 0:
            raise ConfigurationError("must be >= 0", field="run.residual_noise_rms")
        if not 0.0 <= self.polarization_visibility <= 1.0:
            raise ConfigurationError("must be in [0, 1]", field="run.polarization_visibility")

    def at_inclination(self, theta: float) -> "ExperimentScenario":
        """Scenario rotated to inclination ``theta`` (geometry and spools)."""
        return replace(
            self,
            geometry=replace(self.geometry, inclination=theta),
            spool1=replace(self.spool1, inclination=theta),
            spool3=replace(self.spool3, inclination=theta),
        )

    def noise_psd(self) -> NoisePsdModel:
        """Parametric arm-noise PSD for the two interfering arms."""
        return default_psd(
            self.thermal,
            low_knee=self.noise_low_knee,
            high_knee=self.noise_high_knee,
            plateau_anchor=self.noise_plateau_anchor,
        )


def baseline_scenario_path() -> Path:
    """Filesystem path of the bundled baseline scenario."""
    return Path(str(resources.files("gravmzi").joinpath("data/baseline.toml")))


def _get(table: dict, section: str, key: str, kind: str, default):
    raw = table.get(section, {}).get(key)
    if raw is None:
        return default
    return parse_quantity(raw, kind, field=f"{section}.{key}")


def load_scenario(path: str | os.PathLike | None = None) -> ExperimentScenario:
    """Load and validate a scenario file; ``None`` loads the bundled baseline.

    A bare file name (no directory part) is also searched in
    ``$GRAVMZI_SCENARIO_DIR`` when set.  Unit suffixes are converted to SI
    here; domain-type invariants are enforced by the type constructors and
    re-raised with the offending field name.
    """
    if path is None:
        path = baseline_scenario_path()
    else:
        path = Path(path)
        if not path.exists() and path.parent == Path(".") and SCENARIO_DIR_ENV in os.environ:
            candidate = Path(os.environ[SCENARIO_DIR_ENV]) / path
            if candidate.exists():
                path = candidate
    try:
        with open(path, "rb") as fh:
            table = tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigurationError(f"scenario file not found: {path}", field="scenario") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigurationError(f"cannot parse {path}: {exc}", field="scenario") from None

    constants = PhysicalConstants(
        c=_get(table, "constants", "c", "speed", 2.99792458e8),
        g=_get(table, "constants", "g", "dimensionless", 9.81),
        planck=_get(table, "constants", "planck", "dimensionless", 6.62607015e-34),
        earth_radius=_get(table, "constants", "earth_radius", "length", 6.371e6),
        earth_angular_speed=_get(table, "constants", "earth_angular_speed", "rate", 7.2921e-5),
    )

    geometry = InterferometerGeometry(
        arm_length=_get(table, "geometry", "arm_length", "length", 1e5),
        arm_separation=_get(table, "geometry", "arm_separation", "length", 1.0),
        inclination=_get(table, "geometry", "inclination", "angle", math.pi / 2),
    )
    fiber = FiberOptical(
        group_index=_get(table, "fiber", "group_index", "dimensionless", 1.468),
        wavelength=_get(table, "fiber", "wavelength", "length", 1.55e-6),
        attenuation_db_per_km=_get(table, "fiber", "attenuation", "attenuation", 0.17),
    )

    spool_radius = _get(table, "spool", "radius", "length", 0.2)
    spool_height = _get(table, "spool", "height", "length", 0.2)
    latitude = _get(table, "spool", "latitude", "angle", math.radians(48.21))
    azimuth = _get(table, "spool", "azimuth", "angle", 0.0)
    base_spool = dict(
        radius=spool_radius,
        inclination=geometry.inclination,
        latitude=latitude,
        azimuth=azimuth,
        initial_earth_angle=_get(table, "spool", "initial_earth_angle", "angle", 0.0),
        axial_offset=_get(table, "spool", "axial_offset", "length", 0.0),
    )
    spool1 = SpoolGeometry(entry_plane=_get(table, "spool", "entry_plane_1", "angle", 0.0), **base_spool)
    spool3 = SpoolGeometry(entry_plane=_get(table, "spool", "entry_plane_3", "angle", 0.0), **base_spool)

    mismatch = _get(table, "kinematics", "length_mismatch", "length", 0.0)
    omega = _get(table, "kinematics", "angular_speed", "rate", 0.0)
    axial_speed = _get(table, "kinematics", "axial_speed", "speed", -1.0)
    if omega > 0:
        # explicit override mode: reproduce quoted round numbers verbatim
        vz = axial_speed if axial_speed >= 0 else 0.0
        kinematics1 = PhotonKinematics(omega, vz, geometry.arm_length, fiber.group_index)
    else:
        kinematics1 = PhotonKinematics.from_spool_winding(
            geometry.arm_length, fiber.group_index, spool_radius, spool_height, constants
        )
        if axial_speed >= 0:
            kinematics1 = replace(kinematics1, axial_speed=axial_speed)
    kinematics3 = replace(kinematics1, fiber_length=geometry.arm_length + mismatch)

    bandwidth = _get(table, "source", "bandwidth", "frequency", 1e11)
    pulse = PulseModel.from_source(fiber.wavelength, bandwidth, constants=constants)
    bandwidth_nm = fiber.wavelength**2 * bandwidth / constants.c * 1e9
    group_velocity = constants.c / fiber.group_index
    dispersion1 = FiberDispersion(
        dispersion_ps_km_nm=_get(table, "dispersion", "coefficient_1", "dimensionless", 18.0),
        group_velocity=group_velocity,
        length=geometry.arm_length,
        wavelength=fiber.wavelength,
        source_bandwidth_nm=bandwidth_nm,
    )
    dispersion3 = FiberDispersion(
        dispersion_ps_km_nm=_get(table, "dispersion", "coefficient_3", "dimensionless", 18.0),
        group_velocity=group_velocity,
        length=geometry.arm_length + mismatch,
        wavelength=fiber.wavelength,
        source_bandwidth_nm=bandwidth_nm,
    )

    thermal = FiberThermalParams(
        thermal_conductivity=_get(table, "thermal", "thermal_conductivity", "dimensionless", 1.37),
        dn_dt=_get(table, "thermal", "dn_dt", "dimensionless", 9.52e-6),
        refractive_index=_get(table, "thermal", "refractive_index", "dimensionless", 1.468),
        linear_expansion=_get(table, "thermal", "linear_expansion", "dimensionless", 5e-7),
        thermal_diffusivity=_get(table, "thermal", "thermal_diffusivity", "dimensionless", 0.82e-6),
        mode_field_radius=_get(table, "thermal", "mode_field_radius", "length", 5.2e-6),
        fiber_outer_radius=_get(table, "thermal", "fiber_outer_radius", "length", 62.5e-6),
        total_length=_get(table, "thermal", "total_length", "length", 2.0 * geometry.arm_length),
        wavelength=fiber.wavelength,
    )

    source = SourceParams(
        rate=_get(table, "source", "rate", "rate", 1e6),
        bandwidth=bandwidth,
    )
    detectors = DetectorParams(
        efficiency=_get(table, "detectors", "efficiency", "dimensionless", 0.9),
        dark_rate=_get(table, "detectors", "dark_rate", "rate", 1.0),
    )
    attenuation = AttenuationModel(
        fiber_db_per_km=fiber.attenuation_db_per_km,
        component_losses_db=_get(table, "attenuation", "component_losses", "decibel", 0.5),
        arm_length=geometry.arm_length,
    )
    switch = SwitchSchedule(
        modulation_frequency=_get(table, "switch", "modulation_frequency", "frequency", 1e5),
        duty=_get(table, "switch", "duty", "dimensionless", 0.5),
        phase=_get(table, "switch", "phase", "angle", 0.0),
    )

    run = table.get("run", {})
    raw_schedule = run.get("theta_schedule", ["0 deg", "30 deg", "60 deg", "90 deg"])
    if not isinstance(raw_schedule, list):
        raise ConfigurationError("must be a list of angles", field="run.theta_schedule")
    theta_schedule = tuple(
        parse_quantity(entry, "angle", field=f"run.theta_schedule[{i}]")
        for i, entry in enumerate(raw_schedule)
    )

    return ExperimentScenario(
        geometry=geometry,
        fiber=fiber,
        spool1=spool1,
        spool3=spool3,
        kinematics1=kinematics1,
        kinematics3=kinematics3,
        pulse=pulse,
        dispersion1=dispersion1,
        dispersion3=dispersion3,
        thermal=thermal,
        source=source,
        detectors=detectors,
        attenuation=attenuation,
        switch=switch,
        constants=constants,
        theta_schedule=theta_schedule,
        residual_noise_rms=_get(table, "run", "residual_noise_rms", "angle", 0.0),
        polarization_visibility=_get(table, "run", "polarization_visibility", "dimensionless", 1.0),
        noise_low_knee=_get(table, "noise", "low_knee", "frequency", 1e3),
        noise_high_knee=_get(table, "noise", "high_knee", "frequency", 1e5),
        noise_plateau_anchor=_get(table, "noise", "plateau_anchor", "dimensionless", 1e-6),
    )
