"""gravmzi: simulation and design-analysis toolkit for measuring the
gravitationally induced phase shift on single photons in a rotatable 3-arm
fiber Mach-Zehnder interferometer.

Submodules
----------
phase           closed-form gravitational phase and ideal probabilities
earth_rotation  proper time around rotating spools, rotation phase, alignment
dispersion      Gaussian pulse broadening and visibility penalty
noise           arm phase-noise PSD model and band-integrated budgets
counting        attenuation, 3-arm probabilities, Poisson bound, Monte Carlo
scenario/sweep  configuration ingestion, inclination sweeps, file emission
cli             command-line entry points
"""

from .counting import (
    AttenuationModel,
    CountRecord,
    CountRecords,
    DetectorParams,
    PhaseEstimate,
    SourceParams,
    SwitchSchedule,
    SwitchState,
    arm_pair_probabilities,
    attenuation_factor,
    demodulate,
    integration_time,
    simulate_counts,
)
from .dispersion import (
    BeamSplitterCoeffs,
    FiberDispersion,
    PulseModel,
    chirp_phase,
    dispersive_detection_probability,
    spectral_amplitude,
    temporal_width,
    visibility_factor,
)
from .earth_rotation import (
    AlignmentTolerance,
    FrameQuantities,
    PhotonKinematics,
    RotationPhaseParts,
    SpoolGeometry,
    alpha1,
    alpha1_rate,
    frame_quantities,
    proper_time_closed,
    proper_time_numeric,
    required_alignment,
    rotation_phase,
    rotation_phase_oscillating,
    rotation_phase_parts,
    worldline,
)
from .errors import (
    ConfigurationError,
    ConvergenceError,
    GeometryMismatchError,
    GravMziError,
    InsufficientDataError,
    NoSignalError,
    UnsupportedBandError,
)
from .noise import (
    FiberThermalParams,
    NoisePsdModel,
    band_rms_phase,
    choose_modulation_frequency,
    default_psd,
    load_psd_csv,
    noise_margin,
)
from .phase import (
    FiberOptical,
    InterferometerGeometry,
    PhysicalConstants,
    detection_probabilities,
    effective_photon_mass,
    gravitational_phase,
)
from .scenario import ExperimentScenario, load_scenario, baseline_scenario_path
from .sweep import SweepResult, SweepRow, emit, load_sweep_json, run_sweep

__version__ = "0.1.0"
