"""Proper time of a photon spiraling around a rotating fiber spool on the
rotating Earth, and the resulting phase correction between two spools.

Geometry and conventions
------------------------
The photon is treated as a point particle of speed v < c winding around the
symmetry axis of a cylindrical spool of radius b.  In the spool frame its
position is (b cos(alpha(t)), b sin(alpha(t)), v_z t + h_s).  The spool is
tilted by theta' = pi/2 - theta about y, rotated by the azimuth xi about z
(xi = 0 points South, xi = pi/2 East), shifted to the surface of the Earth,
tilted by the colatitude phi' = pi/2 - phi, and finally carried around the
Earth's axis by psi(t) = Omega t + psi_0.  All rotations are standard
counterclockwise matrices; the Earth turns counterclockwise about +z of the
Earth-centered inertial frame.

Constant lab-frame speed fixes the spiral rate to first order in
eps = R Omega / c:

    alpha(t) = alpha_0 + omega t + eps * alpha_1(t),

with alpha_1' given in closed form (a single harmonic at omega plus a
constant).  Integrating the Minkowski norm of the worldline tangent gives the
proper time.  Two routes are implemented:

* ``proper_time_numeric``  - quadrature of the exact tangent norm (all orders
  in eps), stabilized so the tiny rotation correction is not lost to
  cancellation;
* ``proper_time_closed``   - the first-order closed form.  Besides the
  oscillatory terms it carries the entry-angle constants (they survive in the
  two-arm difference) and a secular term proportional to T that the
  constant-speed construction produces whenever sin(xi) != 0.

The two agree to O(eps^2 * T); their difference drops fourfold when Omega is
halved.  The phase between arms is 2 pi c / lambda times the proper-time
difference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import brentq

from .errors import ConfigurationError, ConvergenceError, GeometryMismatchError
from .phase import FiberOptical, InterferometerGeometry, PhysicalConstants, gravitational_phase

__all__ = [
    "SpoolGeometry",
    "PhotonKinematics",
    "FrameQuantities",
    "RotationPhaseParts",
    "AlignmentTolerance",
    "rotation_y",
    "rotation_z",
    "worldline",
    "worldline_velocity",
    "alpha1_rate",
    "alpha1",
    "integrate_alpha1_rk4",
    "spiral_angle",
    "proper_time_numeric",
    "proper_time_closed",
    "proper_time_rotation_correction",
    "rotation_phase",
    "rotation_phase_parts",
    "rotation_phase_oscillating",
    "oscillation_period_optical",
    "oscillation_period_geometric",
    "required_alignment",
    "frame_quantities",
]


@dataclass(frozen=True, slots=True)
class SpoolGeometry:
    """Orientation and location of one fiber spool.

    ``radius`` may be zero only for the degenerate lab worldline used in
    tests; every spiral-rate quantity requires radius > 0.
    """

    radius: float                     # b, m
    inclination: float                # theta, rad, in [0, pi/2]
    latitude: float                   # phi, rad
    azimuth: float = 0.0              # xi, rad; 0 = South, pi/2 = East
    entry_plane: float = 0.0          # alpha_0, rad
    initial_earth_angle: float = 0.0  # psi_0, rad
    axial_offset: float = 0.0         # h_s along the symmetry axis, m

    def __post_init__(self):
        if self.radius < 0:
            raise ConfigurationError("radius must be >= 0", field="spool.radius")
        if not 0.0 <= self.inclination <= math.pi / 2:
            raise ConfigurationError("inclination must be in [0, pi/2]", field="spool.inclination")
        for name in ("latitude", "azimuth", "entry_plane", "initial_earth_angle", "axial_offset"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigurationError("must be finite", field=f"spool.{name}")


@dataclass(frozen=True, slots=True)
class PhotonKinematics:
    """Average motion of the photon around one spool."""

    angular_speed: float   # omega, rad/s
    axial_speed: float     # v_z, m/s
    fiber_length: float    # l_i, geometric m
    group_index: float     # N_i

    def __post_init__(self):
        if not self.angular_speed > 0:
            raise ConfigurationError("angular_speed must be > 0", field="kinematics.angular_speed")
        if self.axial_speed < 0:
            raise ConfigurationError("axial_speed must be >= 0", field="kinematics.axial_speed")
        if not self.fiber_length > 0:
            raise ConfigurationError("fiber_length must be > 0", field="kinematics.fiber_length")
        if self.group_index < 1.0:
            raise ConfigurationError("group_index must be >= 1", field="kinematics.group_index")

    @property
    def optical_length(self) -> float:
        """L_i = N_i * l_i, m."""
        return self.group_index * self.fiber_length

    def transit_time(self, constants: PhysicalConstants = PhysicalConstants()) -> float:
        """Lab time spent in the spool, T = L_i / c."""
        return self.optical_length / constants.c

    @classmethod
    def from_spool_winding(
        cls,
        fiber_length: float,
        group_index: float,
        spool_radius: float,
        axial_travel: float = 0.0,
        constants: PhysicalConstants = PhysicalConstants(),
    ) -> "PhotonKinematics":
        """Derive omega and v_z from the winding geometry.

        The fiber speed c/N is almost entirely transverse (winding pitch is
        micrometres per turn), so omega = c/(N b); the axial speed follows
        from traversing ``axial_travel`` (spool height) in one transit time.
        For a 100 km spool of radius 0.2 m and height 0.2 m this gives
        omega ~ 1e9 rad/s and v_z ~ 4e2 m/s.
        """
        if not spool_radius > 0:
            raise ConfigurationError("spool_radius must be > 0", field="spool.radius")
        omega = constants.c / (group_index * spool_radius)
        transit = group_index * fiber_length / constants.c
        return cls(
            angular_speed=omega,
            axial_speed=abs(axial_travel) / transit,
            fiber_length=fiber_length,
            group_index=group_index,
        )


@dataclass(frozen=True, slots=True)
class FrameQuantities:
    """First-order frame coupling coefficients at one instant.

    a1 is the axial coupling (v_z/c)(n x l).i and a2 the instantaneous
    transverse coupling (b omega/c)(n x l).k(t), with n the Earth axis,
    l the lab radial unit vector, i the spool axis and k(t) the unit vector
    along the transverse velocity.  Signs follow the counterclockwise Earth
    rotation used by ``worldline``.
    """

    epsilon: float
    gamma0: float
    beta0: float
    a1: float
    a2: float


def rotation_y(angle: float) -> np.ndarray:
    """Counterclockwise rotation about the y axis."""
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def rotation_z(angle: float) -> np.ndarray:
    """Counterclockwise rotation about the z axis."""
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def _spool_frame(spool: SpoolGeometry) -> tuple[np.ndarray, np.ndarray]:
    """Spool-to-corotating-frame matrix M and lab radial unit vector ell."""
    theta_p = math.pi / 2 - spool.inclination
    phi_p = math.pi / 2 - spool.latitude
    m = rotation_y(phi_p) @ rotation_z(spool.azimuth) @ rotation_y(theta_p)
    ell = rotation_y(phi_p) @ np.array([0.0, 0.0, 1.0])
    return m, ell


def _beta0_squared(spool: SpoolGeometry, kin: PhotonKinematics, constants: PhysicalConstants) -> float:
    b2 = (spool.radius * kin.angular_speed) ** 2 + kin.axial_speed**2
    beta2 = b2 / constants.c**2
    if beta2 >= 1.0:
        raise ConfigurationError(
            "b^2 omega^2 + v_z^2 must stay below c^2", field="kinematics"
        )
    return beta2


def worldline(
    spool: SpoolGeometry,
    kin: PhotonKinematics,
    alpha,
    t: float,
    constants: PhysicalConstants = PhysicalConstants(),
) -> np.ndarray:
    """Worldline event (ct, x, y, z) in the Earth-centered inertial frame.

    ``alpha`` is a callable t -> spiral angle; use ``spiral_angle`` for the
    constant-lab-speed solution or a plain alpha_0 + omega*t for the
    unperturbed helix.
    """
    m, ell = _spool_frame(spool)
    a = float(alpha(t))
    local = np.array(
        [spool.radius * math.cos(a), spool.radius * math.sin(a), kin.axial_speed * t + spool.axial_offset]
    )
    psi = constants.earth_angular_speed * t + spool.initial_earth_angle
    spatial = rotation_z(psi) @ (m @ local + constants.earth_radius * ell)
    return np.array([constants.c * t, spatial[0], spatial[1], spatial[2]])


def worldline_velocity(
    spool: SpoolGeometry,
    kin: PhotonKinematics,
    alpha,
    alpha_rate,
    t: float,
    constants: PhysicalConstants = PhysicalConstants(),
) -> np.ndarray:
    """Tangent (c, dx/dt) of the worldline; ``alpha_rate`` is d(alpha)/dt."""
    m, ell = _spool_frame(spool)
    a = float(alpha(t))
    adot = float(alpha_rate(t))
    b = spool.radius
    local = np.array([b * math.cos(a), b * math.sin(a), kin.axial_speed * t + spool.axial_offset])
    local_dot = np.array([-b * math.sin(a) * adot, b * math.cos(a) * adot, kin.axial_speed])
    w = m @ local + constants.earth_radius * ell
    psi = constants.earth_angular_speed * t + spool.initial_earth_angle
    rz = rotation_z(psi)
    omega_e = constants.earth_angular_speed
    # d/dt [Rz(psi) w] = Omega z x (Rz w) + Rz w'
    spatial = rz @ (omega_e * np.array([-w[1], w[0], 0.0]) + m @ local_dot)
    return np.array([constants.c, spatial[0], spatial[1], spatial[2]])


def _rate_scale(spool: SpoolGeometry, kin: PhotonKinematics, constants: PhysicalConstants) -> float:
    """K = (b^2 omega^2 + v_z^2) / (c b), the spiral-rate correction scale."""
    if not spool.radius > 0:
        raise ConfigurationError("spiral-rate quantities need radius > 0", field="spool.radius")
    return ((spool.radius * kin.angular_speed) ** 2 + kin.axial_speed**2) / (
        constants.c * spool.radius
    )


def alpha1_rate(
    t,
    spool: SpoolGeometry,
    kin: PhotonKinematics,
    constants: PhysicalConstants = PhysicalConstants(),
):
    """First-order spiral-rate correction alpha_1'(t), rad/s.

    Enforces constant photon speed in the lab frame to first order in
    eps = R Omega / c.  Vectorized over ``t``.
    """
    k = _rate_scale(spool, kin, constants)
    phi_p = math.pi / 2 - spool.latitude
    theta_p = math.pi / 2 - spool.inclination
    xi = spool.azimuth
    phase = kin.angular_speed * np.asarray(t, dtype=float) + spool.entry_plane
    out = -k * math.sin(phi_p) * (
        math.cos(xi) * np.cos(phase)
        + math.cos(theta_p) * math.sin(xi) * (1.0 - np.sin(phase))
    )
    return out if np.ndim(t) else float(out)


def alpha1(
    t,
    spool: SpoolGeometry,
    kin: PhotonKinematics,
    constants: PhysicalConstants = PhysicalConstants(),
):
    """Accumulated spiral-angle correction alpha_1(t), with alpha_1(0) = 0.

    Exact antiderivative of ``alpha1_rate`` (the forcing is a single harmonic,
    so no numeric integration is needed).  Vectorized over ``t``.
    """
    k = _rate_scale(spool, kin, constants)
    om = kin.angular_speed
    phi_p = math.pi / 2 - spool.latitude
    theta_p = math.pi / 2 - spool.inclination
    xi = spool.azimuth
    a0 = spool.entry_plane
    tt = np.asarray(t, dtype=float)
    s_term = (np.sin(om * tt + a0) - math.sin(a0)) / om
    c_term = (np.cos(om * tt + a0) - math.cos(a0)) / om
    out = -k * math.sin(phi_p) * (
        math.cos(xi) * s_term + math.cos(theta_p) * math.sin(xi) * (tt + c_term)
    )
    return out if np.ndim(t) else float(out)


def integrate_alpha1_rk4(
    spool: SpoolGeometry,
    kin: PhotonKinematics,
    t_end: float,
    steps_per_turn: int = 64,
    constants: PhysicalConstants = PhysicalConstants(),
) -> float:
    """alpha_1(t_end) by fixed-step RK4 on ``alpha1_rate``.

    Retained as an independent check of the closed-form ``alpha1``; step is
    (2 pi / omega) / steps_per_turn.
    """
    if steps_per_turn < 4:
        raise ConfigurationError("steps_per_turn must be >= 4", field="steps_per_turn")
    h = (2.0 * math.pi / kin.angular_speed) / steps_per_turn
    n = max(1, int(math.ceil(abs(t_end) / h)))
    h = t_end / n
    rate = lambda tt: alpha1_rate(tt, spool, kin, constants)
    y = 0.0
    t = 0.0
    for _ in range(n):
        k1 = rate(t)
        k2 = rate(t + 0.5 * h)
        k4 = rate(t + h)
        # integrand has no y-dependence, so k3 = k2
        y += h / 6.0 * (k1 + 4.0 * k2 + k4)
        t += h
    return y


def spiral_angle(
    t,
    spool: SpoolGeometry,
    kin: PhotonKinematics,
    constants: PhysicalConstants = PhysicalConstants(),
):
    """alpha(t) = alpha_0 + omega t + eps alpha_1(t), the constant-lab-speed angle."""
    eps = constants.epsilon
    return spool.entry_plane + kin.angular_speed * np.asarray(t, dtype=float) + eps * alpha1(
        t, spool, kin, constants
    )


def _speed_deviation(
    t: np.ndarray,
    spool: SpoolGeometry,
    kin: PhotonKinematics,
    constants: PhysicalConstants,
) -> tuple[np.ndarray, float]:
    """(beta^2(t) - beta0^2, beta0^2), computed without cancellation.

    beta^2 c^2 = b^2 alpha'^2 + v_z^2 + 2 Omega (z x w).v_loc + Omega^2 |z x w|^2
    in the corotating basis; only the deviation from the constant part is
    assembled, keeping the O(eps) pieces at full relative precision.
    """
    m, ell = _spool_frame(spool)
    b = spool.radius
    om = kin.angular_speed
    vz = kin.axial_speed
    c = constants.c
    omega_e = constants.earth_angular_speed
    eps = constants.epsilon
    beta02 = _beta0_squared(spool, kin, constants)

    if b > 0:
        a1r = alpha1_rate(t, spool, kin, constants)
        a1v = alpha1(t, spool, kin, constants)
    else:
        a1r = np.zeros_like(t)
        a1v = np.zeros_like(t)
    alpha = spool.entry_plane + om * t + eps * a1v
    alphadot_dev = eps * a1r  # alpha' - omega

    ca, sa = np.cos(alpha), np.sin(alpha)
    zeros = np.zeros_like(t)
    jv = m @ np.vstack([ca, sa, zeros])
    kv = m @ np.vstack([-sa, ca, zeros])
    iv = (m @ np.array([0.0, 0.0, 1.0]))[:, None]

    w = constants.earth_radius * ell[:, None] + (vz * t + spool.axial_offset) * iv + b * jv
    v_loc = vz * iv + b * (om + alphadot_dev) * kv
    z_cross_w = np.vstack([-w[1], w[0], zeros])

    local_dev = b * b * alphadot_dev * (2.0 * om + alphadot_dev)  # b^2 (alpha'^2 - omega^2)
    cross = 2.0 * omega_e * np.einsum("ij,ij->j", z_cross_w, v_loc)
    quad = omega_e**2 * np.einsum("ij,ij->j", z_cross_w, z_cross_w)
    return (local_dev + cross + quad) / c**2, beta02


def proper_time_numeric(
    spool: SpoolGeometry,
    kin: PhotonKinematics,
    transit_time: float | None = None,
    steps: int = 2,
    rel_tol: float = 1e-15,
    max_refinements: int = 16,
    constants: PhysicalConstants = PhysicalConstants(),
) -> float:
    """Proper time by quadrature of the exact worldline tangent norm.

    Composite 16-point Gauss-Legendre on the deviation integrand
    sqrt(1 - beta^2(t)) - sqrt(1 - beta0^2), refined by panel doubling until
    two successive estimates agree to ``rel_tol`` relatively.  Panels start at
    max(steps, 2 per spiral turn) so the harmonic forcing is always resolved.

    Raises ConvergenceError if the refinement budget is exhausted.
    """
    if steps < 2:
        raise ConfigurationError("steps must be >= 2", field="steps")
    if transit_time is None:
        transit_time = kin.transit_time(constants)
    big_t = float(transit_time)
    beta02 = _beta0_squared(spool, kin, constants)
    gamma0_inv = math.sqrt(1.0 - beta02)

    turns = kin.angular_speed * big_t / (2.0 * math.pi)
    panels = max(int(steps), 2 * int(math.ceil(turns)), 2)
    nodes, weights = np.polynomial.legendre.leggauss(16)

    def estimate(n_panels: int) -> float:
        edges = np.linspace(0.0, big_t, n_panels + 1)
        lo, hi = edges[:-1], edges[1:]
        t = 0.5 * (lo + hi)[:, None] + 0.5 * (hi - lo)[:, None] * nodes[None, :]
        w = (0.5 * (hi - lo))[:, None] * np.broadcast_to(weights, t.shape)
        dev, b02 = _speed_deviation(t.ravel(), spool, kin, constants)
        g0 = math.sqrt(1.0 - b02)
        integrand = -dev / (np.sqrt(1.0 - (b02 + dev)) + g0)
        return gamma0_inv * big_t + math.fsum(integrand * w.ravel())

    previous = estimate(panels)
    for _ in range(max_refinements):
        panels *= 2
        current = estimate(panels)
        if abs(current - previous) <= rel_tol * abs(current):
            return current
        previous = current
    raise ConvergenceError(
        f"proper_time_numeric did not converge to rel_tol={rel_tol} "
        f"within {max_refinements} refinements"
    )


def proper_time_rotation_correction(
    spool: SpoolGeometry,
    kin: PhotonKinematics,
    transit_time: float | None = None,
    constants: PhysicalConstants = PhysicalConstants(),
) -> float:
    """First-order Earth-rotation part of the proper time: tau - T/gamma0.

    Exposed separately because it is ~1e-15 s against tau ~ 1e-4 s; forming
    phase differences from it avoids catastrophic cancellation.
    """
    if transit_time is None:
        transit_time = kin.transit_time(constants)
    big_t = float(transit_time)
    b = spool.radius
    om = kin.angular_speed
    vz = kin.axial_speed
    c = constants.c
    beta02 = _beta0_squared(spool, kin, constants)
    gamma0_inv = math.sqrt(1.0 - beta02)
    cos_lat = math.cos(spool.latitude)  # sin(phi') with phi' = pi/2 - phi
    sin_th = math.sin(spool.inclination)  # cos(theta')
    cos_th = math.cos(spool.inclination)  # sin(theta')
    xi = spool.azimuth
    a0 = spool.entry_plane
    r_om = constants.earth_radius * constants.earth_angular_speed

    oscillatory = (b * r_om / c**2) * cos_lat * (
        math.cos(xi) * (math.sin(om * big_t + a0) - math.sin(a0))
        + sin_th * math.sin(xi) * (math.cos(om * big_t + a0) - math.cos(a0))
    )
    secular = (
        (r_om / c**2)
        / gamma0_inv
        * cos_lat
        * math.sin(xi)
        * (vz * cos_th - b * om * beta02 * sin_th)
        * big_t
    )
    return -gamma0_inv * oscillatory - secular


def proper_time_closed(
    spool: SpoolGeometry,
    kin: PhotonKinematics,
    transit_time: float | None = None,
    constants: PhysicalConstants = PhysicalConstants(),
) -> float:
    """Closed-form proper time, first order in eps = R Omega / c."""
    if transit_time is None:
        transit_time = kin.transit_time(constants)
    beta02 = _beta0_squared(spool, kin, constants)
    return math.sqrt(1.0 - beta02) * float(transit_time) + proper_time_rotation_correction(
        spool, kin, transit_time, constants
    )


@dataclass(frozen=True, slots=True)
class RotationPhaseParts:
    """Decomposition of the two-spool phase difference, radians.

    ``linear`` is the ordinary interferometric term gamma0^-1 2 pi dl/lambda,
    ``oscillating`` the entry/exit-plane coupling to the Earth's rotation, and
    ``secular`` the transit-time-proportional remainder (vanishes at
    xi = n pi).  Exposing the parts keeps each at full relative precision;
    summing tau values of order 1e-4 s to extract a 1e-16 s difference would
    not.
    """

    linear: float
    oscillating: float
    secular: float

    @property
    def total(self) -> float:
        return self.linear + self.oscillating + self.secular


_SHARED_FIELDS = (
    ("radius", "spool.radius"),
    ("inclination", "spool.inclination"),
    ("latitude", "spool.latitude"),
    ("azimuth", "spool.azimuth"),
    ("initial_earth_angle", "spool.initial_earth_angle"),
)


def _check_shared_geometry(
    spool1: SpoolGeometry,
    kin1: PhotonKinematics,
    spool3: SpoolGeometry,
    kin3: PhotonKinematics,
    rel_tol: float = 1e-12,
) -> None:
    for attr, label in _SHARED_FIELDS:
        a, b = getattr(spool1, attr), getattr(spool3, attr)
        if not math.isclose(a, b, rel_tol=rel_tol, abs_tol=rel_tol):
            raise GeometryMismatchError(f"{label} differs between spools: {a} vs {b}")
    for attr in ("angular_speed", "axial_speed"):
        a, b = getattr(kin1, attr), getattr(kin3, attr)
        if not math.isclose(a, b, rel_tol=rel_tol, abs_tol=rel_tol):
            raise GeometryMismatchError(f"kinematics.{attr} differs between spools: {a} vs {b}")


def rotation_phase_parts(
    spool1: SpoolGeometry,
    kin1: PhotonKinematics,
    spool3: SpoolGeometry,
    kin3: PhotonKinematics,
    wavelength: float,
    constants: PhysicalConstants = PhysicalConstants(),
) -> RotationPhaseParts:
    """Earth-rotation phase between spools 1 and 3, decomposed.

    The spools must share radius, angular speed, axial speed and orientation;
    they may differ in optical length and entry plane.  The total equals
    (2 pi c / lambda) (tau_1 - tau_3) built from ``proper_time_closed``.
    """
    if not wavelength > 0:
        raise ConfigurationError("wavelength must be > 0", field="wavelength")
    _check_shared_geometry(spool1, kin1, spool3, kin3)
    c = constants.c
    b = spool1.radius
    om = kin1.angular_speed
    vz = kin1.axial_speed
    beta02 = _beta0_squared(spool1, kin1, constants)
    gamma0_inv = math.sqrt(1.0 - beta02)
    l1, l3 = kin1.optical_length, kin3.optical_length
    delta_l = l1 - l3
    cos_lat = math.cos(spool1.latitude)
    sin_th = math.sin(spool1.inclination)
    cos_th = math.cos(spool1.inclination)
    xi = spool1.azimuth
    a1, a3 = spool1.entry_plane, spool3.entry_plane
    r_om = constants.earth_radius * constants.earth_angular_speed

    x1, x3 = om * l1 / c, om * l3 / c
    f_term = math.sin(x1 + a1) - math.sin(x3 + a3) + math.sin(a3) - math.sin(a1)
    fp_term = math.cos(x1 + a1) - math.cos(x3 + a3) + math.cos(a3) - math.cos(a1)

    linear = gamma0_inv * 2.0 * math.pi * delta_l / wavelength
    oscillating = (
        -gamma0_inv
        * (2.0 * math.pi * b * r_om / (wavelength * c))
        * cos_lat
        * (math.cos(xi) * f_term + sin_th * math.sin(xi) * fp_term)
    )
    secular = (
        -(2.0 * math.pi * r_om / (wavelength * c**2))
        / gamma0_inv
        * cos_lat
        * math.sin(xi)
        * (vz * cos_th - b * om * beta02 * sin_th)
        * delta_l
    )
    return RotationPhaseParts(linear=linear, oscillating=oscillating, secular=secular)


def rotation_phase(
    spool1: SpoolGeometry,
    kin1: PhotonKinematics,
    spool3: SpoolGeometry,
    kin3: PhotonKinematics,
    wavelength: float,
    constants: PhysicalConstants = PhysicalConstants(),
) -> float:
    """Total Earth-rotation phase difference between spools 1 and 3, radians."""
    return rotation_phase_parts(spool1, kin1, spool3, kin3, wavelength, constants).total


def rotation_phase_oscillating(
    delta_l_optical: float,
    l_sum_optical: float,
    spool: SpoolGeometry,
    kin: PhotonKinematics,
    wavelength: float,
    constants: PhysicalConstants = PhysicalConstants(),
    azimuth_tol: float = 1e-9,
) -> float:
    """Oscillating phase term in product form, for xi = n pi and zero entry planes.

    Evaluates -cos(xi) sqrt(1-beta0^2) (4 pi b R Omega)/(lambda c) cos(phi)
    sin(omega dl / 2c) cos(omega l / 2c), with dl = L1 - L3 and l = L1 + L3
    both optical lengths.  The sign is fixed so the full two-spool phase is
    linear term + this term; see also ``rotation_phase_parts``.
    """
    xi = spool.azimuth
    n_half_turns = round(xi / math.pi)
    if abs(xi - n_half_turns * math.pi) > azimuth_tol:
        raise ConfigurationError(
            "product form requires azimuth = n*pi (spool axis in the South-North plane)",
            field="spool.azimuth",
        )
    if abs(spool.entry_plane) > azimuth_tol:
        raise ConfigurationError("product form requires entry_plane = 0", field="spool.entry_plane")
    if not wavelength > 0:
        raise ConfigurationError("wavelength must be > 0", field="wavelength")
    c = constants.c
    beta02 = _beta0_squared(spool, kin, constants)
    sign = math.cos(xi)  # +1 for xi = 2n pi, -1 for xi = (2n+1) pi
    om = kin.angular_speed
    amplitude = (
        math.sqrt(1.0 - beta02)
        * (4.0 * math.pi * spool.radius * constants.earth_radius * constants.earth_angular_speed)
        / (wavelength * c)
        * math.cos(spool.latitude)
    )
    return -sign * amplitude * math.sin(om * delta_l_optical / (2.0 * c)) * math.cos(
        om * l_sum_optical / (2.0 * c)
    )


def oscillation_period_optical(kin: PhotonKinematics, constants: PhysicalConstants = PhysicalConstants()) -> float:
    """Period of the oscillating term in optical path difference: 4 pi c / omega.

    Equals 4 pi N b when omega = c/(N b); the frequently quoted "4 pi b" is
    this period expressed in geometric length (see
    ``oscillation_period_geometric``).
    """
    return 4.0 * math.pi * constants.c / kin.angular_speed


def oscillation_period_geometric(kin: PhotonKinematics, constants: PhysicalConstants = PhysicalConstants()) -> float:
    """Oscillation period in geometric fiber length: 4 pi c / (omega N)."""
    return oscillation_period_optical(kin, constants) / kin.group_index


@dataclass(frozen=True, slots=True)
class AlignmentTolerance:
    """Exit-plane alignment budget for keeping the rotation phase below the
    gravitational one.

    ``path_bound`` is the geometric fiber-length mismatch in meters,
    ``angle_bound`` = path_bound / b the corresponding exit-plane angle.
    ``path_bound_optical`` is the same bound in optical length (N times
    larger).  ``saturated`` marks the degenerate case where the gravitational
    phase exceeds the full oscillation amplitude; the bound is then the
    quarter-period extremum position.
    """

    path_bound: float
    angle_bound: float
    path_bound_optical: float
    saturated: bool = False


def required_alignment(
    geometry: InterferometerGeometry,
    fiber: FiberOptical,
    spool: SpoolGeometry,
    kin: PhotonKinematics,
    constants: PhysicalConstants = PhysicalConstants(),
) -> AlignmentTolerance:
    """Path-difference and exit-plane angle bounds from |osc(dl)| = dphi_grav.

    The oscillation is taken at its envelope, |cos(omega l / 2c)| = 1: the
    sum-length cosine swings through its full range under sub-ppm changes of
    omega or fiber length, so a design tolerance must assume the worst case.
    Root-finding is bracketed on the first monotone branch of |sin|, xtol
    1e-12 m, and solved in optical length; the returned bound is geometric
    (optical / N) and the angle is geometric / b.
    """
    target = gravitational_phase(geometry, fiber, constants)
    if not spool.radius > 0:
        raise ConfigurationError("alignment bound needs radius > 0", field="spool.radius")
    if target == 0.0:
        return AlignmentTolerance(0.0, 0.0, 0.0)

    envelope_spool = replace(spool, azimuth=0.0, entry_plane=0.0)
    quarter_period = math.pi * constants.c / kin.angular_speed  # |sin| extremum, optical

    def objective(dl_optical: float) -> float:
        # l_sum = 0 puts the sum-length cosine at its envelope value 1
        osc = rotation_phase_oscillating(dl_optical, 0.0, envelope_spool, kin, fiber.wavelength, constants)
        return abs(osc) - abs(target)

    if objective(quarter_period) <= 0.0:
        optical = quarter_period
        saturated = True
    else:
        optical = brentq(objective, 0.0, quarter_period, xtol=1e-12)
        saturated = False
    geometric = optical / kin.group_index
    return AlignmentTolerance(
        path_bound=geometric,
        angle_bound=geometric / spool.radius,
        path_bound_optical=optical,
        saturated=saturated,
    )


def frame_quantities(
    spool: SpoolGeometry,
    kin: PhotonKinematics,
    t: float,
    constants: PhysicalConstants = PhysicalConstants(),
) -> FrameQuantities:
    """First-order coupling coefficients from the unit-vector formulation.

    Built from n (Earth axis), ell (lab radial), i (spool axis) and k(t)
    (transverse velocity direction at the zeroth-order angle omega t +
    alpha_0); reproduces -eta(xdot, xdot_lab)/c^2 = 1 - eps (a1 + a2) to
    O(eps^2).
    """
    m, ell = _spool_frame(spool)
    beta02 = _beta0_squared(spool, kin, constants)
    n_vec = np.array([0.0, 0.0, 1.0])
    i_vec = m @ np.array([0.0, 0.0, 1.0])
    a = spool.entry_plane + kin.angular_speed * t
    k_vec = m @ np.array([-math.sin(a), math.cos(a), 0.0])
    n_cross_ell = np.cross(n_vec, ell)
    c = constants.c
    return FrameQuantities(
        epsilon=constants.epsilon,
        gamma0=1.0 / math.sqrt(1.0 - beta02),
        beta0=math.sqrt(beta02),
        a1=kin.axial_speed / c * float(n_cross_ell @ i_vec),
        a2=spool.radius * kin.angular_speed / c * float(n_cross_ell @ k_vec),
    )
