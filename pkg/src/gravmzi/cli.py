"""Command-line interface: one subcommand per analysis surface.

    gravmzi phase            gravitational phase and quadrature probabilities
    gravmzi earth-rotation   Earth-rotation phase decomposition per angle
    gravmzi dispersion       pulse widths and visibility penalty
    gravmzi noise            arm-noise PSD table, margin, modulation choice
    gravmzi integration-time Poisson-limited times per detector channel
    gravmzi montecarlo       seeded counting run plus demodulated estimate
    gravmzi sweep            full inclination sweep
    gravmzi tolerances       exit-plane alignment bounds

All commands accept --scenario (TOML, defaults to the bundled baseline),
--out (file or "-" for stdout) and --format csv|json.  Exit code 0 on
success, 2 on a diagnosed configuration or data error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import replace

from . import counting, sweep
from .dispersion import (
    dispersive_detection_probability,
    temporal_width,
    visibility_factor,
)
from .earth_rotation import (
    proper_time_closed,
    required_alignment,
    rotation_phase_parts,
)
from .errors import GravMziError
from .noise import band_rms_phase, choose_modulation_frequency, noise_margin
from .phase import detection_probabilities, effective_photon_mass
from .scenario import load_scenario
from .sweep import arm_pair_phases, open_output, scenario_visibility
from .units import parse_quantity

__all__ = ["main", "build_parser"]


def _write_table(path, fmt: str, columns: list[str], rows: list[dict], schema: str) -> None:
    with open_output(path) as fh:
        if fmt == "csv":
            fh.write(",".join(columns) + "\n")
            for row in rows:
                fh.write(",".join(sweep._format(row[c]) for c in columns) + "\n")
        else:
            json.dump({"schema": schema, "rows": rows}, fh, indent=1)
            fh.write("\n")


def _thetas(args, scenario) -> list[float]:
    if args.theta is None:
        return list(scenario.theta_schedule)
    return [
        parse_quantity(part.strip(), "angle", field="--theta")
        for part in args.theta.split(",")
        if part.strip()
    ]


def _cmd_phase(args) -> int:
    sc = load_scenario(args.scenario)
    mass = effective_photon_mass(sc.fiber.wavelength, sc.constants)
    rows = []
    for theta in _thetas(args, sc):
        p12, p13 = arm_pair_phases(sc, theta)
        plus, minus = detection_probabilities(p12, math.pi / 2, base=0.5)
        rows.append(
            {
                "theta": theta,
                "phase12": p12,
                "phase13": p13,
                "p_plus_quadrature": plus,
                "p_minus_quadrature": minus,
                "effective_photon_mass": mass,
            }
        )
    _write_table(args.out, args.format, list(rows[0]), rows, "gravmzi.phase/1")
    return 0


def _cmd_earth_rotation(args) -> int:
    sc = load_scenario(args.scenario)
    rows = []
    for theta in _thetas(args, sc):
        s = sc.at_inclination(theta)
        parts = rotation_phase_parts(
            s.spool1, s.kinematics1, s.spool3, s.kinematics3, s.fiber.wavelength, s.constants
        )
        rows.append(
            {
                "theta": theta,
                "rotation_linear": parts.linear,
                "rotation_oscillating": parts.oscillating,
                "rotation_secular": parts.secular,
                "rotation_total": parts.total,
                "proper_time_1": proper_time_closed(s.spool1, s.kinematics1, constants=s.constants),
                "proper_time_3": proper_time_closed(s.spool3, s.kinematics3, constants=s.constants),
            }
        )
    _write_table(args.out, args.format, list(rows[0]), rows, "gravmzi.earth_rotation/1")
    return 0


def _cmd_dispersion(args) -> int:
    sc = load_scenario(args.scenario)
    p12, _ = arm_pair_phases(sc, sc.geometry.inclination)
    tau1 = temporal_width(sc.pulse, sc.dispersion1)
    tau3 = temporal_width(sc.pulse, sc.dispersion3)
    vis = visibility_factor(tau1, tau3, p12, sc.pulse.central_frequency)
    plus_disp, minus_disp = dispersive_detection_probability(
        tau1, tau3, p12, math.pi / 2, sc.pulse.central_frequency
    )
    plus_ideal, minus_ideal = detection_probabilities(p12, math.pi / 2, base=0.5)
    rows = [
        {
            "tau0": sc.pulse.initial_temporal_width,
            "tau1": tau1,
            "tau3": tau3,
            "visibility": vis,
            "p_plus": plus_disp,
            "p_minus": minus_disp,
            "p_plus_deviation": plus_disp - plus_ideal,
            "p_minus_deviation": minus_disp - minus_ideal,
        }
    ]
    _write_table(args.out, args.format, list(rows[0]), rows, "gravmzi.dispersion/1")
    return 0


def _cmd_noise(args) -> int:
    sc = load_scenario(args.scenario)
    psd = sc.noise_psd()
    sweep.emit(psd, args.format, args.out)
    p12, _ = arm_pair_phases(sc, sc.geometry.inclination)
    f_mod = sc.switch.modulation_frequency
    rms = band_rms_phase(psd, f_mod - 0.5, f_mod + 0.5)
    margin = noise_margin(p12, rms)
    best = choose_modulation_frequency(psd, 1e3, 1e6)
    print(
        f"rms in 1 Hz band at {f_mod:g} Hz: {rms:.3e} rad; "
        f"margin {margin.ratio:.1f} ({'pass' if margin.passed else 'fail'}); "
        f"preferred modulation frequency {best:.3e} Hz",
        file=sys.stderr,
    )
    return 0


def _cmd_integration_time(args) -> int:
    sc = load_scenario(args.scenario)
    thetas = _thetas(args, sc)
    theta = thetas[-1]
    p12, p13 = arm_pair_phases(sc, theta)
    vis = scenario_visibility(sc, p12)
    a = counting.attenuation_factor(sc.attenuation)
    table = counting.integration_time_table(p12, p13, sc.source, sc.detectors, a, vis, theta)
    rows = [
        {
            "detector": row.detector,
            "switch_state": row.switch_state.value,
            "calibration_probability": row.calibration_probability,
            "probability": row.probability,
            "time_s": row.time,
            "time_days": row.time / 86400.0,
        }
        for row in table
    ]
    _write_table(args.out, args.format, list(rows[0]), rows, "gravmzi.integration_time/1")
    required = counting.max_finite_time(table)
    print(f"required integration time at theta={theta:.4f} rad: "
          f"{required:.4g} s ({required / 86400.0:.3g} days)", file=sys.stderr)
    return 0


def _cmd_montecarlo(args) -> int:
    sc = load_scenario(args.scenario)
    if args.theta is not None:
        thetas = _thetas(args, sc)
        sc = sc.at_inclination(thetas[-1])
    duration = parse_quantity(args.duration, "time", field="--duration")
    bin_width = (
        parse_quantity(args.bin_width, "time", field="--bin-width")
        if args.bin_width is not None
        else None
    )
    records = sweep.simulate_scenario_counts(sc, duration, seed=args.seed, bin_width=bin_width)
    if args.records is not None:
        sweep.emit(records, "csv", args.records)
    estimate = sweep.demodulate_scenario(sc, records)
    p12, _ = arm_pair_phases(sc, sc.geometry.inclination)
    doc = {
        "schema": "gravmzi.montecarlo/1",
        "seed": args.seed,
        "duration": duration,
        "phase_estimate": estimate.phase,
        "sigma": estimate.sigma,
        "significant": bool(abs(estimate.phase) > estimate.sigma),
        "configured_phase12": p12,
    }
    with open_output(args.out) as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")
    return 0


def _cmd_sweep(args) -> int:
    sc = load_scenario(args.scenario)
    if args.theta is not None:
        sc = replace(sc, theta_schedule=tuple(_thetas(args, sc)))
    result = sweep.run_sweep(sc)
    sweep.emit(result, args.format, args.out)
    return 0


def _cmd_tolerances(args) -> int:
    sc = load_scenario(args.scenario)
    tol = required_alignment(sc.geometry, sc.fiber, sc.spool1, sc.kinematics1, sc.constants)
    rows = [
        {
            "path_bound_m": tol.path_bound,
            "path_bound_optical_m": tol.path_bound_optical,
            "angle_bound_rad": tol.angle_bound,
            "angle_bound_mdeg": math.degrees(tol.angle_bound) * 1e3,
            "saturated": tol.saturated,
        }
    ]
    _write_table(args.out, args.format, list(rows[0]), rows, "gravmzi.tolerances/1")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gravmzi",
        description="Gravitational-phase fiber interferometer design toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, seed: bool = False, duration: bool = False):
        p.add_argument("--scenario", default=None, help="scenario TOML (default: bundled baseline)")
        p.add_argument("--out", default="-", help="output path, '-' for stdout")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--theta", default=None,
                       help="comma-separated angles, e.g. '0 deg,45 deg,90 deg'")
        if seed:
            p.add_argument("--seed", type=int, default=0)
        if duration:
            p.add_argument("--duration", default="600 s", help="run length, e.g. '2 h'")

    common(sub.add_parser("phase", help="gravitational phase per angle"))
    common(sub.add_parser("earth-rotation", help="Earth-rotation phase decomposition"))
    common(sub.add_parser("dispersion", help="pulse widths and visibility"))
    common(sub.add_parser("noise", help="arm-noise PSD table and margin"))
    common(sub.add_parser("integration-time", help="Poisson-limited times per channel"))
    mc = sub.add_parser("montecarlo", help="seeded counting run and phase estimate")
    common(mc, seed=True, duration=True)
    mc.add_argument("--records", default=None, help="also dump count records CSV here")
    mc.add_argument("--bin-width", default=None, help="bin width, e.g. '1 s' (default: switch half-period)")
    common(sub.add_parser("sweep", help="full inclination sweep"))
    common(sub.add_parser("tolerances", help="exit-plane alignment bounds"))
    return parser


_COMMANDS = {
    "phase": _cmd_phase,
    "earth-rotation": _cmd_earth_rotation,
    "dispersion": _cmd_dispersion,
    "noise": _cmd_noise,
    "integration-time": _cmd_integration_time,
    "montecarlo": _cmd_montecarlo,
    "sweep": _cmd_sweep,
    "tolerances": _cmd_tolerances,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except GravMziError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
