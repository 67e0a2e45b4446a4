"""Command-line surface tying the pipeline together.

One subcommand per headline artifact:

* verify-force   quadrature-vs-closed-form force convergence study
* predict-delay  force-hypothesis delay line over the current grid
* simulate       time-of-flight sweeps, delay/ballistic fits, verdict
* phase-check    displacement phase vs enclosed-flux phase over a grid

Every command echoes its effective configuration into the output
directory and writes CSV/JSON (and figures) deterministically, so a rerun
with the same config and seed is byte-identical.

Exit codes: 0 success, 1 validation error, 2 numerical convergence
failure, 3 physics-verdict anomaly.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import replace

import numpy as np

from . import analysis, plots
from .config import RunConfig, load_config
from .core import CODATA2018, SolenoidSpec, TrajectorySpec, electron_speed_from_energy, flux
from .errors import ConvergenceError, ValidationError
from .forces import LoopStack, boyer_force_y, loop_force_quadrature
from .kinematics import PhasePair, ab_phase, delta_Y, force_time_delay, semiclassical_phase
from .reporting import atomic_write_text, dump_json, write_csv
from .tof import FORCE_ABSENT, FORCE_PRESENT, histograms_to_json, spectra_to_csv, sweep_current, sweep_energy

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_CONVERGENCE = 2
EXIT_VERDICT = 3


def _prepare(args) -> tuple[RunConfig, str]:
    config = load_config(args.config) if args.config else RunConfig()
    if args.seed is not None:
        if not 0 <= args.seed < 2**64:
            raise ValidationError("--seed must fit in an unsigned 64-bit integer")
        config = replace(config, seed=args.seed)
    if args.mode is not None:
        config = replace(config, force_mode=args.mode)
    if args.out is not None:
        config = replace(config, out_dir=args.out)
    out_dir = config.out_dir
    os.makedirs(out_dir, exist_ok=True)
    atomic_write_text(os.path.join(out_dir, "config_echo.ini"), config.echo())
    return config, out_dir


def cmd_verify_force(args) -> int:
    config, out_dir = _prepare(args)
    radius = config.bore_radius_m
    spacing = 1.0 / config.winding_density_per_m
    current = 1e-3
    speed = electron_speed_from_energy(config.kinetic_energy_ev)

    rows = []
    rel_errors = []
    for d_ratio in config.d_over_radius:
        d = d_ratio * radius
        position = np.array([d / math.sqrt(2.0), d / math.sqrt(2.0), 0.0])
        for length_ratio in config.lengths_over_radius:
            count = max(1, round(length_ratio * radius / spacing))
            stack = LoopStack(
                loop_radius=radius,
                loop_count=count,
                axial_spacing=spacing,
                loop_current=current,
            )
            sample = loop_force_quadrature(
                stack, position, speed, tolerance=config.quadrature_tolerance
            )
            air_flux = flux(SolenoidSpec(
                bore_radius=radius,
                winding_density=config.winding_density_per_m,
                current=current,
                core_permeability=1.0,
                length=stack.length,
            )).flux
            closed = boyer_force_y(air_flux, (position[0], position[1]), speed)
            rel = abs(sample.force[1] - closed) / abs(closed)
            rel_errors.append(rel)
            rows.append([length_ratio, d_ratio, rel])

    write_csv(
        os.path.join(out_dir, "force_convergence.csv"),
        ["stack_length_over_radius", "d_over_radius", "rel_error"],
        rows,
    )
    if config.render_figures:
        by_d = [r[2] for r in sorted(rows, key=lambda r: (r[1], r[0]))]
        plots.save_force_convergence(
            os.path.join(out_dir, "force_convergence.png"),
            sorted(config.lengths_over_radius), sorted(config.d_over_radius), by_d,
        )
    worst = max(rel_errors)
    print(f"force identity: max relative error {worst:.3e} "
          f"(tolerance {config.agreement_tolerance:g})")
    return EXIT_OK if worst <= config.agreement_tolerance else EXIT_CONVERGENCE


def cmd_predict_delay(args) -> int:
    config, out_dir = _prepare(args)
    speed = electron_speed_from_energy(config.kinetic_energy_ev)
    rows = []
    delays = []
    for current in config.currents_a:
        phi = flux(config.solenoid(current)).flux
        delay = config.delay_multiplier * force_time_delay(phi, speed)
        rows.append([current, phi, delay, ab_phase(phi)])
        delays.append(delay)
    write_csv(
        os.path.join(out_dir, "delay_line.csv"),
        ["current_A", "flux_Wb", "delay_s", "ab_phase_rad"],
        rows,
    )
    if config.render_figures:
        plots.save_delay_line(os.path.join(out_dir, "delay_line.png"),
                              list(config.currents_a), delays)
    print(f"delay line: {len(rows)} currents, "
          f"slope {config.delay_multiplier * force_time_delay(flux(config.solenoid(1.0)).flux, speed):.6e} s/A")
    return EXIT_OK


def cmd_simulate(args) -> int:
    config, out_dir = _prepare(args)
    apparatus = config.apparatus()
    speed = electron_speed_from_energy(config.kinetic_energy_ev)
    force_slope = config.delay_multiplier * force_time_delay(
        flux(config.solenoid(1.0)).flux, speed
    )
    exit_code = EXIT_OK

    spectra = sweep_current(apparatus, config.currents_a)
    spectra_to_csv(spectra, os.path.join(out_dir, "spectra_currents.csv"))
    histograms_to_json(spectra, os.path.join(out_dir, "histograms_currents.json"))
    curve = analysis.delay_curve_from_spectra(spectra)
    report = analysis.fit_delay_vs_current(curve, force_slope)
    atomic_write_text(
        os.path.join(out_dir, "fit_current.json"),
        dump_json({
            "force_slope_s_per_A": force_slope,
            "currents_A": list(curve.currents),
            "measured_delays_s": list(curve.measured_delays),
            "delay_errors_s": list(curve.delay_errors),
            "fit": {
                "slope": report.slope,
                "slope_stderr": report.slope_stderr,
                "intercept": report.intercept,
                "z_against_zero": report.z_against_zero,
                "z_against_force": report.z_against_force,
                "verdict": report.verdict,
            },
        }) + "\n",
    )
    if config.render_figures:
        plots.save_delay_curve(
            os.path.join(out_dir, "delay_vs_current.png"),
            curve.currents, curve.measured_delays, curve.delay_errors,
            force_slope, report.verdict,
        )
        plots.save_tof_spectra(os.path.join(out_dir, "tof_spectra.png"), spectra)
    print(f"verdict: {report.verdict} "
          f"(z_zero={report.z_against_zero:.2f}, z_force={report.z_against_force:.2f})")
    if report.verdict == analysis.VERDICT_EXCLUDES_BOTH:
        exit_code = EXIT_VERDICT

    energy_spectra = sweep_energy(apparatus, config.energies_ev)
    spectra_to_csv(energy_spectra, os.path.join(out_dir, "spectra_energies.csv"))
    histograms_to_json(energy_spectra, os.path.join(out_dir, "histograms_energies.json"))
    means = [float(np.mean(s.arrival_times)) for s in energy_spectra]
    errors = []
    for s in energy_spectra:
        n = len(s.arrival_times)
        sem = float(np.std(s.arrival_times, ddof=1)) / math.sqrt(n) if n > 1 else 0.0
        errors.append(sem if sem > 0.0 else 1e-15)
    exponent, length, exponent_stderr = analysis.fit_ballistic(
        config.energies_ev, means, errors
    )
    atomic_write_text(
        os.path.join(out_dir, "fit_ballistic.json"),
        dump_json({
            "energies_eV": list(config.energies_ev),
            "mean_arrivals_s": means,
            "arrival_errors_s": errors,
            "exponent": exponent,
            "exponent_stderr": exponent_stderr,
            "length_estimate_m": length,
        }) + "\n",
    )
    if config.render_figures:
        plots.save_arrival_vs_energy(
            os.path.join(out_dir, "arrival_vs_energy.png"),
            config.energies_ev, means, errors, length, exponent,
        )
    print(f"ballistic fit: exponent {exponent:.6f} +/- {exponent_stderr:.2e}, "
          f"implied length {length:.6f} m")
    return exit_code


def cmd_phase_check(args) -> int:
    config, out_dir = _prepare(args)
    entries = []
    max_dev = 0.0
    spread_max = 0.0
    for energy in config.phase_energies_ev:
        speed = electron_speed_from_energy(energy)
        for current in config.phase_currents_a:
            phi = flux(config.solenoid(current)).flux
            per_d = []
            for d in config.impact_parameters_m:
                window = config.window_speed_ratio * d / speed
                plus = TrajectorySpec(speed, d, side="plus")
                minus = TrajectorySpec(speed, d, side="minus")
                prediction = delta_Y(plus, minus, phi,
                                     time_window=window,
                                     tolerance=config.profile_tolerance)
                pair = PhasePair(
                    ab_phase=ab_phase(phi),
                    semiclassical_phase=semiclassical_phase(
                        CODATA2018.electron_mass * speed, prediction.delta_y_total
                    ),
                )
                deviation = pair.relative_deviation
                max_dev = max(max_dev, deviation)
                per_d.append(abs(prediction.delta_y_total))
                entries.append({
                    "energy_eV": energy,
                    "current_A": current,
                    "impact_parameter_m": d,
                    "flux_Wb": phi,
                    "delta_y_m": prediction.delta_y_total,
                    "time_delay_s": prediction.time_delay,
                    "ab_phase_rad": pair.ab_phase,
                    "semiclassical_phase_rad": pair.semiclassical_phase,
                    "relative_deviation": deviation,
                })
            if phi != 0.0:
                spread = (max(per_d) - min(per_d)) / max(per_d)
                spread_max = max(spread_max, spread)

    atomic_write_text(
        os.path.join(out_dir, "phase_check.json"),
        dump_json({
            "phase_tolerance": config.phase_tolerance,
            "max_relative_deviation": max_dev,
            "max_delta_y_spread_over_d": spread_max,
            "entries": entries,
        }) + "\n",
    )
    if config.render_figures:
        labels = [f"{e['energy_eV']:g}eV/{e['current_A'] * 1e3:g}mA/{e['impact_parameter_m'] * 1e3:g}mm"
                  for e in entries]
        plots.save_phase_deviation(
            os.path.join(out_dir, "phase_check.png"),
            labels, [e["relative_deviation"] for e in entries], config.phase_tolerance,
        )
    print(f"phase equivalence: max deviation {max_dev:.3e} "
          f"(tolerance {config.phase_tolerance:g}), "
          f"max |dY| spread over d {spread_max:.3e}")
    return EXIT_OK if max_dev <= config.phase_tolerance else EXIT_VERDICT


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="path to an INI run configuration")
    common.add_argument("--seed", type=int, help="override the RNG seed")
    common.add_argument("--out", help="override the output directory")
    common.add_argument("--mode", choices=[FORCE_PRESENT, FORCE_ABSENT],
                        help="override the simulated hypothesis")

    parser = argparse.ArgumentParser(
        prog="abtof",
        description="Solenoid force theory and time-of-flight simulation toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("verify-force", parents=[common],
                   help="loop-stack quadrature vs closed-form force").set_defaults(func=cmd_verify_force)
    sub.add_parser("predict-delay", parents=[common],
                   help="force-hypothesis delay line over the current grid").set_defaults(func=cmd_predict_delay)
    sub.add_parser("simulate", parents=[common],
                   help="time-of-flight sweeps plus hypothesis fits").set_defaults(func=cmd_simulate)
    sub.add_parser("phase-check", parents=[common],
                   help="displacement phase vs enclosed-flux phase").set_defaults(func=cmd_phase_check)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ConvergenceError as exc:
        print(f"convergence error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE


if __name__ == "__main__":
    sys.exit(main())
