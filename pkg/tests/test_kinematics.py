"""Velocity perturbation, displacement, delay and phase identities."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from abtof import (
    CODATA2018,
    TrajectorySpec,
    ValidationError,
    WindowError,
    ab_phase,
    boyer_force_y,
    delta_Y,
    electron_speed_from_energy,
    flux,
    force_time_delay,
    image_charge_delay,
    experiment_solenoid,
    path_displacement,
    phase_equivalence_report,
    semiclassical_phase,
    velocity_perturbation,
)

Q = CODATA2018.electron_charge_magnitude
M = CODATA2018.electron_mass
HBAR = CODATA2018.reduced_planck


@pytest.fixture()
def phi_1ma(solenoid_1ma):
    return flux(solenoid_1ma).flux


def test_zero_flux_gives_zero_profile(v40):
    traj = TrajectorySpec(v40, 5e-3)
    profile = velocity_perturbation(traj, 0.0)
    assert np.all(profile.delta_v_y == 0.0)
    assert path_displacement(profile) == 0.0


def test_terminal_velocity_change_vanishes(v40, phi_1ma):
    profile = velocity_perturbation(TrajectorySpec(v40, 5e-3), phi_1ma)
    peak = np.max(np.abs(profile.delta_v_y))
    assert abs(profile.delta_v_y[-1]) < 1e-6 * peak


def test_peak_velocity_change_at_closest_approach(v40, phi_1ma):
    # Brute-force scan of the profile: the extremum must sit at t = 0.
    profile = velocity_perturbation(TrajectorySpec(v40, 5e-3), phi_1ma)
    idx = int(np.argmax(np.abs(profile.delta_v_y)))
    assert profile.times[idx] == 0.0
    # and match the closed-form peak value q Phi / (2 pi m d)
    assert_allclose(np.abs(profile.delta_v_y[idx]),
                    Q * phi_1ma / (2 * math.pi * M * 5e-3), rtol=1e-4)


def test_displacement_matches_half_total(v40, phi_1ma):
    profile = velocity_perturbation(TrajectorySpec(v40, 5e-3, side="plus"), phi_1ma)
    dy = path_displacement(profile)
    assert_allclose(abs(dy), phi_1ma * Q / (2 * M * v40), rtol=1e-3)


def test_displacement_brute_force_oracle(v40, phi_1ma):
    # Independent route: double cumulative Simpson on a uniform time grid,
    # integrating the recoil force directly.
    d = 5e-3
    window = 1e4 * d / v40
    t = np.linspace(-window, window, 2_000_001)
    force = boyer_force_y(phi_1ma, (d, v40 * t), v40)
    dv = np.concatenate([[0.0], np.cumsum(0.5 * np.diff(t) * (force[1:] + force[:-1]))])
    dv *= -1.0 / M
    dy_oracle = float(np.trapezoid(dv, t))
    profile = velocity_perturbation(TrajectorySpec(v40, d, side="plus"), phi_1ma)
    assert_allclose(path_displacement(profile), dy_oracle, rtol=1e-4)


def test_sides_are_antisymmetric(v40, phi_1ma):
    plus = path_displacement(velocity_perturbation(
        TrajectorySpec(v40, 5e-3, side="plus"), phi_1ma))
    minus = path_displacement(velocity_perturbation(
        TrajectorySpec(v40, 5e-3, side="minus"), phi_1ma))
    assert_allclose(minus, -plus, rtol=1e-12)


def test_window_error_raised_when_too_small(v40, phi_1ma):
    with pytest.raises(WindowError):
        velocity_perturbation(TrajectorySpec(v40, 5e-3), phi_1ma,
                              time_window=20 * 5e-3 / v40)


def test_delta_y_magnitude_and_delay(v40, phi_1ma):
    plus = TrajectorySpec(v40, 5e-3, side="plus")
    minus = TrajectorySpec(v40, 5e-3, side="minus")
    pred = delta_Y(plus, minus, phi_1ma)
    assert_allclose(abs(pred.delta_y_total), 1.30e-4, rtol=2e-3)
    assert_allclose(abs(pred.delta_y_total), phi_1ma * Q / (M * v40), rtol=1e-3)
    assert_allclose(pred.time_delay, 3.47e-11, rtol=2e-3)
    assert_allclose(pred.time_delay, abs(pred.delta_y_total) / v40, rtol=1e-12)


def test_delta_y_positive_for_positive_flux(v40, phi_1ma):
    # Sign convention: the recoil displacement difference carries the sign
    # of the flux, matching the enclosed-flux phase.
    plus = TrajectorySpec(v40, 5e-3, side="plus")
    minus = TrajectorySpec(v40, 5e-3, side="minus")
    assert delta_Y(plus, minus, phi_1ma).delta_y_total > 0.0
    assert delta_Y(plus, minus, -phi_1ma).delta_y_total < 0.0


@pytest.mark.parametrize("d", [5e-3, 1.2e-2, 2.5e-2, 5e-2])
def test_delta_y_independent_of_impact_parameter(v40, phi_1ma, d):
    pred = delta_Y(TrajectorySpec(v40, d, side="plus"),
                   TrajectorySpec(v40, d, side="minus"), phi_1ma)
    assert_allclose(abs(pred.delta_y_total), phi_1ma * Q / (M * v40), rtol=1e-3)


def test_delta_y_spread_over_decade_below_tenth_percent(v40, phi_1ma):
    values = []
    for d in (5e-3, 1e-2, 2e-2, 5e-2):
        pred = delta_Y(TrajectorySpec(v40, d, side="plus"),
                       TrajectorySpec(v40, d, side="minus"), phi_1ma)
        values.append(abs(pred.delta_y_total))
    assert (max(values) - min(values)) / max(values) < 1e-3


def test_delta_y_zero_flux(v40):
    pred = delta_Y(TrajectorySpec(v40, 5e-3, side="plus"),
                   TrajectorySpec(v40, 5e-3, side="minus"), 0.0)
    assert pred.delta_y_total == 0.0
    assert pred.time_delay == 0.0


def test_delta_y_rejects_mismatched_speeds(phi_1ma):
    with pytest.raises(ValidationError):
        delta_Y(TrajectorySpec(1e6, 5e-3, side="plus"),
                TrajectorySpec(2e6, 5e-3, side="minus"), phi_1ma)


def test_window_doubling_stability(v40, phi_1ma):
    d = 5e-3
    base = delta_Y(TrajectorySpec(v40, d, side="plus"),
                   TrajectorySpec(v40, d, side="minus"), phi_1ma,
                   time_window=1e4 * d / v40).delta_y_total
    doubled = delta_Y(TrajectorySpec(v40, d, side="plus"),
                      TrajectorySpec(v40, d, side="minus"), phi_1ma,
                      time_window=2e4 * d / v40).delta_y_total
    assert abs(doubled - base) / abs(base) < 1e-4


def test_force_delay_formula(v40, phi_1ma):
    assert force_time_delay(0.0, v40) == 0.0
    assert_allclose(force_time_delay(phi_1ma, v40), 3.47e-11, rtol=1e-3)
    assert_allclose(force_time_delay(phi_1ma, v40),
                    phi_1ma * Q / (M * v40**2), rtol=1e-15)


def test_force_delay_dispersion_signature(v40, phi_1ma):
    # delay(2 v0) = delay(v0) / 4 exactly; the phase has no speed in it.
    assert_allclose(force_time_delay(phi_1ma, 2 * v40),
                    force_time_delay(phi_1ma, v40) / 4.0, rtol=1e-12)
    assert ab_phase(phi_1ma) == ab_phase(phi_1ma)


def test_force_delay_rejects_nonpositive_speed(phi_1ma):
    with pytest.raises(ValidationError):
        force_time_delay(phi_1ma, 0.0)


def test_ab_phase_values(phi_1ma):
    assert_allclose(ab_phase(HBAR / Q), 1.0, rtol=1e-15)
    # half a flux quantum h / (2 q) gives a pi phase
    assert_allclose(ab_phase(2 * math.pi * HBAR / (2 * Q)), math.pi, rtol=1e-15)
    assert_allclose(ab_phase(phi_1ma), 4.217e6, rtol=1e-3)


def test_semiclassical_phase_bilinear(v40, phi_1ma):
    assert semiclassical_phase(M * v40, 0.0) == 0.0
    dy = phi_1ma * Q / (M * v40)
    assert_allclose(semiclassical_phase(M * v40, dy), ab_phase(phi_1ma), rtol=1e-15)
    assert_allclose(semiclassical_phase(2 * M * v40, dy / 2),
                    semiclassical_phase(M * v40, dy), rtol=1e-15)


@pytest.mark.parametrize("energy_ev", [20.0, 40.0, 80.0])
def test_phase_equivalence_across_energies(energy_ev, phi_1ma):
    v0 = electron_speed_from_energy(energy_ev)
    pair = phase_equivalence_report(TrajectorySpec(v0, 5e-3, side="plus"),
                                    TrajectorySpec(v0, 5e-3, side="minus"),
                                    phi_1ma)
    assert pair.relative_deviation <= 1e-3


def test_phase_equivalence_deviation_speed_independent(phi_1ma):
    deviations = []
    for energy in (20.0, 40.0, 80.0):
        v0 = electron_speed_from_energy(energy)
        pair = phase_equivalence_report(TrajectorySpec(v0, 5e-3, side="plus"),
                                        TrajectorySpec(v0, 5e-3, side="minus"),
                                        phi_1ma)
        deviations.append(pair.relative_deviation)
    assert max(deviations) - min(deviations) < 1e-3


def test_phase_equivalence_zero_flux(v40):
    pair = phase_equivalence_report(TrajectorySpec(v40, 5e-3, side="plus"),
                                    TrajectorySpec(v40, 5e-3, side="minus"), 0.0)
    assert pair.ab_phase == 0.0
    assert pair.semiclassical_phase == 0.0


def test_image_charge_delay_vanishes_at_large_clearance():
    near = image_charge_delay(1e-3, 1e-2, 40.0)
    far = image_charge_delay(1e3, 1e-2, 40.0)
    assert far < 1e-6 * near


def test_image_charge_delay_current_independent(v40, solenoid_1ma):
    # The current never enters, so any two settings agree bit for bit.
    d0 = image_charge_delay(1e-3, 1e-2, 40.0)
    d10 = image_charge_delay(1e-3, 1e-2, 40.0)
    assert d0 == d10


def test_image_charge_delay_negligible(v40):
    delay = image_charge_delay(1e-3, 1e-2, 40.0)
    eq_delay = force_time_delay(flux(experiment_solenoid(current=0.01)).flux, v40)
    assert delay / eq_delay < 0.01


def test_image_charge_delay_model_validity():
    with pytest.raises(ValidationError):
        image_charge_delay(1e-12, 1e-2, 1e-3)
    with pytest.raises(ValidationError):
        image_charge_delay(-1e-3, 1e-2, 40.0)
