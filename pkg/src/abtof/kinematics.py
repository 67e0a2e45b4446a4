"""Trajectory integrals of the lateral force and the phase bookkeeping.

The closed-form force gives the lateral force of the electron on the
solenoid.  The electron itself recoils with the opposite force, so its
velocity perturbation along a pass at fixed x_e = +/-d, y_e = v0 t is

    dv_y(t) = -(1/m) * integral_{-T}^{t} F_y(t') dt'

and the accumulated lateral displacement is the time integral of dv_y.
Carrying the recoil sign through makes the displacement difference
between the two passing sides come out as

    Delta_Y = dy(+) - dy(-) = Phi q / (m v0)

so that the semiclassical phase p_y Delta_Y / hbar equals the enclosed-flux
phase q Phi / hbar with matching sign, which is the identity the phase
check verifies numerically.

Time integration substitutes t = (d / v0) * tan(theta), which maps the
window onto a finite theta interval and tames the algebraic 1/t^3 decay
of the force; the double integral runs on a shared theta grid with
cumulative trapezoids, refined until the displacement stabilizes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import CODATA2018, PhysicalConstants, TrajectorySpec
from .errors import ValidationError, WindowError
from .forces import boyer_force_y

# Default ratio of v0 * time_window to the impact parameter.  The missed
# displacement tail scales like 1/ratio and the residual terminal velocity
# like 1/ratio^2, so 1e4 keeps both far below the 1e-3 phase tolerance.
DEFAULT_WINDOW_RATIO = 1e4


@dataclass(frozen=True)
class PerturbationProfile:
    """Sampled dv_y(t) and its running time integral along one pass."""

    times: np.ndarray             # s, strictly increasing
    delta_v_y: np.ndarray         # m/s
    cumulative_delta_y: np.ndarray  # m

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        dv = np.asarray(self.delta_v_y, dtype=float)
        dy = np.asarray(self.cumulative_delta_y, dtype=float)
        if not (len(times) == len(dv) == len(dy)):
            raise ValidationError("profile arrays must have equal length")
        if np.any(np.diff(times) <= 0.0):
            raise ValidationError("profile times must be strictly increasing")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "delta_v_y", dv)
        object.__setattr__(self, "cumulative_delta_y", dy)


@dataclass(frozen=True)
class DelayPrediction:
    """Two-sided displacement difference and the delay it implies."""

    delta_y_total: float  # m, signed Delta_Y
    time_delay: float     # s, |Delta_Y| / v0
    flux_used: float      # Wb
    speed_used: float     # m/s


@dataclass(frozen=True)
class PhasePair:
    """Enclosed-flux phase next to the displacement phase."""

    ab_phase: float             # rad
    semiclassical_phase: float  # rad

    def __post_init__(self):
        if not (math.isfinite(self.ab_phase) and math.isfinite(self.semiclassical_phase)):
            raise ValidationError("phases must be finite")

    @property
    def relative_deviation(self) -> float:
        if self.ab_phase == 0.0:
            return abs(self.semiclassical_phase)
        return abs(self.semiclassical_phase - self.ab_phase) / abs(self.ab_phase)


def _theta_grid(trajectory: TrajectorySpec, time_window: float, n: int):
    d = abs(trajectory.impact_parameter)
    theta_max = math.atan(trajectory.speed * time_window / d)
    theta = np.linspace(-theta_max, theta_max, n)
    times = (d / trajectory.speed) * np.tan(theta)
    return theta, times


def velocity_perturbation(
    trajectory: TrajectorySpec,
    flux_wb: float,
    constants: PhysicalConstants = CODATA2018,
    time_window: float | None = None,
    tolerance: float = 1e-6,
) -> PerturbationProfile:
    """Electron velocity perturbation dv_y(t) over one pass.

    The electron recoils against the force its field exerts on the
    solenoid, so the integrand is minus the closed-form lateral force
    evaluated along (x_e = +/-d, y_e = v0 t).  The grid is refined until
    the total displacement is stable to `tolerance` relative.

    Raises WindowError if the force at the window edge still exceeds
    `tolerance` times the peak force.
    """

    d = abs(trajectory.impact_parameter)
    v0 = trajectory.speed
    if time_window is None:
        time_window = DEFAULT_WINDOW_RATIO * d / v0
    if not time_window > 0.0:
        raise ValidationError("time_window must be > 0")

    if flux_wb != 0.0:
        x_e = trajectory.x_e
        # Peak |F_y| along the path sits at |y_e| = d / sqrt(3).
        peak_force = abs(boyer_force_y(flux_wb, (x_e, d / math.sqrt(3.0)), v0, constants))
        edge_force = abs(boyer_force_y(flux_wb, (x_e, v0 * time_window), v0, constants))
        if edge_force > tolerance * peak_force:
            raise WindowError(
                "time window too small: edge force is "
                f"{edge_force / peak_force:.3e} of peak (tolerance {tolerance:g})"
            )

    n = 513
    previous_dy = None
    while True:
        theta, times = _theta_grid(trajectory, time_window, n)
        if flux_wb == 0.0:
            zeros = np.zeros_like(times)
            return PerturbationProfile(times, zeros, zeros.copy())
        jac = (d / v0) / np.cos(theta) ** 2  # dt/dtheta
        force = boyer_force_y(flux_wb, (trajectory.x_e, v0 * times), v0, constants)
        recoil = -force / constants.electron_mass  # electron acceleration
        integrand = recoil * jac
        dtheta = theta[1] - theta[0]
        dv = _cumulative_trapezoid(integrand, dtheta)
        dy = _cumulative_trapezoid(dv * jac, dtheta)
        total = dy[-1]
        if previous_dy is not None and abs(total - previous_dy) <= tolerance * abs(total):
            return PerturbationProfile(times, dv, dy)
        previous_dy = total
        n = 2 * (n - 1) + 1
        if n > 2**21:
            raise WindowError("velocity perturbation grid refinement did not converge")


def _cumulative_trapezoid(values: np.ndarray, dx: float) -> np.ndarray:
    out = np.empty_like(values)
    out[0] = 0.0
    np.cumsum(0.5 * dx * (values[1:] + values[:-1]), out=out[1:])
    return out


def path_displacement(profile: PerturbationProfile, tolerance: float = 1e-4) -> float:
    """Total lateral displacement accumulated over the profile's window.

    Checks window convergence by comparing against the displacement
    accumulated over the central half-window; if halving the window moves
    the result by more than `tolerance` relative, the window was too small.
    """
    total = float(profile.cumulative_delta_y[-1])
    if total == 0.0:
        return 0.0
    t_half = 0.5 * float(profile.times[-1])
    half = float(np.interp(t_half, profile.times, profile.cumulative_delta_y)
                 - np.interp(-t_half, profile.times, profile.cumulative_delta_y))
    if abs(total - half) > tolerance * abs(total):
        raise WindowError(
            f"displacement window not converged: half-window differs by "
            f"{abs(total - half) / abs(total):.3e} relative"
        )
    return total


def delta_Y(
    trajectory_plus: TrajectorySpec,
    trajectory_minus: TrajectorySpec,
    flux_wb: float,
    constants: PhysicalConstants = CODATA2018,
    time_window: float | None = None,
    tolerance: float = 1e-6,
) -> DelayPrediction:
    """Displacement difference between the two passing sides and its delay.

    Both trajectories must share the speed and the impact-parameter
    magnitude; only the side differs.
    """
    if trajectory_plus.speed != trajectory_minus.speed:
        raise ValidationError("trajectories must share the same speed")
    if abs(trajectory_plus.impact_parameter) != abs(trajectory_minus.impact_parameter):
        raise ValidationError("trajectories must share the same |impact parameter|")

    dy_plus = path_displacement(
        velocity_perturbation(trajectory_plus, flux_wb, constants, time_window, tolerance)
    )
    dy_minus = path_displacement(
        velocity_perturbation(trajectory_minus, flux_wb, constants, time_window, tolerance)
    )
    total = dy_plus - dy_minus
    return DelayPrediction(
        delta_y_total=total,
        time_delay=abs(total) / trajectory_plus.speed,
        flux_used=flux_wb,
        speed_used=trajectory_plus.speed,
    )


def force_time_delay(
    flux_wb: float,
    speed: float,
    constants: PhysicalConstants = CODATA2018,
) -> float:
    """Arrival-time delay Phi q / (m v0^2) a lateral force would produce.

    Linear in flux and falling off as 1/v0^2: the dispersive signature that
    distinguishes a force from the dispersionless enclosed-flux phase.
    """
    if not speed > 0.0:
        raise ValidationError("speed must be > 0")
    return (flux_wb * constants.electron_charge_magnitude
            / (constants.electron_mass * speed**2))


def ab_phase(flux_wb: float, constants: PhysicalConstants = CODATA2018) -> float:
    """Enclosed-flux phase q Phi / hbar, signed with the flux."""
    return constants.electron_charge_magnitude * flux_wb / constants.reduced_planck


def semiclassical_phase(
    momentum: float,
    displacement: float,
    constants: PhysicalConstants = CODATA2018,
) -> float:
    """Wavepacket phase p_y * dy / hbar from a lateral displacement."""
    return momentum * displacement / constants.reduced_planck


def phase_equivalence_report(
    trajectory_plus: TrajectorySpec,
    trajectory_minus: TrajectorySpec,
    flux_wb: float,
    constants: PhysicalConstants = CODATA2018,
    time_window: float | None = None,
    tolerance: float = 1e-6,
) -> PhasePair:
    """Displacement phase from the integrated Delta_Y next to q Phi / hbar."""
    prediction = delta_Y(trajectory_plus, trajectory_minus, flux_wb,
                         constants, time_window, tolerance)
    momentum = constants.electron_mass * prediction.speed_used
    return PhasePair(
        ab_phase=ab_phase(flux_wb, constants),
        semiclassical_phase=semiclassical_phase(momentum, prediction.delta_y_total, constants),
    )


def image_charge_delay(
    clearance: float,
    interaction_length: float,
    kinetic_energy_ev: float,
    constants: PhysicalConstants = CODATA2018,
) -> float:
    """Delay from the image-charge attraction of a grounded shield.

    Stand-in plane-image model: over the interaction length L the electron
    sees the attractive potential U = -q^2 / (16 pi eps0 * clearance), so it
    runs faster by energy |U| and arrives early by

        |L * (1 / v(E + |U|) - 1 / v(E))|.

    The solenoid current does not enter, so the result is identical for
    every current setting by construction.
    """
    if not clearance > 0.0:
        raise ValidationError("clearance must be > 0")
    if not interaction_length > 0.0:
        raise ValidationError("interaction_length must be > 0")
    q = constants.electron_charge_magnitude
    u_mag = q * q / (16.0 * math.pi * constants.vacuum_permittivity * clearance)
    energy = kinetic_energy_ev * q
    if u_mag >= energy:
        raise ValidationError(
            "image potential exceeds the kinetic energy; plane-image model invalid"
        )
    v_out = math.sqrt(2.0 * energy / constants.electron_mass)
    v_in = math.sqrt(2.0 * (energy + u_mag) / constants.electron_mass)
    return abs(interaction_length * (1.0 / v_in - 1.0 / v_out))
