"""Force exerted by the passing electron on the solenoid.

Two independent routes are kept side by side on purpose:

* `loop_force_quadrature` models the solenoid as a finite stack of
  circular current loops and integrates I (dl x B) over each loop's
  azimuth with the moving-charge field kernel, summing loops in fixed
  index order;

* `boyer_force_y` is the closed-form lateral force on the infinite
  solenoid (equivalently an infinite line of magnetic dipoles),

      F_y = (Phi * v0 * q / 4 pi) * 4 x_e y_e / (x_e^2 + y_e^2)^2,

  where Phi is the bore flux (already including the iron-core factor k
  when the core is modeled).

Their agreement as the stack grows long is the main convergence check of
the force theory; the truncation error of a stack of length L seen from
transverse distance rho falls off like (2 rho / L)^4.

The stack lives in the canonical frame used throughout: solenoid axis
along z, centered at the origin, electron velocity along +y.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import CODATA2018, PhysicalConstants, SolenoidSpec
from .errors import ConvergenceError, SingularityError, ValidationError

METHOD_QUADRATURE = "quadrature"
METHOD_CLOSED_FORM = "closed_form"

# Electron must keep this clearance from every loop wire.
WIRE_CLEARANCE = 1e-6  # m

# Azimuthal quadrature: composite Gauss-Legendre panels of this many nodes,
# panel count doubled until the force stabilizes, capped at MAX_NODES total.
_PANEL_NODES = 16
MAX_NODES = 2**14

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(_PANEL_NODES)


@dataclass(frozen=True)
class LoopStack:
    """Finite stack of identical current loops standing in for the solenoid.

    Loops sit at z_j = (j - (N-1)/2) * axial_spacing, the midpoints of N
    equal slabs, so loop_count * axial_spacing is the modeled length.
    """

    loop_radius: float     # m
    loop_count: int
    axial_spacing: float   # m, = 1 / winding_density
    loop_current: float    # A

    def __post_init__(self):
        if not self.loop_radius > 0.0:
            raise ValidationError("loop_radius must be > 0")
        if self.loop_count < 1:
            raise ValidationError("loop_count must be >= 1")
        if not self.axial_spacing > 0.0:
            raise ValidationError("axial_spacing must be > 0")

    @property
    def length(self) -> float:
        return self.loop_count * self.axial_spacing

    def loop_positions(self) -> np.ndarray:
        j = np.arange(self.loop_count, dtype=float)
        return (j - (self.loop_count - 1) / 2.0) * self.axial_spacing

    @classmethod
    def from_solenoid(cls, spec: SolenoidSpec) -> "LoopStack":
        spacing = 1.0 / spec.winding_density
        count = max(1, round(spec.length / spacing))
        return cls(
            loop_radius=spec.bore_radius,
            loop_count=count,
            axial_spacing=spacing,
            loop_current=spec.current,
        )


@dataclass(frozen=True)
class ForceSample:
    electron_position: np.ndarray   # (3,) m
    force: np.ndarray               # (3,) N
    method: str
    error_estimate: float | None = None  # relative, quadrature only

    def __post_init__(self):
        if self.method not in (METHOD_QUADRATURE, METHOD_CLOSED_FORM):
            raise ValidationError("method must be 'quadrature' or 'closed_form'")
        object.__setattr__(self, "electron_position",
                           np.asarray(self.electron_position, dtype=float))
        force = np.asarray(self.force, dtype=float)
        if not np.all(np.isfinite(force)):
            raise ValidationError("force must be finite")
        object.__setattr__(self, "force", force)


def _stack_integrand(stack: LoopStack, electron_position: np.ndarray,
                     speed: float, constants: PhysicalConstants,
                     phi: np.ndarray) -> np.ndarray:
    """Force integrand summed over loops, sampled at azimuth values phi.

    Returns an (n_phi, 3) array of I * (dl/dphi x B) already summed over
    the stack in fixed loop order.
    """
    a = stack.loop_radius
    z_loops = stack.loop_positions()
    cos_p, sin_p = np.cos(phi), np.sin(phi)
    # Loop points relative to the electron; broadcast loops x phi.
    dx = a * cos_p[None, :] - electron_position[0]
    dy = a * sin_p[None, :] - electron_position[1]
    dz = z_loops[:, None] - electron_position[2]
    r2 = dx * dx + dy * dy + dz * dz
    prefactor = (speed * constants.electron_charge_magnitude
                 * constants.vacuum_permeability / (4.0 * math.pi))
    inv_r3 = r2**-1.5
    bx = prefactor * dz * inv_r3
    bz = -prefactor * dx * inv_r3
    # dl/dphi = a * (-sin, cos, 0); cross with B = (bx, 0, bz):
    #   x:  cos * bz * a
    #   y:  sin * bz * a   (note (dl x B)_y = -(-sin)*bz*a ... worked out below)
    #   z: -cos * bx * a
    # dl x B = a * (-sin, cos, 0) x (bx, 0, bz)
    #        = a * (cos * bz - 0, 0 - (-sin * bz), 0 - cos * bx)
    fx = np.sum(cos_p[None, :] * bz, axis=0) * a
    fy = np.sum(sin_p[None, :] * bz, axis=0) * a
    fz = -np.sum(cos_p[None, :] * bx, axis=0) * a
    return stack.loop_current * np.stack([fx, fy, fz], axis=1)


def loop_force_quadrature(
    stack: LoopStack,
    electron_position,
    speed: float,
    constants: PhysicalConstants = CODATA2018,
    tolerance: float = 1e-9,
) -> ForceSample:
    """Total Lorentz force of the electron's field on the loop stack.

    Integrates each loop over azimuth with adaptive composite
    Gauss-Legendre, doubling the panel count until the relative change of
    the summed force drops below `tolerance` (cap 2**14 nodes).
    """
    pos = np.asarray(electron_position, dtype=float)
    rho_xy = math.hypot(pos[0], pos[1])
    dz = np.abs(stack.loop_positions() - pos[2])
    wire_dist = np.sqrt((rho_xy - stack.loop_radius) ** 2 + dz**2)
    if float(np.min(wire_dist)) <= WIRE_CLEARANCE:
        raise SingularityError(
            f"electron within {WIRE_CLEARANCE} m of a loop wire"
        )

    panels = 2
    previous = None
    while panels * _PANEL_NODES <= MAX_NODES:
        edges = np.linspace(0.0, 2.0 * math.pi, panels + 1)
        half = 0.5 * (edges[1] - edges[0])
        mids = 0.5 * (edges[:-1] + edges[1:])
        phi = (mids[:, None] + half * _GL_NODES[None, :]).ravel()
        weights = np.tile(half * _GL_WEIGHTS, panels)
        values = _stack_integrand(stack, pos, speed, constants, phi)
        force = weights @ values
        if previous is not None:
            change = float(np.linalg.norm(force - previous))
            scale = float(np.linalg.norm(force))
            if change <= tolerance * scale or scale == 0.0:
                rel_err = change / scale if scale > 0.0 else 0.0
                return ForceSample(pos, force, METHOD_QUADRATURE, rel_err)
        previous = force
        panels *= 2
    raise ConvergenceError(
        f"loop quadrature did not reach tolerance {tolerance} within {MAX_NODES} nodes"
    )


def boyer_force_y(
    flux_wb: float,
    electron_position_xy,
    speed: float,
    constants: PhysicalConstants = CODATA2018,
):
    """Closed-form lateral force on the infinite solenoid carrying flux Phi.

    The flux argument already contains the core factor k when the
    iron-core system is modeled.  Accepts scalar or array x_e, y_e.
    """
    x_e = np.asarray(electron_position_xy[0], dtype=float)
    y_e = np.asarray(electron_position_xy[1], dtype=float)
    rho2 = x_e * x_e + y_e * y_e
    if np.any(rho2 == 0.0):
        raise SingularityError("electron position must not be on the solenoid axis")
    result = (
        flux_wb * speed * constants.electron_charge_magnitude / (4.0 * math.pi)
        * 4.0 * x_e * y_e / rho2**2
    )
    if result.ndim == 0:
        return float(result)
    return result


def core_enhancement(air_core_force, core_permeability: float):
    """Scale an air-core force by the relative permeability k of the core."""
    if not core_permeability >= 1.0:
        raise ValidationError("core_permeability must be >= 1")
    return core_permeability * air_core_force
