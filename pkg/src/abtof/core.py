"""Physical constants, solenoid flux model and shared domain types.

Everything downstream (field kernels, force quadrature, kinematics, the
time-of-flight simulator) consumes the types defined here.  All values
are SI; electron kinetic energies are quoted in eV at the interfaces and
converted exactly once.

The solenoid flux model is the linear soft-iron one: an applied current I
through a winding of n turns per meter on a bore of area A with relative
core permeability k carries a flux

    Phi = k * mu0 * I * n * A,      A = pi * bore_radius**2

which is exact arithmetic (no quadrature involved) and strictly linear in
the signed current.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError

# Sides an electron can pass the solenoid on (sign of the fixed x coordinate).
SIDE_PLUS = "plus"
SIDE_MINUS = "minus"


@dataclass(frozen=True)
class PhysicalConstants:
    """CODATA-2018 constants used by every formula in the package.

    electron_charge_magnitude is the magnitude |q|; formulas that need the
    electron's signed charge say so explicitly at their call sites.
    """

    electron_charge_magnitude: float = 1.602176634e-19  # C (exact)
    electron_mass: float = 9.1093837015e-31             # kg
    vacuum_permeability: float = 1.25663706212e-6       # H/m
    reduced_planck: float = 1.054571817e-34             # J s
    vacuum_permittivity: float = 8.8541878128e-12       # F/m

    def __post_init__(self):
        for name in (
            "electron_charge_magnitude",
            "electron_mass",
            "vacuum_permeability",
            "reduced_planck",
            "vacuum_permittivity",
        ):
            if not getattr(self, name) > 0.0:
                raise ValidationError(f"constant {name} must be strictly positive")


#: Shared default instance; construction is cheap but one canonical object
#: keeps all acceptance tolerances on the same footing.
CODATA2018 = PhysicalConstants()


def _as_unit_vector(v, name: str) -> np.ndarray:
    arr = np.asarray(v, dtype=float)
    if arr.shape != (3,):
        raise ValidationError(f"{name} must be a 3-vector")
    norm = float(np.linalg.norm(arr))
    if abs(norm - 1.0) > 1e-12:
        raise ValidationError(f"{name} must have unit norm within 1e-12 (got {norm!r})")
    return arr


@dataclass(frozen=True)
class SolenoidSpec:
    """Geometry, winding and core description of one solenoid.

    core_permeability is the dimensionless relative permeability k of the
    soft-iron core, modeled as a pure scalar multiplier on the flux.
    """

    bore_radius: float                 # m
    winding_density: float             # turns per meter
    current: float                     # A, signed
    core_permeability: float = 150.0   # dimensionless k
    length: float = 0.05               # m, used by the loop-stack force engine
    center_position: tuple[float, float, float] = (0.0, 0.0, 0.0)
    axis: tuple[float, float, float] = (0.0, 0.0, 1.0)

    def __post_init__(self):
        if not self.bore_radius > 0.0:
            raise ValidationError("bore_radius must be > 0")
        if not self.winding_density > 0.0:
            raise ValidationError("winding_density must be > 0")
        if not self.core_permeability >= 1.0:
            raise ValidationError("core_permeability must be >= 1")
        if not self.length > 0.0:
            raise ValidationError("length must be > 0")
        object.__setattr__(self, "center_position", tuple(float(c) for c in self.center_position))
        axis = _as_unit_vector(self.axis, "axis")
        object.__setattr__(self, "axis", tuple(axis))

    @property
    def bore_area(self) -> float:
        return math.pi * self.bore_radius**2

    def center_array(self) -> np.ndarray:
        return np.asarray(self.center_position, dtype=float)

    def axis_array(self) -> np.ndarray:
        return np.asarray(self.axis, dtype=float)


#: Solenoid used in the macroscopic experiment: 2.5 mm bore diameter,
#: 3 turns/mm winding, soft-iron core with k ~ 150.
def experiment_solenoid(current: float = 0.0, length: float = 0.05) -> SolenoidSpec:
    return SolenoidSpec(
        bore_radius=1.25e-3,
        winding_density=3000.0,
        current=current,
        core_permeability=150.0,
        length=length,
    )


@dataclass(frozen=True)
class TrajectorySpec:
    """Straight-line electron path past the solenoid.

    The electron moves with constant velocity v0 along +y at fixed
    x_e = +|d| (side "plus") or x_e = -|d| (side "minus"), z_e = 0,
    parametrized as y_e = v0 * t so closest approach is at t = 0.

    The impact parameter must stay outside the solenoid envelope; that
    cross-check needs the solenoid geometry, so it lives in
    validate_against() rather than in the constructor.
    """

    speed: float              # m/s, v0 > 0
    impact_parameter: float   # m, nonzero; magnitude used, sign via `side`
    side: str = SIDE_PLUS

    def __post_init__(self):
        if not self.speed > 0.0:
            raise ValidationError("speed must be > 0")
        if self.impact_parameter == 0.0 or not math.isfinite(self.impact_parameter):
            raise ValidationError("impact_parameter must be nonzero and finite")
        if self.side not in (SIDE_PLUS, SIDE_MINUS):
            raise ValidationError(f"side must be '{SIDE_PLUS}' or '{SIDE_MINUS}'")

    @property
    def x_e(self) -> float:
        """Signed transverse coordinate of the path."""
        d = abs(self.impact_parameter)
        return d if self.side == SIDE_PLUS else -d

    def validate_against(self, spec: SolenoidSpec) -> None:
        if abs(self.impact_parameter) <= spec.bore_radius:
            raise ValidationError(
                "impact parameter must exceed the solenoid bore radius "
                f"(|d|={abs(self.impact_parameter)!r} m, bore={spec.bore_radius!r} m)"
            )


@dataclass(frozen=True)
class FluxResult:
    """Flux Phi = k * mu0 * I * n * A plus the factors that produced it."""

    flux: float  # Wb, signed with the current
    field_times_area_components: dict = field(default_factory=dict)


def flux(spec: SolenoidSpec, constants: PhysicalConstants = CODATA2018) -> FluxResult:
    """Flux carried by the solenoid bore, exactly k * mu0 * I * n * A."""
    area = spec.bore_area
    value = (
        spec.core_permeability
        * constants.vacuum_permeability
        * spec.current
        * spec.winding_density
        * area
    )
    return FluxResult(
        flux=value,
        field_times_area_components={
            "core_permeability": spec.core_permeability,
            "mu0": constants.vacuum_permeability,
            "current": spec.current,
            "winding_density": spec.winding_density,
            "area": area,
        },
    )


def electron_speed_from_energy(
    kinetic_energy_ev: float, constants: PhysicalConstants = CODATA2018
) -> float:
    """Nonrelativistic speed v0 = sqrt(2 E / m) for a kinetic energy in eV.

    At the tens of eV used here the relativistic correction is ~4e-5 and is
    ignored everywhere.
    """
    if not kinetic_energy_ev > 0.0:
        raise ValidationError("kinetic energy must be > 0")
    energy_joule = kinetic_energy_ev * constants.electron_charge_magnitude
    return math.sqrt(2.0 * energy_joule / constants.electron_mass)
