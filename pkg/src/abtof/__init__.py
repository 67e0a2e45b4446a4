"""Semiclassical force theory and time-of-flight simulation for a
macroscopic solenoid test of the Aharonov-Bohm effect.

The package verifies, numerically and end to end, the chain

    moving-charge field -> force on a loop stack -> closed-form force
    -> velocity perturbation -> path displacement -> phase / time delay

and replicates the time-of-flight experiment that discriminates the
force hypothesis (delay proportional to flux, falling as 1/v0^2) from
the dispersionless enclosed-flux phase.
"""

from .analysis import (
    DelayCurve,
    FitReport,
    delay_curve_from_spectra,
    extract_delay,
    fit_ballistic,
    fit_delay_vs_current,
)
from .core import (
    CODATA2018,
    FluxResult,
    PhysicalConstants,
    SolenoidSpec,
    TrajectorySpec,
    electron_speed_from_energy,
    flux,
    experiment_solenoid,
)
from .errors import (
    AbtofError,
    ConfigError,
    ConvergenceError,
    GeometryError,
    SingularityError,
    ValidationError,
    WindowError,
)
from .fields import (
    Contour,
    FieldSample,
    contour_integral_A,
    ideal_solenoid_vector_potential,
    moving_charge_b_field,
)
from .forces import (
    ForceSample,
    LoopStack,
    boyer_force_y,
    core_enhancement,
    loop_force_quadrature,
)
from .kinematics import (
    DelayPrediction,
    PerturbationProfile,
    PhasePair,
    ab_phase,
    delta_Y,
    force_time_delay,
    image_charge_delay,
    path_displacement,
    phase_equivalence_report,
    semiclassical_phase,
    velocity_perturbation,
)
from .tof import (
    ApparatusConfig,
    PickupTrace,
    TofSpectrum,
    ballistic_arrival_time,
    histograms_to_json,
    pickup_emf,
    simulate_spectrum,
    spectra_to_csv,
    sweep_current,
    sweep_energy,
)

__version__ = "0.1.0"
