"""Delay extraction, line fits and the force-hypothesis discrimination.

Delays are extracted as centroid differences against the lowest-current
reference spectrum; with Gaussian jitter the sample mean is the efficient
estimator.  The delay-vs-current curve is then fit by weighted least
squares and compared against two hypotheses:

* zero slope (no force, the dispersionless prediction), and
* the force-hypothesis slope Phi'(I) q / (m v0^2),

each via a z statistic |slope - hypothesis| / stderr with the
conventional 3-sigma discovery/exclusion threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import CODATA2018
from .errors import ValidationError
from .reporting import dump_json
from .tof import TofSpectrum

VERDICT_ZERO = "consistent_zero"
VERDICT_FORCE = "consistent_force"
VERDICT_INCONCLUSIVE = "inconclusive"
VERDICT_EXCLUDES_BOTH = "excludes_both"

Z_THRESHOLD = 3.0


@dataclass(frozen=True)
class DelayCurve:
    """Measured delays vs current, relative to a zero(-ish)-current reference."""

    currents: np.ndarray         # A
    measured_delays: np.ndarray  # s
    delay_errors: np.ndarray     # s, standard error of each centroid difference

    def __post_init__(self):
        currents = np.asarray(self.currents, dtype=float)
        delays = np.asarray(self.measured_delays, dtype=float)
        errors = np.asarray(self.delay_errors, dtype=float)
        if not (len(currents) == len(delays) == len(errors)):
            raise ValidationError("delay curve arrays must have equal length")
        object.__setattr__(self, "currents", currents)
        object.__setattr__(self, "measured_delays", delays)
        object.__setattr__(self, "delay_errors", errors)


@dataclass(frozen=True)
class FitReport:
    """Weighted line fit plus the two-hypothesis verdict."""

    slope: float            # s/A
    slope_stderr: float
    intercept: float        # s
    z_against_zero: float
    z_against_force: float
    verdict: str

    def to_json(self) -> str:
        return dump_json({
            "slope": self.slope,
            "slope_stderr": self.slope_stderr,
            "intercept": self.intercept,
            "z_against_zero": self.z_against_zero,
            "z_against_force": self.z_against_force,
            "verdict": self.verdict,
        })


def extract_delay(spectrum: TofSpectrum, reference: TofSpectrum) -> tuple[float, float]:
    """Centroid delay of `spectrum` against `reference` and its standard error.

    The error combines the two per-spectrum standard errors of the mean;
    it is zero for jitterless (single-valued) spectra.
    """
    if len(spectrum.arrival_times) == 0 or len(reference.arrival_times) == 0:
        raise ValidationError("spectra must be nonempty")
    if spectrum.kinetic_energy_ev != reference.kinetic_energy_ev:
        raise ValidationError("spectra must share the same kinetic energy")
    delay = float(np.mean(spectrum.arrival_times) - np.mean(reference.arrival_times))

    def sem(values: np.ndarray) -> float:
        n = len(values)
        # np.std of a constant array picks up mean-rounding noise; a
        # single-valued spectrum has zero spread by definition.
        if n < 2 or np.ptp(values) == 0.0:
            return 0.0
        return float(np.std(values, ddof=1)) / math.sqrt(n)

    error = math.hypot(sem(spectrum.arrival_times), sem(reference.arrival_times))
    return delay, error


def delay_curve_from_spectra(spectra: list[TofSpectrum]) -> DelayCurve:
    """Delays of every setting against the lowest-current spectrum.

    The reference setting itself is omitted from the curve (its delay is
    zero by construction and fully correlated with the others).
    """
    if len(spectra) < 2:
        raise ValidationError("need at least two spectra to build a delay curve")
    reference = min(spectra, key=lambda s: s.current)
    currents, delays, errors = [], [], []
    for spectrum in spectra:
        if spectrum is reference:
            continue
        delay, error = extract_delay(spectrum, reference)
        currents.append(spectrum.current)
        delays.append(delay)
        errors.append(error)
    return DelayCurve(np.array(currents), np.array(delays), np.array(errors))


def weighted_line_fit(x: np.ndarray, y: np.ndarray, sigma: np.ndarray):
    """Closed-form weighted least squares for y = intercept + slope * x.

    Returns (intercept, slope, intercept_stderr, slope_stderr) with the
    parameter errors taken from the provided sigmas.
    """
    w = 1.0 / sigma**2
    s = np.sum(w)
    sx = np.sum(w * x)
    xbar = sx / s
    t = (x - xbar)
    stt = np.sum(w * t * t)
    if stt == 0.0:
        raise ValidationError("degenerate design: all x values coincide")
    slope = np.sum(w * t * y) / stt
    intercept = (np.sum(w * y) - sx * slope) / s
    slope_stderr = math.sqrt(1.0 / stt)
    intercept_stderr = math.sqrt((1.0 + sx * sx / (s * stt)) / s)
    return float(intercept), float(slope), intercept_stderr, float(slope_stderr)


def fit_delay_vs_current(curve: DelayCurve, force_slope: float) -> FitReport:
    """Fit the delay curve and test it against zero and the force line.

    `force_slope` is the predicted d(delay)/d(current) of the force
    hypothesis.  The verdict derives solely from the two z statistics and
    the 3-sigma threshold.
    """
    if len(curve.currents) < 3:
        raise ValidationError("need at least 3 currents to fit the delay line")
    if np.any(curve.delay_errors <= 0.0):
        raise ValidationError("delay errors must be positive for the weighted fit")
    intercept, slope, _, slope_stderr = weighted_line_fit(
        curve.currents, curve.measured_delays, curve.delay_errors
    )
    z_zero = abs(slope) / slope_stderr
    z_force = abs(slope - force_slope) / slope_stderr
    if z_zero <= Z_THRESHOLD and z_force > Z_THRESHOLD:
        verdict = VERDICT_ZERO
    elif z_force <= Z_THRESHOLD and z_zero > Z_THRESHOLD:
        verdict = VERDICT_FORCE
    elif z_zero <= Z_THRESHOLD and z_force <= Z_THRESHOLD:
        verdict = VERDICT_INCONCLUSIVE
    else:
        verdict = VERDICT_EXCLUDES_BOTH
    return FitReport(
        slope=slope,
        slope_stderr=slope_stderr,
        intercept=intercept,
        z_against_zero=z_zero,
        z_against_force=z_force,
        verdict=verdict,
    )


def fit_ballistic(energies_ev, mean_arrivals, errors, constants=None):
    """Free-exponent fit of arrival time vs energy on log axes.

    Fits log(t) = log(L sqrt(m/2)) + b * log(E q); ballistic flight has
    b = -0.5.  Returns (exponent, implied flight length, exponent stderr).
    """
    constants = constants or CODATA2018
    energies = np.asarray(energies_ev, dtype=float)
    arrivals = np.asarray(mean_arrivals, dtype=float)
    errs = np.asarray(errors, dtype=float)
    if len(energies) < 3:
        raise ValidationError("need at least 3 energies for the ballistic fit")
    if np.any(energies <= 0.0) or np.any(arrivals <= 0.0) or np.any(errs <= 0.0):
        raise ValidationError("energies, arrivals and errors must be positive")
    if np.max(energies) < 2.0 * np.min(energies):
        raise ValidationError("energies must span at least a factor of 2")
    log_e = np.log(energies * constants.electron_charge_magnitude)
    log_t = np.log(arrivals)
    log_err = errs / arrivals
    intercept, exponent, _, exponent_stderr = weighted_line_fit(log_e, log_t, log_err)
    length = math.exp(intercept) / math.sqrt(constants.electron_mass / 2.0)
    return float(exponent), float(length), float(exponent_stderr)
