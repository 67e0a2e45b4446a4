"""In-silico replica of the time-of-flight apparatus.

A pulsed electron source fires `shots_per_setting` electrons down a
straight flight path of length L past the solenoid pair; a channelplate
records arrival times with Gaussian jitter.  Two hypotheses can be
simulated:

* force_absent: arrivals follow the ballistic time L / v0 regardless of
  the solenoid current (the dispersionless prediction);
* force_present: each arrival is additionally shifted by the
  force-hypothesis delay Phi(I) q / (m v0^2).

Randomness is reproducible by construction: every spectrum draws from a
generator seeded by a counter-style mix of (rng_seed, setting index), so
sweeps are order-independent and identical configs give bit-identical
arrival lists.

A pick-up coil monitor turns a piecewise-linear current waveform into the
induced EMF -N dPhi/dt, constant on each ramp segment; integrating the
EMF back over any step recovers the flux change exactly, which is the
flux-consistency cross-check the experiment relies on.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace

import numpy as np

from .core import CODATA2018, PhysicalConstants, SolenoidSpec, electron_speed_from_energy, flux
from .errors import ValidationError
from .kinematics import force_time_delay
from .reporting import dump_json, format_float

FORCE_PRESENT = "force_present"
FORCE_ABSENT = "force_absent"


@dataclass(frozen=True)
class ApparatusConfig:
    """Flight geometry, source energy, detector jitter and run seeding."""

    flight_path_length: float          # m
    solenoid: SolenoidSpec             # one of the identical pair
    kinetic_energy_ev: float
    jitter_sigma: float = 1e-10        # s
    shots_per_setting: int = 100
    force_mode: str = FORCE_ABSENT
    rng_seed: int = 0
    # The paired second solenoid adds no modeled delay; the single-solenoid
    # flux drives the force line.  Kept configurable as a plain multiplier.
    delay_multiplier: float = 1.0

    def __post_init__(self):
        if not self.flight_path_length > 0.0:
            raise ValidationError("flight_path_length must be > 0")
        if not self.kinetic_energy_ev > 0.0:
            raise ValidationError("kinetic_energy_ev must be > 0")
        if self.jitter_sigma < 0.0:
            raise ValidationError("jitter_sigma must be >= 0")
        if self.shots_per_setting < 1:
            raise ValidationError("shots_per_setting must be >= 1")
        if self.force_mode not in (FORCE_PRESENT, FORCE_ABSENT):
            raise ValidationError(f"force_mode must be '{FORCE_PRESENT}' or '{FORCE_ABSENT}'")


@dataclass(frozen=True)
class TofSpectrum:
    """Arrival times and their histogram for one (current, energy) setting."""

    current: float                # A
    kinetic_energy_ev: float
    arrival_times: np.ndarray     # s, one per shot
    bin_edges: np.ndarray         # s
    counts: np.ndarray

    def __post_init__(self):
        arrivals = np.asarray(self.arrival_times, dtype=float)
        counts = np.asarray(self.counts, dtype=int)
        if np.any(arrivals <= 0.0):
            raise ValidationError("arrival times must be positive")
        if int(np.sum(counts)) != len(arrivals):
            raise ValidationError("histogram counts must sum to the shot count")
        object.__setattr__(self, "arrival_times", arrivals)
        object.__setattr__(self, "bin_edges", np.asarray(self.bin_edges, dtype=float))
        object.__setattr__(self, "counts", counts)


@dataclass(frozen=True)
class PickupTrace:
    """Induced EMF of the pick-up coil, constant on each waveform segment.

    times are the waveform breakpoints (length N); emf[j] applies on
    [times[j], times[j+1]) (length N - 1).
    """

    times: np.ndarray  # s
    emf: np.ndarray    # V

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        emf = np.asarray(self.emf, dtype=float)
        if len(emf) != len(times) - 1:
            raise ValidationError("emf must have one value per waveform segment")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "emf", emf)

    def integral(self, t0: float | None = None, t1: float | None = None) -> float:
        """Integral of the EMF over [t0, t1] (full trace by default)."""
        t0 = self.times[0] if t0 is None else t0
        t1 = self.times[-1] if t1 is None else t1
        lo = np.maximum(self.times[:-1], t0)
        hi = np.minimum(self.times[1:], t1)
        overlap = np.clip(hi - lo, 0.0, None)
        return float(np.sum(self.emf * overlap))


def _setting_rng(rng_seed: int, setting_index: int) -> np.random.Generator:
    # Counter-style mix: the stream depends only on (seed, index), so sweep
    # settings can be evaluated in any order or in parallel.
    return np.random.default_rng(np.random.SeedSequence((int(rng_seed), int(setting_index))))


def ballistic_arrival_time(config: ApparatusConfig) -> float:
    """Free-flight arrival time L / v0(E); independent of any current."""
    v0 = electron_speed_from_energy(config.kinetic_energy_ev)
    return config.flight_path_length / v0


def _histogram(arrivals: np.ndarray, jitter_sigma: float):
    if jitter_sigma > 0.0:
        width = jitter_sigma / 2.0
    else:
        width = max(abs(float(arrivals[0])) * 1e-12, 1e-15)
    lo = math.floor(float(np.min(arrivals)) / width) * width
    hi = math.ceil(float(np.max(arrivals)) / width) * width
    n_bins = max(1, int(round((hi - lo) / width)))
    counts, edges = np.histogram(arrivals, bins=n_bins, range=(lo, lo + n_bins * width))
    return edges, counts


def simulate_spectrum(
    config: ApparatusConfig,
    current: float,
    setting_index: int = 0,
    constants: PhysicalConstants = CODATA2018,
) -> TofSpectrum:
    """One time-of-flight spectrum at the given solenoid current.

    Each shot arrives at the ballistic time, plus the force-hypothesis
    delay when force_mode is force_present, plus Gaussian detector jitter.
    """
    base = ballistic_arrival_time(config)
    if config.force_mode == FORCE_PRESENT:
        spec = replace(config.solenoid, current=current)
        v0 = electron_speed_from_energy(config.kinetic_energy_ev, constants)
        base += config.delay_multiplier * force_time_delay(
            flux(spec, constants).flux, v0, constants
        )
    rng = _setting_rng(config.rng_seed, setting_index)
    arrivals = base + rng.normal(0.0, config.jitter_sigma, config.shots_per_setting)
    edges, counts = _histogram(arrivals, config.jitter_sigma)
    return TofSpectrum(
        current=current,
        kinetic_energy_ev=config.kinetic_energy_ev,
        arrival_times=arrivals,
        bin_edges=edges,
        counts=counts,
    )


def sweep_current(config: ApparatusConfig, currents) -> list[TofSpectrum]:
    """One spectrum per current, sub-seeded by position in the list."""
    currents = list(currents)
    if len(set(currents)) != len(currents):
        raise ValidationError("sweep currents must be distinct")
    return [simulate_spectrum(config, current, setting_index=i)
            for i, current in enumerate(currents)]


def sweep_energy(config: ApparatusConfig, energies_ev, current: float = 0.0) -> list[TofSpectrum]:
    """One spectrum per kinetic energy at a fixed solenoid current."""
    energies_ev = list(energies_ev)
    out = []
    for i, energy in enumerate(energies_ev):
        if not energy > 0.0:
            raise ValidationError("energies must be > 0")
        cfg = replace(config, kinetic_energy_ev=float(energy))
        out.append(simulate_spectrum(cfg, current, setting_index=i))
    return out


def pickup_emf(
    waveform_times,
    waveform_currents,
    spec: SolenoidSpec,
    pickup_turns: int,
    constants: PhysicalConstants = CODATA2018,
) -> PickupTrace:
    """EMF -N dPhi/dt induced by a piecewise-linear current waveform.

    The flux model is linear in current, so the EMF is constant on each
    segment and spikes wherever the current steps.
    """
    times = np.asarray(waveform_times, dtype=float)
    currents = np.asarray(waveform_currents, dtype=float)
    if len(times) != len(currents) or len(times) < 2:
        raise ValidationError("waveform needs matching times and currents, length >= 2")
    if np.any(np.diff(times) <= 0.0):
        raise ValidationError("waveform times must be strictly increasing")
    flux_per_ampere = flux(replace(spec, current=1.0), constants).flux
    dphi = flux_per_ampere * np.diff(currents)
    emf = -pickup_turns * dphi / np.diff(times)
    return PickupTrace(times=times, emf=emf)


def spectra_to_csv(spectra: list[TofSpectrum], path) -> None:
    """Shot-level export: setting_current_A, setting_energy_eV, shot_index, arrival_time_s."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["setting_current_A", "setting_energy_eV", "shot_index", "arrival_time_s"])
        for spectrum in spectra:
            for shot, arrival in enumerate(spectrum.arrival_times):
                writer.writerow([
                    format_float(spectrum.current),
                    format_float(spectrum.kinetic_energy_ev),
                    shot,
                    format_float(arrival),
                ])


def histograms_to_json(spectra: list[TofSpectrum], path) -> None:
    """Histogram export: one record per setting with bin_edges_s and counts."""
    records = [
        {
            "setting_current_A": spectrum.current,
            "setting_energy_eV": spectrum.kinetic_energy_ev,
            "bin_edges_s": [float(e) for e in spectrum.bin_edges],
            "counts": [int(c) for c in spectrum.counts],
        }
        for spectrum in spectra
    ]
    with open(path, "w") as handle:
        handle.write(dump_json(records))
        handle.write("\n")
