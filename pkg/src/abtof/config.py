"""Run configuration: an INI document of key = value sections.

Every key is declared in the schema below; unknown sections or keys are
rejected.  Units are SI except electron kinetic energies, which are in eV;
unit-bearing keys carry the suffix of their unit (*_m, *_s, *_A, *_eV) and
must parse as floats or comma-separated float lists.

`RunConfig.echo()` renders the effective configuration (after any CLI
overrides) back to deterministic INI text; re-running from that echo
reproduces a run exactly.
"""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass

from .core import SolenoidSpec
from .errors import ConfigError
from .reporting import format_float
from .tof import FORCE_ABSENT, FORCE_PRESENT, ApparatusConfig

_UNIT_SUFFIXES = ("_m", "_s", "_a", "_ev")


def _parse_float(text: str) -> float:
    try:
        return float(text)
    except ValueError as exc:
        raise ConfigError(f"expected a number, got {text!r}") from exc


def _parse_float_list(text: str) -> tuple[float, ...]:
    items = [piece.strip() for piece in text.split(",") if piece.strip()]
    if not items:
        raise ConfigError("expected a comma-separated list of numbers")
    return tuple(_parse_float(piece) for piece in items)


def _parse_int(text: str) -> int:
    try:
        return int(text)
    except ValueError as exc:
        raise ConfigError(f"expected an integer, got {text!r}") from exc


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "yes", "1", "on"):
        return True
    if lowered in ("false", "no", "0", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


def _parse_mode(text: str) -> str:
    text = text.strip()
    if text not in (FORCE_ABSENT, FORCE_PRESENT):
        raise ConfigError(f"force_mode must be {FORCE_ABSENT!r} or {FORCE_PRESENT!r}")
    return text


def _parse_str(text: str) -> str:
    return text.strip()


# section -> canonical key -> (parser, RunConfig attribute)
_SCHEMA = {
    "solenoid": {
        "bore_radius_m": (_parse_float, "bore_radius_m"),
        "winding_density_per_m": (_parse_float, "winding_density_per_m"),
        "core_permeability": (_parse_float, "core_permeability"),
        "length_m": (_parse_float, "solenoid_length_m"),
    },
    "apparatus": {
        "flight_path_length_m": (_parse_float, "flight_path_length_m"),
        "kinetic_energy_eV": (_parse_float, "kinetic_energy_ev"),
        "jitter_sigma_s": (_parse_float, "jitter_sigma_s"),
        "shots_per_setting": (_parse_int, "shots_per_setting"),
        "force_mode": (_parse_mode, "force_mode"),
        "seed": (_parse_int, "seed"),
        "delay_multiplier": (_parse_float, "delay_multiplier"),
    },
    "trajectory": {
        "impact_parameter_m": (_parse_float, "impact_parameter_m"),
    },
    "sweep": {
        "currents_A": (_parse_float_list, "currents_a"),
        "energies_eV": (_parse_float_list, "energies_ev"),
        "phase_currents_A": (_parse_float_list, "phase_currents_a"),
        "phase_energies_eV": (_parse_float_list, "phase_energies_ev"),
        "impact_parameters_m": (_parse_float_list, "impact_parameters_m"),
    },
    "verify_force": {
        "lengths_over_radius": (_parse_float_list, "lengths_over_radius"),
        "d_over_radius": (_parse_float_list, "d_over_radius"),
        "quadrature_tolerance": (_parse_float, "quadrature_tolerance"),
        "agreement_tolerance": (_parse_float, "agreement_tolerance"),
    },
    "numerics": {
        "contour_tolerance": (_parse_float, "contour_tolerance"),
        "window_speed_ratio": (_parse_float, "window_speed_ratio"),
        "profile_tolerance": (_parse_float, "profile_tolerance"),
        "phase_tolerance": (_parse_float, "phase_tolerance"),
        "image_clearance_m": (_parse_float, "image_clearance_m"),
        "image_length_m": (_parse_float, "image_length_m"),
    },
    "output": {
        "directory": (_parse_str, "out_dir"),
        "render_figures": (_parse_bool, "render_figures"),
    },
}

# Lowercased lookup (configparser lowercases option names).
_LOWER_SCHEMA = {
    section: {key.lower(): (key, parse, attr) for key, (parse, attr) in keys.items()}
    for section, keys in _SCHEMA.items()
}


@dataclass(frozen=True)
class RunConfig:
    """Effective configuration of one CLI invocation."""

    # [solenoid]
    bore_radius_m: float = 1.25e-3
    winding_density_per_m: float = 3000.0
    core_permeability: float = 150.0
    solenoid_length_m: float = 0.05
    # [apparatus]
    flight_path_length_m: float = 0.3
    kinetic_energy_ev: float = 40.0
    jitter_sigma_s: float = 1e-10
    shots_per_setting: int = 100
    force_mode: str = FORCE_ABSENT
    seed: int = 20260810
    delay_multiplier: float = 1.0
    # [trajectory]
    impact_parameter_m: float = 5e-3
    # [sweep]
    currents_a: tuple = tuple(i * 0.01 / 9.0 for i in range(10))
    energies_ev: tuple = (20.0, 30.0, 40.0, 60.0, 80.0, 100.0)
    phase_currents_a: tuple = (0.001, 0.005, 0.01)
    phase_energies_ev: tuple = (20.0, 40.0, 80.0)
    impact_parameters_m: tuple = (5e-3, 1.2e-2, 2.5e-2, 5e-2)
    # [verify_force]
    lengths_over_radius: tuple = (100.0, 200.0, 400.0)
    d_over_radius: tuple = (10.0, 20.0)
    quadrature_tolerance: float = 1e-9
    agreement_tolerance: float = 0.01
    # [numerics]
    contour_tolerance: float = 1e-12
    window_speed_ratio: float = 1e4
    profile_tolerance: float = 1e-6
    phase_tolerance: float = 1e-3
    image_clearance_m: float = 1e-3
    image_length_m: float = 1e-2
    # [output]
    out_dir: str = "out"
    render_figures: bool = True

    def solenoid(self, current: float = 0.0) -> SolenoidSpec:
        return SolenoidSpec(
            bore_radius=self.bore_radius_m,
            winding_density=self.winding_density_per_m,
            current=current,
            core_permeability=self.core_permeability,
            length=self.solenoid_length_m,
        )

    def apparatus(self) -> ApparatusConfig:
        return ApparatusConfig(
            flight_path_length=self.flight_path_length_m,
            solenoid=self.solenoid(),
            kinetic_energy_ev=self.kinetic_energy_ev,
            jitter_sigma=self.jitter_sigma_s,
            shots_per_setting=self.shots_per_setting,
            force_mode=self.force_mode,
            rng_seed=self.seed,
            delay_multiplier=self.delay_multiplier,
        )

    def echo(self) -> str:
        """Deterministic INI rendering of the effective configuration."""

        def render(value) -> str:
            if isinstance(value, bool):
                return "true" if value else "false"
            if isinstance(value, float):
                return format_float(value)
            if isinstance(value, tuple):
                return ", ".join(format_float(v) for v in value)
            return str(value)

        lines = []
        for section, keys in _SCHEMA.items():
            lines.append(f"[{section}]")
            for key, (_, attr) in keys.items():
                lines.append(f"{key} = {render(getattr(self, attr))}")
            lines.append("")
        return "\n".join(lines)


def load_config(path) -> RunConfig:
    try:
        with open(path) as handle:
            text = handle.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path!r}: {exc}") from exc
    return parse_config_text(text)


def parse_config_text(text: str) -> RunConfig:
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_file(io.StringIO(text))
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    overrides = {}
    for section in parser.sections():
        if section not in _LOWER_SCHEMA:
            raise ConfigError(f"unknown config section [{section}]")
        for key, raw in parser.items(section):
            entry = _LOWER_SCHEMA[section].get(key.lower())
            if entry is None:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")
            canonical, parse, attr = entry
            if canonical.lower().endswith(_UNIT_SUFFIXES):
                _parse_float_list(raw)  # unit-suffixed keys must be numeric
            overrides[attr] = parse(raw)
    config = RunConfig(**overrides)
    _validate(config)
    return config


def _validate(config: RunConfig) -> None:
    if config.seed < 0 or config.seed > 2**64 - 1:
        raise ConfigError("seed must fit in an unsigned 64-bit integer")
    positive = [
        "bore_radius_m", "winding_density_per_m", "solenoid_length_m",
        "flight_path_length_m", "kinetic_energy_ev", "impact_parameter_m",
        "quadrature_tolerance", "agreement_tolerance", "contour_tolerance",
        "window_speed_ratio", "profile_tolerance", "phase_tolerance",
        "image_clearance_m", "image_length_m",
    ]
    for name in positive:
        if not getattr(config, name) > 0.0:
            raise ConfigError(f"{name} must be > 0")
    if config.core_permeability < 1.0:
        raise ConfigError("core_permeability must be >= 1")
    if config.jitter_sigma_s < 0.0:
        raise ConfigError("jitter_sigma_s must be >= 0")
    if config.shots_per_setting < 1:
        raise ConfigError("shots_per_setting must be >= 1")
    if config.impact_parameter_m <= config.bore_radius_m:
        raise ConfigError("impact_parameter_m must exceed bore_radius_m")
    for d in config.impact_parameters_m:
        if d <= config.bore_radius_m:
            raise ConfigError("every phase-check impact parameter must exceed the bore radius")
