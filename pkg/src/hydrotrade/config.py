"""Sectioned key/value study configuration.

Every setting has a default, so an empty file is a valid study. Values are
SI unless the key says otherwise (``pump_shaft_rpm``, ``opening_angle_deg``).
Keys that are not listed in ``SCHEMA`` are rejected with their location.
"""

from __future__ import annotations

import configparser
import io
import math
from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, Optional, Tuple

from .components import (
    AccumulatorModel, BallScrewModel, BatteryModel, ComponentLibrary, CylinderModel,
    MotorModel, PumpModel, size_valve,
)
from .errors import SizingError
from .topologies import StudyParameters


class ConfigError(SizingError):
    pass


@dataclass(frozen=True)
class SweepSettings:
    lambda_lo: float = 1.0
    lambda_hi: float = 4.0
    lambda_points: int = 61
    gamma_points: int = 51
    autonomy_hours: Tuple[float, ...] = (1 / 6, 1.0)
    sensitivity: Tuple[float, ...] = (1.0, 2.0, 4.0)
    sensitivity_lambda_hi: float = 10.0
    ndof: int = 2


@dataclass(frozen=True)
class StudyConfig:
    params: StudyParameters = field(default_factory=StudyParameters)
    sweeps: SweepSettings = field(default_factory=SweepSettings)
    out_dir: str = "out"


# (section, key) -> value kind
SCHEMA: Dict[Tuple[str, str], str] = {
    ("study", "lambda"): "float",
    ("study", "n_dof"): "int",
    ("study", "base_torque"): "float",
    ("study", "base_speed"): "float",
    ("study", "inertia_bound"): "float",
    ("study", "gamma"): "float",
    ("study", "cycle_hours"): "optfloat",
    ("study", "pump_power"): "optfloat",
    ("study", "accumulator_volume"): "float",
    ("study", "design_pressure"): "float",
    ("study", "pump_shaft_rpm"): "float",
    ("study", "ratio_step"): "optfloat",
    ("study", "paper_strict"): "bool",
    ("motor", "k_mass"): "float",
    ("motor", "a_mass"): "float",
    ("motor", "k_speed"): "float",
    ("motor", "a_speed"): "float",
    ("motor", "k_inertia"): "float",
    ("motor", "a_inertia"): "float",
    ("motor", "peak_torque_factor"): "float",
    ("motor", "rated_efficiency"): "float",
    ("ball_screw", "k_density"): "float",
    ("ball_screw", "a_density"): "float",
    ("ball_screw", "efficiency"): "float",
    ("accumulator", "k_mass"): "float",
    ("accumulator", "a_mass"): "float",
    ("accumulator", "max_compression_ratio"): "float",
    ("accumulator", "max_pressure"): "float",
    ("pump", "k_density"): "float",
    ("pump", "a_density"): "float",
    ("pump", "efficiency"): "float",
    ("pump", "max_pressure"): "float",
    ("cylinder", "mass"): "float",
    ("cylinder", "stroke"): "float",
    ("cylinder", "max_force"): "float",
    ("cylinder", "effective_radius"): "float",
    ("cylinder", "rated_pressure"): "float",
    ("valve", "body_mass"): "float",
    ("valve", "actuation_mass"): "float",
    ("valve", "inner_diameter"): "float",
    ("valve", "rated_pressure"): "float",
    ("valve", "breakaway_torque"): "float",
    ("valve", "opening_time"): "float",
    ("valve", "opening_angle_deg"): "float",
    ("battery", "specific_energy"): "float",
    ("sweep", "lambda_lo"): "float",
    ("sweep", "lambda_hi"): "float",
    ("sweep", "lambda_points"): "int",
    ("sweep", "gamma_points"): "int",
    ("sweep", "autonomy_hours"): "floatlist",
    ("sweep", "sensitivity"): "floatlist",
    ("sweep", "sensitivity_lambda_hi"): "float",
    ("sweep", "ndof"): "int",
    ("output", "dir"): "str",
}


def to_flat(cfg: StudyConfig) -> Dict[Tuple[str, str], object]:
    p, lib, sw = cfg.params, cfg.params.library, cfg.sweeps
    m, bs, acc, pump, cyl, v = (lib.motor, lib.ball_screw, lib.accumulator, lib.pump,
                                lib.cylinder, lib.valve)
    return {
        ("study", "lambda"): p.lam,
        ("study", "n_dof"): p.n_dof,
        ("study", "base_torque"): p.base_torque,
        ("study", "base_speed"): p.base_speed,
        ("study", "inertia_bound"): p.inertia_bound,
        ("study", "gamma"): p.gamma,
        ("study", "cycle_hours"): p.cycle_hours,
        ("study", "pump_power"): p.pump_power_override,
        ("study", "accumulator_volume"): p.accumulator_volume,
        ("study", "design_pressure"): p.design_pressure,
        ("study", "pump_shaft_rpm"): p.pump_shaft_rpm,
        ("study", "ratio_step"): p.ratio_step,
        ("study", "paper_strict"): p.paper_strict,
        ("motor", "k_mass"): m.mass_law.k,
        ("motor", "a_mass"): m.mass_law.a,
        ("motor", "k_speed"): m.speed_law.k,
        ("motor", "a_speed"): m.speed_law.a,
        ("motor", "k_inertia"): m.inertia_law.k,
        ("motor", "a_inertia"): m.inertia_law.a,
        ("motor", "peak_torque_factor"): m.peak_torque_factor,
        ("motor", "rated_efficiency"): m.rated_efficiency,
        ("ball_screw", "k_density"): bs.density_law.k,
        ("ball_screw", "a_density"): bs.density_law.a,
        ("ball_screw", "efficiency"): bs.efficiency,
        ("accumulator", "k_mass"): acc.mass_law.k,
        ("accumulator", "a_mass"): acc.mass_law.a,
        ("accumulator", "max_compression_ratio"): acc.max_compression_ratio,
        ("accumulator", "max_pressure"): acc.max_pressure,
        ("pump", "k_density"): pump.density_law.k,
        ("pump", "a_density"): pump.density_law.a,
        ("pump", "efficiency"): pump.efficiency,
        ("pump", "max_pressure"): pump.max_pressure,
        ("cylinder", "mass"): cyl.mass,
        ("cylinder", "stroke"): cyl.stroke,
        ("cylinder", "max_force"): cyl.max_force,
        ("cylinder", "effective_radius"): cyl.effective_radius,
        ("cylinder", "rated_pressure"): cyl.rated_pressure,
        ("valve", "body_mass"): v.body_mass,
        ("valve", "actuation_mass"): v.actuation_mass,
        ("valve", "inner_diameter"): v.inner_diameter,
        ("valve", "rated_pressure"): v.rated_pressure,
        ("valve", "breakaway_torque"): v.breakaway_torque,
        ("valve", "opening_time"): v.opening_time,
        ("valve", "opening_angle_deg"): math.degrees(v.opening_angle),
        ("battery", "specific_energy"): lib.battery.specific_energy,
        ("sweep", "lambda_lo"): sw.lambda_lo,
        ("sweep", "lambda_hi"): sw.lambda_hi,
        ("sweep", "lambda_points"): sw.lambda_points,
        ("sweep", "gamma_points"): sw.gamma_points,
        ("sweep", "autonomy_hours"): sw.autonomy_hours,
        ("sweep", "sensitivity"): sw.sensitivity,
        ("sweep", "sensitivity_lambda_hi"): sw.sensitivity_lambda_hi,
        ("sweep", "ndof"): sw.ndof,
        ("output", "dir"): cfg.out_dir,
    }


def from_flat(f) -> StudyConfig:
    def law(base, k, a):
        return replace(base, k=f[k], a=f[a])

    d = MotorModel()
    motor = MotorModel(
        mass_law=law(d.mass_law, ("motor", "k_mass"), ("motor", "a_mass")),
        speed_law=law(d.speed_law, ("motor", "k_speed"), ("motor", "a_speed")),
        inertia_law=law(d.inertia_law, ("motor", "k_inertia"), ("motor", "a_inertia")),
        peak_torque_factor=f["motor", "peak_torque_factor"],
        rated_efficiency=f["motor", "rated_efficiency"],
    )
    bs = BallScrewModel(
        law(BallScrewModel().density_law, ("ball_screw", "k_density"), ("ball_screw", "a_density")),
        f["ball_screw", "efficiency"])
    acc = AccumulatorModel(
        law(AccumulatorModel().mass_law, ("accumulator", "k_mass"), ("accumulator", "a_mass")),
        f["accumulator", "max_compression_ratio"], f["accumulator", "max_pressure"])
    pump = PumpModel(
        law(PumpModel().density_law, ("pump", "k_density"), ("pump", "a_density")),
        f["pump", "efficiency"], f["pump", "max_pressure"])
    cyl = CylinderModel(f["cylinder", "mass"], f["cylinder", "stroke"], f["cylinder", "max_force"],
                        f["cylinder", "effective_radius"], f["cylinder", "rated_pressure"])
    valve = replace(
        size_valve(pressure=f["valve", "rated_pressure"], inner_diameter=f["valve", "inner_diameter"],
                   opening_angle=math.radians(f["valve", "opening_angle_deg"]),
                   opening_time=f["valve", "opening_time"],
                   breakaway_torque=f["valve", "breakaway_torque"]),
        body_mass=f["valve", "body_mass"], actuation_mass=f["valve", "actuation_mass"])
    lib = ComponentLibrary(motor, bs, acc, pump, cyl, valve,
                           BatteryModel(f["battery", "specific_energy"]))
    params = StudyParameters(
        lam=f["study", "lambda"], n_dof=f["study", "n_dof"],
        base_torque=f["study", "base_torque"], base_speed=f["study", "base_speed"],
        inertia_bound=f["study", "inertia_bound"], gamma=f["study", "gamma"],
        cycle_hours=f["study", "cycle_hours"], pump_power_override=f["study", "pump_power"],
        accumulator_volume=f["study", "accumulator_volume"],
        design_pressure=f["study", "design_pressure"],
        pump_shaft_rpm=f["study", "pump_shaft_rpm"],
        ratio_step=f["study", "ratio_step"], paper_strict=f["study", "paper_strict"],
        library=lib,
    )
    sweeps = SweepSettings(
        f["sweep", "lambda_lo"], f["sweep", "lambda_hi"], f["sweep", "lambda_points"],
        f["sweep", "gamma_points"], tuple(f["sweep", "autonomy_hours"]),
        tuple(f["sweep", "sensitivity"]), f["sweep", "sensitivity_lambda_hi"], f["sweep", "ndof"])
    return StudyConfig(params, sweeps, f["output", "dir"])


def parse_value(kind, text, where):
    text = text.strip()
    try:
        if kind == "float":
            return float(text)
        if kind == "int":
            return int(text)
        if kind == "optfloat":
            if text.lower() in ("", "none", "off"):
                return None
            v = float(text)
            return None if v == 0 else v
        if kind == "bool":
            low = text.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(text)
        if kind == "floatlist":
            return tuple(float(t) for t in text.split(",") if t.strip())
        if kind == "str":
            return text
    except ValueError:
        raise ConfigError(f"{where}: cannot read {text!r} as {kind}") from None
    raise ConfigError(f"{where}: unsupported kind {kind}")


def format_value(kind, value):
    if value is None:
        return "none"
    if kind == "bool":
        return "true" if value else "false"
    if kind == "floatlist":
        return ", ".join(repr(float(v)) for v in value)
    if kind == "float" or kind == "optfloat":
        return repr(float(value))
    return str(value)


def _key_lines(text):
    """Map (section, key) to the line it appears on, for error messages."""
    lines, section = {}, None
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line[0] in "#;":
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            lines.setdefault((section, None), n)
        elif section is not None:
            for sep in ("=", ":"):
                if sep in line:
                    lines.setdefault((section, line.split(sep, 1)[0].strip().lower()), n)
                    break
    return lines


def parse_config(text: str, source: str = "<config>",
                 overrides: Iterable[str] = ()) -> StudyConfig:
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from None
    lines = _key_lines(text)
    sections = {s for s, _ in SCHEMA}
    flat = to_flat(StudyConfig())
    for section in parser.sections():
        if section not in sections:
            n = lines.get((section, None), "?")
            raise ConfigError(f"{source}:{n}: unknown section [{section}]")
        for key, raw in parser.items(section):
            where = f"{source}:{lines.get((section, key), '?')}: [{section}] {key}"
            if (section, key) not in SCHEMA:
                raise ConfigError(f"{where}: unknown key")
            flat[section, key] = parse_value(SCHEMA[section, key], raw, where)
    for item in overrides:
        apply_override(flat, item)
    try:
        return from_flat(flat)
    except (SizingError, ValueError) as exc:
        raise ConfigError(f"{source}: {exc}") from None


def apply_override(flat, item: str):
    where = f"--set {item}"
    if "=" not in item or "." not in item.split("=", 1)[0]:
        raise ConfigError(f"{where}: expected <section>.<key>=<value>")
    path, value = item.split("=", 1)
    section, key = (s.strip().lower() for s in path.split(".", 1))
    if (section, key) not in SCHEMA:
        raise ConfigError(f"{where}: unknown key [{section}] {key}")
    flat[section, key] = parse_value(SCHEMA[section, key], value, where)


def load_config(path: Optional[str] = None, overrides: Iterable[str] = ()) -> StudyConfig:
    if path is None:
        return parse_config("", overrides=overrides)
    with open(path) as fh:
        text = fh.read()
    return parse_config(text, str(path), overrides)


def dump_config(cfg: StudyConfig) -> str:
    flat = to_flat(cfg)
    out = io.StringIO()
    current = None
    for (section, key), kind in SCHEMA.items():
        if section != current:
            if current is not None:
                out.write("\n")
            out.write(f"[{section}]\n")
            current = section
        out.write(f"{key} = {format_value(kind, flat[section, key])}\n")
    return out.getvalue()
