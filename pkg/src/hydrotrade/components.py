"""Catalog-derived models for every component that appears in a bill of materials.

Default values reproduce the reference scaling table for frameless torque
motors, NSK ball screws, composite accumulators, miniature axial piston pumps,
the KNR 21 MPa cylinder and the custom motorized ball valve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .errors import DomainError
from .scaling import (
    FORCE, FORCE_DENSITY, INERTIA, MASS, POWER, POWER_DENSITY, SPEED, TORQUE, VOLUME,
    ScalingLaw, component_mass_from_inverse_density, eval_law,
)

MPA = 1e6


@dataclass(frozen=True)
class MotorModel:
    mass_law: ScalingLaw = ScalingLaw(0.30, 0.71, TORQUE, MASS)
    speed_law: ScalingLaw = ScalingLaw(309.0, -0.64, TORQUE, SPEED)
    inertia_law: ScalingLaw = ScalingLaw(2.1e-5, 1.42, TORQUE, INERTIA)
    peak_torque_factor: float = 2.0
    rated_efficiency: float = 0.85

    def __post_init__(self):
        if not 0 < self.rated_efficiency < 1:
            raise DomainError("motor rated efficiency must lie in (0, 1)")
        if not self.peak_torque_factor >= 1:
            raise DomainError("peak torque factor must be >= 1")

    def mass(self, torque):
        return eval_law(self.mass_law, torque, TORQUE)

    def nominal_speed(self, torque):
        return eval_law(self.speed_law, torque, TORQUE)

    def inertia(self, torque):
        return eval_law(self.inertia_law, torque, TORQUE)


@dataclass(frozen=True)
class BallScrewModel:
    # 0.5-15 kN is the catalog span the constant density was fitted on
    density_law: ScalingLaw = ScalingLaw(15000.0, 0.0, FORCE, FORCE_DENSITY, (500.0, 15000.0))
    efficiency: float = 0.9

    def __post_init__(self):
        if not 0 < self.efficiency <= 1:
            raise DomainError("ball screw efficiency must lie in (0, 1]")

    @property
    def force_density(self):
        return self.density_law.k if self.density_law.a == 0 else None

    def mass(self, force):
        return component_mass_from_inverse_density(force, self.density_law, FORCE)


@dataclass(frozen=True)
class AccumulatorModel:
    """Gas-spring accumulator, treated as a lossless spring."""

    mass_law: ScalingLaw = ScalingLaw(0.95, 0.56, VOLUME, MASS)
    max_compression_ratio: float = 6.0
    max_pressure: float = 24 * MPA

    def mass(self, volume_l):
        return eval_law(self.mass_law, volume_l, VOLUME)


@dataclass(frozen=True)
class PumpModel:
    # 0.2-6.5 kW output span of the reference pump series
    density_law: ScalingLaw = ScalingLaw(133.0, 0.30, POWER, POWER_DENSITY, (200.0, 6500.0))
    efficiency: float = 0.80
    max_pressure: float = 21 * MPA

    def __post_init__(self):
        if not 0 < self.efficiency <= 1:
            raise DomainError("pump efficiency must lie in (0, 1]")

    def mass(self, power):
        return component_mass_from_inverse_density(power, self.density_law, POWER)


@dataclass(frozen=True)
class CylinderModel:
    """Fixed-size 21 MPa cylinder; one instance per hydraulic line.

    The default lever arm is 1/55 m so that 5500 N maps onto exactly
    100 N*m, the pairing the catalog sizing is built around.
    """

    mass: float = 0.56
    stroke: float = 0.05
    max_force: float = 5500.0
    effective_radius: float = 100.0 / 5500.0
    rated_pressure: float = 21 * MPA

    @property
    def max_torque(self):
        return self.max_force * self.effective_radius

    @property
    def piston_area(self):
        return self.max_force / self.rated_pressure

    def force_for_torque(self, torque):
        return torque / self.effective_radius

    def torque_at_pressure(self, pressure):
        return pressure * self.piston_area * self.effective_radius


@dataclass(frozen=True)
class ValveModel:
    body_mass: float = 0.047
    actuation_mass: float = 0.138
    inner_diameter: float = 6.3e-3
    rated_pressure: float = 21 * MPA
    breakaway_torque: float = 1.0
    opening_time: float = 0.05
    opening_angle: float = math.pi / 2
    actuation_power: float = field(default=math.nan, compare=False)

    @property
    def total_mass(self):
        return self.body_mass + self.actuation_mass

    @property
    def required_power(self):
        return self.breakaway_torque * self.opening_angle / self.opening_time


def size_valve(pressure=21 * MPA, inner_diameter=6.3e-3, opening_angle=math.pi / 2,
               opening_time=0.05, breakaway_torque=1.0, base: ValveModel = ValveModel()):
    """Return a valve with catalog masses and its actuation power attached.

    The actuator must overcome the seat breakaway torque while turning the
    ball through ``opening_angle`` in ``opening_time``.
    """
    values = dict(pressure=pressure, inner_diameter=inner_diameter,
                  opening_angle=opening_angle, opening_time=opening_time,
                  breakaway_torque=breakaway_torque)
    for name, v in values.items():
        if not v > 0:
            raise DomainError(f"valve {name} must be positive, got {v}")
    power = breakaway_torque * opening_angle / opening_time
    return replace(base, rated_pressure=pressure, inner_diameter=inner_diameter,
                   opening_angle=opening_angle, opening_time=opening_time,
                   breakaway_torque=breakaway_torque, actuation_power=power)


@dataclass(frozen=True)
class BatteryModel:
    specific_energy: float = 150.0  # Wh/kg, LiPo

    def __post_init__(self):
        if not self.specific_energy > 0:
            raise DomainError("battery specific energy must be positive")


def battery_mass(energy_wh, model: BatteryModel = BatteryModel()):
    if energy_wh < 0:
        raise DomainError(f"battery energy must be non-negative, got {energy_wh}")
    return energy_wh / model.specific_energy


@dataclass(frozen=True)
class ComponentLibrary:
    """The full set of component models a study draws on."""

    motor: MotorModel = MotorModel()
    ball_screw: BallScrewModel = BallScrewModel()
    accumulator: AccumulatorModel = AccumulatorModel()
    pump: PumpModel = PumpModel()
    cylinder: CylinderModel = CylinderModel()
    valve: ValveModel = size_valve()
    battery: BatteryModel = BatteryModel()
