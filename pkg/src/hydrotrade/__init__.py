"""Sizing and trade studies for multimodal hydrostatic actuators."""

__version__ = "0.1.0"

from .analysis import SweepSpec, find_crossover, sensitivity_scan, sweep
from .components import ComponentLibrary, battery_mass, size_valve
from .drivetrain import TaskRequirement, motor_loss, operating_point, solve_ratio
from .scaling import ScalingLaw, component_mass_from_inverse_density, eval_law, fit_scaling_law
from .topologies import StudyParameters, evaluate

__all__ = [
    "ComponentLibrary", "ScalingLaw", "StudyParameters", "SweepSpec", "TaskRequirement",
    "battery_mass", "component_mass_from_inverse_density", "eval_law", "evaluate",
    "find_crossover", "fit_scaling_law", "motor_loss", "operating_point",
    "sensitivity_scan", "size_valve", "solve_ratio", "sweep",
]
