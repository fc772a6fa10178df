"""Reduction-ratio selection and the motor/transmission loss model.

The largest usable ratio is bounded by two motor properties that both scale
with the motor's own torque rating:

    N = min(sqrt(J_out / J_motor(tau_M)), omega_motor(tau_M) / omega_out)
    tau_M = tau_out / (eta * N)

so ``N`` and ``tau_M`` are found together as a fixed point on ``tau_M``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .components import MotorModel
from .errors import CapabilityError, DomainError, InfeasibleError, SolverError

INERTIA = "inertia"
SPEED = "speed"

# slack for floating-point comparisons against rated limits
_LIMIT_SLACK = 1e-9


@dataclass(frozen=True)
class TaskRequirement:
    torque: float
    speed: float
    inertia_bound: Optional[float] = None
    duty: float = 1.0
    name: str = ""

    def __post_init__(self):
        if self.torque < 0 or self.speed < 0:
            raise DomainError("task torque and speed must be non-negative")
        if self.inertia_bound is not None and not self.inertia_bound > 0:
            raise DomainError("inertia bound must be positive when given")
        if not 0 <= self.duty <= 1:
            raise DomainError("task duty must lie in [0, 1]")

    @property
    def power(self):
        return self.torque * self.speed


@dataclass(frozen=True)
class DrivetrainSolution:
    ratio: float
    motor_torque: float
    binding: str
    motor_mass: float
    motor_nominal_speed: float
    motor_inertia: float
    converged: bool
    residual: float
    iterations: int
    inertia_limit: float  # sqrt(J_out/J_M) at the returned motor torque
    speed_limit: float  # omega_M/omega_out at the returned motor torque

    @property
    def reflected_inertia(self):
        return self.motor_inertia * self.ratio**2


def ratio_limits(req: TaskRequirement, motor: MotorModel, motor_torque: float):
    """Both branches of the ratio bound at a given motor torque (inf if unconstrained)."""
    if req.inertia_bound is None:
        inertia = math.inf
    else:
        inertia = math.sqrt(req.inertia_bound / motor.inertia(motor_torque))
    speed = math.inf if req.speed == 0 else motor.nominal_speed(motor_torque) / req.speed
    return inertia, speed


def solve_ratio(req: TaskRequirement, motor: MotorModel, efficiency: float = 0.9, *,
                peak_torque: Optional[float] = None, ratio_step: Optional[float] = None,
                damping: float = 0.5, rtol: float = 1e-9,
                max_iter: int = 10_000) -> DrivetrainSolution:
    """Largest feasible reduction ratio and the motor torque rating it implies.

    ``peak_torque`` is an output torque that only has to be met transiently;
    the motor then needs ``peak_torque / peak_torque_factor`` continuous.

    ``ratio_step`` quantizes the ratio downward to a multiple of the step.
    Every ratio below the fixed point remains feasible, so rounding down
    never violates the inertia or speed bound.
    """
    if not req.torque > 0:
        raise DomainError("output torque must be positive to size a drivetrain")
    if req.speed == 0 and req.inertia_bound is None:
        raise DomainError("need a speed or an inertia bound to limit the ratio")
    if not 0 < efficiency <= 1:
        raise DomainError("transmission efficiency must lie in (0, 1]")
    if not 0 < damping <= 1:
        raise DomainError("damping must lie in (0, 1]")

    torque = req.torque
    if peak_torque is not None:
        torque = max(torque, peak_torque / motor.peak_torque_factor)

    def required_motor_torque(tau_m):
        n = min(ratio_limits(req, motor, tau_m))
        return torque / (efficiency * n)

    tau = torque / efficiency
    converged = False
    residual = math.inf
    it = 0
    for it in range(1, max_iter + 1):
        try:
            target = required_motor_torque(tau)
        except (DomainError, OverflowError, ZeroDivisionError) as exc:
            raise InfeasibleError(f"ratio iteration left the positive domain: {exc}") from exc
        residual = abs(target - tau) / tau
        if residual <= rtol:
            converged = True
            break
        tau = (1 - damping) * tau + damping * target
        if not (math.isfinite(tau) and tau > 0):
            raise InfeasibleError("no positive fixed point for the motor torque")
    if not converged:
        raise SolverError(f"ratio iteration did not converge in {max_iter} steps "
                          f"(residual {residual:.3g})", residual, it)

    inertia_n, speed_n = ratio_limits(req, motor, tau)
    binding = INERTIA if inertia_n <= speed_n else SPEED
    ratio = min(inertia_n, speed_n)

    if ratio_step:
        quantized = math.floor(ratio / ratio_step + 1e-9) * ratio_step
        if quantized > 0:
            ratio = quantized
            tau = torque / (efficiency * ratio)
            inertia_n, speed_n = ratio_limits(req, motor, tau)

    return DrivetrainSolution(
        ratio=ratio, motor_torque=tau, binding=binding,
        motor_mass=motor.mass(tau), motor_nominal_speed=motor.nominal_speed(tau),
        motor_inertia=motor.inertia(tau), converged=converged, residual=residual,
        iterations=it, inertia_limit=inertia_n, speed_limit=speed_n,
    )


def rated_joule_loss(motor: MotorModel, tau_continuous):
    """Copper loss at the rated point, calibrated to the rated efficiency."""
    rated_power = tau_continuous * motor.nominal_speed(tau_continuous)
    return (1 / motor.rated_efficiency - 1) * rated_power


def motor_loss(motor: MotorModel, tau_continuous, tau, omega=0.0):
    """Joule loss at torque ``tau``; quadratic in torque, independent of speed."""
    if not tau_continuous > 0:
        raise DomainError("continuous torque rating must be positive")
    peak = motor.peak_torque_factor * tau_continuous
    if abs(tau) > peak * (1 + _LIMIT_SLACK):
        raise CapabilityError(f"motor torque {abs(tau):.4g} N*m exceeds peak {peak:.4g} N*m")
    return rated_joule_loss(motor, tau_continuous) * (tau / tau_continuous) ** 2


@dataclass(frozen=True)
class OperatingPointLoss:
    mechanical_power: float
    joule_loss: float
    transmission_loss: float
    pump_loss: float
    total_input_power: float
    efficiency: float

    @property
    def total_loss(self):
        return self.joule_loss + self.transmission_loss + self.pump_loss

    @classmethod
    def from_parts(cls, mechanical, joule, transmission, pump=0.0):
        total = mechanical + joule + transmission + pump
        eff = mechanical / total if total > 0 and mechanical > 0 else 0.0
        return cls(mechanical, joule, transmission, pump, total, eff)


IDLE = OperatingPointLoss.from_parts(0.0, 0.0, 0.0)


def operating_point(req: TaskRequirement, sol: DrivetrainSolution, motor: MotorModel,
                    efficiency: float = 0.9) -> OperatingPointLoss:
    """Losses when ``sol`` drives the output at ``req``'s torque and speed."""
    motor_speed = req.speed * sol.ratio
    limit = motor.nominal_speed(sol.motor_torque)
    if motor_speed > limit * (1 + _LIMIT_SLACK):
        raise CapabilityError(f"motor speed {motor_speed:.4g} rad/s exceeds nominal {limit:.4g} rad/s")
    tau_m = req.torque / (efficiency * sol.ratio)
    joule = motor_loss(motor, sol.motor_torque, tau_m, motor_speed)
    mech = req.power
    transmission = (1 / efficiency - 1) * mech if mech > 0 else 0.0
    return OperatingPointLoss.from_parts(mech, joule, transmission)
