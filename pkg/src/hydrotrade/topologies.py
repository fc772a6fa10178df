"""Mass, loss and battery evaluation of the baseline and multimodal actuators.

Every evaluator takes a :class:`StudyParameters` and returns a
:class:`TopologyResult` holding an itemized bill of materials. The slave
cylinder at the joint is common to every design and never counted; master
cylinders are counted once per hydraulic line.

Requirements are parametrized by the task-separation ratio ``lam``:

    task1  lifting   torque T        speed W/lam   no inertia bound
    task2  walking   torque T/lam    speed W       inertia bound J
    task3  jumping   torque T        speed W       inertia bound J
    task4  holding   torque T        speed 0
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, Optional, Tuple

from .components import MPA, ComponentLibrary, battery_mass
from .scaling import FORCE, POWER, TORQUE, VOLUME
from .drivetrain import (
    IDLE, DrivetrainSolution, OperatingPointLoss, TaskRequirement, motor_loss,
    operating_point, solve_ratio,
)
from .errors import DomainError

RPM = 2 * math.pi / 60
OFFSET_FILL_POWER = 230.0  # W, fills the accumulator in about 5 s


@dataclass(frozen=True)
class StudyParameters:
    lam: float = 3.0
    n_dof: int = 1
    base_torque: float = 100.0
    base_speed: float = 9.4
    inertia_bound: float = 0.035
    gamma: float = 0.0
    cycle_hours: Optional[float] = None
    pump_power_override: Optional[float] = None
    accumulator_volume: float = 0.1
    design_pressure: float = 21 * MPA
    pump_shaft_rpm: float = 3000.0
    ratio_step: Optional[float] = 0.1
    paper_strict: bool = False
    library: ComponentLibrary = field(default_factory=ComponentLibrary)

    def __post_init__(self):
        if not self.lam >= 1:
            raise DomainError(f"lambda must be >= 1, got {self.lam}")
        if not 0 <= self.gamma <= 1:
            raise DomainError(f"gamma must lie in [0, 1], got {self.gamma}")
        if int(self.n_dof) != self.n_dof or self.n_dof < 1:
            raise DomainError(f"n_dof must be a positive integer, got {self.n_dof}")
        if self.cycle_hours is not None and self.cycle_hours < 0:
            raise DomainError("cycle duration must be non-negative")
        for name in ("base_torque", "base_speed", "inertia_bound", "accumulator_volume",
                     "design_pressure", "pump_shaft_rpm"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")
        if self.pump_power_override is not None and not self.pump_power_override > 0:
            raise DomainError("pump power override must be positive")

    @property
    def pump_shaft_speed(self):
        return self.pump_shaft_rpm * RPM

    @property
    def transmission_efficiency(self):
        return self.library.ball_screw.efficiency

    def task(self, number: int) -> TaskRequirement:
        T, W, J, lam = self.base_torque, self.base_speed, self.inertia_bound, self.lam
        if number == 1:
            return TaskRequirement(T, W / lam, None, name="task1")
        if number == 2:
            return TaskRequirement(T / lam, W, J, name="task2")
        if number == 3:
            return TaskRequirement(T, W, J, name="task3")
        if number == 4:
            return TaskRequirement(T, 0.0, None, name="task4")
        raise DomainError(f"no task {number}")


@dataclass(frozen=True)
class Item:
    kind: str
    label: str
    requirement: float
    unit: str
    unit_mass: float
    count: int = 1
    formula: str = ""
    extrapolated: bool = False

    @property
    def mass(self):
        return self.unit_mass * self.count


@dataclass(frozen=True)
class BillOfMaterials:
    items: Tuple[Item, ...]

    @property
    def total_mass(self):
        return math.fsum(i.mass for i in self.items)

    def mass_of(self, kind):
        return math.fsum(i.mass for i in self.items if i.kind == kind)

    def __iter__(self):
        return iter(self.items)


@dataclass(frozen=True)
class TopologyResult:
    name: str
    bom: BillOfMaterials
    per_task_losses: Dict[str, OperatingPointLoss]
    duties: Dict[str, float]
    mean_cycle_loss: float
    battery_mass: Optional[float]
    feasible: bool
    reason: str = ""
    n_dof: int = 1
    drivetrains: Dict[str, DrivetrainSolution] = field(default_factory=dict)
    diagnostics: Dict[str, float] = field(default_factory=dict)

    @property
    def total_mass(self):
        return self.bom.total_mass

    @property
    def mass_per_dof(self):
        return self.bom.total_mass / self.n_dof

    @property
    def mass_plus_battery(self):
        return self.mass_per_dof + (self.battery_mass or 0.0)


# -- bill-of-materials helpers ------------------------------------------------

def _motor_item(p: StudyParameters, sol: DrivetrainSolution, label, count=1):
    ev = p.library.motor.mass_law.evaluate(sol.motor_torque, TORQUE)
    return Item("motor", label, sol.motor_torque, "N*m", ev.value, count,
                p.library.motor.mass_law.formula(sol.motor_torque), ev.extrapolated)


def _ball_screw_item(p: StudyParameters, torque, label, count=1):
    force = p.library.cylinder.force_for_torque(torque)
    law = p.library.ball_screw.density_law
    ev = law.evaluate(force, FORCE)
    return Item("ball_screw", label, force, "N", force / ev.value, count,
                f"{force:.4g}/({law.formula(force)})", ev.extrapolated)


def _cylinder_item(p: StudyParameters, label="master cylinder", count=1):
    m = p.library.cylinder.mass
    return Item("cylinder", label, p.library.cylinder.max_force, "N", m, count, "catalog")


def _valve_item(p: StudyParameters, label="valve", count=1):
    v = p.library.valve
    return Item("valve", label, p.design_pressure, "Pa", v.total_mass, count,
                f"{v.body_mass:.4g} body + {v.actuation_mass:.4g} actuation")


def _accumulator_item(p: StudyParameters):
    law = p.library.accumulator.mass_law
    ev = law.evaluate(p.accumulator_volume, VOLUME)
    return Item("accumulator", "accumulator", p.accumulator_volume, "L", ev.value, 1,
                law.formula(p.accumulator_volume), ev.extrapolated)


def _pump_items(p: StudyParameters, power):
    """Pump plus, unless paper-strict, the electric motor that drives it."""
    law = p.library.pump.density_law
    ev = law.evaluate(power, POWER)
    items = [Item("pump", "pump", power, "W", power / ev.value, 1,
                  f"{power:.4g}/({law.formula(power)})", ev.extrapolated)]
    if not p.paper_strict:
        torque = power / p.pump_shaft_speed
        mlaw = p.library.motor.mass_law
        mev = mlaw.evaluate(torque, TORQUE)
        items.append(Item("motor", "pump drive motor", torque, "N*m", mev.value, 1,
                          mlaw.formula(torque), mev.extrapolated))
    return items


def _pump_drive_loss(p: StudyParameters, power, load_fraction=1.0):
    torque = power / p.pump_shaft_speed
    return motor_loss(p.library.motor, torque, torque * load_fraction)


# -- shared pieces ------------------------------------------------------------

def _solve(p: StudyParameters, req: TaskRequirement, peak_torque=None):
    return solve_ratio(req, p.library.motor, p.transmission_efficiency,
                       peak_torque=peak_torque, ratio_step=p.ratio_step)


def _op(p: StudyParameters, req, sol):
    return operating_point(req, sol, p.library.motor, p.transmission_efficiency)


def _pressure_reasons(p: StudyParameters, *, pump=False, accumulator=False, valve=False):
    lib = p.library
    limits = [("cylinder", lib.cylinder.rated_pressure)]
    if pump:
        limits.append(("pump", lib.pump.max_pressure))
    if accumulator:
        limits.append(("accumulator", lib.accumulator.max_pressure))
    if valve:
        limits.append(("valve", lib.valve.rated_pressure))
    return [f"design pressure {p.design_pressure / MPA:.4g} MPa exceeds {name} rating "
            f"{lim / MPA:.4g} MPa" for name, lim in limits if p.design_pressure > lim * (1 + 1e-12)]


def _force_reasons(p: StudyParameters, torque, line):
    cyl = p.library.cylinder
    force = cyl.force_for_torque(torque)
    capacity = min(cyl.max_force, p.design_pressure * cyl.piston_area)
    if force > capacity * (1 + 1e-9):
        return [f"{line} needs {force:.5g} N on the piston, capacity {capacity:.5g} N"]
    return []


def _finish(name, p, items, losses, duties, *, reasons=(), n_dof=1, drivetrains=None,
            diagnostics=None):
    mean = math.fsum(duties.get(k, 0.0) * v.total_loss for k, v in losses.items())
    battery = None
    if p.cycle_hours is not None:
        battery = battery_mass(mean * p.cycle_hours, p.library.battery)
    reasons = list(reasons)
    return TopologyResult(
        name=name, bom=BillOfMaterials(tuple(items)), per_task_losses=dict(losses),
        duties=dict(duties), mean_cycle_loss=mean, battery_mass=battery,
        feasible=not reasons, reason="; ".join(reasons), n_dof=n_dof,
        drivetrains=dict(drivetrains or {}), diagnostics=dict(diagnostics or {}),
    )


def _study_tasks(p: StudyParameters, study):
    """Operating points and duty weights used for a study's loss comparison."""
    if study in ("two-speed", "two-speed-ndof"):
        return {"task1": p.task(1), "task2": p.task(2)}, {"task1": 1.0, "task2": 0.0}
    if study == "boost":
        return ({"task2": p.task(2), "task3": p.task(3)},
                {"task2": 1 - 1 / p.lam, "task3": 1 / p.lam})
    if study == "offset":
        return {"task3": p.task(3)}, {"task3": 1.0}
    if study == "locking":
        return {"task3": p.task(3), "task4": p.task(4)}, {"task3": 1 - p.gamma, "task4": p.gamma}
    raise DomainError(f"unknown study {study!r}")


# -- evaluators ---------------------------------------------------------------

def eval_baseline(p: StudyParameters, study: str = "two-speed") -> TopologyResult:
    """Single motor, ball screw and master cylinder sized for the whole envelope.

    For the power-boost study the full output torque is a transient peak,
    so the motor only needs half of it continuously (or the walking
    torque, whichever is larger).
    """
    T = p.base_torque
    if study == "boost":
        sol = _solve(p, p.task(2), peak_torque=T)
    else:
        sol = _solve(p, p.task(3))
    items = [_motor_item(p, sol, "motor"), _ball_screw_item(p, T, "ball screw"),
             _cylinder_item(p)]
    tasks, duties = _study_tasks(p, study)
    losses = {k: _op(p, req, sol) for k, req in tasks.items()}
    reasons = _force_reasons(p, T, "baseline line") + _pressure_reasons(p)
    return _finish("baseline", p, items, losses, duties, reasons=reasons,
                   drivetrains={"M": sol})


def eval_two_speed_1dof(p: StudyParameters) -> TopologyResult:
    T = p.base_torque
    t1, t2 = p.task(1), p.task(2)
    # M1 sees no inertia bound: in the flow-summing fast mode the output inertia
    # is dominated by the lightly geared M2 branch
    m1 = _solve(p, t1)
    m2 = _solve(p, t2)
    items = [
        _motor_item(p, m1, "M1 (high force)"), _motor_item(p, m2, "M2 (high speed)"),
        _ball_screw_item(p, T, "M1 ball screw"), _ball_screw_item(p, t2.torque, "M2 ball screw"),
        _cylinder_item(p, "master cylinders", 2), _valve_item(p, "selection valves", 2),
    ]
    losses = {"task1": _op(p, t1, m1), "task2": _op(p, t2, m2)}
    _, duties = _study_tasks(p, "two-speed")
    reasons = _force_reasons(p, T, "M1 line") + _pressure_reasons(p, valve=True)
    return _finish("two-speed", p, items, losses, duties, reasons=reasons,
                   drivetrains={"M1": m1, "M2": m2})


def eval_two_speed_ndof(p: StudyParameters) -> TopologyResult:
    """Per-DOF fast motors plus one shared pump serving every slow lift."""
    n = p.n_dof
    if n < 2:
        raise DomainError("the shared-pump design needs n_dof >= 2")
    T = p.base_torque
    t1, t2 = p.task(1), p.task(2)
    pump = p.library.pump
    m2 = _solve(p, t2)
    power = n * t1.power / pump.efficiency
    items = [
        _motor_item(p, m2, "M2 (high speed)", n),
        _ball_screw_item(p, t2.torque, "M2 ball screw", n),
        _cylinder_item(p, "master cylinder", n),
        _valve_item(p, "selection valves", 2 * n),
        _valve_item(p, "pump line valve"),
        *_pump_items(p, power),
    ]
    mech = t1.power
    pump_loss = (1 / pump.efficiency - 1) * mech
    drive = _pump_drive_loss(p, power) / n
    task1 = OperatingPointLoss.from_parts(mech, drive, 0.0, pump_loss)
    losses = {"task1": task1, "task2": _op(p, t2, m2)}
    _, duties = _study_tasks(p, "two-speed-ndof")
    reasons = (_force_reasons(p, T, "pump line")
               + _pressure_reasons(p, pump=True, valve=True))
    return _finish("two-speed-ndof", p, items, losses, duties, reasons=reasons, n_dof=n,
                   drivetrains={"M2": m2}, diagnostics={"pump_power_W": power})


def _accumulator_diagnostics(p: StudyParameters):
    cyl = p.library.cylinder
    displaced_l = cyl.piston_area * cyl.stroke * 1e3
    # isothermal gas: relative pressure change over one full stroke
    droop = displaced_l / p.accumulator_volume
    return {"displaced_volume_L": displaced_l, "pressure_droop_fraction": droop}


def eval_accumulator_boost(p: StudyParameters) -> TopologyResult:
    T = p.base_torque
    t2, t3 = p.task(2), p.task(3)
    motor = p.library.motor
    m2 = _solve(p, t2)
    m2_peak = min(T, motor.peak_torque_factor * t2.torque)
    shortfall = T - m2_peak
    power = t2.power / p.library.pump.efficiency
    items = [
        _motor_item(p, m2, "M2 (high speed)"),
        _ball_screw_item(p, m2_peak, "M2 ball screw"),
        _cylinder_item(p),
        _accumulator_item(p),
        *_pump_items(p, power),
        _valve_item(p, "mode valves", 2),
    ]
    # during the boost M2 runs at its peak while the accumulator adds the rest
    boost = _op(p, TaskRequirement(m2_peak, t3.speed, t3.inertia_bound), m2)
    boost = OperatingPointLoss.from_parts(t3.power, boost.joule_loss, boost.transmission_loss)
    losses = {"task2": _op(p, t2, m2), "task3": boost}
    _, duties = _study_tasks(p, "boost")
    reasons = (_force_reasons(p, shortfall, "accumulator")
               + _force_reasons(p, m2_peak, "M2 line")
               + _pressure_reasons(p, pump=True, accumulator=True, valve=True))
    diag = {"accumulator_torque_Nm": shortfall, "pump_power_W": power, **_accumulator_diagnostics(p)}
    return _finish("boost", p, items, losses, duties, reasons=reasons,
                   drivetrains={"M2": m2}, diagnostics=diag)


def eval_accumulator_offset(p: StudyParameters) -> TopologyResult:
    """Accumulator holds a constant preload; M2 only covers the dynamic range."""
    T = p.base_torque
    t2, t3 = p.task(2), p.task(3)
    m2 = _solve(p, t2)
    offset = T * (1 - 1 / p.lam)
    power = p.pump_power_override if p.pump_power_override is not None else OFFSET_FILL_POWER
    items = [
        _motor_item(p, m2, "M2 (high speed)"),
        _ball_screw_item(p, t2.torque, "M2 ball screw"),
        _cylinder_item(p),
        _accumulator_item(p),
        *_pump_items(p, power),
        _valve_item(p, "mode valves", 2),
    ]
    # the lossless preload supplies the rest of the output power
    dyn = _op(p, TaskRequirement(t2.torque, t3.speed, t3.inertia_bound), m2)
    losses = {"task3": OperatingPointLoss.from_parts(t3.power, dyn.joule_loss,
                                                     dyn.transmission_loss)}
    _, duties = _study_tasks(p, "offset")
    reasons = (_force_reasons(p, offset, "accumulator")
               + _force_reasons(p, t2.torque, "M2 line")
               + _pressure_reasons(p, pump=True, accumulator=True, valve=True))
    diag = {"accumulator_torque_Nm": offset, "pump_power_W": power, **_accumulator_diagnostics(p)}
    return _finish("offset", p, items, losses, duties, reasons=reasons,
                   drivetrains={"M2": m2}, diagnostics=diag)


def eval_locking_valve(p: StudyParameters) -> TopologyResult:
    """Baseline drivetrain plus one 2/2 valve that blocks the flow while holding."""
    T = p.base_torque
    t3 = p.task(3)
    sol = _solve(p, t3)
    items = [_motor_item(p, sol, "motor"), _ball_screw_item(p, T, "ball screw"),
             _cylinder_item(p), _valve_item(p, "locking valve")]
    losses = {"task3": _op(p, t3, sol), "task4": IDLE}
    _, duties = _study_tasks(p, "locking")
    reasons = _force_reasons(p, T, "locked line") + _pressure_reasons(p, valve=True)
    return _finish("locking", p, items, losses, duties, reasons=reasons,
                   drivetrains={"M": sol})


TOPOLOGIES: Dict[str, Callable[[StudyParameters], TopologyResult]] = {
    "two-speed": eval_two_speed_1dof,
    "two-speed-ndof": eval_two_speed_ndof,
    "boost": eval_accumulator_boost,
    "offset": eval_accumulator_offset,
    "locking": eval_locking_valve,
}


def evaluate(name: str, p: StudyParameters) -> TopologyResult:
    """Evaluate a topology by name; ``baseline:<study>`` selects the baseline."""
    if name == "baseline":
        return eval_baseline(p)
    if name.startswith("baseline:"):
        return eval_baseline(p, name.split(":", 1)[1])
    try:
        fn = TOPOLOGIES[name]
    except KeyError:
        raise DomainError(f"unknown topology {name!r}; choose from "
                          f"baseline, {', '.join(TOPOLOGIES)}") from None
    return fn(p)


def with_library(p: StudyParameters, **components) -> StudyParameters:
    return replace(p, library=replace(p.library, **components))
