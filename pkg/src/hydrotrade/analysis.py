"""One-dimensional parameter sweeps and break-even (crossover) location."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence, Tuple, Union

from .errors import DomainError, SizingError
from .topologies import TOPOLOGIES, StudyParameters, TopologyResult, eval_baseline

PARAMETERS = ("lambda", "gamma", "n_dof", "autonomy")
METRICS = ("total_mass", "mean_loss", "mass_plus_battery")

Evaluator = Callable[[StudyParameters], TopologyResult]


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    lo: float
    hi: float
    points: int
    topology: Union[str, Evaluator]
    metric: str = "total_mass"
    baseline: Optional[Evaluator] = None

    def __post_init__(self):
        if self.parameter not in PARAMETERS:
            raise DomainError(f"unknown sweep parameter {self.parameter!r}")
        if self.metric not in METRICS:
            raise DomainError(f"unknown metric {self.metric!r}")
        if not self.lo < self.hi:
            raise DomainError(f"empty sweep range [{self.lo}, {self.hi}]")
        if self.points < 2:
            raise DomainError("a sweep needs at least 2 points")
        if isinstance(self.topology, str) and self.topology not in TOPOLOGIES:
            raise DomainError(f"unknown topology {self.topology!r}")
        if self.parameter == "lambda" and self.lo < 1:
            raise DomainError("lambda sweeps must start at >= 1")
        if self.parameter == "gamma" and not (0 <= self.lo and self.hi <= 1):
            raise DomainError("gamma sweeps must stay inside [0, 1]")

    def grid(self):
        step = (self.hi - self.lo) / (self.points - 1)
        xs = [self.lo + i * step for i in range(self.points)]
        xs[-1] = self.hi
        if self.parameter == "n_dof":
            xs = sorted({int(round(x)) for x in xs})
        return xs

    @property
    def study(self):
        return self.topology if isinstance(self.topology, str) else "custom"

    def evaluators(self) -> Tuple[Evaluator, Evaluator]:
        if isinstance(self.topology, str):
            multi = TOPOLOGIES[self.topology]
            study = self.topology
        else:
            multi, study = self.topology, "two-speed"
        base = self.baseline or (lambda p: eval_baseline(p, study))
        return base, multi


@dataclass(frozen=True)
class SweepRow:
    parameter: float
    baseline: float
    multimodal: float
    feasible_baseline: bool = True
    feasible_multimodal: bool = True
    note: str = ""

    @property
    def difference(self):
        return self.baseline - self.multimodal


@dataclass(frozen=True)
class Crossover:
    value: float
    bracket: Tuple[float, float]


@dataclass(frozen=True)
class SweepResult:
    spec: SweepSpec
    rows: Tuple[SweepRow, ...]
    crossover: Optional[Crossover] = None


def with_parameter(params: StudyParameters, name, value) -> StudyParameters:
    if name == "lambda":
        return replace(params, lam=value)
    if name == "gamma":
        return replace(params, gamma=value)
    if name == "n_dof":
        return replace(params, n_dof=int(round(value)))
    if name == "autonomy":
        return replace(params, cycle_hours=value)
    raise DomainError(f"unknown sweep parameter {name!r}")


def metric_of(result: TopologyResult, metric):
    if metric == "total_mass":
        return result.mass_per_dof
    if metric == "mean_loss":
        return result.mean_cycle_loss
    if metric == "mass_plus_battery":
        if result.battery_mass is None:
            raise DomainError("mass_plus_battery needs a cycle duration")
        return result.mass_plus_battery
    raise DomainError(f"unknown metric {metric!r}")


def _evaluate(fn, params, metric):
    try:
        r = fn(params)
    except SizingError as exc:
        return math.nan, False, str(exc)
    return metric_of(r, metric), r.feasible, r.reason


def evaluate_point(spec: SweepSpec, params: StudyParameters, x) -> SweepRow:
    base, multi = spec.evaluators()
    p = with_parameter(params, spec.parameter, x)
    b, fb, nb = _evaluate(base, p, spec.metric)
    m, fm, nm = _evaluate(multi, p, spec.metric)
    note = "; ".join(n for n in (nb, nm) if n)
    return SweepRow(float(x), b, m, fb, fm, note)


def find_crossover(f: Callable[[float], float], lo, hi, rtol=1e-6, max_iter=200):
    """Bisection root of ``f`` on ``[lo, hi]``; ``None`` without a sign change.

    Stops once the bracket is narrower than ``rtol`` times its initial width
    and returns the midpoint of the final bracket.
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if not (flo * fhi < 0):
        return None
    width = rtol * (hi - lo)
    for _ in range(max_iter):
        if hi - lo < width:
            break
        mid = 0.5 * (lo + hi)
        fmid = f(mid)
        if fmid == 0:
            return mid
        if (fmid < 0) == (flo < 0):
            lo, flo = mid, fmid
        else:
            hi, fhi = mid, fmid
    return 0.5 * (lo + hi)


def _locate(spec: SweepSpec, params, rows: Sequence[SweepRow]) -> Optional[Crossover]:
    usable = [r for r in rows if r.feasible_baseline and r.feasible_multimodal
              and math.isfinite(r.difference)]
    for a, b in zip(usable, usable[1:]):
        da, db = a.difference, b.difference
        if da == 0 and db == 0:
            continue
        if da * db < 0 or (db == 0 and da != 0):
            if db == 0:
                return Crossover(b.parameter, (a.parameter, b.parameter))
            if spec.parameter == "n_dof":
                return Crossover(0.5 * (a.parameter + b.parameter), (a.parameter, b.parameter))

            def diff(x):
                return evaluate_point(spec, params, x).difference

            x = find_crossover(diff, a.parameter, b.parameter)
            if x is None:  # non-smooth metric between grid points
                x = 0.5 * (a.parameter + b.parameter)
            return Crossover(x, (a.parameter, b.parameter))
    return None


def sweep(spec: SweepSpec, params: StudyParameters = StudyParameters(), *,
          map_fn=map) -> SweepResult:
    """Evaluate baseline and multimodal designs across ``spec``'s grid.

    Rows that raise are kept with ``nan`` metrics and a feasibility flag.
    ``map_fn`` may be an executor's ``map`` to evaluate rows concurrently;
    row order is preserved either way.
    """
    xs = spec.grid()
    rows = tuple(map_fn(lambda x: evaluate_point(spec, params, x), xs))
    return SweepResult(spec, rows, _locate(spec, params, rows))


@dataclass(frozen=True)
class SensitivityRow:
    multiplier: float
    crossover: Optional[float]
    # "crossover", or when no break-even exists on the scanned range:
    # "multimodal-heavier" (break-even lies beyond the range) / "multimodal-lighter"
    status: str
    scanned: Tuple[float, float]

    @property
    def lower_bound(self):
        """Smallest value the break-even can take given the scan."""
        if self.crossover is not None:
            return self.crossover
        return self.scanned[1] if self.status == "multimodal-heavier" else -math.inf


def classify(result: SweepResult):
    if result.crossover is not None:
        return "crossover"
    diffs = [r.difference for r in result.rows if math.isfinite(r.difference)]
    if diffs and all(d <= 0 for d in diffs):
        return "multimodal-heavier"
    if diffs and all(d >= 0 for d in diffs):
        return "multimodal-lighter"
    return "undetermined"


def sensitivity_scan(params: StudyParameters, factor_grid: Sequence[float],
                     spec: Optional[SweepSpec] = None):
    """Two-speed crossover as motors become ``multiplier`` times more torque-dense.

    The motor mass law's ``k`` is divided by the multiplier; speed and inertia
    laws are untouched.
    """
    spec = spec or SweepSpec("lambda", 1.0, 10.0, 181, "two-speed")
    out = []
    for mult in factor_grid:
        if not mult > 0:
            raise DomainError(f"motor density multiplier must be positive, got {mult}")
        motor = params.library.motor
        lib = replace(params.library,
                      motor=replace(motor, mass_law=motor.mass_law.scaled(1 / mult)))
        res = sweep(spec, replace(params, library=lib))
        out.append(SensitivityRow(mult, res.crossover.value if res.crossover else None,
                                  classify(res), (spec.lo, spec.hi)))
    return out
