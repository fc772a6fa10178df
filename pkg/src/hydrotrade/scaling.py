"""Power-law scaling models ``y = k * x**a`` and their catalog fits.

Every component mass in the package is computed from one of these laws.
A law knows which physical quantity it accepts, so feeding a force into a
torque law raises instead of silently producing a number.
"""

from __future__ import annotations

import csv
import math
import statistics
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence, Tuple

from .errors import DomainError, FitError, UnitMismatchError


@dataclass(frozen=True)
class Quantity:
    label: str
    unit: str

    def __str__(self):
        return f"{self.label} [{self.unit}]"


TORQUE = Quantity("torque", "N*m")
SPEED = Quantity("speed", "rad/s")
INERTIA = Quantity("inertia", "kg*m^2")
FORCE = Quantity("force", "N")
POWER = Quantity("power", "W")
VOLUME = Quantity("displaced volume", "L")
MASS = Quantity("mass", "kg")
FORCE_DENSITY = Quantity("force density", "N/kg")
POWER_DENSITY = Quantity("power density", "W/kg")
UNKNOWN = Quantity("x", "-")


@dataclass(frozen=True)
class ScalingLaw:
    """``y = k * x**a`` with the quantities it maps between.

    ``valid_range`` is the span of catalog data behind the law, when known.
    Evaluations outside it are still returned but flagged as extrapolated.
    """

    k: float
    a: float
    input_quantity: Quantity = UNKNOWN
    output_quantity: Quantity = UNKNOWN
    valid_range: Optional[Tuple[float, float]] = None

    def __post_init__(self):
        if not (self.k > 0 and math.isfinite(self.k)):
            raise DomainError(f"scaling law coefficient must be positive, got k={self.k}")
        if not math.isfinite(self.a):
            raise DomainError(f"scaling law exponent must be finite, got a={self.a}")

    def evaluate(self, x: float, quantity: Optional[Quantity] = None) -> "LawEvaluation":
        if quantity is not None and quantity != self.input_quantity:
            raise UnitMismatchError(
                f"law expects {self.input_quantity}, got {quantity}"
            )
        if not x > 0:
            raise DomainError(f"scaling law evaluated at non-positive {self.input_quantity.label} {x}")
        extrapolated = False
        if self.valid_range is not None:
            lo, hi = self.valid_range
            extrapolated = not (lo <= x <= hi)
        return LawEvaluation(self, x, self.k * x**self.a, extrapolated)

    def scaled(self, factor: float) -> "ScalingLaw":
        """Same law with ``k`` multiplied by ``factor``."""
        return ScalingLaw(self.k * factor, self.a, self.input_quantity,
                          self.output_quantity, self.valid_range)

    def formula(self, x: Optional[float] = None) -> str:
        arg = "x" if x is None else f"({x:.4g})"
        return f"{self.k:.4g}*{arg}^{self.a:.4g}"


@dataclass(frozen=True)
class LawEvaluation:
    law: ScalingLaw
    x: float
    value: float
    extrapolated: bool = False


def eval_law(law: ScalingLaw, x: float, quantity: Optional[Quantity] = None) -> float:
    """Return ``k * x**a``. Raises DomainError for ``x <= 0``."""
    return law.evaluate(x, quantity).value


def component_mass_from_inverse_density(requirement: float, density_law: ScalingLaw,
                                        quantity: Optional[Quantity] = None) -> float:
    """Mass of a component whose catalog gives a *density* (N/kg, W/kg...).

    mass = requirement / density(requirement)
    """
    if not requirement > 0:
        raise DomainError(f"component requirement must be positive, got {requirement}")
    return requirement / eval_law(density_law, requirement, quantity)


@dataclass(frozen=True)
class CatalogPoint:
    x: float
    y: float
    label: str = ""

    def __post_init__(self):
        if not (self.x > 0 and self.y > 0):
            raise DomainError(f"catalog point {self.label or '?'} must have x > 0 and y > 0")


@dataclass(frozen=True)
class FitResult:
    law: ScalingLaw
    r_squared: float
    residuals: Tuple[float, ...]  # ln(y) - ln(fit), one per point
    points: Tuple[CatalogPoint, ...]


def fit_scaling_law(points: Sequence[CatalogPoint],
                    input_quantity: Quantity = UNKNOWN,
                    output_quantity: Quantity = UNKNOWN) -> FitResult:
    """Unweighted least squares of ``ln y`` on ``ln x``.

    The fitted law's ``valid_range`` is set to the span of the data.
    """
    points = tuple(points)
    if len(points) < 2:
        raise FitError(f"need >= 2 points to fit a scaling law, got {len(points)}")
    lx = [math.log(p.x) for p in points]
    ly = [math.log(p.y) for p in points]
    if max(lx) - min(lx) <= 1e-12 * max(1.0, abs(max(lx))):
        raise FitError("all catalog points share the same x; exponent is undetermined")
    slope, intercept = statistics.linear_regression(lx, ly)
    residuals = tuple(y - (intercept + slope * x) for x, y in zip(lx, ly))
    ss_res = sum(r * r for r in residuals)
    mean = statistics.fmean(ly)
    ss_tot = sum((y - mean) ** 2 for y in ly)
    # constant y up to rounding: R^2 is 1 if the fit is exact as well
    tiny = len(ly) * (1e-12 * max(1.0, max(abs(y) for y in ly))) ** 2
    if ss_tot <= tiny:
        r_squared = 1.0 if ss_res <= tiny else 0.0
    else:
        r_squared = 1.0 - ss_res / ss_tot
    law = ScalingLaw(math.exp(intercept), slope, input_quantity, output_quantity,
                     (min(p.x for p in points), max(p.x for p in points)))
    return FitResult(law, r_squared, residuals, points)


class CatalogFormatError(FitError):
    def __init__(self, message, errors: Iterable[Tuple[int, str]] = ()):
        super().__init__(message)
        self.errors = list(errors)


def load_catalog_csv(path) -> list:
    """Read ``x,y,label`` rows. Bad rows are collected with their line numbers."""
    points, errors = [], []
    with open(Path(path), newline="") as fh:
        reader = csv.reader(fh)
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row) or row[0].lstrip().startswith("#"):
                continue
            if line == 1 and row[0].strip().lower() == "x":
                continue
            if len(row) < 2:
                errors.append((line, "expected columns x,y,label"))
                continue
            try:
                x, y = float(row[0]), float(row[1])
            except ValueError:
                errors.append((line, f"non-numeric value in {row[:2]!r}"))
                continue
            label = row[2].strip() if len(row) > 2 else ""
            try:
                points.append(CatalogPoint(x, y, label))
            except DomainError as exc:
                errors.append((line, str(exc)))
    if errors:
        detail = "; ".join(f"line {n}: {msg}" for n, msg in errors)
        raise CatalogFormatError(f"malformed catalog {path}: {detail}", errors)
    return points
