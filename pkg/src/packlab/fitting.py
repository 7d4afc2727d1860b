"""Power-law fitting in log-log coordinates."""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class ExponentFit:
    """Least-squares slope of log(y) against log(x).

    exponent is the fitted slope, r_squared the coefficient of
    determination, window the (min, max) of the abscissa values used,
    and intercept the fitted log-log offset (so y ~ exp(intercept) * x**exponent).
    """

    exponent: float
    r_squared: float
    window: tuple[float, float]
    intercept: float

    def predict(self, x: float) -> float:
        return math.exp(self.intercept) * x**self.exponent


def fit_power_law(points) -> ExponentFit:
    """Fit y = a * x^b by ordinary least squares on (log x, log y).

    Requires at least 3 points with strictly positive coordinates.
    """
    pts = [(float(x), float(y)) for x, y in points]
    if len(pts) < 3:
        raise ValueError(f"power-law fit needs >= 3 points, got {len(pts)}")
    for x, y in pts:
        if x <= 0 or y <= 0:
            raise ValueError(f"power-law fit needs positive coordinates, got ({x}, {y})")
    lx = [math.log(x) for x, _ in pts]
    ly = [math.log(y) for _, y in pts]
    n = len(pts)
    mx = sum(lx) / n
    my = sum(ly) / n
    sxx = sum((u - mx) ** 2 for u in lx)
    sxy = sum((u - mx) * (v - my) for u, v in zip(lx, ly))
    syy = sum((v - my) ** 2 for v in ly)
    if sxx == 0:
        raise ValueError("power-law fit needs at least two distinct abscissae")
    slope = sxy / sxx
    intercept = my - slope * mx
    if syy == 0:
        r2 = 1.0
    else:
        ss_res = sum((v - (intercept + slope * u)) ** 2 for u, v in zip(lx, ly))
        r2 = 1.0 - ss_res / syy
    xs = [x for x, _ in pts]
    return ExponentFit(exponent=slope, r_squared=r2, window=(min(xs), max(xs)), intercept=intercept)
