"""Least-squares decay-exponent fits on log2 data."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

#: Values at or below this are treated as exact zeros and dropped from fits.
VALUE_FLOOR = 1e-13

#: Minimum number of surviving points for a well-posed fit.
MIN_POINTS = 4


@dataclass(frozen=True)
class DecayFit:
    """A fitted slope of log2(value) against an abscissa, with residuals shown.

    ``target`` is the exponent the estimate is compared against; ``n_dropped``
    counts grid points discarded as exact zeros (below the numerical floor).
    """

    points: tuple[tuple[float, float], ...]
    slope: float
    intercept: float
    residual_rms: float
    target: float | None
    n_dropped: int

    @property
    def degenerate(self) -> bool:
        return math.isnan(self.slope)

    def within(self, tol: float) -> bool:
        if self.degenerate or self.target is None:
            return False
        return abs(self.slope - self.target) <= tol

    def at_least(self, bound: float) -> bool:
        return not self.degenerate and self.slope >= bound

    def to_json(self) -> dict:
        return {
            "points": [[x, y] for x, y in self.points],
            "slope": self.slope,
            "intercept": self.intercept,
            "residual_rms": self.residual_rms,
            "target": self.target,
            "n_dropped": self.n_dropped,
            "degenerate": self.degenerate,
        }

    def csv_rows(self):
        for x, y in self.points:
            yield (x, y, self.slope * x + self.intercept)


def fit_decay(
    xs: Sequence[float], values: Sequence[float], target: float | None = None
) -> DecayFit:
    """Unweighted least squares of log2(values) vs xs, dropping exact zeros."""
    if len(xs) != len(values):
        raise ValueError("grid and value lengths differ")
    kept = [(float(x), float(v)) for x, v in zip(xs, values) if v > VALUE_FLOOR]
    n_dropped = len(xs) - len(kept)
    if len(kept) < MIN_POINTS:
        pts = tuple((x, math.log2(v)) for x, v in kept)
        return DecayFit(pts, math.nan, math.nan, math.nan, target, n_dropped)
    x_arr = np.array([x for x, _ in kept])
    y_arr = np.log2(np.array([v for _, v in kept]))
    slope, intercept = np.polyfit(x_arr, y_arr, 1)
    resid = y_arr - (slope * x_arr + intercept)
    rms = float(np.sqrt(np.mean(resid**2)))
    points = tuple((float(x), float(y)) for x, y in zip(x_arr, y_arr))
    return DecayFit(points, float(slope), float(intercept), rms, target, n_dropped)
