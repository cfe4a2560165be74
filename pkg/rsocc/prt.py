"""
Polarity reversal thresholding.

A cubic fit through the column gives the middle threshold. Reflecting the samples below it upward (or those above
it downward) and fitting again gives provisional upper and lower thresholds, which are then refined by clamping the
column to them and fitting a third time. Orders above 4 interpolate the remaining thresholds between the middle one
and the refined outer ones.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial

from rsocc.camera import GrayColumn
from rsocc.exceptions import InvalidArgumentError

logger = logging.getLogger(__name__)

CUBIC_TERMS = 4


def _values(col):
    return col.values if isinstance(col, GrayColumn) else np.asarray(col, dtype=float)


def _rows(n):
    return np.linspace(0.0, 1.0, n)


@dataclass(frozen=True)
class ThresholdCurve:
    #: Ascending-power coefficients over the row index normalized to [0, 1].
    coeffs: np.ndarray
    values: np.ndarray

    def __len__(self):
        return len(self.values)

    def __add__(self, other):
        return ThresholdCurve(self.coeffs + other.coeffs, self.values + other.values)

    def __sub__(self, other):
        return ThresholdCurve(self.coeffs - other.coeffs, self.values - other.values)

    def scaled(self, factor):
        return ThresholdCurve(self.coeffs * factor, self.values * factor)


@dataclass(frozen=True)
class ThresholdSet:
    order: int
    #: Shape ``(order - 1, rows)``, non-decreasing along the first axis.
    values: np.ndarray
    labels: tuple
    curves: tuple

    def __post_init__(self):
        if self.values.shape[0] != self.order - 1:
            raise InvalidArgumentError(f"{self.order}-ary thresholds need {self.order - 1} curves")

    @property
    def rows(self):
        return self.values.shape[1]

    def curve(self, label):
        return self.curves[self.labels.index(label)]


def fit_cubic(col) -> ThresholdCurve:
    p = _values(col)
    if len(p) < CUBIC_TERMS:
        raise InvalidArgumentError(f"a cubic fit needs at least {CUBIC_TERMS} rows: {len(p)}")
    x = _rows(len(p))
    coeffs = polynomial.polyfit(x, p, CUBIC_TERMS - 1)
    return ThresholdCurve(coeffs, polynomial.polyval(x, coeffs))


def reflect_below(p, axis):
    """Mirror the samples below ``axis`` onto the upper side."""
    return np.where(p < axis, 2 * axis - p, p)


def reflect_above(p, axis):
    """Mirror the samples at or above ``axis`` onto the lower side."""
    return np.where(p < axis, p, 2 * axis - p)


def clamp_up(p, floor):
    return np.where(p < floor, floor, p)


def clamp_down(p, ceiling):
    return np.where(p < ceiling, p, ceiling)


def interior_thresholds(th_m, th_low, th_high, order):
    """Return ``(lower, upper)`` lists of extra curves for orders above 4, nearest to the middle first."""
    half = (order - 2) / 2
    count = (order - 4) // 2
    upper = [th_m + (th_high - th_m).scaled(m / half) for m in range(1, count + 1)]
    lower = [th_m - (th_m - th_low).scaled(m / half) for m in range(1, count + 1)]
    return lower, upper


def prt_thresholds(col, order=4) -> ThresholdSet:
    if order < 2 or order % 2:
        raise InvalidArgumentError(f"order must be even and at least 2: {order!r}")
    p = _values(col)

    th_m = fit_cubic(p)
    if order == 2:
        return ThresholdSet(order, th_m.values[np.newaxis, :].copy(), ("m",), (th_m,))

    th_h = fit_cubic(reflect_below(p, th_m.values))
    th_l = fit_cubic(reflect_above(p, th_m.values))
    th_high = fit_cubic(clamp_up(p, th_h.values))
    th_low = fit_cubic(clamp_down(p, th_l.values))

    lower, upper = interior_thresholds(th_m, th_low, th_high, order)
    curves = (th_low, *reversed(lower), th_m, *upper, th_high)
    labels = (
        "low",
        *(f"m-{m}" for m in range(len(lower), 0, -1)),
        "m",
        *(f"m+{m}" for m in range(1, len(upper) + 1)),
        "high",
    )
    # Least-squares fits of ordered data aren't ordered everywhere, so order them row by row.
    values = np.sort(np.vstack([curve.values for curve in curves]), axis=0)
    logger.debug("PRT thresholds for order %d over %d rows", order, len(p))
    return ThresholdSet(order, values, labels, curves)


def classify(value, row, ts: ThresholdSet) -> int:
    """Count the curves at ``row`` that lie at or below ``value``, so a tie goes to the higher interval."""
    return int(np.count_nonzero(ts.values[:, row] <= value))


def classify_samples(values, rows, ts: ThresholdSet) -> np.ndarray:
    rows = np.clip(np.asarray(rows, dtype=np.int64), 0, ts.rows - 1)
    return np.count_nonzero(ts.values[:, rows] <= np.asarray(values)[np.newaxis, :], axis=0)
