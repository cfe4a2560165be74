"""
Receiver front end: column selection, normalization, histogram equalization, stripe-width estimation and odd-width
resampling, applied in that order.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace

import numpy as np

from rsocc.camera import Frame, GrayColumn
from rsocc.exceptions import DegenerateSignalError, HeaderNotFoundError, InvalidArgumentError
from rsocc.modulation import PacketSpec

logger = logging.getLogger(__name__)

#: Normalized level whose crossings delimit header stripes.
MID_LEVEL = 0.5
#: Fractional deviation allowed between a crossing gap and the mean gap of the run it extends.
RUN_TOLERANCE = 0.25
#: Narrowest stripe, in rows, that the header search accepts.
MIN_STRIPE_ROWS = 3


@dataclass(frozen=True)
class WidthEstimate:
    W: float
    X: int
    resample_factor: float
    header_start: float

    def __post_init__(self):
        if self.X < 3 or self.X % 2 == 0:
            raise InvalidArgumentError(f"X must be odd and at least 3: {self.X!r}")
        if self.resample_factor <= 0:
            raise InvalidArgumentError(f"resample_factor must be positive: {self.resample_factor!r}")

    def after_resampling(self):
        """The same estimate in the coordinates of the resampled column."""
        return replace(self, W=float(self.X), resample_factor=1.0, header_start=self.header_start * self.resample_factor)


def odd_width(W):
    X = round(W)
    if X % 2 == 0:
        X += 1
    return max(X, 3)


def select_column(frame: Frame) -> GrayColumn:
    variances = frame.values.var(axis=0)
    index = int(np.argmax(variances))
    logger.debug("Selected column %d of %d (variance %.4g)", index, frame.width, variances[index])
    return frame.column(index)


def normalize(col: GrayColumn) -> GrayColumn:
    low, high = col.values.min(), col.values.max()
    if high <= low:
        raise DegenerateSignalError(f"column is constant at {low!r}")
    if low == 0 and high == 1:
        values = col.values.copy()
    else:
        values = np.clip((col.values - low) / (high - low), 0.0, 1.0)
    return replace(col, values=values, normalized=True)


def equalize_histogram(col: GrayColumn, bins=256) -> GrayColumn:
    if not col.normalized:
        raise InvalidArgumentError("histogram equalization needs a normalized column")
    index = np.minimum((col.values * bins).astype(np.int64), bins - 1)
    cdf = np.cumsum(np.bincount(index, minlength=bins)) / len(col)
    return replace(col, values=cdf[index])


def mid_level_crossings(values, level=MID_LEVEL):
    """Fractional row positions where the column crosses ``level``, by linear interpolation."""
    above = values >= level
    i = np.flatnonzero(above[:-1] != above[1:])
    return i + (level - values[i]) / (values[i + 1] - values[i])


def alternating_runs(crossings, min_count):
    """Yield ``(first, last)`` crossing indices of runs with evenly spaced crossings."""
    gaps = np.diff(crossings)
    start = 0
    while start < len(gaps):
        if gaps[start] < MIN_STRIPE_ROWS:
            start += 1
            continue
        end = start + 1
        while end < len(gaps):
            mean = (crossings[end] - crossings[start]) / (end - start)
            if abs(gaps[end] - mean) > RUN_TOLERANCE * mean:
                break
            end += 1
        if end - start + 1 >= min_count:
            yield start, end
        start = end


def regular_window(crossings, first, last, count):
    """Start of the ``count`` crossings in ``crossings[first:last + 1]`` that best keep a two-stripe rhythm.

    Every other crossing of an alternation between two symbols sits exactly two stripes on, whichever level the
    crossings are taken at. A window that strays into edges of other symbol pairs breaks that rhythm.
    """
    starts = np.arange(first, last - count + 2)
    spread = np.array([np.ptp(crossings[s + 2 : s + count] - crossings[s : s + count - 2]) for s in starts])
    return int(starts[np.flatnonzero(spread <= spread.min() + 1e-9)[0]])


def header_symbol_row(values, left, right):
    """Row between two crossings that sees only the header symbol they enclose.

    The crossings themselves sit off the symbol edges, since the RZ pulse fills the first half of each symbol.
    """
    rows = np.arange(math.ceil(left), math.floor(right) + 1)
    if not len(rows):
        return (left + right) / 2
    return int(rows[np.argmax(np.abs(values[rows] - MID_LEVEL))])


def estimate_stripe_width(col: GrayColumn, spec: PacketSpec) -> WidthEstimate:
    crossings = mid_level_crossings(col.values)
    # A header of n alternating symbols has n - 1 interior edges.
    needed = spec.header_len - 1
    for first, end in alternating_runs(crossings, needed):
        first = regular_window(crossings, first, end, needed)
        last = first + needed - 1
        W = (crossings[last] - crossings[first]) / (needed - 1)
        X = odd_width(W)
        header_start = header_symbol_row(col.values, crossings[first], crossings[first + 1]) - W / 2
        estimate = WidthEstimate(W=float(W), X=X, resample_factor=X / W, header_start=float(header_start))
        logger.debug("Header edges from row %.2f: W=%.4f, X=%d", estimate.header_start, W, X)
        return estimate
    raise HeaderNotFoundError(f"no run of {needed} evenly spaced mid-level crossings in {len(col)} rows")


def resample_to_odd_width(col: GrayColumn, est: WidthEstimate) -> GrayColumn:
    factor = est.resample_factor
    if math.isclose(factor, 1.0, rel_tol=0, abs_tol=1e-12):
        return col
    length = round(len(col) * factor)
    positions = np.minimum(np.arange(length) / factor, len(col) - 1)
    values = np.interp(positions, np.arange(len(col)), col.values)
    return replace(col, values=values, interp_factor=col.interp_factor * factor)
