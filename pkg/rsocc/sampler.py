"""
Sample selection.

The adaptive sampler anchors on pairs of neighbouring extrema that sit about one stripe apart, locks the anchors onto
the stripe lattice their sharp neighbours agree on, stretches or shrinks every stretch between anchors to a whole
number of stripe widths, and samples at a stride of one stripe width from each anchor. The clock-recovery baseline
samples at a fixed stride from the first header edge.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import find_peaks
from zope.interface import implementer

from rsocc.camera import GrayColumn
from rsocc.exceptions import ConfigError, InsufficientExtremaError, InvalidArgumentError
from rsocc.interfaces import ISampler
from rsocc.preprocess import WidthEstimate

logger = logging.getLogger(__name__)

MAX = "max"
MIN = "min"


@dataclass(frozen=True)
class ExtremaList:
    positions: np.ndarray
    kinds: tuple

    def __len__(self):
        return len(self.positions)


@dataclass(frozen=True)
class AuxiliaryExtrema:
    positions: np.ndarray

    @property
    def count(self):
        return len(self.positions)


@dataclass(frozen=True)
class SamplePlan:
    #: Sample indices in the sampled sequence. For ASM this is the rescaled sequence.
    positions: np.ndarray
    #: Row of the column each sample stands for.
    rows: np.ndarray
    values: np.ndarray
    method: str
    X: int
    #: ``(k, ratio)`` for each rescaled segment.
    segments: tuple = field(default=())
    #: Index into ``segments`` for each sample, or -1 outside any segment.
    segment_ids: np.ndarray | None = None

    def __len__(self):
        return len(self.positions)


def _plateau_centers(values, min_prominence):
    # A flat peak reports its middle row, the lower one for an even number of rows.
    _, properties = find_peaks(values, prominence=(min_prominence, None), plateau_size=(1, None))
    left, right = properties["left_edges"], properties["right_edges"]
    return (left + (right - left) // 2).astype(np.int64)


def find_local_extrema(col, min_prominence=0.1) -> ExtremaList:
    values = col.values if isinstance(col, GrayColumn) else np.asarray(col, dtype=float)
    if len(values) < 3:
        raise InvalidArgumentError(f"extrema need at least 3 samples: {len(values)}")
    maxima = _plateau_centers(values, min_prominence)
    minima = _plateau_centers(-values, min_prominence)
    positions = np.concatenate([maxima, minima])
    kinds = np.array([MAX] * len(maxima) + [MIN] * len(minima), dtype=object)
    order = np.argsort(positions, kind="stable")
    return ExtremaList(positions[order], tuple(kinds[order]))


def admission_window(X):
    return math.ceil(X / 2), math.floor(3 * X / 2)


def auxiliary_extrema(ext: ExtremaList, X) -> AuxiliaryExtrema:
    if X < 3 or X % 2 == 0:
        raise InvalidArgumentError(f"X must be odd and at least 3: {X!r}")
    low, high = admission_window(X)
    gaps = np.diff(ext.positions)
    admitted = np.flatnonzero((gaps >= low) & (gaps <= high))
    positions = np.unique(np.concatenate([ext.positions[admitted], ext.positions[admitted + 1]]))
    if len(positions) < 2:
        raise InsufficientExtremaError(f"{len(positions)} of {len(ext)} extrema are {low} to {high} rows apart")
    return AuxiliaryExtrema(positions)


def choose_k(delta, X, N):
    """Number of stripes that best explains a gap of ``delta`` rows; ties go to the smaller count."""
    widths = X * np.arange(1, N + 1)
    return int(np.argmin((delta - widths) ** 2)) + 1


def segment_rescale(segment, k, X, next_extremum):
    segment = np.asarray(segment, dtype=float)
    length, target = len(segment), k * X
    if target > length:
        out = np.interp(np.linspace(0, length - 1, target), np.arange(length), segment)
    elif target < length:
        # Keep evenly spaced samples, dropping the rest.
        keep = np.round(np.linspace(0, length - 1, target)).astype(np.int64)
        out = segment[keep]
    else:
        out = segment.copy()
    out[-1] = next_extremum
    return out


def sample_positions(fl_new, X):
    """Every boundary, plus the stride-``X`` points between each boundary and the next."""
    fl_new = np.asarray(fl_new, dtype=np.int64)
    positions = []
    for here, there in zip(fl_new[:-1], fl_new[1:]):
        positions.extend(here + beta * X for beta in range((there - here) // X))
    if len(fl_new):
        positions.append(fl_new[-1])
    return np.array(positions, dtype=np.int64)


def _wrap(offsets, X):
    """Fold row offsets into ``[-X/2, X/2)``, their distance from the nearest stripe centre."""
    return np.mod(offsets + X / 2, X) - X / 2


def sharp_extrema(values, positions, X, min_drop):
    """Mask of the extrema that fall away by ``min_drop`` a quarter stripe out on both sides.

    An exposure of one symbol period leaves a flat half-stripe beside a symbol centre wherever both symbols share a
    level for that half. The middle of such a plateau lies off the centre, and stays flat on one side.
    """
    values = np.asarray(values, dtype=float)
    positions = np.asarray(positions, dtype=np.int64)
    reach = max(1, round(X / 4))
    last = len(values) - 1
    here = values[positions]
    left = np.abs(here - values[np.clip(positions - reach, 0, last)])
    right = np.abs(here - values[np.clip(positions + reach, 0, last)])
    return np.minimum(left, right) >= min_drop


def lock_anchors(values, positions, X, radius, min_drop=0.1):
    """Move each anchor onto the stripe lattice that the sharp anchors within ``radius`` rows agree on.

    The lattice phase is the circular mean of the neighbours' offsets, refined by the median of those within a
    quarter stripe of it. Anchors that land within half a stripe of the previous one are dropped.
    """
    positions = np.asarray(positions, dtype=np.int64)
    if not len(positions):
        return positions
    sharp = positions[sharp_extrema(values, positions, X, min_drop)]
    reference = sharp if len(sharp) else positions

    locked = np.empty(len(positions), dtype=np.int64)
    for i, here in enumerate(positions):
        near = reference[np.abs(reference - here) <= radius]
        if not len(near):
            near = positions[np.abs(positions - here) <= radius]
        offsets = _wrap(near - here, X)
        center = np.angle(np.exp(2j * np.pi * offsets / X).mean()) * X / (2 * np.pi)
        spread = _wrap(offsets - center, X)
        inliers = spread[np.abs(spread) <= X / 4]
        shift = center + (np.median(inliers) if len(inliers) else 0.0)
        locked[i] = int(np.round(here + shift))
    moved = int(np.count_nonzero(locked != positions))
    locked = np.clip(np.sort(locked), 0, len(values) - 1)

    low = math.ceil(X / 2)
    kept = [locked[0]]
    for position in locked[1:]:
        if position - kept[-1] >= low:
            kept.append(position)
    merged = len(locked) - len(kept)
    logger.debug("Locked %d anchors onto the stripe lattice, %d moved, %d merged", len(kept), moved, merged)
    return np.array(kept, dtype=np.int64)


def asm_sample(col: GrayColumn, X, N=32, min_prominence=0.1, lock_radius=6) -> SamplePlan:
    values = col.values
    aux = auxiliary_extrema(find_local_extrema(values, min_prominence), X)
    anchors = lock_anchors(values, aux.positions, X, lock_radius * X, min_prominence)
    if len(anchors) < 2:
        raise InsufficientExtremaError(f"{aux.count} auxiliary extrema lock onto {len(anchors)} stripe centres")

    pieces, segments = [], []
    # The first anchor is dropped: each segment covers the rows after one anchor up to and including the next.
    bounds = [-1]
    for here, there in zip(anchors[:-1], anchors[1:]):
        delta = int(there - here)
        k = choose_k(delta, X, N)
        pieces.append(segment_rescale(values[here + 1 : there + 1], k, X, values[there]))
        segments.append((k, k * X / delta))
        bounds.append(bounds[-1] + k * X)
    rescaled = np.concatenate(pieces)
    bounds = np.array(bounds, dtype=np.int64)

    positions = sample_positions(bounds[1:], X)
    segment = np.searchsorted(bounds, positions, side="left") - 1
    spans = np.diff(anchors)[segment]
    widths = np.array([k for k, _ in segments])[segment] * X
    rows = np.round(anchors[segment] + (positions - bounds[segment]) * spans / widths).astype(np.int64)

    logger.debug("ASM: %d anchors, %d samples, X=%d", len(anchors), len(positions), X)
    return SamplePlan(positions, rows, rescaled[positions], "ASM", X, tuple(segments), segment)


def cr_sample(col: GrayColumn, est: WidthEstimate, phase=0.5) -> SamplePlan:
    """Sample every ``X`` rows, starting ``phase`` of a stripe past the first header edge."""
    start = math.floor(est.header_start + phase * est.X + 1e-9)
    positions = np.arange(max(start, 0), len(col), est.X, dtype=np.int64)
    logger.debug("CR: %d samples from row %d, X=%d", len(positions), start, est.X)
    return SamplePlan(positions, positions.copy(), col.values[positions], "CR", est.X)


@implementer(ISampler)
class AdaptiveSampler:
    method = "ASM"

    def __init__(self, config):
        self.n = config.getint("asm_n", 32)
        self.min_prominence = config.getfloat("min_prominence", 0.1)
        self.lock_radius = config.getfloat("asm_lock_stripes", 6)
        if self.n < 1:
            raise ConfigError(f"asm_n must be at least 1: {self.n!r}")
        if self.lock_radius < 0:
            raise ConfigError(f"asm_lock_stripes can't be negative: {self.lock_radius!r}")

    def plan(self, column, estimate):
        return asm_sample(column, estimate.X, self.n, self.min_prominence, self.lock_radius)


@implementer(ISampler)
class ClockRecoverySampler:
    method = "CR"

    def __init__(self, config):
        self.phase = config.getfloat("cr_phase", 0.5)
        if not 0 <= self.phase < 1:
            raise ConfigError(f"cr_phase must lie in [0, 1): {self.phase!r}")

    def plan(self, column, estimate):
        return cr_sample(column, estimate, self.phase)


SAMPLERS = {sampler.method: sampler for sampler in (AdaptiveSampler, ClockRecoverySampler)}


def get_sampler(config, method=None):
    method = (method or config.get("method", "ASM")).upper()
    try:
        return SAMPLERS[method](config)
    except KeyError:
        raise ConfigError(f"method must be one of {', '.join(SAMPLERS)}: {method!r}") from None
