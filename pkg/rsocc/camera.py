"""
Rolling-shutter camera channel.

Each sensor row integrates the LED light over its own exposure window, and the windows start one row-readout time
apart. A waveform that blinks faster than the frame rate therefore turns into bright and dark stripes down a column.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial
from scipy import signal

from rsocc.exceptions import InvalidArgumentError
from rsocc.modulation import Waveform

logger = logging.getLogger(__name__)

DRIFT_MODELS = ("constant", "ramp")


@dataclass(frozen=True)
class ChannelConfig:
    rows: int = 1080
    t_row: float = 250e-6 / 6
    t_exp: float = 250e-6
    led_tau: float = 0.0
    #: Ascending-power coefficients of the illumination profile over the normalized row position.
    envelope_coeffs: tuple = (1.0, 0.0, 0.0, 0.0)
    noise_sigma: float = 0.0
    #: Fractional row-clock error, in parts per million. Under ``ramp`` this is its value at the last row.
    drift_ppm: float = 0.0
    #: ``constant`` scales every row period by the same error; ``ramp`` grows it from zero down the frame.
    drift_model: str = "constant"
    jitter_sigma: float = 0.0
    quantize_bits: int = 8
    rng_seed: int = 0
    #: Symbol-mean intensity that maps to full-scale gray.
    full_scale: float = 1.5
    #: Time of the first row's exposure start, relative to the waveform start.
    start_time: float = 0.0
    #: Relative brightness loss at the left and right frame edges.
    column_taper: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "envelope_coeffs", tuple(float(c) for c in self.envelope_coeffs))
        if self.rows < 1:
            raise InvalidArgumentError(f"rows must be at least 1: {self.rows!r}")
        if self.t_row <= 0 or self.t_exp <= 0:
            raise InvalidArgumentError(f"t_row and t_exp must be positive: {self.t_row!r}, {self.t_exp!r}")
        if self.noise_sigma < 0 or self.jitter_sigma < 0:
            raise InvalidArgumentError("noise_sigma and jitter_sigma can't be negative")
        if self.full_scale <= 0:
            raise InvalidArgumentError(f"full_scale must be positive: {self.full_scale!r}")
        if not 1 <= self.quantize_bits <= 16:
            raise InvalidArgumentError(f"quantize_bits must lie in [1, 16]: {self.quantize_bits!r}")
        if self.drift_model not in DRIFT_MODELS:
            raise InvalidArgumentError(f"drift_model must be one of {', '.join(DRIFT_MODELS)}: {self.drift_model!r}")

    @property
    def maxval(self):
        return 2**self.quantize_bits - 1

    @property
    def drift(self):
        return self.drift_ppm * 1e-6

    def row_times(self):
        """Nominal exposure start of each row, before jitter.

        Under the ``constant`` model every row period is ``t_row * (1 + drift)``. Under ``ramp`` the error grows
        linearly from zero at the first row, so the frame opens on time and the last row starts
        ``(rows - 1) * t_row * (1 + drift)`` after the first one.
        """
        r = np.arange(self.rows, dtype=float)
        if self.drift_model == "ramp":
            scale = 1 + self.drift * (r / (self.rows - 1) if self.rows > 1 else r)
        else:
            scale = 1 + self.drift
        return self.start_time + r * self.t_row * scale

    def row_of_time(self, t):
        """Fractional row whose exposure starts at time ``t`` (the inverse of :meth:`row_times`)."""
        tau = np.asarray(t, dtype=float) - self.start_time
        if self.drift_model != "ramp":
            return tau / (self.t_row * (1 + self.drift))
        a = self.t_row * self.drift / (self.rows - 1) if self.rows > 1 else 0.0
        if a == 0:
            return tau / self.t_row
        return (-self.t_row + np.sqrt(self.t_row**2 + 4 * a * tau)) / (2 * a)

    def envelope(self):
        x = np.linspace(0.0, 1.0, self.rows) if self.rows > 1 else np.zeros(1)
        return polynomial.polyval(x, self.envelope_coeffs)

    def span(self):
        """Waveform time a capture needs."""
        return self.row_times()[-1] + self.t_exp


@dataclass(frozen=True)
class GrayColumn:
    values: np.ndarray
    normalized: bool = False
    interp_factor: float = 1.0

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if values.ndim != 1 or values.size < 1:
            raise InvalidArgumentError("a gray column needs at least one value")
        if self.normalized and (values.min() < 0 or values.max() > 1):
            raise InvalidArgumentError("normalized gray values must lie in [0, 1]")

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True)
class Frame:
    """Gray values in [0, 1], one row per sensor row and one column per sensor column."""

    values: np.ndarray
    maxval: int = 255
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2 or values.size == 0:
            raise InvalidArgumentError("a frame is a non-empty 2-D matrix")
        object.__setattr__(self, "values", values)

    @property
    def rows(self):
        return self.values.shape[0]

    @property
    def width(self):
        return self.values.shape[1]

    def column(self, index):
        return GrayColumn(self.values[:, index])

    def columns(self):
        return [self.column(index) for index in range(self.width)]


def quantize(values, bits):
    maxval = 2**bits - 1
    return np.round(np.clip(values, 0.0, 1.0) * maxval) / maxval


def led_response(w: Waveform, tau) -> Waveform:
    if tau < 0:
        raise InvalidArgumentError(f"tau can't be negative: {tau!r}")
    if tau == 0 or len(w.samples) == 0:
        return w
    alpha = 1.0 - np.exp(-w.dt / tau)
    b, a = [alpha], [1.0, alpha - 1.0]
    # Start in steady state at the first sample, so a constant input stays constant.
    zi = signal.lfilter_zi(b, a) * w.samples[0]
    out, _ = signal.lfilter(b, a, w.samples, zi=zi)
    return Waveform(np.maximum(out, 0.0), w.dt)


def exposure_means(w: Waveform, starts, t_exp):
    """Mean intensity over ``[start, start + t_exp]`` for each start, exact for piecewise-constant samples."""
    edges = np.arange(len(w.samples) + 1) * w.dt
    integral = np.concatenate([[0.0], np.cumsum(w.samples) * w.dt])
    return (np.interp(starts + t_exp, edges, integral) - np.interp(starts, edges, integral)) / t_exp


def make_frame(w: Waveform, cfg: ChannelConfig, width=1) -> Frame:
    if width < 1:
        raise InvalidArgumentError(f"width must be at least 1: {width!r}")
    if w.duration < cfg.span():
        raise InvalidArgumentError(f"waveform lasts {w.duration!r}s but the capture needs {cfg.span()!r}s")

    rng = np.random.default_rng(cfg.rng_seed)
    starts = cfg.row_times()
    if cfg.jitter_sigma:
        starts = starts + rng.normal(0.0, cfg.jitter_sigma, cfg.rows)
    light = exposure_means(led_response(w, cfg.led_tau), starts, cfg.t_exp)
    clean = cfg.envelope() * light / cfg.full_scale

    if width > 1:
        taper = 1.0 - cfg.column_taper * (np.linspace(-1.0, 1.0, width) ** 2)
    else:
        taper = np.ones(1)
    values = np.empty((cfg.rows, width))
    for c in range(width):
        noise = rng.normal(0.0, cfg.noise_sigma, cfg.rows) if cfg.noise_sigma else 0.0
        values[:, c] = quantize(clean * taper[c] + noise, cfg.quantize_bits)

    logger.debug("Captured %dx%d frame (drift_ppm=%g, noise_sigma=%g)", cfg.rows, width, cfg.drift_ppm, cfg.noise_sigma)
    return Frame(values, cfg.maxval)


def rolling_shutter_capture(w: Waveform, cfg: ChannelConfig) -> GrayColumn:
    return make_frame(w, cfg, 1).column(0)
