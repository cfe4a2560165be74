"""
Dual-LED packet framing and the hybrid NRZ-OOK + RZ-OOK multilevel waveform.

LED1 carries stream ``a`` as NRZ-OOK and LED2 carries stream ``b`` as RZ-OOK. Their light adds, so each symbol
period shows one of four mean intensities, and the symbol value is ``2 * a + b``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from rsocc.exceptions import DegenerateLevelsError, InvalidArgumentError

logger = logging.getLogger(__name__)

DEFAULT_HEADER = (1, 0, 1, 0, 1, 0, 1, 0, 1, 0)

#: The transmitter is fixed 4-ary. The receiver accepts any even order.
TRANSMIT_ORDER = 4


def as_bits(bits):
    array = np.asarray(bits, dtype=np.int8).ravel()
    if array.size and not np.isin(array, (0, 1)).all():
        raise InvalidArgumentError("bit sequences may only contain 0 and 1")
    return array


@dataclass(frozen=True)
class PacketSpec:
    header_bits: tuple = DEFAULT_HEADER
    payload_len_bits: int = 70
    repetitions: int = 3
    symbol_period: float = 250e-6

    def __post_init__(self):
        header = tuple(int(bit) for bit in self.header_bits)
        object.__setattr__(self, "header_bits", header)
        if len(header) < 2 or any(header[i] == header[i + 1] for i in range(len(header) - 1)):
            raise InvalidArgumentError(f"header must alternate 1/0 and hold at least 2 bits: {header!r}")
        if self.repetitions < 1:
            raise InvalidArgumentError(f"repetitions must be at least 1: {self.repetitions!r}")
        if self.payload_len_bits < 0:
            raise InvalidArgumentError(f"payload_len_bits must not be negative: {self.payload_len_bits!r}")
        if self.symbol_period <= 0:
            raise InvalidArgumentError(f"symbol_period must be positive: {self.symbol_period!r}")

    @property
    def header_len(self):
        return len(self.header_bits)

    @property
    def packet_len(self):
        """Symbols in one copy of header and payload."""
        return self.header_len + self.payload_len_bits

    def header_symbols(self, order=TRANSMIT_ORDER):
        """Both LEDs send the header at once, so header bits map to the extreme symbols."""
        return np.array(self.header_bits, dtype=np.int64) * (order - 1)


@dataclass(frozen=True)
class DualBitstream:
    bits_a: np.ndarray
    bits_b: np.ndarray
    spec: PacketSpec = field(default_factory=PacketSpec)

    def __post_init__(self):
        if len(self.bits_a) != len(self.bits_b):
            raise InvalidArgumentError(f"stream lengths differ: {len(self.bits_a)} != {len(self.bits_b)}")

    def __len__(self):
        return len(self.bits_a)


@dataclass(frozen=True)
class Waveform:
    samples: np.ndarray
    dt: float

    def __post_init__(self):
        if np.any(self.samples < 0):
            raise InvalidArgumentError("optical intensity can't be negative")

    @property
    def duration(self):
        return len(self.samples) * self.dt

    @property
    def times(self):
        return np.arange(len(self.samples)) * self.dt


@dataclass(frozen=True)
class LevelTable:
    order: int
    levels: np.ndarray
    raw: np.ndarray

    def __post_init__(self):
        levels = self.levels
        if levels[0] != 0 or levels[-1] != 1 or np.any(np.diff(levels) <= 0):
            raise DegenerateLevelsError(f"levels must rise strictly from 0 to 1: {levels!r}")


def build_packet(payload_a, payload_b, spec: PacketSpec) -> DualBitstream:
    payload_a = as_bits(payload_a)
    payload_b = as_bits(payload_b)
    if not len(payload_a) == len(payload_b) == spec.payload_len_bits:
        raise InvalidArgumentError(
            f"payloads must hold {spec.payload_len_bits} bits each: got {len(payload_a)} and {len(payload_b)}"
        )
    header = np.array(spec.header_bits, dtype=np.int8)
    bits_a = np.tile(np.concatenate([header, payload_a]), spec.repetitions)
    bits_b = np.tile(np.concatenate([header, payload_b]), spec.repetitions)
    return DualBitstream(bits_a, bits_b, spec)


def symbols_of(stream: DualBitstream) -> np.ndarray:
    return 2 * stream.bits_a.astype(np.int64) + stream.bits_b.astype(np.int64)


def bits_of(symbols) -> tuple[np.ndarray, np.ndarray]:
    """Inverse of :func:`symbols_of` for the 4-ary transmitter."""
    symbols = np.asarray(symbols, dtype=np.int64)
    return (symbols // 2).astype(np.int8), (symbols % 2).astype(np.int8)


def synthesize_waveform(stream: DualBitstream, dt, I1=1.0, I2=1.0) -> Waveform:
    if I1 <= 0 or I2 <= 0:
        raise InvalidArgumentError(f"LED intensities must be positive: I1={I1!r}, I2={I2!r}")
    half = stream.spec.symbol_period / 2
    per_half = round(half / dt)
    if per_half < 1 or not np.isclose(per_half * dt, half, rtol=1e-9, atol=0):
        raise InvalidArgumentError(f"dt={dt!r} doesn't divide the half symbol period {half!r}")

    a = stream.bits_a.astype(float) * I1
    b = stream.bits_b.astype(float) * I2
    # RZ pulse in the first half of the symbol, NRZ level over the whole symbol.
    halves = np.column_stack([a + b, a]).ravel()
    samples = np.repeat(halves, per_half)
    logger.debug("Synthesized %d symbols into %d samples (dt=%g)", len(stream), len(samples), dt)
    return Waveform(samples, dt)


def ideal_levels(order=TRANSMIT_ORDER, I1=1.0, I2=1.0, duty=0.5) -> LevelTable:
    if order != TRANSMIT_ORDER:
        raise InvalidArgumentError(f"the transmitter is {TRANSMIT_ORDER}-ary: order={order!r}")
    if not 0 < duty < 1:
        raise InvalidArgumentError(f"duty must lie in (0, 1): {duty!r}")
    raw = np.array([0.0, duty * I2, I1, I1 + duty * I2])
    if np.any(np.diff(raw) <= 0):
        raise DegenerateLevelsError(f"symbol mean intensities collapse or cross: {raw!r}")
    return LevelTable(order, raw / raw[-1], raw)
