"""
End-to-end pipeline: transmit, capture, receive, score, and sweep experiments over channel impairments.
"""

from __future__ import annotations

import itertools
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from rsocc.camera import ChannelConfig, Frame, make_frame
from rsocc.config import Config
from rsocc.exceptions import (
    ConfigError,
    DecodeError,
    HeaderNotFoundError,
    IncompletePacketError,
    InvalidArgumentError,
)
from rsocc.modulation import (
    TRANSMIT_ORDER,
    PacketSpec,
    as_bits,
    bits_of,
    build_packet,
    ideal_levels,
    symbols_of,
    synthesize_waveform,
)
from rsocc.preprocess import (
    equalize_histogram,
    estimate_stripe_width,
    normalize,
    resample_to_odd_width,
    select_column,
)
from rsocc.prt import classify_samples, prt_thresholds
from rsocc.sampler import SAMPLERS, get_sampler
from rsocc.utils import get_max_proc

logger = logging.getLogger(__name__)

STAGE_ORDER = "normalize>equalize>resample"
SWEEP_AXES = ("noise_sigma", "drift_ppm", "jitter_sigma", "stripe_width")
#: BER charged to a run whose decode fails, the same as guessing every bit.
FAILED_BER = 0.5


def packet_spec(config) -> PacketSpec:
    header = config.get("header", "1010101010").strip()
    try:
        header_bits = tuple(int(char) for char in header)
    except ValueError as e:
        raise ConfigError(f"header is invalid: {header!r}") from e
    try:
        return PacketSpec(
            header_bits=header_bits,
            payload_len_bits=config.getint("payload_len_bits", 70),
            repetitions=config.getint("repetitions", 3),
            symbol_period=config.getfloat("symbol_period", 250e-6),
        )
    except InvalidArgumentError as e:
        raise ConfigError(str(e)) from e


def receiver_order(config) -> int:
    """Levels the receiver slices into: the transmitter's four, or two for the binary-threshold ablation."""
    order = config.getint("order", TRANSMIT_ORDER)
    if order not in (2, TRANSMIT_ORDER):
        raise ConfigError(f"order must be 2 or {TRANSMIT_ORDER}, the two LEDs never produce more levels: {order!r}")
    return order


def channel_config(config, **changes) -> ChannelConfig:
    levels = ideal_levels(
        TRANSMIT_ORDER, config.getfloat("led1_intensity", 1.0), config.getfloat("led2_intensity", 1.0)
    )
    try:
        cfg = ChannelConfig(
            rows=config.getint("rows", 1080),
            t_row=config.getfloat("t_row"),
            t_exp=config.getfloat("t_exp", 250e-6),
            led_tau=config.getfloat("led_tau", 0.0),
            envelope_coeffs=tuple(config.getlist("envelope_coeffs", type=float)) or (1.0,),
            noise_sigma=config.getfloat("noise_sigma", 0.0),
            drift_ppm=config.getfloat("drift_ppm", 0.0),
            drift_model=config.get("drift_model", "constant").strip().lower(),
            jitter_sigma=config.getfloat("jitter_sigma", 0.0),
            quantize_bits=config.getint("quantize_bits", 8),
            rng_seed=config.getint("rng_seed", 0),
            full_scale=float(levels.raw[-1]),
            column_taper=config.getfloat("column_taper", 0.0),
        )
        return replace(cfg, **changes)
    except InvalidArgumentError as e:
        raise ConfigError(str(e)) from e


def transmit(stream, config):
    spec = stream.spec
    dt = spec.symbol_period / 2 / config.getint("samples_per_half_symbol", 8)
    return synthesize_waveform(stream, dt, config.getfloat("led1_intensity", 1.0), config.getfloat("led2_intensity", 1.0))


def capture_start(spec: PacketSpec, channel: ChannelConfig, duration, rng):
    """Random exposure start that keeps the whole capture inside the transmission."""
    latest = min(duration - channel.span(), spec.packet_len * spec.symbol_period)
    if latest < 0:
        raise InvalidArgumentError(f"{spec.repetitions} packet copies last {duration!r}s, too short to capture")
    return float(rng.uniform(0.0, latest))


def simulate_frame(stream, config, channel: ChannelConfig | None = None, rng=None) -> Frame:
    if channel is None:
        channel = channel_config(config)
    waveform = transmit(stream, config)
    if config.getboolean("random_phase", True):
        rng = rng if rng is not None else np.random.default_rng(channel.rng_seed)
        channel = replace(channel, start_time=capture_start(stream.spec, channel, waveform.duration, rng))
    frame = make_frame(waveform, channel, config.getint("width", 1))
    frame.meta.update(start_time=channel.start_time, t_row=channel.t_row)
    return frame


def locate_header(symbols, spec: PacketSpec, order=TRANSMIT_ORDER, tolerance=0.2) -> int:
    symbols = np.asarray(symbols, dtype=np.int64)
    pattern = spec.header_symbols(order)
    if len(symbols) < len(pattern):
        raise HeaderNotFoundError(f"{len(symbols)} symbols can't hold a {len(pattern)}-symbol header")
    windows = np.lib.stride_tricks.sliding_window_view(symbols, len(pattern))
    distances = np.count_nonzero(windows != pattern, axis=1)
    index = int(np.argmin(distances))
    if distances[index] > tolerance * len(pattern):
        raise HeaderNotFoundError(f"closest header match differs in {distances[index]} of {len(pattern)} symbols")
    return index


def vote_payload(symbols, header_index, spec: PacketSpec, order=TRANSMIT_ORDER):
    """Majority-vote the payload over every complete copy in line with the located header.

    Returns ``(voted, primary, votes)``. The primary copy follows the located header, or is the earliest complete
    copy if that one is cut off. It also breaks ties.
    """
    symbols = np.asarray(symbols, dtype=np.int64)
    n, period = len(symbols), spec.packet_len
    first = header_index + spec.header_len
    copies = []
    for j in range(-(first // period) - 1, (n - first) // period + 2):
        start = first + j * period
        if start >= 0 and start + spec.payload_len_bits <= n:
            copies.append((j, symbols[start : start + spec.payload_len_bits]))
    if not copies:
        raise IncompletePacketError(f"no complete {spec.packet_len}-symbol packet around symbol {header_index}")

    primary = next((copy for j, copy in copies if j == 0), copies[0][1])
    weights = np.zeros((order, spec.payload_len_bits))
    columns = np.arange(spec.payload_len_bits)
    for _, copy in copies:
        np.add.at(weights, (np.clip(copy, 0, order - 1), columns), 1.0)
    np.add.at(weights, (np.clip(primary, 0, order - 1), columns), 0.5)
    return weights.argmax(axis=0), primary, len(copies)


def reconstruct_packet(symbols, header_index, spec: PacketSpec):
    voted, _, _ = vote_payload(symbols, header_index, spec)
    return bits_of(voted)


def bit_error_rate(tx, rx) -> float:
    tx, rx = as_bits(tx), as_bits(rx)
    if len(tx) != len(rx):
        raise InvalidArgumentError(f"sequence lengths differ: {len(tx)} != {len(rx)}")
    if not len(tx):
        return 0.0
    return float(np.count_nonzero(tx != rx) / len(tx))


def throughput(spec: PacketSpec, frame_rate) -> float:
    return float(frame_rate * 2 * spec.payload_len_bits)


@dataclass
class Reception:
    estimate: object
    column: object
    thresholds: object
    plan: object
    symbols: np.ndarray


@dataclass
class DecodeReport:
    method: str
    status: str = "ok"
    error: str = ""
    header_index: int | None = None
    symbols: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    payload_bits_a: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int8))
    payload_bits_b: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int8))
    ber: float | None = None
    ber_single: float | None = None
    symbol_error_rate: float | None = None
    throughput_bps: float = 0.0
    votes: int = 0
    stage_order: str = STAGE_ORDER
    config_echo: dict = field(default_factory=dict)

    @property
    def ok(self):
        return self.status == "ok"

    FIELDS = (
        "method",
        "status",
        "header_index",
        "votes",
        "ber",
        "ber_single",
        "symbol_error_rate",
        "throughput_bps",
        "payload_bits_a",
        "payload_bits_b",
        "stage_order",
        "error",
    )

    def to_record(self):
        record = {}
        for name in self.FIELDS:
            value = getattr(self, name)
            if isinstance(value, np.ndarray):
                value = "".join(map(str, value.tolist()))
            elif value is None:
                value = ""
            elif isinstance(value, float):
                value = repr(float(value))
            record[name] = value
        return record


def receive(frame: Frame, spec: PacketSpec, config, method=None) -> Reception:
    column = normalize(select_column(frame))
    if config.getboolean("equalize", True):
        column = equalize_histogram(column, config.getint("histogram_bins", 256))
    estimate = estimate_stripe_width(column, spec)
    column = resample_to_odd_width(column, estimate)
    estimate = estimate.after_resampling()

    thresholds = prt_thresholds(column, receiver_order(config))
    plan = get_sampler(config, method).plan(column, estimate)
    symbols = classify_samples(plan.values, plan.rows, thresholds)
    return Reception(estimate, column, thresholds, plan, symbols)


def decode_frame(frame: Frame, spec: PacketSpec, config, payload=None, method=None, echo=None) -> DecodeReport:
    """Decode one frame. With the transmitted ``(payload_a, payload_b)``, also score it."""
    method = (method or config.get("method", "ASM")).upper()
    report = DecodeReport(method=method, config_echo=dict(echo or {}))
    order = receiver_order(config)
    try:
        reception = receive(frame, spec, config, method)
        report.symbols = reception.symbols
        report.header_index = locate_header(reception.symbols, spec, order, config.getfloat("header_tolerance", 0.2))
        voted, primary, report.votes = vote_payload(reception.symbols, report.header_index, spec, order)
    except DecodeError as e:
        logger.warning("%s decode failed: %s", method, e)
        report.status, report.error = type(e).__name__, str(e)
        if payload is not None:
            report.ber = report.ber_single = FAILED_BER
            report.symbol_error_rate = 1.0
        return report

    report.payload_bits_a, report.payload_bits_b = bits_of(voted)
    report.throughput_bps = throughput(spec, config.getfloat("frame_rate", 60))
    if payload is not None:
        tx_a, tx_b = (as_bits(bits) for bits in payload)
        tx = np.concatenate([tx_a, tx_b])
        report.ber = bit_error_rate(tx, np.concatenate(bits_of(voted)))
        report.ber_single = bit_error_rate(tx, np.concatenate(bits_of(primary)))
        tx_symbols = 2 * tx_a.astype(np.int64) + tx_b
        report.symbol_error_rate = float(np.mean(tx_symbols != voted)) if len(tx_symbols) else 0.0
    return report


@dataclass(frozen=True)
class Experiment:
    base: dict
    axes: dict
    seeds: int
    methods: tuple

    @classmethod
    def from_config(cls, config):
        spec = packet_spec(config)
        receiver_order(config)
        nominal = {
            "noise_sigma": config.getfloat("noise_sigma", 0.0),
            "drift_ppm": config.getfloat("drift_ppm", 0.0),
            "jitter_sigma": config.getfloat("jitter_sigma", 0.0),
            "stripe_width": spec.symbol_period / config.getfloat("t_row"),
        }
        axes = {axis: config.getlist(f"sweep_{axis}", type=float) or [nominal[axis]] for axis in SWEEP_AXES}
        methods = tuple(method.upper() for method in config.getlist("methods", default=["ASM", "CR"]))
        unknown = [method for method in methods if method not in SAMPLERS]
        if unknown or not methods:
            raise ConfigError(f"methods must be a non-empty subset of {', '.join(SAMPLERS)}: {unknown!r}")
        seeds = config.getint("seeds", 1)
        if seeds < 1:
            raise ConfigError(f"seeds must be at least 1: {seeds!r}")
        return cls(base=config.items(), axes=axes, seeds=seeds, methods=methods)

    def grid(self):
        return [dict(zip(SWEEP_AXES, values)) for values in itertools.product(*(self.axes[a] for a in SWEEP_AXES))]

    def tasks(self):
        for grid_index, point in enumerate(self.grid()):
            for method in self.methods:
                for seed in range(self.seeds):
                    yield grid_index, point, method, seed


def run_once(base, grid_index, point, method, seed) -> DecodeReport:
    """One encode, render and decode run. Takes plain values so it can run in a worker process."""
    config = Config(values=base)
    spec = packet_spec(config)
    t_row = spec.symbol_period / point["stripe_width"]
    channel = channel_config(
        config,
        t_row=t_row,
        noise_sigma=point["noise_sigma"],
        drift_ppm=point["drift_ppm"],
        jitter_sigma=point["jitter_sigma"],
        rng_seed=seed,
    )
    rng = np.random.default_rng(seed)
    payload = tuple(rng.integers(0, 2, spec.payload_len_bits) for _ in range(2))
    echo = {"grid_index": grid_index, "seed": seed, **point}
    try:
        frame = simulate_frame(build_packet(*payload, spec), config, channel, rng)
    except InvalidArgumentError as e:
        logger.warning("run %d/%s/%d can't be simulated: %s", grid_index, method, seed, e)
        return DecodeReport(
            method,
            "InvalidArgumentError",
            str(e),
            ber=FAILED_BER,
            ber_single=FAILED_BER,
            symbol_error_rate=1.0,
            config_echo=echo,
        )
    return decode_frame(frame, spec, config, payload, method, echo)


def _run_task(args):
    return run_once(*args)


def run_experiment(experiment: Experiment, max_proc=1, storage=None) -> list[DecodeReport]:
    tasks = [(experiment.base, *task) for task in experiment.tasks()]
    logger.info("Running %d runs over %d grid points", len(tasks), len(experiment.grid()))
    if max_proc > 1:
        with ProcessPoolExecutor(max_workers=max_proc) as executor:
            reports = list(executor.map(_run_task, tasks, chunksize=max(1, len(tasks) // (4 * max_proc))))
    else:
        reports = [_run_task(task) for task in tasks]

    failures = sum(not report.ok for report in reports)
    logger.info("Finished %d runs, %d failed", len(reports), failures)
    if storage is not None:
        for report in reports:
            storage.add(run_record(report))
    return reports


def run_experiment_from_config(config, storage=None):
    return run_experiment(Experiment.from_config(config), get_max_proc(config), storage)


RUN_HEADER = ("grid_index", "seed", *SWEEP_AXES, *DecodeReport.FIELDS)
AGGREGATE_HEADER = ("grid_index", *SWEEP_AXES, "method", "runs", "failures", "mean_ber", "mean_ber_single", "mean_ser")


def run_record(report: DecodeReport):
    record = report.to_record()
    for key in ("grid_index", "seed", *SWEEP_AXES):
        value = report.config_echo.get(key, "")
        record[key] = repr(float(value)) if isinstance(value, float) else value
    return record


def run_rows(reports):
    return [tuple(run_record(report)[key] for key in RUN_HEADER) for report in reports]


def aggregate_rows(reports):
    groups = {}
    for report in reports:
        echo = report.config_echo
        groups.setdefault((echo["grid_index"], report.method), []).append(report)
    rows = []
    for (grid_index, method), group in sorted(groups.items()):
        echo = group[0].config_echo
        scored = [report for report in group if report.ber is not None]
        rows.append(
            (
                grid_index,
                *(repr(float(echo[axis])) for axis in SWEEP_AXES),
                method,
                len(group),
                sum(not report.ok for report in group),
                repr(float(np.mean([r.ber for r in scored]))) if scored else "",
                repr(float(np.mean([r.ber_single for r in scored]))) if scored else "",
                repr(float(np.mean([r.symbol_error_rate for r in scored]))) if scored else "",
            )
        )
    return rows


def mean_ber(reports, method, **point):
    """Mean BER of ``method`` over the runs whose grid point matches ``point``."""
    selected = [
        report.ber
        for report in reports
        if report.method == method and all(report.config_echo.get(k) == v for k, v in point.items())
    ]
    return float(np.mean(selected))


__all__ = [
    "DecodeReport",
    "Experiment",
    "bit_error_rate",
    "decode_frame",
    "locate_header",
    "reconstruct_packet",
    "run_experiment",
    "symbols_of",
    "throughput",
]
