import argparse
import logging
import sys
from pathlib import Path

from rich.console import Console
from rich.table import Table

import rsocc
from rsocc.exceptions import ConfigError, DecodeError, InvalidArgumentError
from rsocc.fileio import (
    ESTIMATE_HEADER,
    LEVEL_HEADER,
    PLAN_HEADER,
    estimate_rows,
    level_rows,
    plan_rows,
    read_bits,
    read_frame,
    threshold_header,
    threshold_rows,
    write_bits,
    write_column,
    write_csv,
    write_frame,
)
from rsocc.harness import (
    AGGREGATE_HEADER,
    RUN_HEADER,
    DecodeReport,
    Experiment,
    aggregate_rows,
    decode_frame,
    packet_spec,
    receive,
    run_experiment,
    run_rows,
    simulate_frame,
)
from rsocc.modulation import TRANSMIT_ORDER, DualBitstream, build_packet, ideal_levels
from rsocc.utils import get_max_proc, initialize_component

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DECODE = 3


def option_flag(option):
    return "--" + option.replace("_", "-")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="rsocc",
        description="Simulate, encode and decode rolling-shutter optical camera communication frames.",
    )
    parser.add_argument("-v", "--version", action="store_true", help="print the version and exit")
    parser.add_argument("--config", action="append", default=[], metavar="FILE", help="read a configuration file")
    parser.add_argument(
        "--set", action="append", default=[], metavar="KEY=VALUE", help="override a configuration option"
    )
    options = parser.add_argument_group("configuration options")
    for option in sorted(rsocc.Config(values={}).known):
        options.add_argument(option_flag(option), dest=f"option_{option}", metavar="VALUE", help=argparse.SUPPRESS)

    commands = parser.add_subparsers(dest="command", metavar="COMMAND")

    encode = commands.add_parser("encode", help="frame two payloads into LED bitstreams")
    encode.add_argument("payload", help="file with the two payload bit lines")
    encode.add_argument("-o", "--output", required=True, help="bitstream file to write")
    encode.add_argument("--levels", help="also write the ideal level table as CSV")

    simulate = commands.add_parser("simulate", help="render bitstreams into a rolling-shutter frame")
    simulate.add_argument("stream", help="bitstream file written by encode")
    simulate.add_argument("-o", "--output", required=True, help="frame file to write")
    simulate.add_argument("--column", help="also write the brightest-variance column")

    decode = commands.add_parser("decode", help="decode a frame file")
    decode.add_argument("frame", help="frame file written by simulate")
    decode.add_argument("--payload", help="transmitted payload file, to score the decode")
    decode.add_argument("--method", help="sampler to use, ASM or CR")
    decode.add_argument("-o", "--output", help="write the report as CSV")
    decode.add_argument("--thresholds", help="write the threshold curves as CSV")
    decode.add_argument("--plan", help="write the sample plan as CSV")
    decode.add_argument("--estimate", help="write the stripe-width estimate as CSV")

    evaluate = commands.add_parser("evaluate", help="run an experiment sweep")
    evaluate.add_argument("descriptor", nargs="?", help="experiment descriptor, a configuration file")
    evaluate.add_argument("-o", "--output", help="aggregate CSV to write, instead of standard output")
    evaluate.add_argument("--runs", help="per-run CSV to write")
    return parser


def parse_overrides(args):
    overrides = {
        name.removeprefix("option_"): value
        for name, value in vars(args).items()
        if name.startswith("option_") and value is not None
    }
    for item in args.set:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects KEY=VALUE: {item!r}")
        overrides[key.strip()] = value.strip()
    return overrides


def load_config(args):
    sources = [*args.config]
    if getattr(args, "descriptor", None):
        sources.append(args.descriptor)
    for source in sources:
        if not Path(source).is_file():
            raise ConfigError(f"configuration file not found: {source}")
    return rsocc.get_config(extra_sources=sources, overrides=parse_overrides(args))


def read_payload(config, path):
    spec = packet_spec(config)
    payload = read_bits(path)
    if len(payload) != 2:
        raise InvalidArgumentError(f"{path} must hold two payload lines, one per LED: found {len(payload)}")
    return build_packet(*payload, spec), payload


def cmd_encode(config, args, console):
    stream, _ = read_payload(config, args.payload)
    write_bits(args.output, stream.bits_a, stream.bits_b)
    if args.levels:
        table = ideal_levels(
            TRANSMIT_ORDER, config.getfloat("led1_intensity", 1.0), config.getfloat("led2_intensity", 1.0)
        )
        write_csv(args.levels, LEVEL_HEADER, level_rows(table))
    console.print(f"Wrote {len(stream)} symbols to {args.output}")
    return EXIT_OK


def cmd_simulate(config, args, console):
    streams = read_bits(args.stream)
    if len(streams) != 2:
        raise InvalidArgumentError(f"{args.stream} must hold two bitstream lines: found {len(streams)}")
    frame = simulate_frame(DualBitstream(*streams, packet_spec(config)), config)
    write_frame(args.output, frame)
    if args.column:
        write_column(args.column, max(frame.columns(), key=lambda column: column.values.var()))
    console.print(f"Wrote a {frame.rows}x{frame.width} frame to {args.output}")
    return EXIT_OK


def cmd_decode(config, args, console):
    spec = packet_spec(config)
    frame = read_frame(args.frame)
    payload = read_payload(config, args.payload)[1] if args.payload else None

    if args.thresholds or args.plan or args.estimate:
        reception = receive(frame, spec, config, args.method)
        if args.thresholds:
            write_csv(args.thresholds, threshold_header(reception.thresholds), threshold_rows(reception.thresholds))
        if args.plan:
            write_csv(args.plan, PLAN_HEADER, plan_rows(reception.plan))
        if args.estimate:
            write_csv(args.estimate, ESTIMATE_HEADER, estimate_rows(reception.estimate))

    report = decode_frame(frame, spec, config, payload, args.method)
    record = report.to_record()
    if args.output:
        write_csv(args.output, DecodeReport.FIELDS, [tuple(record[key] for key in DecodeReport.FIELDS)])
    for key in DecodeReport.FIELDS:
        console.print(f"{key}: {record[key]}", markup=False, highlight=False, soft_wrap=True)
    return EXIT_OK if report.ok else EXIT_DECODE


def cmd_evaluate(config, args, console):
    experiment = Experiment.from_config(config)
    storage = initialize_component(config, "reportstorage", "rsocc.reportstorage.MemoryReportStorage")
    reports = run_experiment(experiment, get_max_proc(config), storage)

    rows = aggregate_rows(reports)
    if args.output:
        write_csv(args.output, AGGREGATE_HEADER, rows)
    else:
        write_csv(sys.stdout, AGGREGATE_HEADER, rows)
    if args.runs:
        write_csv(args.runs, RUN_HEADER, run_rows(reports))

    if args.output:
        table = Table(title="Mean BER per grid point")
        for column in ("grid", *AGGREGATE_HEADER[1:5], "method", "failures", "ber"):
            table.add_column(column)
        for row in rows:
            table.add_row(*(str(value) for value in (*row[:6], row[7], row[8])))
        console.print(table)
    return EXIT_OK


COMMANDS = {
    "encode": cmd_encode,
    "simulate": cmd_simulate,
    "decode": cmd_decode,
    "evaluate": cmd_evaluate,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    console = Console()
    err_console = Console(stderr=True)

    if args.version:
        console.print(f"[bold green]rsocc[/bold green] [blue]{rsocc.__version__}[/blue]")
        return EXIT_OK
    if args.command is None:
        parser.print_help()
        return EXIT_CONFIG

    try:
        config = load_config(args)
        return COMMANDS[args.command](config, args, console)
    except (ConfigError, InvalidArgumentError) as e:
        err_console.print(f"[bold red]error:[/bold red] {e}", highlight=False)
        return EXIT_CONFIG
    except DecodeError as e:
        err_console.print(f"[bold red]decode failed:[/bold red] {type(e).__name__}: {e}", highlight=False)
        return EXIT_DECODE


if __name__ == "__main__":
    sys.exit(main())
