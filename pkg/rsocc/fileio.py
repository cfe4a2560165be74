"""
Plain-text formats: bitstreams as lines of 0/1, gray columns as one value per line, frames as a ``R C maxval``
header followed by R lines of C integers, and the CSV exports used for plotting.
"""

import csv
from pathlib import Path

import numpy as np

from rsocc.camera import Frame, GrayColumn
from rsocc.exceptions import InvalidArgumentError
from rsocc.modulation import as_bits


def write_bits(path, *streams):
    Path(path).write_text("".join("".join(str(int(bit)) for bit in stream) + "\n" for stream in streams))


def read_bits(path):
    lines = [line.strip() for line in Path(path).read_text().splitlines() if line.strip()]
    try:
        return [as_bits([int(char) for char in line]) for line in lines]
    except ValueError as e:
        raise InvalidArgumentError(f"{path} isn't a bitstream file: {e}") from e


def write_frame(path, frame: Frame):
    levels = np.round(frame.values * frame.maxval).astype(np.int64)
    with Path(path).open("w") as f:
        f.write(f"{frame.rows} {frame.width} {frame.maxval}\n")
        for row in levels:
            f.write(" ".join(map(str, row)) + "\n")


def read_frame(path) -> Frame:
    with Path(path).open() as f:
        try:
            rows, width, maxval = (int(token) for token in f.readline().split())
            levels = np.array([[int(token) for token in line.split()] for line in f if line.strip()])
        except ValueError as e:
            raise InvalidArgumentError(f"{path} isn't a frame file: {e}") from e
    if levels.shape != (rows, width):
        raise InvalidArgumentError(f"{path} declares {rows}x{width} but holds {levels.shape}")
    return Frame(levels / maxval, maxval)


def write_column(path, col: GrayColumn):
    Path(path).write_text("".join(f"{value!r}\n" for value in col.values.tolist()))


def read_column(path) -> GrayColumn:
    values = [float(line) for line in Path(path).read_text().splitlines() if line.strip()]
    return GrayColumn(np.array(values))


def write_csv(path_or_file, header, rows):
    if hasattr(path_or_file, "write"):
        writer = csv.writer(path_or_file, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        return
    with Path(path_or_file).open("w", newline="") as f:
        write_csv(f, header, rows)


def level_rows(table):
    pairs = zip(table.raw.tolist(), table.levels.tolist())
    return [(symbol, repr(raw), repr(level)) for symbol, (raw, level) in enumerate(pairs)]


def threshold_rows(ts):
    return [(row, *(repr(value) for value in ts.values[:, row].tolist())) for row in range(ts.rows)]


def estimate_rows(est):
    return [(repr(est.W), est.X, repr(est.resample_factor), repr(est.header_start))]


def plan_rows(plan):
    ids = plan.segment_ids if plan.segment_ids is not None else np.full(len(plan), -1)
    rows = []
    for position, row, value, index in zip(plan.positions, plan.rows, plan.values, ids):
        k, ratio = plan.segments[index] if index >= 0 else ("", "")
        rows.append((int(position), int(row), repr(float(value)), k, ratio if ratio == "" else repr(ratio)))
    return rows


def threshold_header(ts):
    return ("row", *(f"th{i}" for i in range(ts.order - 1)))


LEVEL_HEADER = ("symbol", "raw_mean", "level")
ESTIMATE_HEADER = ("W", "X", "resample_factor", "header_start")
PLAN_HEADER = ("position", "row", "gray", "k", "ratio")
