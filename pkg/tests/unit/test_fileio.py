import io

import numpy as np
import pytest

from rsocc.camera import Frame, GrayColumn
from rsocc.exceptions import InvalidArgumentError
from rsocc.fileio import (
    LEVEL_HEADER,
    PLAN_HEADER,
    level_rows,
    plan_rows,
    read_bits,
    read_column,
    read_frame,
    threshold_header,
    threshold_rows,
    write_bits,
    write_column,
    write_csv,
    write_frame,
)
from rsocc.modulation import ideal_levels
from rsocc.prt import prt_thresholds
from rsocc.sampler import asm_sample
from tests import stripes

pytestmark = pytest.mark.unit


def test_bits(tmp_path):
    path = tmp_path / "stream.txt"
    write_bits(path, [1, 0, 1], np.array([0, 0, 1]))

    assert path.read_text() == "101\n001\n"
    np.testing.assert_array_equal(read_bits(path)[1], [0, 0, 1])


def test_bits_invalid(tmp_path):
    path = tmp_path / "stream.txt"
    path.write_text("10x\n")

    with pytest.raises(InvalidArgumentError):
        read_bits(path)


def test_frame_bit_exact(tmp_path):
    levels = np.random.default_rng(0).integers(0, 256, (30, 4))
    path = tmp_path / "frame.txt"
    write_frame(path, Frame(levels / 255))

    assert path.read_text().splitlines()[0] == "30 4 255"
    frame = read_frame(path)
    np.testing.assert_array_equal(np.round(frame.values * 255).astype(int), levels)

    write_frame(tmp_path / "again.txt", frame)
    assert (tmp_path / "again.txt").read_text() == path.read_text()


def test_frame_shape_mismatch(tmp_path):
    path = tmp_path / "frame.txt"
    path.write_text("3 2 255\n1 2\n3 4\n")

    with pytest.raises(InvalidArgumentError):
        read_frame(path)


def test_frame_garbage(tmp_path):
    path = tmp_path / "frame.txt"
    path.write_text("P2\n")

    with pytest.raises(InvalidArgumentError):
        read_frame(path)


def test_column(tmp_path):
    values = np.random.default_rng(1).random(20)
    path = tmp_path / "column.txt"
    write_column(path, GrayColumn(values))

    np.testing.assert_array_equal(read_column(path).values, values)


def test_csv_level_table():
    buffer = io.StringIO()
    write_csv(buffer, LEVEL_HEADER, level_rows(ideal_levels()))

    lines = buffer.getvalue().splitlines()
    assert lines[0] == "symbol,raw_mean,level"
    assert lines[2] == "1,0.5,0.3333333333333333"
    assert len(lines) == 5


def test_csv_thresholds(tmp_path):
    ts = prt_thresholds(np.random.default_rng(2).random(50), 6)
    path = tmp_path / "thresholds.csv"
    write_csv(path, threshold_header(ts), threshold_rows(ts))

    lines = path.read_text().splitlines()
    assert lines[0] == "row,th0,th1,th2,th3,th4"
    assert len(lines) == 51
    assert float(lines[1].split(",")[3]) == ts.values[2, 0]


def test_csv_plan():
    values = stripes([7] * 20, [0, 1] * 10)
    plan = asm_sample(GrayColumn(values), 7)
    rows = plan_rows(plan)

    assert len(rows) == len(plan)
    assert rows[0] == (6, 17, "0.0", 1, "1.0")
    assert len(PLAN_HEADER) == len(rows[0])
