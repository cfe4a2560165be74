import numpy as np
import pytest

from rsocc import __version__
from rsocc.__main__ import EXIT_CONFIG, EXIT_DECODE, EXIT_OK, build_parser, main, parse_overrides
from rsocc.camera import Frame
from rsocc.exceptions import ConfigError
from rsocc.fileio import write_frame

pytestmark = pytest.mark.unit

QUIET = ["--rich-logging", "off"]


def test_version(capsys):
    assert main(["--version"]) == EXIT_OK
    assert capsys.readouterr().out == f"rsocc {__version__}\n"


def test_v(capsys):
    assert main(["-v"]) == EXIT_OK
    assert capsys.readouterr().out == f"rsocc {__version__}\n"


def test_help(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--help"])

    captured = capsys.readouterr()
    assert exc.value.code == 0
    assert captured.out.startswith("usage: rsocc")
    for command in ("encode", "simulate", "decode", "evaluate"):
        assert command in captured.out


def test_no_command(capsys):
    assert main([]) == EXIT_CONFIG


def test_option_flags():
    args = build_parser().parse_args(["--noise-sigma", "0.1", "--set", "rows=720", "decode", "frame.txt"])

    assert parse_overrides(args) == {"noise_sigma": "0.1", "rows": "720"}


def test_set_without_value():
    args = build_parser().parse_args(["--set", "rows", "decode", "frame.txt"])

    with pytest.raises(ConfigError):
        parse_overrides(args)


def test_unknown_option(chdir, capsys):
    assert main([*QUIET, "--set", "rowz=10", "decode", "frame.txt"]) == EXIT_CONFIG
    assert "Unknown option 'rowz'" in capsys.readouterr().err


def test_missing_config_file(chdir, capsys):
    assert main([*QUIET, "--config", "missing.conf", "decode", "frame.txt"]) == EXIT_CONFIG
    assert "missing.conf" in capsys.readouterr().err


def test_invalid_value(chdir):
    (chdir / "frame.txt").write_text("1 1 255\n0\n")

    assert main([*QUIET, "--rows", "lots", "simulate", "frame.txt", "-o", "out.txt"]) == EXIT_CONFIG


def test_decode_garbage(chdir):
    (chdir / "frame.txt").write_text("not a frame\n")

    assert main([*QUIET, "decode", "frame.txt"]) == EXIT_CONFIG


def test_decode_blank_frame(chdir, capsys):
    write_frame(chdir / "frame.txt", Frame(np.full((100, 1), 0.5)))

    assert main([*QUIET, "decode", "frame.txt"]) == EXIT_DECODE
    assert "status: DegenerateSignalError" in capsys.readouterr().out


def test_decode_dump_blank_frame(chdir, capsys):
    write_frame(chdir / "frame.txt", Frame(np.full((100, 1), 0.5)))

    assert main([*QUIET, "decode", "frame.txt", "--plan", "plan.csv"]) == EXIT_DECODE
    assert "DegenerateSignalError" in capsys.readouterr().err


def test_encode(chdir):
    (chdir / "payload.txt").write_text("1" * 70 + "\n" + "0" * 70 + "\n")

    assert main([*QUIET, "encode", "payload.txt", "-o", "stream.txt", "--levels", "levels.csv"]) == EXIT_OK

    lines = (chdir / "stream.txt").read_text().splitlines()
    assert lines[0] == ("1010101010" + "1" * 70) * 3
    assert lines[1] == ("1010101010" + "0" * 70) * 3
    assert (chdir / "levels.csv").read_text().startswith("symbol,raw_mean,level\n")


def test_encode_wrong_length(chdir):
    (chdir / "payload.txt").write_text("1" * 69 + "\n" + "0" * 70 + "\n")

    assert main([*QUIET, "encode", "payload.txt", "-o", "stream.txt"]) == EXIT_CONFIG


def test_encode_one_line(chdir):
    (chdir / "payload.txt").write_text("1" * 70 + "\n")

    assert main([*QUIET, "encode", "payload.txt", "-o", "stream.txt"]) == EXIT_CONFIG


def test_evaluate_unknown_axis(chdir):
    (chdir / "experiment.conf").write_text("sweep_exposure = 1, 2\n")

    assert main([*QUIET, "evaluate", "experiment.conf"]) == EXIT_CONFIG
