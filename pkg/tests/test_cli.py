"""Tests for the command-line entry point: subcommands, outputs and exit codes."""
import io
import json
import sys
from pathlib import Path

import pandas as pd
import pytest

ROOT_DIR = Path(__file__).resolve().parents[1]
if str(ROOT_DIR) not in sys.path:
    sys.path.insert(0, str(ROOT_DIR))

from cli_main import EXIT_IO, EXIT_OK, EXIT_PARAMETER, main
from src import config
from src.core.errors import DataFileError, ParameterError
from src.sim.data_io import read_pairs


@pytest.fixture
def pairs_file(tmp_path):
    path = tmp_path / "pairs.csv"
    rows = ["x,y"] + [f"{i},{(i * 7) % 23}" for i in range(1, 21)]
    path.write_text("\n".join(rows) + "\n", encoding="utf-8")
    return path


def test_read_pairs_formats(tmp_path):
    path = tmp_path / "mixed.txt"
    path.write_text("# comment\n\n1\t2\n3;4\n5 6\n", encoding="utf-8")
    sample = read_pairs(path)
    assert sample.x.tolist() == [1.0, 3.0, 5.0]
    assert sample.y.tolist() == [2.0, 4.0, 6.0]


def test_read_pairs_errors(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("1,2\n3,oops\n", encoding="utf-8")
    with pytest.raises(DataFileError) as excinfo:
        read_pairs(path)
    assert excinfo.value.line == 2

    path.write_text("1,2,3\n", encoding="utf-8")
    with pytest.raises(DataFileError):
        read_pairs(path)

    path.write_text("x,y\n1,2\n", encoding="utf-8")
    with pytest.raises(ParameterError):
        read_pairs(path)

    with pytest.raises(DataFileError):
        read_pairs(tmp_path / "missing.csv")


def test_read_pairs_header_needs_every_field_non_numeric(tmp_path):
    path = tmp_path / "pairs.csv"
    path.write_text("1,abc\n2,3\n3,4\n", encoding="utf-8")
    with pytest.raises(DataFileError) as excinfo:
        read_pairs(path)
    assert excinfo.value.line == 1

    path.write_text("x,5\n2,3\n3,4\n", encoding="utf-8")
    with pytest.raises(DataFileError) as excinfo:
        read_pairs(path)
    assert excinfo.value.line == 1

    path.write_text("x;y\n2;3\n3;4\n", encoding="utf-8")
    sample = read_pairs(path)
    assert sample.x.tolist() == [2.0, 3.0]
    print("✓ Only an all-text first row is taken as a header")


def test_read_pairs_line_numbers_skip_comments(tmp_path):
    path = tmp_path / "commented.csv"
    path.write_text("# data\n\nx,y\n1,2\n\n2,abc\n", encoding="utf-8")
    with pytest.raises(DataFileError) as excinfo:
        read_pairs(path)
    assert excinfo.value.line == 6

    path.write_text("1,2\n# note\n3,4,5\n", encoding="utf-8")
    with pytest.raises(DataFileError) as excinfo:
        read_pairs(path)
    assert excinfo.value.line == 3
    assert "found 3" in str(excinfo.value)

    path.write_text("1,2\n2,inf\n", encoding="utf-8")
    with pytest.raises(DataFileError) as excinfo:
        read_pairs(path)
    assert excinfo.value.line == 2


def test_xi_command_json(pairs_file, capsys):
    assert main(["xi", str(pairs_file), "--format", "json"]) == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert payload["n"] == 20
    assert payload["xi_general"] == pytest.approx(payload["xi_simple"])
    assert payload["schema_version"] == config.SCHEMA_VERSION
    print("✓ xi subcommand produced JSON")


def test_xi_command_with_ties_reports_general_only(tmp_path, capsys):
    path = tmp_path / "ties.csv"
    path.write_text("1,1\n2,1\n3,2\n4,3\n", encoding="utf-8")
    assert main(["xi", str(path), "--format", "json", "--tie-seed", "3"]) == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert payload["xi_simple"] is None
    assert payload["y_tied"] == 2


def test_bootstrap_command_writes_file(pairs_file, tmp_path):
    out = tmp_path / "boot.json"
    code = main(["bootstrap", str(pairs_file), "-B", "50", "--seed", "3",
                 "--format", "json", "-o", str(out)])
    assert code == EXIT_OK
    payload = json.loads(out.read_text(encoding="utf-8"))
    assert payload["B"] == 50
    assert payload["warning"] == config.INCONSISTENCY_WARNING
    assert payload["HB2_lower"] <= payload["HB2_upper"]


def test_bootstrap_command_csv_keeps_warning(pairs_file, capsys):
    code = main(["bootstrap", str(pairs_file), "-B", "20", "--seed", "3", "--format", "csv"])
    assert code == EXIT_OK
    captured = capsys.readouterr()
    frame = pd.read_csv(io.StringIO(captured.out))
    assert len(frame) == 1
    assert frame.loc[0, "warning"] == config.INCONSISTENCY_WARNING
    assert config.INCONSISTENCY_WARNING in captured.err
    print("✓ CSV bootstrap report carries the inconsistency warning")


def test_simulate_command_csv(tmp_path):
    out = tmp_path / "table.csv"
    code = main(["simulate", "--rho", "0", "--n", "20", "--reps", "3", "--boot", "4",
                 "--alpha", "0.1", "--seed", "5", "-o", str(out)])
    assert code == EXIT_OK
    frame = pd.read_csv(out)
    assert list(frame.columns) == config.CSV_COLUMNS
    assert set(frame["n"]) == {20}
    assert (frame["seed"] == 5).all()


def test_simulate_is_reproducible(tmp_path):
    args = ["simulate", "--rho", "0", "--n", "15", "--reps", "3", "--boot", "4", "--format", "json"]
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    assert main(args + ["-o", str(first)]) == EXIT_OK
    assert main(args + ["-o", str(second)]) == EXIT_OK
    assert first.read_bytes() == second.read_bytes()


def test_parameter_errors_exit_2(pairs_file):
    assert main(["simulate", "--rho", "1.0", "--reps", "2", "--boot", "2"]) == EXIT_PARAMETER
    assert main(["bootstrap", str(pairs_file), "-B", "1"]) == EXIT_PARAMETER
    assert main(["simulate", "--unknown-flag"]) == EXIT_PARAMETER
    assert main([]) == EXIT_PARAMETER


def test_too_few_rows_exit_2(tmp_path):
    path = tmp_path / "one.csv"
    path.write_text("1,2\n", encoding="utf-8")
    assert main(["xi", str(path)]) == EXIT_PARAMETER


def test_malformed_file_exit_4(tmp_path, capsys):
    path = tmp_path / "broken.csv"
    path.write_text("1,2\n2,3\nthree,4\n", encoding="utf-8")
    assert main(["xi", str(path)]) == EXIT_IO
    assert "broken.csv:3" in capsys.readouterr().err
    assert main(["xi", str(tmp_path / "absent.csv")]) == EXIT_IO


def test_help_exits_cleanly():
    assert main(["--help"]) == EXIT_OK
