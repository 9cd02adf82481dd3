import csv
import io
import math

import pytest
from hypothesis import given, strategies as st

from seirlab.csvio import CsvTable, format_number, read_csv, write_csv, write_csv_file
from seirlab.errors import InvalidArgumentError


def test_format_number():
    assert format_number(0.1) == "0.10000000000000001"
    assert format_number(3) == "3"
    assert format_number(float("nan")) == "nan"
    assert format_number(-math.inf) == "-inf"
    assert format_number(True) == "true"
    assert format_number("beta") == "beta"


@given(st.lists(st.floats(allow_nan=False), min_size=1, max_size=5))
def test_round_trip_through_stdlib_reader(values):
    text = CsvTable([f"c{i}" for i in range(len(values))], [values]).render()
    rows = list(csv.reader(io.StringIO(text)))
    assert [float(v) for v in rows[1]] == values


def test_empty_and_single_row_tables():
    assert CsvTable(["a", "b"]).render() == "a,b\n"
    assert CsvTable(["a"], [[1.5]]).render() == "a\n1.5\n"


def test_comments_and_seed_precede_header():
    text = CsvTable(["x"], [[1]], comments=["model=m"], seed=7).render()
    assert text == "# model=m\n# seed=7\nx\n1\n"
    header, rows, comments = read_csv(text)
    assert header == ["x"] and rows == [[1.0]] and comments == ["model=m", "seed=7"]


def test_lf_line_endings_for_byte_and_text_sinks(tmp_path):
    table = CsvTable(["x", "y"], [[1, 2], [3, 4]])
    buf = io.BytesIO()
    write_csv(table, buf)
    assert b"\r" not in buf.getvalue()
    sio = io.StringIO()
    write_csv(table, sio)
    assert sio.getvalue() == buf.getvalue().decode()
    path = tmp_path / "t.csv"
    write_csv_file(table, path)
    assert path.read_bytes() == buf.getvalue()


def test_rejects_ragged_or_quoted_content():
    with pytest.raises(InvalidArgumentError):
        CsvTable(["a", "b"], [[1]])
    with pytest.raises(InvalidArgumentError):
        CsvTable(["a,b"])
    with pytest.raises(InvalidArgumentError):
        CsvTable(["a"], [["x,y"]])
    with pytest.raises(InvalidArgumentError):
        CsvTable([])
    with pytest.raises(InvalidArgumentError):
        read_csv("# only a comment\n")
