"""Numeric CSV tables rendered with 17 significant digits (round-trip exact)."""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from typing import IO, List, Optional, Sequence, Union

from .errors import InvalidArgumentError

Cell = Union[float, int, str]


def format_number(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    x = float(value)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


@dataclass
class CsvTable:
    header: Sequence[str]
    rows: List[Sequence[Cell]] = field(default_factory=list)
    comments: List[str] = field(default_factory=list)
    seed: Optional[int] = None

    def __post_init__(self):
        self.header = tuple(self.header)
        if not self.header:
            raise InvalidArgumentError("CSV header must not be empty")
        for name in self.header:
            if any(ch in name for ch in ',"\n\r'):
                raise InvalidArgumentError(f"column name needs quoting: {name!r}")
        width = len(self.header)
        for i, row in enumerate(self.rows):
            if len(row) != width:
                raise InvalidArgumentError(f"row {i} has {len(row)} cells, header has {width}")
            for cell in row:
                if isinstance(cell, str) and any(ch in cell for ch in ',"\n\r'):
                    raise InvalidArgumentError(f"cell needs quoting: {cell!r}")

    def render(self) -> str:
        lines = [f"# {c}" for c in self.comments]
        if self.seed is not None:
            lines.append(f"# seed={self.seed}")
        lines.append(",".join(self.header))
        lines.extend(",".join(format_number(v) for v in row) for row in self.rows)
        return "\n".join(lines) + "\n"


def write_csv(table: CsvTable, sink: IO) -> None:
    """Write to a text or byte stream; LF line endings either way."""
    text = table.render()
    if isinstance(sink, (io.RawIOBase, io.BufferedIOBase)) or "b" in getattr(sink, "mode", ""):
        sink.write(text.encode("utf-8"))
    else:
        sink.write(text)


def write_csv_file(table: CsvTable, path) -> None:
    with open(path, "wb") as fh:
        write_csv(table, fh)


def read_csv(text: str):
    """Inverse of ``render`` for numeric tables: (header, rows, comments)."""
    comments, data = [], []
    for line in text.splitlines():
        if line.startswith("#"):
            comments.append(line[1:].strip())
        elif line:
            data.append(line.split(","))
    if not data:
        raise InvalidArgumentError("no header row")
    header, body = data[0], data[1:]
    rows = []
    for cells in body:
        row = []
        for c in cells:
            try:
                row.append(float(c))
            except ValueError:
                row.append(c)
        rows.append(row)
    return header, rows, comments
