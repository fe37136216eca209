"""Helper functions for tropml."""
from __future__ import annotations

import csv
import io
import sys
from collections.abc import Iterable
from pathlib import Path

import numpy as np

from .const import SIGNIFICANT_DIGITS
from .exceptions import ParseError, RaggedRowsError


def make_rng(seed: int) -> np.random.Generator:
    """Return the portable PCG64 generator for a seed."""
    return np.random.Generator(np.random.PCG64(seed))


def spawn_rngs(seed: int, count: int) -> list[np.random.Generator]:
    """Return `count` independent PCG64 streams derived from one seed."""
    children = np.random.SeedSequence(seed).spawn(count)
    return [np.random.Generator(np.random.PCG64(child)) for child in children]


def format_number(value: float) -> str:
    """Format a number with the CLI's significant digits."""
    text = f"{float(value):.{SIGNIFICANT_DIGITS}g}"
    return "0" if text == "-0" else text


def format_row(values: Iterable[float]) -> str:
    """Format one CSV row of numbers."""
    return ",".join(format_number(value) for value in values)


def format_rows(rows: Iterable[Iterable[float]]) -> str:
    """Format a matrix as CSV text, one row per line."""
    return "\n".join(format_row(row) for row in rows)


def read_text(source: str | Path) -> str:
    """Read a file, or standard input for '-'."""
    if str(source) == "-":
        return sys.stdin.read()
    return Path(source).read_text(encoding="utf-8")


def parse_points_csv(
    text: str, header: bool = False
) -> tuple[np.ndarray, list[str] | None]:
    """Parse a CSV of points.

    Args:
        text: The CSV text; '#' lines and blank lines are ignored.
        header: Whether the first data line is a header row.

    Returns:
        The s×e matrix and the header fields (None without a header).

    """
    rows: list[list[float]] = []
    fields: list[str] | None = None
    offset = 0
    width = None
    for line in text.splitlines(keepends=True):
        line_offset = offset
        offset += len(line.encode("utf-8"))
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        cells = next(csv.reader(io.StringIO(stripped)))
        if header and fields is None:
            fields = [cell.strip() for cell in cells]
            continue
        try:
            row = [float(cell) for cell in cells]
        except ValueError as err:
            raise ParseError(f"bad number in row {stripped!r}", line_offset) from err
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise RaggedRowsError(
                f"row at offset {line_offset} has {len(row)} fields, expected {width}"
            )
        rows.append(row)
    if not rows:
        return np.empty((0, width or 0)), fields
    return np.asarray(rows, dtype=float), fields


def split_labels(
    matrix: np.ndarray, label_column: int = -1
) -> tuple[np.ndarray, np.ndarray]:
    """Split a labeled matrix into points and integer labels."""
    if matrix.shape[1] < 2:
        raise RaggedRowsError("a labeled CSV needs a label column and coordinates")
    column = label_column % matrix.shape[1]
    labels = matrix[:, column]
    if not np.all(np.isin(labels, (0.0, 1.0))):
        raise ParseError("labels must be 0 or 1", 0)
    points = np.delete(matrix, column, axis=1)
    return points, labels.astype(int)


def write_output(text: str, output: str | Path | None) -> None:
    """Write text to a file, or to standard output when no path is given."""
    if not text.endswith("\n"):
        text += "\n"
    if output is None or str(output) == "-":
        sys.stdout.write(text)
    else:
        Path(output).write_text(text, encoding="utf-8")


def triangular_root(count: int) -> int | None:
    """Return m with m(m-1)/2 == count, or None when count is not triangular."""
    m = int(round((1 + np.sqrt(1 + 8 * count)) / 2))
    return m if m * (m - 1) // 2 == count else None
