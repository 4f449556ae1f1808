"""CSV reading and writing with a fixed dialect.

Comma separator, ``.`` decimal point, UTF-8, mandatory header, reals written
with 17 significant digits, missing values written as empty fields.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np

from .errors import DataError


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        if math.isnan(value):
            return ""
        return format(float(value), ".17g")
    return str(value)


def write_csv(path, header, rows) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def read_table(path):
    """Read a numeric CSV. Returns ``(header, array)``.

    Raises
    ------
    DataError
        On a missing file, missing header, ragged row or non-numeric cell;
        the message names the 1-based line and the column.
    """
    path = Path(path)
    try:
        fh = open(path, encoding="utf-8", newline="")
    except OSError as exc:
        raise DataError(f"cannot open {path}: {exc.strerror}") from None
    with fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DataError(f"{path}: empty file, header row required") from None
        rows = []
        for line_no, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise DataError(f"{path}: line {line_no} has {len(row)} fields, header has {len(header)}")
            vals = []
            for col, cell in zip(header, row):
                try:
                    vals.append(float(cell))
                except ValueError:
                    raise DataError(f"{path}: line {line_no}, column {col!r}: not a number: {cell!r}") from None
            rows.append(vals)
    if not rows:
        raise DataError(f"{path}: no data rows")
    arr = np.array(rows, dtype=float)
    bad = ~np.isfinite(arr)
    if bad.any():
        r, c = np.argwhere(bad)[0]
        raise DataError(f"{path}: line {r + 2}, column {header[c]!r}: non-finite value")
    return header, arr


def read_spatial_csv(path):
    """Read ``x,y,<name1>,...`` into ``(coords, values, names)``."""
    header, arr = read_table(path)
    if len(header) < 3 or [h.lower() for h in header[:2]] != ["x", "y"]:
        raise DataError(f"{path}: header must start with x,y followed by value columns, got {','.join(header)}")
    return arr[:, :2], arr[:, 2:], header[2:]
