"""
Reading and writing roughlog artifacts: masks, tables, matrices and JSON records.
"""
import json
from pathlib import Path

import numpy as np
from astropy.table import Table
from scipy import io as sio

__all__ = ['write_mask', 'read_mask', 'write_table', 'read_table', 'write_json', 'read_json',
           'append_jsonl', 'write_matrix_market', 'to_jsonable']


def write_mask(mask, path):
    """
    Write a mask as text.

    The first line is ``nx ny h ox oy``; then come ``ny`` lines of ``nx``
    ``0``/``1`` characters, starting with grid row ``j = 0`` (smallest y).
    """
    grid = mask.grid
    lines = [f"{grid.nx} {grid.ny} {grid.h!r} {grid.origin[0]!r} {grid.origin[1]!r}"]
    lines += ["".join("1" if flag else "0" for flag in row) for row in mask.interior]
    Path(path).write_text("\n".join(lines) + "\n")


def read_mask(path, name=None):
    """
    Read a mask written by `write_mask`.
    """
    from roughlog.domain import DomainMask, GridSpec

    lines = [line.strip() for line in Path(path).read_text().splitlines() if line.strip()]
    if not lines:
        raise ValueError(f"{path} is empty.")
    try:
        nx, ny, h, ox, oy = lines[0].split()
        grid = GridSpec(int(nx), int(ny), float(h), (float(ox), float(oy)))
    except ValueError as e:
        raise ValueError(f"Invalid mask header {lines[0]!r}: {e}")
    rows = lines[1:]
    if len(rows) != grid.ny or any(len(row) != grid.nx or set(row) - {"0", "1"} for row in rows):
        raise ValueError(f"{path} does not hold {grid.ny} rows of {grid.nx} 0/1 characters.")
    interior = np.array([[c == "1" for c in row] for row in rows], dtype=bool)
    return DomainMask(grid, interior, name=name or Path(path).stem)


def write_table(table, path):
    """
    Write an `~astropy.table.Table` (or anything it accepts) as CSV with a header row.
    """
    if not isinstance(table, Table):
        table = Table(table)
    table.write(str(path), format='ascii.csv', overwrite=True)


def read_table(path):
    return Table.read(str(path), format='ascii.csv')


def to_jsonable(value):
    """
    Convert numpy scalars and arrays and non-finite floats into plain JSON values.

    Infinite floats become the strings ``"inf"`` and ``"-inf"``.
    """
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if np.isinf(value):
            return "inf" if value > 0 else "-inf"
        if np.isnan(value):
            return None
        return value
    if isinstance(value, Path):
        return str(value)
    return value


def write_json(record, path):
    Path(path).write_text(json.dumps(to_jsonable(record), indent=2, sort_keys=True) + "\n")


def read_json(path):
    with open(path) as f:
        return json.load(f)


def append_jsonl(record, path):
    """
    Append one JSON record as a line to ``path``.
    """
    with open(path, "a") as f:
        f.write(json.dumps(to_jsonable(record), sort_keys=True) + "\n")


def write_matrix_market(matrix, path, comment=""):
    """
    Write a sparse matrix in MatrixMarket coordinate format.
    """
    sio.mmwrite(str(path), matrix, comment=comment)
