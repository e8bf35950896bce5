"""Tabular results and their CSV form.

CSV files start with ``#`` comment lines holding the parameters as JSON,
followed by one header row; numbers carry 17 significant digits so a
re-read reproduces every double exactly.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np


@dataclass
class Table:
    columns: tuple
    rows: list
    meta: dict = field(default_factory=dict)

    def column(self, name) -> np.ndarray:
        i = self.columns.index(name)
        return np.array([r[i] for r in self.rows])


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.17g" % float(v)
    if isinstance(v, complex):
        return "%.17g%+.17gj" % (v.real, v.imag)
    return "" if v is None else str(v)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def write_csv(table: Table, stream) -> None:
    for key, value in table.meta.items():
        text = json.dumps(_jsonable(value), sort_keys=True)
        stream.write(f"# {key}: {text}\n")
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(table.columns)
    for r in table.rows:
        w.writerow([_fmt(v) for v in r])


def to_csv(table: Table) -> str:
    buf = io.StringIO()
    write_csv(table, buf)
    return buf.getvalue()


def _parse(cell: str):
    if cell in ("true", "false"):
        return cell == "true"
    for kind in (int, float):
        try:
            return kind(cell)
        except ValueError:
            pass
    return cell


def read_csv(text: str) -> Table:
    """Inverse of :func:`to_csv` for numeric and text cells."""
    meta, body = {}, []
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, val = line[1:].strip().partition(": ")
            meta[key] = json.loads(val)
        elif line:
            body.append(line)
    reader = csv.reader(body)
    cols = tuple(next(reader))
    rows = []
    for r in reader:
        out = []
        for cell in r:
            out.append(_parse(cell))
        rows.append(tuple(out))
    return Table(cols, rows, meta)
