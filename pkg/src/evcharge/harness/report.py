"""Deterministic CSV/JSON emission for result rows.

Floats are written with repr so files round-trip exactly and two runs of
the same experiment produce byte-identical reports.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, is_dataclass
from fractions import Fraction

from ..core import ValidationError
from .ingest import ParseError

FORMATS = ("csv", "json")


def _plain(value):
    if isinstance(value, Fraction):
        return str(value)
    return value


def rows_to_dicts(rows) -> list[dict]:
    out = []
    for row in rows:
        d = asdict(row) if is_dataclass(row) else dict(row)
        out.append({k: _plain(v) for k, v in d.items()})
    return out


def _csv_cell(value) -> str:
    if value is None:
        return ""
    return repr(value) if isinstance(value, float) else str(value)


def emit_report(rows, fmt: str, path: str) -> str:
    """Write rows (dataclasses or dicts) to path as csv or json."""
    if fmt not in FORMATS:
        raise ValidationError(f"format must be one of {FORMATS}, got {fmt!r}")
    dicts = rows_to_dicts(rows)
    if fmt == "json":
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(dicts, fh, indent=1)
            fh.write("\n")
        return path
    with open(path, "w", encoding="utf-8", newline="") as fh:
        if not dicts:
            fh.write("")
            return path
        writer = csv.writer(fh, lineterminator="\n")
        header = list(dicts[0].keys())
        writer.writerow(header)
        for d in dicts:
            writer.writerow([_csv_cell(d[k]) for k in header])
    return path


def _csv_value(cell: str):
    if cell == "":
        return None
    try:
        return int(cell)
    except ValueError:
        pass
    try:
        return float(cell)
    except ValueError:
        return cell


def load_rows(path: str) -> list[dict]:
    """Read back a report emitted by emit_report (either format)."""
    if path.endswith(".json"):
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        if not isinstance(data, list):
            raise ParseError(f"{path}: expected a JSON array of rows")
        return data
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        return [{k: _csv_value(v) for k, v in row.items()} for row in reader]
