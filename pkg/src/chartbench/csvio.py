"""Versioned CSV and JSON-manifest I/O.

Every CSV starts with a schema line ``# schema=chartbench.<kind>.v1``
followed by a header row; floats are written with 17 significant digits so
round-trips are bit-exact. Failed metric cells are written empty and read
back as NaN.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

__all__ = [
    "SchemaError",
    "fmt",
    "parse_float",
    "schema_tag",
    "write_csv",
    "read_csv",
    "write_manifest",
    "read_manifest",
]

SCHEMA_PREFIX = "# schema="
SCHEMA_VERSION = "v1"


class SchemaError(ValueError):
    """Input file does not carry the expected schema tag or columns."""


def schema_tag(kind: str) -> str:
    return f"chartbench.{kind}.{SCHEMA_VERSION}"


def fmt(value: Any) -> str:
    """Render one CSV cell: 17 significant digits for floats, '' for NaN."""
    if isinstance(value, (float, np.floating)):
        if np.isnan(value):
            return ""
        return format(float(value), ".17g")
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def write_csv(path: str | Path, kind: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fh:
        fh.write(f"{SCHEMA_PREFIX}{schema_tag(kind)}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        if (
            isinstance(rows, np.ndarray)
            and rows.ndim == 2
            and rows.dtype.kind == "f"
            and np.isfinite(rows).all()
        ):
            # %.17g matches fmt() exactly; C-level formatting is several
            # times faster for the big basis/embedding matrices
            np.savetxt(fh, rows, fmt="%.17g", delimiter=",", newline="\n")
            return
        for row in rows:
            writer.writerow([fmt(v) for v in row])


def read_csv(path: str | Path, kind: str, required: Sequence[str] | None = None):
    """Return (header, rows-of-strings) after validating the schema line."""
    path = Path(path)
    with path.open("r", encoding="utf-8", newline="") as fh:
        first = fh.readline().rstrip("\n")
        expected = f"{SCHEMA_PREFIX}{schema_tag(kind)}"
        if first != expected:
            raise SchemaError(f"{path}: expected '{expected}', found '{first or '<empty>'}'")
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: missing header row") from None
        if required:
            missing = [c for c in required if c not in header]
            if missing:
                raise SchemaError(f"{path}: missing columns {missing}")
        rows = [row for row in reader if row]
    return header, rows


def parse_float(cell: str) -> float:
    return float("nan") if cell == "" else float(cell)


def write_manifest(path: str | Path, payload: dict[str, Any]) -> None:
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def read_manifest(path: str | Path) -> dict[str, Any]:
    return json.loads(Path(path).read_text(encoding="utf-8"))
