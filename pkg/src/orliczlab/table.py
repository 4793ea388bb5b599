"""Rectangular experiment tables with lossless CSV/JSON serialization."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Sequence

from .errors import DomainError

SIG_DIGITS = 17


def format_number(value) -> str:
    """17 significant digits, '.' decimal; integers stay integral."""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return f"{value:.{SIG_DIGITS}g}"
    return str(value)


def _parse_cell(text: str):
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    if text in ("true", "false"):
        return text == "true"
    return text


def _jsonable(value):
    if isinstance(value, float) and not math.isfinite(value):
        return format_number(value)
    if hasattr(value, "item"):
        return _jsonable(value.item())
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if value is not None and not isinstance(value, (str, int, float, bool)):
        return str(value)
    return value


@dataclass
class ExperimentTable:
    columns: List[str]
    rows: List[List[Any]] = field(default_factory=list)
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        for row in self.rows:
            self._check(row)

    def _check(self, row):
        if len(row) != len(self.columns):
            raise DomainError(f"row has {len(row)} cells, expected {len(self.columns)}")

    def append(self, row: Sequence[Any]):
        row = [v.item() if hasattr(v, "item") else v for v in row]
        self._check(row)
        self.rows.append(row)

    def column(self, name: str) -> List[Any]:
        i = self.columns.index(name)
        return [r[i] for r in self.rows]

    def __len__(self):
        return len(self.rows)

    # serialization -------------------------------------------------------

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow([format_number(v) for v in row])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, metadata=None) -> "ExperimentTable":
        reader = csv.reader(io.StringIO(text))
        header = next(reader)
        rows = [[_parse_cell(c) for c in r] for r in reader if r]
        return cls(header, rows, dict(metadata or {}))

    def to_json(self) -> str:
        # repr-style floats in JSON are shortest round-trip; keep 17 digits
        # in CSV where text is the only carrier.
        doc = {"metadata": _jsonable(self.metadata), "columns": self.columns,
               "rows": [[_jsonable(v) for v in r] for r in self.rows]}
        return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ExperimentTable":
        doc = json.loads(text)
        rows = [[_parse_cell(v) if isinstance(v, str) else v for v in r] for r in doc["rows"]]
        return cls(doc["columns"], rows, doc.get("metadata", {}))

    def write(self, path, fmt: str = "csv"):
        """Write atomically: a temporary file in the target directory, then rename."""
        text = self.to_csv() if fmt == "csv" else self.to_json()
        write_atomic(path, text)


def write_atomic(path, text: str):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
