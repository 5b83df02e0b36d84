"""Deterministic CSV and JSON-lines tables.

Every row carries ``value``, ``std_error``, ``method``, ``seed`` and the tool
``version``. Floats use the shortest round-trip representation, so identical
inputs give byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from typing import Any, Iterable, Sequence, TextIO

from . import __version__

REQUIRED = ("value", "std_error", "method", "seed", "version")
FORMATS = ("csv", "json")


def _cell(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return repr(v)
    return str(v)


def _json_value(v: Any) -> Any:
    if isinstance(v, float) and not math.isfinite(v):
        return _cell(v)
    return v


def normalize_rows(rows: Iterable[dict[str, Any]]) -> list[dict[str, Any]]:
    """Add the provenance columns every output row must carry."""
    out = []
    for row in rows:
        r = dict(row)
        r.setdefault("std_error", 0.0)
        r.setdefault("seed", None)
        r["version"] = __version__
        missing = [k for k in ("value", "method") if k not in r]
        if missing:
            raise KeyError(f"output row lacks {missing}")
        out.append(r)
    return out


def columns_for(rows: Sequence[dict[str, Any]]) -> list[str]:
    """Keys in first-seen order with the provenance columns last."""
    seen: dict[str, None] = {}
    for r in rows:
        for k in r:
            if k not in REQUIRED:
                seen.setdefault(k, None)
    return [*seen, *REQUIRED]


def format_csv(rows: Sequence[dict[str, Any]]) -> str:
    rows = normalize_rows(rows)
    cols = columns_for(rows)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(cols)
    for r in rows:
        writer.writerow([_cell(r.get(c)) for c in cols])
    return buf.getvalue()


def format_jsonl(rows: Sequence[dict[str, Any]]) -> str:
    rows = normalize_rows(rows)
    cols = columns_for(rows)
    lines = [json.dumps({c: _json_value(r.get(c)) for c in cols}, separators=(",", ":"))
             for r in rows]
    return "".join(line + "\n" for line in lines)


def render(rows: Sequence[dict[str, Any]], fmt: str = "csv") -> str:
    if fmt not in FORMATS:
        raise ValueError(f"format must be one of {FORMATS}")
    return format_csv(rows) if fmt == "csv" else format_jsonl(rows)


def write(rows: Sequence[dict[str, Any]], fmt: str = "csv", path: str | None = None,
          stream: TextIO | None = None) -> None:
    text = render(rows, fmt)
    if path and path != "-":
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        (stream or sys.stdout).write(text)
