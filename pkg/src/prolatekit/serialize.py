"""Report documents and their serialization.

Reports are plain dicts with a fixed key order: schema version, command,
resolved config, then records.  JSON is the canonical format (full
nested arrays); CSV is a flat projection, one row per record item, for
plotting.  Serialization is deterministic: Python's shortest round-trip
float repr, fixed key order, no timestamps.
"""
from __future__ import annotations

import csv
import io
import json
import sys

import numpy as np

SCHEMA_VERSION = "prolatekit-report/1"


def jsonable(value):
    """Recursively convert numpy scalars/arrays for JSON output."""
    if isinstance(value, dict):
        return {k: jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    return value


def build_document(command: str, config: dict, records: list) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "command": command,
        "config": jsonable(config),
        "records": jsonable(records),
    }


def _format_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if value is None:
        return ""
    return str(value)


def render_json(doc: dict) -> str:
    return json.dumps(doc, indent=2) + "\n"


def render_csv(rows: list[dict]) -> str:
    """Comma-separated projection with a header row; column order follows
    the first row (rows missing a column emit empty cells).  Cells
    containing the separator are quoted per standard CSV."""
    if not rows:
        return ""
    columns: list[str] = []
    for row in rows:
        for key in row:
            if key not in columns:
                columns.append(key)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_format_cell(row.get(col)) for col in columns])
    return buf.getvalue()


def write_text(text: str, path: str | None):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
