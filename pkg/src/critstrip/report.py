"""Report records and their CSV / JSON serialisation."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from . import __version__


@dataclass
class ReportRecord:
    command: str
    inputs: Dict[str, Any] = field(default_factory=dict)
    results: Dict[str, Any] = field(default_factory=dict)
    errors: Dict[str, Any] = field(default_factory=dict)
    config_hash: str = ""
    version: str = __version__
    wall_time: Optional[float] = None

    def flat(self) -> Dict[str, Any]:
        row = {"command": self.command}
        row.update(self.inputs)
        row.update(self.results)
        row.update(self.errors)
        if self.wall_time is not None:
            row["wall_time"] = self.wall_time
        row["version"] = self.version
        row["config_hash"] = self.config_hash
        return row


def config_hash(config: Dict[str, Any]) -> str:
    """First 16 hex digits of the SHA-256 of the canonical JSON of ``config``."""
    text = json.dumps(config, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


def format_value(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return format(value, ".17g")
    return str(value)


def _columns(rows: Sequence[Dict[str, Any]]) -> List[str]:
    cols: List[str] = []
    for row in rows:
        for key in row:
            if key not in cols:
                cols.append(key)
    return cols


def render_csv(records: Sequence[ReportRecord]) -> str:
    rows = [r.flat() for r in records]
    cols = _columns(rows)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(cols)
    for row in rows:
        writer.writerow([format_value(row.get(c)) for c in cols])
    return buf.getvalue()


def render_json(records: Sequence[ReportRecord]) -> str:
    first = records[0]
    meta = {"command": first.command, "version": first.version, "config_hash": first.config_hash,
            "count": len(records)}
    body = {"meta": meta, "records": [r.flat() for r in records]}
    return json.dumps(body, indent=1, sort_keys=False) + "\n"


def write_report(records: Sequence[ReportRecord], fmt: str, path) -> Path:
    """Write all records to ``path`` as UTF-8 with LF line endings."""
    if not records:
        raise ValueError("no records to write")
    if fmt == "csv":
        text = render_csv(records)
    elif fmt == "json":
        text = render_json(records)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return path


def read_report(path, fmt: str) -> List[Dict[str, Any]]:
    """Parse a report back into flat dicts (CSV values stay strings)."""
    with open(path, encoding="utf-8", newline="") as fh:
        if fmt == "json":
            return json.load(fh)["records"]
        return list(csv.DictReader(fh))
