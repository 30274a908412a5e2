"""
Export Module
Writes sweep results as CSV or JSON and reads them back.
"""

import csv
import json
import math
from pathlib import Path

from .runner import SweepResult

FORMATS = ("csv", "json")


def _format_cell(value) -> str:
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return f"{value:.12g}"
    return str(value)


def _parse_cell(text: str):
    try:
        return float(text)
    except ValueError:
        return text


def _json_safe(value):
    if isinstance(value, float) and math.isnan(value):
        return None
    return value


def export(result: SweepResult, path: str | Path, fmt: str = "csv") -> Path:
    """
    Write a sweep result.

    Args:
        result: Sweep result
        path: Destination file (parent directories are created)
        fmt: "csv" (header plus one record per row, 12 significant digits)
            or "json" (rows plus full metadata)

    Returns:
        Path written
    """
    if fmt not in FORMATS:
        raise ValueError(f"Unknown export format {fmt!r} (choose from {', '.join(FORMATS)})")
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        if fmt == "csv":
            with open(path, "w", newline="", encoding="utf-8") as f:
                writer = csv.writer(f)
                writer.writerow(result.columns)
                for row in result.rows:
                    writer.writerow([_format_cell(row[c]) for c in result.columns])
        else:
            payload = {
                "columns": result.columns,
                "rows": [{c: _json_safe(row[c]) for c in result.columns} for row in result.rows],
                "metadata": result.metadata,
            }
            path.write_text(json.dumps(payload, indent=2), encoding="utf-8")
    except OSError as e:
        raise OSError(e.errno, f"Cannot write {path}: {e.strerror}") from e
    return path


def load_result(path: str | Path) -> SweepResult:
    """Read a CSV or JSON export back into a SweepResult."""
    path = Path(path)
    if path.suffix.lower() == ".json":
        payload = json.loads(path.read_text(encoding="utf-8"))
        rows = [
            {c: (math.nan if row[c] is None else row[c]) for c in payload["columns"]}
            for row in payload["rows"]
        ]
        return SweepResult(columns=payload["columns"], rows=rows, metadata=payload.get("metadata", {}))

    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        columns = next(reader)
        rows = [{c: _parse_cell(cell) for c, cell in zip(columns, record)} for record in reader]
    return SweepResult(columns=columns, rows=rows, metadata={"source": str(path)})
