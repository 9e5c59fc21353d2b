"""
Saturable Battery Simulator Output Formatting Utilities

Writes result tables as CSV or JSON with round-trip float formatting, attaches the
resolved-config sidecar to every file, and renders command reports as readable text.
"""

import csv
import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

import numpy as np

from utils.mappings import get_column_display, get_exit_code_display

logger = logging.getLogger(__name__)

SIDECAR_SUFFIX = ".meta.json"


def format_float(x: Any) -> str:
    """17 significant digits, so that a CSV value parses back to the same double."""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return "%.17g" % float(x)


def _json_ready(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _json_ready(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_ready(v) for v in value]
    if isinstance(value, np.ndarray):
        return _json_ready(value.tolist())
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (np.floating, float)):
        v = float(value)
        return v if math.isfinite(v) else str(v)
    if isinstance(value, Path):
        return str(value)
    return value


def dump_json(data: Any) -> str:
    return json.dumps(_json_ready(data), indent=2, sort_keys=False, ensure_ascii=False) + "\n"


def sidecar_path(path: Path) -> Path:
    return path.with_name(path.name + SIDECAR_SUFFIX)


def write_sidecar(path: Path, config: Dict[str, Any], columns: Optional[Sequence[str]] = None,
                  extra: Optional[Dict[str, Any]] = None) -> Path:
    """Audit trail next to a result file: resolved config and column meanings."""
    meta: Dict[str, Any] = {"file": path.name, "config": config}
    if columns:
        meta["columns"] = {c: get_column_display(c) for c in columns}
    if extra:
        meta.update(extra)
    target = sidecar_path(path)
    target.write_text(dump_json(meta), encoding="utf-8")
    return target


def write_table(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]],
                config: Dict[str, Any], fmt: str = "csv") -> List[Path]:
    """Write one table as CSV (header row first) or as a JSON list of records.

    The suffix of `path` is replaced by the format's own. Returns the table and its sidecar.
    """
    path = Path(path).with_suffix(f".{fmt}")
    path.parent.mkdir(parents=True, exist_ok=True)
    rows = [list(r) for r in rows]
    if fmt == "csv":
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([format_float(v) for v in row])
    elif fmt == "json":
        records = [dict(zip(header, row)) for row in rows]
        path.write_text(dump_json({"columns": list(header), "rows": records}), encoding="utf-8")
    else:
        raise ValueError(f"Unknown output format: {fmt}")
    logger.info(f"📄 Wrote {len(rows)} row(s) to {path}")
    return [path, write_sidecar(path, config, header)]


def write_document(path: Path, data: Dict[str, Any], config: Dict[str, Any]) -> List[Path]:
    """Write a JSON document with its sidecar."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dump_json(data), encoding="utf-8")
    logger.info(f"📄 Wrote {path}")
    return [path, write_sidecar(path, config)]


def format_command_report(report) -> str:
    """Readable summary of a finished command, used by the MCP tools."""
    status = "✅" if report.exit_code == 0 else ("⚠️" if report.exit_code == 3 else "❌")
    lines = [
        f"{'='*50}",
        f"{report.command.upper()}: {status} {get_exit_code_display(report.exit_code)}",
        f"{'='*50}",
    ]
    if report.summary:
        lines.append("\n📊 SUMMARY:")
        for key, value in report.summary.items():
            shown = format_float(value) if isinstance(value, (float, np.floating)) else value
            lines.append(f"  • {get_column_display(key)}: {shown}")
    if report.rows:
        lines.append("\n📋 RESULTS:")
        for row in report.rows:
            cells = ", ".join(
                f"{k}={format_float(v) if isinstance(v, (float, np.floating)) else v}" for k, v in row.items()
            )
            lines.append(f"  • {cells}")
    if report.failures:
        lines.append(f"\n❌ FAILED POINTS ({len(report.failures)}):")
        for failure in report.failures:
            lines.append(f"  • {failure['point']}: {failure['error_type']}: {failure['error']}")
    if report.files:
        lines.append(f"\n📁 FILES ({len(report.files)}):")
        for f in report.files:
            lines.append(f"  • {f}")
    return "\n".join(lines)
