"""Deterministic report serialization.

JSON is rendered by hand so floats are always written with 17 significant
digits (round-trip exact for 64-bit values) and key order is exactly
construction order; stdlib json does not allow either guarantee.  Every
report embeds a header with the seed, tool version, and a hash of the
effective configuration.
"""

from __future__ import annotations

import hashlib
import json
import math

from .errors import FormatError, IoFailure, NonFinite

TOOL_NAME = "devalign"
TOOL_VERSION = "0.1.0"


def fmt_float(value: float) -> str:
    """17-significant-digit decimal text; integral values keep a .0 marker."""
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise FormatError(f"not a number: {value!r}")
    value = float(value)
    if math.isnan(value) or math.isinf(value):
        raise NonFinite(f"cannot serialize {value!r} in a report")
    text = "%.17g" % value
    if not any(ch in text for ch in ".eE"):
        text += ".0"
    return text


def render_json(value, indent: int = 0) -> str:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return fmt_float(value)
    if isinstance(value, str):
        return json.dumps(value, ensure_ascii=False)
    if isinstance(value, dict):
        if not value:
            return "{}"
        parts = []
        for key, item in value.items():
            if not isinstance(key, str):
                raise FormatError(f"report keys must be strings, got {key!r}")
            parts.append(
                f"{inner}{json.dumps(key, ensure_ascii=False)}: "
                f"{render_json(item, indent + 1)}"
            )
        return "{\n" + ",\n".join(parts) + "\n" + pad + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        parts = [f"{inner}{render_json(item, indent + 1)}" for item in value]
        return "[\n" + ",\n".join(parts) + "\n" + pad + "]"
    raise FormatError(f"cannot serialize {type(value).__name__} in a report")


def _canonical(value) -> str:
    """Stable single-line form used only for hashing configurations."""
    if isinstance(value, float):
        return fmt_float(value)
    if isinstance(value, dict):
        items = sorted(value.items())
        return "{" + ",".join(f"{json.dumps(k)}:{_canonical(v)}" for k, v in items) + "}"
    if isinstance(value, (list, tuple)):
        return "[" + ",".join(_canonical(v) for v in value) + "]"
    return json.dumps(value, ensure_ascii=False)


def report_header(seed: int, config: dict) -> dict:
    digest = hashlib.sha256(_canonical(config).encode("utf-8")).hexdigest()
    return {
        "tool": TOOL_NAME,
        "version": TOOL_VERSION,
        "seed": int(seed),
        "config_hash": digest,
    }


def write_text(path: str, text: str) -> None:
    try:
        with open(path, "wb") as fh:
            fh.write(text.encode("utf-8"))
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def write_json_report(path: str, report: dict) -> None:
    write_text(path, render_json(report) + "\n")


def write_csv(path: str, header_row, rows) -> None:
    """Flat CSV for plotting; floats use the same 17-digit format as JSON."""
    lines = [",".join(header_row)]
    for row in rows:
        cells = []
        for cell in row:
            if isinstance(cell, bool):
                cells.append("true" if cell else "false")
            elif isinstance(cell, float):
                cells.append(fmt_float(cell))
            else:
                cells.append(str(cell))
        lines.append(",".join(cells))
    write_text(path, "\n".join(lines) + "\n")
