"""Deterministic JSON and CSV emission.

Identical inputs must produce byte-identical artifacts, so floats are
formatted at a fixed 12 significant digits, mapping insertion order is
preserved, and non-finite values become null.  The stdlib json module
offers no hook for float formatting, hence the small emitter here.
"""

from __future__ import annotations

import math
from typing import Any, Iterable

import numpy as np

FLOAT_FORMAT = "%.12g"


def format_float(value: float) -> str:
    if not math.isfinite(value):
        return "null"
    if value == 0.0:  # normalize -0.0
        value = 0.0
    return FLOAT_FORMAT % value


def _emit(obj: Any, out: list[str], indent: int, level: int) -> None:
    pad = " " * (indent * (level + 1))
    closing = " " * (indent * level)
    if obj is None:
        out.append("null")
    elif isinstance(obj, bool):
        out.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(format_float(float(obj)))
    elif isinstance(obj, str):
        out.append(_escape(obj))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for i, (key, val) in enumerate(obj.items()):
            if not isinstance(key, str):
                raise TypeError(f"JSON object keys must be strings, got {type(key).__name__}")
            out.append(f"{pad}{_escape(key)}: ")
            _emit(val, out, indent, level + 1)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(closing + "}")
    elif isinstance(obj, (list, tuple)) or isinstance(obj, np.ndarray):
        items = list(obj.tolist()) if isinstance(obj, np.ndarray) else list(obj)
        if not items:
            out.append("[]")
            return
        # short numeric rows stay on one line for readability
        if len(items) <= 6 and all(
            isinstance(x, (int, float, np.integer, np.floating)) and not isinstance(x, bool)
            for x in items
        ):
            parts = [
                format_float(float(x))
                if isinstance(x, (float, np.floating))
                else str(int(x))
                for x in items
            ]
            out.append("[" + ", ".join(parts) + "]")
            return
        out.append("[\n")
        for i, val in enumerate(items):
            out.append(pad)
            _emit(val, out, indent, level + 1)
            out.append(",\n" if i < len(items) - 1 else "\n")
        out.append(closing + "]")
    else:
        raise TypeError(f"cannot emit {type(obj).__name__} as JSON")


_ESCAPES = {
    "\\": "\\\\",
    '"': '\\"',
    "\n": "\\n",
    "\r": "\\r",
    "\t": "\\t",
    "\b": "\\b",
    "\f": "\\f",
}


def _escape(text: str) -> str:
    parts = ['"']
    for ch in text:
        if ch in _ESCAPES:
            parts.append(_ESCAPES[ch])
        elif ord(ch) < 0x20:
            parts.append(f"\\u{ord(ch):04x}")
        else:
            parts.append(ch)
    parts.append('"')
    return "".join(parts)


def dumps(obj: Any, indent: int = 2) -> str:
    """Canonical JSON text, trailing newline included."""
    out: list[str] = []
    _emit(obj, out, indent, 0)
    out.append("\n")
    return "".join(out)


def csv_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        text = format_float(float(value))
        return "nan" if text == "null" else text
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    text = str(value)
    if any(c in text for c in ",\"\n"):
        text = '"' + text.replace('"', '""') + '"'
    return text


def csv_text(
    header: Iterable[str],
    rows: Iterable[Iterable[Any]],
    comments: Iterable[str] = (),
) -> str:
    """CSV with '.' decimals, LF endings, and '#'-prefixed comment lines."""
    lines = [f"# {c}" for c in comments]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(csv_cell(v) for v in row))
    return "\n".join(lines) + "\n"
