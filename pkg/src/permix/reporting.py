"""Deterministic report serialization.

Floats are printed with 12 significant digits, dict keys keep insertion
order, and exact rationals are rendered as "p/q" strings, so a report is
byte-identical for identical (config, seed) regardless of thread count.
"""

from __future__ import annotations

import io
import math
from fractions import Fraction

import numpy as np

SCHEMA_VERSION = 1


def format_float(x: float) -> str:
    return format(float(x), ".12g")


def _render(obj, out: io.StringIO, indent: int) -> None:
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            out.write("{}")
            return
        out.write("{\n")
        items = list(obj.items())
        for i, (k, v) in enumerate(items):
            out.write(f'{pad}  "{k}": ')
            _render(v, out, indent + 1)
            out.write(",\n" if i < len(items) - 1 else "\n")
        out.write(pad + "}")
    elif isinstance(obj, (list, tuple)):
        if not obj:
            out.write("[]")
            return
        out.write("[\n")
        for i, v in enumerate(obj):
            out.write(pad + "  ")
            _render(v, out, indent + 1)
            out.write(",\n" if i < len(obj) - 1 else "\n")
        out.write(pad + "]")
    elif isinstance(obj, Fraction):
        out.write(f'"{obj.numerator}/{obj.denominator}"')
    elif isinstance(obj, bool) or isinstance(obj, np.bool_):
        out.write("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        out.write(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        # strict JSON has no NaN/Infinity literals
        out.write(format_float(obj) if math.isfinite(obj) else "null")
    elif obj is None:
        out.write("null")
    elif isinstance(obj, str):
        out.write('"' + obj.replace("\\", "\\\\").replace('"', '\\"') + '"')
    elif isinstance(obj, np.ndarray):
        _render(obj.tolist(), out, indent)
    else:
        raise TypeError(f"cannot serialize {type(obj)!r}")


def render_json(obj) -> str:
    out = io.StringIO()
    _render(obj, out, 0)
    out.write("\n")
    return out.getvalue()


def _cell(v) -> str:
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, bool) or isinstance(v, np.bool_):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format_float(v)
    if v is None:
        return ""
    return str(v)


def render_csv(rows, columns) -> str:
    """CSV with a fixed column order; header-only when rows is empty."""
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(_cell(row.get(c)) for c in columns))
    return "\n".join(lines) + "\n"


def envelope(command: str, config: dict, results: dict, runtime: float | None = None) -> dict:
    from permix import __version__

    report = {
        "schema_version": SCHEMA_VERSION,
        "tool": {"name": "permix", "version": f"permix-{__version__}"},
        "command": command,
        "config": config,
        "results": results,
    }
    if runtime is not None:
        report["runtime_seconds"] = runtime
    return report
