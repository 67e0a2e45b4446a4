"""Deterministic serialization helpers shared by exports and the CLI.

Every numeric field leaving the package goes through format_float, which
prints 17 significant digits so values round-trip exactly and repeated
runs are byte-identical.  Files are written via write-then-rename so a
crashed run never leaves a half-written output behind.
"""

from __future__ import annotations

import math
import os


def format_float(value: float) -> str:
    value = float(value)
    if math.isnan(value) or math.isinf(value):
        return repr(value)
    return format(value, ".17g")


def dump_json(obj, indent: int = 0) -> str:
    """Minimal JSON writer that formats floats with 17 significant digits.

    Handles dict, list, str, bool, None, int and float; key order is the
    dict insertion order so output is reproducible.
    """
    pad = " " * indent
    inner = " " * (indent + 2)
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, str):
        import json as _json

        return _json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return format_float(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        parts = []
        for key, value in obj.items():
            if not isinstance(key, str):
                raise TypeError("JSON object keys must be strings")
            parts.append(f'{inner}"{key}": {dump_json(value, indent + 2)}')
        return "{\n" + ",\n".join(parts) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if len(obj) == 0:
            return "[]"
        parts = [inner + dump_json(value, indent + 2) for value in obj]
        return "[\n" + ",\n".join(parts) + "\n" + pad + "]"
    # numpy scalars and similar
    if hasattr(obj, "item"):
        return dump_json(obj.item(), indent)
    raise TypeError(f"cannot serialize {type(obj)!r}")


def atomic_write_text(path, text: str) -> None:
    path = os.fspath(path)
    tmp = path + ".tmp"
    with open(tmp, "w") as handle:
        handle.write(text)
    os.replace(tmp, path)


def atomic_write_bytes(path, data: bytes) -> None:
    path = os.fspath(path)
    tmp = path + ".tmp"
    with open(tmp, "wb") as handle:
        handle.write(data)
    os.replace(tmp, path)


def write_csv(path, header: list[str], rows) -> None:
    """CSV with a mandatory header; floats formatted to 17 significant digits."""
    lines = [",".join(header)]
    for row in rows:
        cells = []
        for cell in row:
            if isinstance(cell, bool):
                cells.append(str(cell).lower())
            elif isinstance(cell, float):
                cells.append(format_float(cell))
            else:
                cells.append(str(cell))
        lines.append(",".join(cells))
    atomic_write_text(path, "\n".join(lines) + "\n")
