"""Serialisation shared by the command-line tools.

Floats are written with 17 significant digits so that every value
round-trips exactly; the JSON writer keeps a trailing ``.0`` on integral
floats so their type survives a reload.
"""

import json
import math
import os
import time

FLOAT_FORMAT = ".17g"


def format_float(x):
    x = float(x)
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    s = format(x, FLOAT_FORMAT)
    if not any(ch in s for ch in ".eEn"):
        s += ".0"
    return s


def _scalar(value):
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format_float(value)
    if hasattr(value, "item"):  # numpy scalar
        return _scalar(value.item())
    return json.dumps(str(value), ensure_ascii=False)


def to_json(obj, indent=2, _level=0):
    """Deterministic JSON text for a tree of dicts, lists and scalars."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{_scalar(str(k))}: {to_json(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + to_json(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    return _scalar(obj)


def csv_text(header, columns):
    """CSV with ``\\n`` line endings; float columns use 17 significant digits."""
    lines = [",".join(header)]
    for row in zip(*columns):
        cells = []
        for v in row:
            if isinstance(v, float) or (hasattr(v, "dtype") and v.dtype.kind == "f"):
                cells.append(format_float(v))
            else:
                cells.append(str(int(v)))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def timestamp():
    """UTC timestamp; honours SOURCE_DATE_EPOCH for reproducible documents."""
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    t = float(epoch) if epoch else time.time()
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime(t))
