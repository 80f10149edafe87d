"""File helpers: atomic writes, fixed-precision JSON, CSV signals."""
import math
import os
import tempfile
from pathlib import Path

import numpy as np


class DataFormatError(ValueError):
    """An input file is missing fields or cannot be parsed."""


def fmt_float(v):
    """17 significant digits; round-trips every double exactly."""
    v = float(v)
    if math.isnan(v) or math.isinf(v):
        raise ValueError(f"non-finite value {v!r} cannot be serialized")
    if v == 0.0:
        return "0"
    return format(v, ".17g")


def dumps(obj, indent=2, _level=0):
    """JSON encoder writing floats with :func:`fmt_float`.

    The stdlib encoder always uses the shortest repr, so floats are
    emitted by hand. Keys keep insertion order.
    """
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if obj is None or isinstance(obj, bool):
        return {None: "null", True: "true", False: "false"}[obj]
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt_float(obj)
    if isinstance(obj, str):
        import json

        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        if all(isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, bool)
               for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def write_atomic(path, text):
    """Write ``text`` to ``path`` via a temp file and rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path, obj):
    write_atomic(path, dumps(obj) + "\n")


def write_csv(path, header, rows):
    lines = [",".join(header)] if header else []
    for row in rows:
        lines.append(",".join(fmt_float(v) if isinstance(v, (float, np.floating)) else str(v)
                              for v in row))
    write_atomic(path, "\n".join(lines) + "\n")


def write_signal_csv(path, x):
    """One sample per line, no header."""
    write_atomic(path, "".join(fmt_float(v) + "\n" for v in np.asarray(x, dtype=np.float64)))


def read_signal_csv(path):
    values = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                values.append(float(line))
            except ValueError:
                raise DataFormatError(f"{path}:{lineno}: not a number: {line!r}") from None
    if not values:
        raise DataFormatError(f"{path}: no samples")
    x = np.asarray(values, dtype=np.float64)
    if not np.all(np.isfinite(x)):
        raise DataFormatError(f"{path}: non-finite sample")
    return x
