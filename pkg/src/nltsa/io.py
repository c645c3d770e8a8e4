"""Series files, CSV tables and JSON reports.

Series file: UTF-8 text, one decimal value per line, ``#`` starts a
comment line.  Values are written with 17 significant digits so that they
read back bit-identically.

JSON report: an object with the keys ``command``, ``config``, ``results``
and ``warnings``.  Non-finite numbers are written as ``null``.
"""
from __future__ import annotations

import json
import math
from enum import Enum
from pathlib import Path

import numpy as np

from .series import TimeSeries

__all__ = ["read_series", "write_series", "write_csv", "write_report", "format_float", "jsonable"]


class SeriesFormatError(ValueError):
    pass


def format_float(v: float) -> str:
    return "%.17g" % v


def read_series(path) -> TimeSeries:
    values = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            try:
                values.append(float(line))
            except ValueError:
                raise SeriesFormatError(f"{path}:{lineno}: not a number: {line!r}") from None
    if not values:
        raise SeriesFormatError(f"{path}: no values")
    try:
        return TimeSeries(values)
    except ValueError as exc:
        raise SeriesFormatError(f"{path}: {exc}") from None


def write_series(path, series, header: str | None = None) -> None:
    values = np.asarray(series, dtype=np.float64)
    lines = []
    if header:
        lines.extend("# " + h for h in header.splitlines())
    lines.extend(format_float(v) for v in values.tolist())
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _cell(v) -> str:
    if isinstance(v, (float, np.floating)):
        return format_float(float(v)) if math.isfinite(v) else "nan"
    if isinstance(v, (np.integer,)):
        return str(int(v))
    return str(v)


def write_csv(path, header, rows) -> None:
    out = [",".join(header)]
    out.extend(",".join(_cell(v) for v in row) for row in rows)
    Path(path).write_text("\n".join(out) + "\n", encoding="utf-8")


def jsonable(obj):
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, dict):
        return {(k.value if isinstance(k, Enum) else str(k)): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, Path):
        return str(obj)
    return obj


def write_report(path, command: str, config: dict, results: dict, warnings=()) -> dict:
    report = {
        "command": command,
        "config": jsonable(config),
        "results": jsonable(results),
        "warnings": list(warnings),
    }
    Path(path).write_text(json.dumps(report, indent=2, sort_keys=True, allow_nan=False) + "\n", encoding="utf-8")
    return report
