"""Result tables and their CSV / JSON serialisation.

CSV: header row, ``.`` decimal point, 12 significant digits, LF endings.
JSON: dataclass field names as keys; non-finite floats become ``null``
(reports carrying an infinite SDNR also set ``zero_distortion``).
"""

from __future__ import annotations

import dataclasses
import enum
import json
import math
from dataclasses import dataclass, field

import numpy as np


@dataclass
class Table:
    columns: tuple
    rows: list = field(default_factory=list)

    def column(self, name):
        i = self.columns.index(name)
        return [r[i] for r in self.rows]


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        out = f"{v:.12g}"
        return "0" if out == "-0" else out
    if isinstance(v, enum.Enum):
        return str(v.value)
    return str(v)


def to_plain(obj):
    """Recursively convert results to JSON-compatible Python values."""
    if isinstance(obj, Table):
        return {"columns": list(obj.columns), "rows": [dict(zip(obj.columns, map(to_plain, r))) for r in obj.rows]}
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_plain(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if hasattr(obj, "_asdict"):
        return {k: to_plain(v) for k, v in obj._asdict().items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def _flatten(prefix, value, out):
    if isinstance(value, dict):
        for k, v in value.items():
            _flatten(f"{prefix}.{k}" if prefix else k, v, out)
    elif isinstance(value, list):
        for i, v in enumerate(value):
            _flatten(f"{prefix}.{i}", v, out)
    else:
        out[prefix] = value


def to_csv(obj) -> str:
    if isinstance(obj, Table):
        columns, rows = obj.columns, obj.rows
    elif hasattr(obj, "to_table"):
        return to_csv(obj.to_table())
    else:
        flat = {}
        _flatten("", _csv_plain(obj), flat)
        columns, rows = tuple(flat), [tuple(flat.values())]
    lines = [",".join(columns)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def _csv_plain(obj):
    # Like to_plain but keeps inf/nan so the CSV shows them.
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: _csv_plain(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): _csv_plain(v) for k, v in obj.items()}
    if hasattr(obj, "_asdict"):
        return {k: _csv_plain(v) for k, v in obj._asdict().items()}
    if isinstance(obj, enum.Enum):
        return obj.value
    return obj


def to_json(obj) -> str:
    return json.dumps(to_plain(obj), indent=2, allow_nan=False) + "\n"


def serialize(obj, fmt: str) -> bytes:
    if fmt == "csv":
        return to_csv(obj).encode("utf-8")
    if fmt == "json":
        return to_json(obj).encode("utf-8")
    raise ValueError(f"unknown format {fmt!r}")
