"""Report assembly and serialisation.

Floats are written with 17 significant digits so golden files round-trip
exactly; non-finite floats become ``null``.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


def _fmt_float(v: float) -> str:
    if not math.isfinite(v):
        return "null"
    return format(v, ".17g")


def _plain(obj):
    """Convert numpy scalars/arrays and complex numbers to JSON-friendly values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    return obj


def dumps(obj, indent: int = 2) -> str:
    return _dump(_plain(obj), 0, indent) + "\n"


def _dump(obj, level: int, indent: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _fmt_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list)) for v in obj):
            return "[" + ", ".join(_dump(v, level + 1, indent) for v in obj) + "]"
        items = [pad + _dump(v, level + 1, indent) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {_dump(v, level + 1, indent)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _csv_cell(v) -> str:
    v = _plain(v)
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return _fmt_float(v) if math.isfinite(v) else ""
    if isinstance(v, (list, dict)):
        return json.dumps(v)
    return str(v)


def table_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    header = list(rows[0].keys()) if rows else []
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_csv_cell(row.get(k)) for k in header])
    return buf.getvalue()


@dataclass
class Report:
    experiment: str
    config_echo: dict
    invariants: list[dict] = field(default_factory=list)
    tables: dict[str, list[dict]] = field(default_factory=dict)

    def check(self, name: str, passed: bool, residual: float = 0.0):
        self.invariants.append({"name": name, "pass": bool(passed), "residual": float(residual)})

    @property
    def passed(self) -> bool:
        return all(inv["pass"] for inv in self.invariants)

    def to_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "config_echo": self.config_echo,
            "invariants": self.invariants,
            "tables": self.tables,
        }

    def to_json(self) -> str:
        return dumps(self.to_dict())

    def write(self, out_dir: str | Path, fmt: str = "both") -> list[Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        written = []
        if fmt in ("json", "both"):
            p = out / f"{self.experiment}.json"
            p.write_text(self.to_json())
            written.append(p)
        if fmt in ("csv", "both"):
            for name, rows in self.tables.items():
                p = out / f"{self.experiment}_{name}.csv"
                p.write_text(table_csv(rows))
                written.append(p)
        return written
