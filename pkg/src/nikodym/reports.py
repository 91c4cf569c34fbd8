"""Machine-readable run reports.

A report records the command, tool version, field and geometry parameters,
the construction or verification trace, and sizes; everything except the
wall time is a pure function of the inputs, so two runs with the same seed
produce reports that differ only in that field.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from fractions import Fraction
from pathlib import Path

import numpy as np

# arrays longer than this are summarized by length and digest
_ARRAY_INLINE_LIMIT = 4096


def to_jsonable(obj):
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {
            f.name: to_jsonable(getattr(obj, f.name))
            for f in dataclasses.fields(obj)
        }
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        if obj.size <= _ARRAY_INLINE_LIMIT:
            return [to_jsonable(v) for v in obj.tolist()]
        digest = hashlib.sha256(np.ascontiguousarray(obj).tobytes()).hexdigest()
        return {"length": int(obj.size), "sha256": digest}
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, Fraction):
        return {"numerator": obj.numerator, "denominator": obj.denominator}
    return obj


def dump_json(obj) -> str:
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=True) + "\n"


def write_json(path, obj) -> None:
    Path(path).write_text(dump_json(obj))


@dataclasses.dataclass
class RunReport:
    command: str
    tool_version: str
    p: int
    m: int
    d: int
    q: int
    params: dict
    trace: object | None
    verification: dict | None
    sizes: dict
    wall_time_s: float
