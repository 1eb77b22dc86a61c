"""Check reports and their deterministic JSON encoding."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any


@dataclass
class CheckReport:
    check: str
    lhs: Any
    rhs: Any
    abs_err: float
    rel_err: float
    passed: bool
    params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"check": self.check, "lhs": self.lhs, "rhs": self.rhs,
                "abs_err": self.abs_err, "rel_err": self.rel_err,
                "pass": bool(self.passed), "params": self.params}

    def to_json(self) -> str:
        return dumps(self.to_dict())

    @classmethod
    def from_dict(cls, obj: dict) -> "CheckReport":
        return cls(obj["check"], _decode(obj["lhs"]), _decode(obj["rhs"]),
                   obj["abs_err"], obj["rel_err"], obj["pass"], obj.get("params", {}))

    @classmethod
    def from_json(cls, text: str) -> "CheckReport":
        return cls.from_dict(json.loads(text))


def compare(check: str, lhs, rhs, threshold: float, *, abs_floor: float | None = None,
            params: dict | None = None) -> CheckReport:
    """Report for ``lhs == rhs``; passes when the relative error is within
    ``threshold`` or, if ``abs_floor`` is given, the absolute error is."""
    abs_err = float(abs(lhs - rhs))
    scale = float(abs(rhs))
    rel_err = abs_err / scale if scale > 0 else (0.0 if abs_err == 0 else math.inf)
    ok = rel_err <= threshold or (abs_floor is not None and abs_err <= abs_floor)
    return CheckReport(check, lhs, rhs, abs_err, rel_err, ok, dict(params or {}))


def _decode(v):
    if isinstance(v, dict) and set(v) == {"re", "im"}:
        return complex(v["re"], v["im"])
    return v


def _encode(obj):
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, Fraction):
        return json.dumps(str(obj))
    if isinstance(obj, float):
        if math.isnan(obj) or math.isinf(obj):
            return json.dumps(str(obj))
        text = format(obj, ".17g")
        if not any(c in text for c in ".en"):
            text += ".0"
        return text
    if isinstance(obj, complex):
        return "{" + f'"re": {_encode(obj.real)}, "im": {_encode(obj.imag)}' + "}"
    if hasattr(obj, "item") and not hasattr(obj, "__len__"):
        return _encode(obj.item())
    if isinstance(obj, dict):
        items = (f"{json.dumps(str(k))}: {_encode(v)}" for k, v in obj.items())
        return "{" + ", ".join(items) + "}"
    if isinstance(obj, (list, tuple)) or hasattr(obj, "tolist"):
        seq = obj.tolist() if hasattr(obj, "tolist") else obj
        return "[" + ", ".join(_encode(v) for v in seq) + "]"
    raise TypeError(f"cannot encode {type(obj).__name__}")


def dumps(obj) -> str:
    """JSON text with every float written to 17 significant digits."""
    return _encode(obj)
