"""Verification records and canonical JSON output."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np


def relative_deviation(lhs: float, rhs: float, scale: float = 0.0) -> float:
    """|lhs - rhs| normalized by max(|lhs|, |rhs|, scale); 0 when all vanish.

    ``scale`` is the natural magnitude of the quantity (for example |W|^3
    for a cubic Weyl invariant) so that identities whose two sides happen to
    be near zero are not judged on cancellation noise.
    """
    denom = max(abs(lhs), abs(rhs), abs(scale))
    if denom == 0.0:
        return 0.0
    return abs(lhs - rhs) / denom


def safe_ratio(lhs: float, rhs: float) -> float:
    if rhs == 0.0:
        return 0.0 if lhs == 0.0 else math.inf
    return lhs / rhs


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of one inequality or identity check.

    For inequalities ``passed`` is ``lhs <= rhs * (1 + tolerance)``. For
    identities it is ``deviation <= tolerance`` with the deviation from
    :func:`relative_deviation`.
    """

    inequality_id: str
    dim: int
    lhs: float
    rhs: float
    ratio: float
    passed: bool
    tolerance: float
    kind: str = "inequality"
    deviation: float = 0.0
    details: dict = field(default_factory=dict)
    witness: dict | None = None

    @classmethod
    def inequality(cls, inequality_id, dim, lhs, rhs, tol, witness=None, details=None):
        lhs = float(lhs)
        rhs = float(rhs)
        passed = lhs <= rhs * (1.0 + tol) if rhs >= 0 else lhs <= rhs * (1.0 - tol)
        if lhs == 0.0 and rhs == 0.0:
            passed = True
        return cls(
            inequality_id=inequality_id,
            dim=int(dim),
            lhs=lhs,
            rhs=rhs,
            ratio=safe_ratio(lhs, rhs),
            passed=bool(passed),
            tolerance=tol,
            kind="inequality",
            details=details or {},
            witness=None if passed else _pack_witness(witness),
        )

    @classmethod
    def identity(cls, inequality_id, dim, lhs, rhs, tol, scale=0.0, witness=None, details=None):
        lhs = float(lhs)
        rhs = float(rhs)
        dev = relative_deviation(lhs, rhs, scale)
        passed = dev <= tol
        return cls(
            inequality_id=inequality_id,
            dim=int(dim),
            lhs=lhs,
            rhs=rhs,
            ratio=safe_ratio(lhs, rhs),
            passed=bool(passed),
            tolerance=tol,
            kind="identity",
            deviation=dev,
            details=details or {},
            witness=None if passed else _pack_witness(witness),
        )

    def to_dict(self) -> dict:
        return {
            "id": self.inequality_id,
            "dim": self.dim,
            "kind": self.kind,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "ratio": self.ratio,
            "pass": self.passed,
            "tolerance": self.tolerance,
            "deviation": self.deviation,
            "details": self.details,
            "witness": self.witness,
        }


def _pack_witness(witness):
    if witness is None:
        return None
    from .tensor_core import tensor_to_dict

    return {k: tensor_to_dict(v) for k, v in witness.items()}


# ---------------------------------------------------------------------------
# canonical JSON: sorted keys, floats at 17 significant digits


def _fmt_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        return "null"
    s = format(x, ".17g")
    if "e" not in s and "." not in s and "inf" not in s:
        s += ".0"
    return s


def _encode(obj: Any, out: list[str]) -> None:
    if obj is None or isinstance(obj, (bool, np.bool_)):
        out.append({None: "null", True: "true", False: "false"}[None if obj is None else bool(obj)])
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(_fmt_float(float(obj)))
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=True))
    elif isinstance(obj, dict):
        out.append("{")
        for i, key in enumerate(sorted(obj, key=str)):
            if i:
                out.append(",")
            out.append(json.dumps(str(key), ensure_ascii=True))
            out.append(":")
            _encode(obj[key], out)
        out.append("}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        out.append("[")
        for i, item in enumerate(list(obj)):
            if i:
                out.append(",")
            _encode(item, out)
        out.append("]")
    elif hasattr(obj, "to_dict"):
        _encode(obj.to_dict(), out)
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps_canonical(obj: Any) -> str:
    """Serialize with sorted keys, no whitespace, and 17-digit floats.

    Parsing the output and serializing again yields the same bytes.
    """
    out: list[str] = []
    _encode(obj, out)
    return "".join(out)


def loads(text: str) -> Any:
    return json.loads(text)


def rows_to_csv(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n", extrasaction="ignore")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: (_fmt_float(v) if isinstance(v, float) else v) for k, v in row.items()})
    return buf.getvalue()


def load_schema() -> dict:
    """The versioned JSON schema of CLI reports."""
    from importlib import resources

    return json.loads(resources.files("curvpinch").joinpath("schema/report.schema.json").read_text())
