"""JSON conversion for tensors, elements and reports.

Output is deterministic: keys are sorted and reals are written with 17
significant digits, so identical inputs give byte-identical documents.
Non-finite reals become the strings "NaN", "Infinity", "-Infinity" to
keep the document valid JSON.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from .algebra import AlgebraElement, InheritanceTensor, ShapeError, ValidationReport
from .derivations import DerivationMatrix
from .dynamics import TrajectoryReport
from .properties import CharacterReport, PropertyReport
from .special import EmptyCase, Family, SolutionSet, StochasticMatrixPair, UnresolvedCase, expand_tensor

FULL_TRAJECTORY_STEPS = 64


class InputError(ValueError):
    """Bad user input; ``code`` is a machine-readable tag."""

    def __init__(self, code: str, message: str, **extra):
        super().__init__(message)
        self.code = code
        self.extra = extra

    def to_json(self) -> dict:
        return {"error": {"code": self.code, "message": str(self), **self.extra}}


# --------------------------------------------------------------------------
# emitting


def _real(v: float) -> str:
    if math.isnan(v):
        return '"NaN"'
    if math.isinf(v):
        return '"Infinity"' if v > 0 else '"-Infinity"'
    if v == 0.0:
        return "0.0"  # folds -0.0
    s = format(v, ".17g")
    if "e" not in s and "." not in s:
        s += ".0"
    return s


def _emit(obj: Any, indent: int, level: int) -> str:
    pad = "\n" + " " * (indent * (level + 1)) if indent else ""
    end = "\n" + " " * (indent * level) if indent else ""
    sep = "," if indent else ", "
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _real(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        return _emit(obj.tolist(), indent, level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{json.dumps(str(k))}: {_emit(obj[k], indent, level + 1)}" for k in sorted(obj, key=str)]
        return "{" + pad + (sep + pad).join(items) + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        # numeric vectors stay on one line
        if all(isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(_emit(v, 0, 0) for v in obj) + "]"
        items = [_emit(v, indent, level + 1) for v in obj]
        return "[" + pad + (sep + pad).join(items) + end + "]"
    if hasattr(obj, "to_json"):
        return _emit(obj.to_json(), indent, level)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any, indent: int = 2) -> str:
    return _emit(to_jsonable(obj), indent, 0)


# --------------------------------------------------------------------------
# domain objects -> plain structures


def element_json(z: AlgebraElement) -> dict:
    return {"x": z.x.tolist(), "y": z.y.tolist()}


def tensor_json(T: InheritanceTensor) -> dict:
    return {"n": T.n, "nu": T.nu, "pf": T.pf.tolist(), "pm": T.pm.tolist()}


def family_json(f: Family) -> dict:
    return {
        "case_label": f.case_label,
        "anchor": element_json(f.anchor),
        "basis": [element_json(b) for b in f.basis],
        "constraints": f.constraints,
        "exclusions": [{"functional": c.tolist(), "value": v} for c, v in f.exclusions],
    }


def solution_set_json(S: SolutionSet) -> dict:
    return {
        "kind": S.kind,
        "complete": S.complete,
        "points": [{"case_label": lab, "element": element_json(p)} for p, lab in zip(S.points, S.point_labels)],
        "families": [family_json(f) for f in S.families],
        "empties": [{"case_label": e.case_label, "certificate": e.certificate} for e in S.empties],
        "unresolved": [{"case_label": u.case_label, "diagnostics": u.diagnostics} for u in S.unresolved],
    }


def trajectory_json(r: TrajectoryReport) -> dict:
    idx = list(range(len(r.states)))
    if r.steps > FULL_TRAJECTORY_STEPS:
        stride = math.ceil(len(idx) / FULL_TRAJECTORY_STEPS)
        idx = sorted(set(idx[::stride]) | {idx[-1]})
    return {
        "steps": r.steps,
        "classification": r.classification,
        "diverged": r.diverged,
        "converged_to": element_json(r.converged_to) if r.converged_to is not None else None,
        "indices": idx,
        "states": [element_json(r.states[i]) for i in idx],
        "xy": [list(r.xy_values[i]) for i in idx],
    }


def to_jsonable(obj: Any) -> Any:
    if isinstance(obj, AlgebraElement):
        return element_json(obj)
    if isinstance(obj, InheritanceTensor):
        return tensor_json(obj)
    if isinstance(obj, StochasticMatrixPair):
        return {"A": obj.A.tolist(), "B": obj.B.tolist()}
    if isinstance(obj, SolutionSet):
        return solution_set_json(obj)
    if isinstance(obj, Family):
        return family_json(obj)
    if isinstance(obj, (EmptyCase, UnresolvedCase)):
        return dict(obj.__dict__)
    if isinstance(obj, TrajectoryReport):
        return trajectory_json(obj)
    if isinstance(obj, DerivationMatrix):
        return {"dff": obj.dff.tolist(), "dfm": obj.dfm.tolist(), "dmf": obj.dmf.tolist(), "dmm": obj.dmm.tolist()}
    if isinstance(obj, PropertyReport):
        return {
            "property": obj.property_name,
            "verdict": obj.verdict,
            "witness": [element_json(w) for w in obj.witness] if obj.witness else None,
            "residual": obj.residual,
        }
    if isinstance(obj, CharacterReport):
        return {
            "characters": [{"a": a.tolist(), "b": b.tolist()} for a, b in obj.characters],
            "constraint_count": obj.constraint_count,
            "diagonal_square_norms": obj.diagonal_square_norms,
            "forced_zero": obj.forced_zero,
            "max_residual": obj.max_residual,
        }
    if isinstance(obj, ValidationReport):
        return {"ok": obj.ok, "violations": obj.violations}
    if isinstance(obj, dict):
        return {k: to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return obj


# --------------------------------------------------------------------------
# reading


def parse_json_text(text: str, source: str = "<input>") -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError("malformed_json", f"{source}: {e.msg}", line=e.lineno, column=e.colno) from None


def load_json(path_or_literal: str) -> Any:
    """Parse the file named by the argument, or the argument itself as JSON."""
    s = path_or_literal.strip()
    path = Path(path_or_literal)
    if s and s[0] in "[{":
        return parse_json_text(s, "<literal>")
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise InputError("unreadable_input", f"cannot read {path}: {e.strerror}") from None
    return parse_json_text(text, str(path))


def _array(data: dict, key: str, ndim: int) -> np.ndarray:
    if key not in data:
        raise InputError("missing_field", f"missing field {key!r}")
    try:
        arr = np.array(data[key], dtype=float)
    except (TypeError, ValueError):
        raise InputError("bad_array", f"field {key!r} is not a rectangular array of reals") from None
    if arr.ndim != ndim:
        raise InputError("bad_shape", f"field {key!r} must have {ndim} dimensions, got {arr.ndim}")
    return arr


def tensor_from_json(data: Any) -> InheritanceTensor:
    if not isinstance(data, dict):
        raise InputError("bad_input", "tensor document must be a JSON object")
    if "A" in data and "B" in data:
        return expand_tensor(pair_from_json(data))
    pf, pm = _array(data, "pf", 3), _array(data, "pm", 3)
    n = data.get("n", pf.shape[0])
    nu = data.get("nu", pf.shape[1])
    if not isinstance(n, int) or not isinstance(nu, int):
        raise InputError("bad_input", "n and nu must be integers")
    try:
        return InheritanceTensor(n, nu, pf, pm)
    except ShapeError as e:
        raise InputError("bad_shape", str(e)) from None


def pair_from_json(data: Any) -> StochasticMatrixPair:
    if not isinstance(data, dict):
        raise InputError("bad_input", "pair document must be a JSON object with A and B")
    try:
        return StochasticMatrixPair(_array(data, "A", 2), _array(data, "B", 2))
    except ShapeError as e:
        raise InputError("bad_shape", str(e)) from None


def element_from_json(data: Any, n: int, nu: int) -> AlgebraElement:
    if isinstance(data, dict) and "x" in data and "y" in data:
        x, y = _array(data, "x", 1), _array(data, "y", 1)
    elif isinstance(data, list):
        v = np.array(data, dtype=float)
        if v.ndim != 1 or v.size != n + nu:
            raise InputError("bad_shape", f"flat element must have {n + nu} entries")
        x, y = v[:n], v[n:]
    else:
        raise InputError("bad_input", 'element must be {"x": [...], "y": [...]} or a flat list')
    if x.shape != (n,) or y.shape != (nu,):
        raise InputError("bad_shape", f"element sizes ({x.size}, {y.size}) do not match ({n}, {nu})")
    return AlgebraElement(x, y)
