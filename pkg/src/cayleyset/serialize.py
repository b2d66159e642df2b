"""JSON and CSV interchange.

Complex numbers are written as [re, im].  Output is deterministic: keys are
emitted in a fixed order and floats use 17 significant digits, so a rerun
with the same inputs gives byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
import math
from typing import Any

import numpy as np

from .pencil import Conic, ConicPair


class InputError(ValueError):
    """Malformed input file; the message names the offending field."""


# -- encoding ----------------------------------------------------------------------


def cx(z) -> list[float]:
    z = complex(z)
    return [z.real + 0.0, z.imag + 0.0]


def cx_list(xs) -> list[list[float]]:
    return [cx(z) for z in np.ravel(xs)]


def _fmt_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        return json.dumps(x)
    text = format(x, ".17g")
    if all(ch not in text for ch in ".en"):
        text += ".0"
    return text


def _emit(obj: Any, out: list[str], indent: int, level: int) -> None:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, (bool, np.bool_)) or obj is None:
        out.append(json.dumps(None if obj is None else bool(obj)))
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(_fmt_float(float(obj)))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        items = list(obj.items())
        for k, (key, value) in enumerate(items):
            out.append(f"{pad}{json.dumps(str(key))}: ")
            _emit(value, out, indent, level + 1)
            out.append(",\n" if k < len(items) - 1 else "\n")
        out.append(end + "}")
    elif isinstance(obj, (list, tuple)):
        # short numeric rows stay on one line
        if all(isinstance(v, (int, float, np.number)) and not isinstance(v, (bool, np.bool_)) for v in obj):
            parts: list[str] = []
            for v in obj:
                _emit(v, parts, indent, level + 1)
            out.append("[" + ", ".join(parts) + "]")
            return
        if not obj:
            out.append("[]")
            return
        out.append("[\n")
        for k, value in enumerate(obj):
            out.append(pad)
            _emit(value, out, indent, level + 1)
            out.append(",\n" if k < len(obj) - 1 else "\n")
        out.append(end + "]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any, indent: int = 2) -> str:
    """Deterministic JSON text (insertion-ordered keys, '.17g' floats)."""
    out: list[str] = []
    _emit(obj, out, indent, 0)
    return "".join(out) + "\n"


def conic_to_json(C) -> dict:
    C = C if isinstance(C, Conic) else Conic(C)
    return {"coords": cx_list(C.coords)}


def pair_to_json(pair) -> dict:
    C, D = pair
    return {"C": conic_to_json(C), "D": conic_to_json(D)}


def verdict_to_json(v) -> dict:
    return {
        "n": int(v.n),
        "gamma": cx(v.gamma),
        "hankel": cx(v.hankel),
        "satisfied": bool(v.satisfied),
        "threshold": float(v.threshold),
    }


def moduli_to_json(m) -> dict:
    return {"e": cx_list(m.e), "canonical": cx_list(m.canonical), "special": bool(m.special)}


def normal_form_to_json(nf) -> dict:
    return {
        "A": [cx_list(row) for row in nf.A],
        "lambda": cx_list(nf.lam),
        "conditioning": float(nf.conditioning),
    }


def jvalue_to_json(j) -> dict:
    return {"z": cx(j.z), "critical_class": j.critical_class}


def atlas_to_json(rec) -> dict:
    return {
        "z": cx(rec.z),
        "roots": [
            {
                "lambda": cx_list(r.lam.coords),
                "mult": int(r.mult),
                "res_cayley": float(r.res_cayley),
                "res_j": float(r.res_j),
            }
            for r in rec.roots
        ],
        "orbits": int(rec.orbit_count),
        "total": int(rec.total_with_multiplicity),
        "residual_eq7": float(rec.residual_eq7),
        "residual_eq8": float(rec.residual_eq8),
        "chart": rec.chart,
        "infinity_clear": bool(rec.infinity_clear),
        "notes": list(rec.notes),
    }


ATLAS_CSV_COLUMNS = (
    "z_re", "z_im",
    "l1_re", "l1_im", "l2_re", "l2_im", "l3_re", "l3_im",
    "mult", "res_cayley", "res_j",
)


def atlas_to_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(ATLAS_CSV_COLUMNS)
    for rec in records:
        z = cx(rec.z)
        for r in rec.roots:
            lam = [v for c in cx_list(r.lam.coords) for v in c]
            row = z + lam + [r.mult, r.res_cayley, r.res_j]
            w.writerow([_fmt_float(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def trace_to_json(tr) -> dict:
    return {
        "states": [
            {
                "point": cx_list(s.point.coords),
                "line": cx_list(s.line.coords),
                "residuals": [float(x) for x in res],
            }
            for s, res in zip(tr.states, tr.residuals)
        ],
        "closure_error": float(tr.closure_error),
        "verdict": "closed" if tr.closed else "open",
    }


def gradcheck_to_json(report) -> dict:
    return {
        "roots": [
            {
                "index": c.root_index,
                "root": cx(c.root),
                "rel_error": float(c.rel_error),
                "worst_entry": c.worst_entry,
            }
            for c in report.roots
        ],
        "threshold": float(report.threshold),
        "passed": bool(report.passed),
    }


# -- decoding ----------------------------------------------------------------------


def _field(obj, key: str, where: str):
    if not isinstance(obj, dict):
        raise InputError(f"{where or 'input'}: expected an object")
    if key not in obj:
        raise InputError(f"missing field '{where + '.' if where else ''}{key}'")
    return obj[key]


def parse_complex(value, where: str) -> complex:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    if (
        isinstance(value, (list, tuple))
        and len(value) == 2
        and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)
    ):
        return complex(value[0], value[1])
    raise InputError(f"field '{where}' must be a number or [re, im]")


def parse_complex_list(values, n: int, where: str) -> np.ndarray:
    if not isinstance(values, list) or len(values) != n:
        raise InputError(f"field '{where}' must be a list of {n} complex numbers")
    return np.array([parse_complex(v, f"{where}[{k}]") for k, v in enumerate(values)])


def conic_from_json(obj, where: str = "") -> Conic:
    coords = parse_complex_list(_field(obj, "coords", where), 6, f"{where}.coords".lstrip("."))
    try:
        return Conic.from_coords(coords)
    except ValueError as exc:
        raise InputError(f"field '{where}': {exc}") from exc


def pair_from_json(obj) -> ConicPair:
    C = conic_from_json(_field(obj, "C", ""), "C")
    D = conic_from_json(_field(obj, "D", ""), "D")
    return ConicPair(C, D)


def load_json(path) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise InputError(f"no such file: {path}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc


def load_pair(path) -> ConicPair:
    return pair_from_json(load_json(path))


def load_conic(path) -> Conic:
    obj = load_json(path)
    # accept a bare conic or a pair file (its D)
    if isinstance(obj, dict) and "coords" not in obj and "D" in obj:
        return conic_from_json(obj["D"], "D")
    return conic_from_json(obj)
