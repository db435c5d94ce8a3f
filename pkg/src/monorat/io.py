"""Shared JSON function schema and CSV helpers.

Function documents look like::

    {"form": "rational", "numer": [...], "denom": [...], "declared_degree": 3}
    {"form": "kernel-sum", "terms": [{"c": 4.0, "z": 1.0}], "declared_degree": 2}
    {"form": "linear-plus-bumps", "slope": 1.0,
     "bumps": [{"a": 7.84, "gamma": 0.001953125}], "declared_degree": 3}

Unknown keys are rejected.  Floats are written with Python's shortest
round-trip repr, so a document re-parses to bit-identical coefficients.
"""
from __future__ import annotations

import csv
import io as _io
import json
from pathlib import Path

from .errors import SchemaError
from .ratcore import KernelSum, LinearPlusBumps, RationalFn, declared_degree

__all__ = ["function_to_dict", "function_from_dict", "dumps_function", "loads_function",
           "load_function", "write_json", "write_csv", "csv_text"]

_KEYS = {
    "rational": ({"form", "numer", "denom"}, {"declared_degree"}),
    "kernel-sum": ({"form", "terms"}, {"declared_degree"}),
    "linear-plus-bumps": ({"form", "slope", "bumps"}, {"declared_degree"}),
}


def function_to_dict(f) -> dict:
    if isinstance(f, RationalFn):
        return {"form": "rational", "numer": list(f.numer), "denom": list(f.denom),
                "declared_degree": f.declared_degree}
    if isinstance(f, KernelSum):
        return {"form": "kernel-sum", "terms": [{"c": c, "z": z} for c, z in f.terms],
                "declared_degree": declared_degree(f)}
    if isinstance(f, LinearPlusBumps):
        return {"form": "linear-plus-bumps", "slope": f.slope,
                "bumps": [{"a": a, "gamma": g} for a, g in f.bumps],
                "declared_degree": declared_degree(f)}
    raise SchemaError(f"{type(f).__name__} has no JSON form; expand it with to_rational first")


def _number(v, what):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise SchemaError(f"{what} must be a number, got {v!r}")
    return float(v)


def _records(items, keys, what):
    if not isinstance(items, list):
        raise SchemaError(f"{what} must be a list")
    out = []
    for item in items:
        if not isinstance(item, dict) or set(item) != set(keys):
            raise SchemaError(f"each entry of {what} must have exactly the keys {sorted(keys)}")
        out.append(tuple(_number(item[k], f"{what}.{k}") for k in keys))
    return out


def function_from_dict(d: dict):
    if not isinstance(d, dict):
        raise SchemaError("function document must be a JSON object")
    form = d.get("form")
    if form not in _KEYS:
        raise SchemaError(f"unknown form {form!r}")
    required, optional = _KEYS[form]
    missing = required - set(d)
    if missing:
        raise SchemaError(f"missing keys for {form}: {sorted(missing)}")
    extra = set(d) - required - optional
    if extra:
        raise SchemaError(f"unknown keys for {form}: {sorted(extra)}")
    deg = d.get("declared_degree")
    if deg is not None and (isinstance(deg, bool) or not isinstance(deg, int)):
        raise SchemaError("declared_degree must be an integer")

    if form == "rational":
        numer = [_number(c, "numer") for c in d["numer"]]
        denom = [_number(c, "denom") for c in d["denom"]]
        return RationalFn(tuple(numer), tuple(denom), deg)
    if form == "kernel-sum":
        f = KernelSum(tuple(_records(d["terms"], ("c", "z"), "terms")))
    else:
        f = LinearPlusBumps(_number(d["slope"], "slope"),
                            tuple(_records(d["bumps"], ("a", "gamma"), "bumps")))
    if deg is not None and deg != declared_degree(f):
        raise SchemaError(f"declared_degree {deg} inconsistent with {form} "
                          f"(expected {declared_degree(f)})")
    return f


def dumps_function(f) -> str:
    return json.dumps(function_to_dict(f), indent=2) + "\n"


def loads_function(text: str):
    return function_from_dict(json.loads(text))


def load_function(path):
    return loads_function(Path(path).read_text())


def write_json(path, obj):
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=False) + "\n")


def csv_text(header, rows) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def write_csv(path, header, rows):
    Path(path).write_text(csv_text(header, rows))
