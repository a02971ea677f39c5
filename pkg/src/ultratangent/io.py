"""File formats and report serialization.

Matrix files are JSON ``{"labels": [...], "dist": [[...]]}`` (an optional
``"base"`` names the marked point), or CSV with a header row of labels
followed by the matrix rows.  Point files are CSV rows ``label,x,y,...``.
A JSON document ``{"generator": {...}}`` is built through
:class:`~ultratangent.generators.GeneratorSpec`.

Reports are written with every real at 17 significant digits and
infinities as the string ``"inf"``; NaN is refused.
"""
from __future__ import annotations

import csv
import hashlib
import io as _io
import json
import math
from dataclasses import dataclass

import numpy as np

from .generators import GeneratorSpec
from .metric_core import DEFAULT_TOL, FiniteMetricSpace, StructureError, ToleranceConfig, from_points, validate_metric

__all__ = ["LoadedSpace", "load_space", "parse_space", "space_document", "dumps", "digest"]


@dataclass(frozen=True)
class LoadedSpace:
    space: FiniteMetricSpace
    base: int | None
    family: dict | None
    raw: bytes


def digest(raw: bytes) -> str:
    return "sha256:" + hashlib.sha256(raw).hexdigest()


def _parse_float(tok: str) -> float:
    try:
        return float(tok)
    except ValueError:
        raise StructureError(f"not a number: {tok!r}") from None


def _matrix_csv(text: str) -> tuple[list[str], list[list[float]]]:
    rows = [r for r in csv.reader(_io.StringIO(text)) if r and any(c.strip() for c in r)]
    if len(rows) < 2:
        raise StructureError("CSV matrix needs a header row and at least one data row")
    labels = [c.strip() for c in rows[0]]
    body = [[_parse_float(c) for c in r] for r in rows[1:]]
    return labels, body


def _points_csv(text: str) -> tuple[list[str], list[list[float]]]:
    rows = [r for r in csv.reader(_io.StringIO(text)) if r and any(c.strip() for c in r)]
    if rows and not _numeric(rows[0][1:]):
        rows = rows[1:]  # header
    if not rows:
        raise StructureError("points file is empty")
    labels = [r[0].strip() for r in rows]
    coords = [[_parse_float(c) for c in r[1:]] for r in rows]
    if len({len(c) for c in coords}) != 1 or not coords[0]:
        raise StructureError("every point needs the same positive number of coordinates")
    return labels, coords


def _numeric(cells) -> bool:
    try:
        [float(c) for c in cells]
        return True
    except ValueError:
        return False


def _resolve_base(base, labels) -> int | None:
    if base is None:
        return None
    if isinstance(base, str):
        if base not in labels:
            raise StructureError(f"base {base!r} is not a point label")
        return list(labels).index(base)
    return int(base)


def parse_space(
    raw: bytes,
    kind: str = "auto",
    metric: str = "euclidean",
    tol: ToleranceConfig = DEFAULT_TOL,
    validate: bool = True,
):
    """Parse a matrix, points or generator document.

    ``kind`` is "json", "csv", "points" or "auto" (JSON if the text starts
    with ``{``).  With ``validate=False`` returns (labels, matrix, base)
    without checking the metric axioms.
    """
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as e:
        raise StructureError(f"input is not UTF-8 text: {e}") from None
    if kind == "auto":
        kind = "json" if text.lstrip().startswith("{") else "csv"
    family = None
    base = None
    if kind == "points":
        labels, coords = _points_csv(text)
        space = from_points(coords, metric, labels)
        labels, matrix = list(space.labels), space.dist
    elif kind == "csv":
        labels, matrix = _matrix_csv(text)
    elif kind == "json":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as e:
            raise StructureError(f"malformed JSON: {e}") from None
        if not isinstance(doc, dict):
            raise StructureError("JSON input must be an object")
        if "generator" in doc:
            gen = GeneratorSpec.from_dict(doc["generator"]).build(tol)
            return LoadedSpace(gen.space, gen.pointed.base, gen.family, raw)
        if "dist" not in doc:
            raise StructureError('JSON matrix input needs a "dist" field')
        matrix = doc["dist"]
        labels = doc.get("labels")
        base = doc.get("base")
        family = doc.get("family")
    else:
        raise ValueError(f"unknown input kind {kind!r}")
    try:
        arr = np.array(
            [[math.inf if v == "inf" else v for v in row] for row in matrix], dtype=np.float64
        )
    except (TypeError, ValueError):
        raise StructureError("distance matrix must be a list of numeric rows") from None
    if labels is not None and (arr.ndim != 2 or len(labels) != arr.shape[0]):
        raise StructureError("label count does not match the matrix size")
    if not validate:
        return labels, arr, base
    space = validate_metric(arr, labels, tol)
    return LoadedSpace(space, _resolve_base(base, space.labels), family, raw)


def load_space(path: str, kind: str = "auto", metric: str = "euclidean", tol: ToleranceConfig = DEFAULT_TOL) -> LoadedSpace:
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as e:
        raise StructureError(f"cannot read {path}: {e.strerror}") from None
    if kind == "auto" and path.endswith(".json"):
        kind = "json"
    return parse_space(raw, kind, metric, tol)


def space_document(space: FiniteMetricSpace, base: int | None = None, **extra) -> dict:
    doc = space.as_dict()
    if base is not None:
        doc["base"] = space.labels[base]
    doc.update(extra)
    return doc


def _scalar(v) -> str:
    if v is None:
        return "null"
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, str):
        return json.dumps(v, ensure_ascii=False)
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        f = float(v)
        if math.isnan(f):
            raise ValueError("NaN cannot be serialized")
        if math.isinf(f):
            return '"inf"' if f > 0 else '"-inf"'
        return format(f, ".17g")
    raise TypeError(f"cannot serialize {type(v).__name__}")


def _write(obj, indent: int | None, level: int, out: list[str]) -> None:
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (dict, list, tuple)):
        items = list(obj.items()) if isinstance(obj, dict) else list(obj)
        open_, close = "{}" if isinstance(obj, dict) else "[]"
        if not items:
            out.append(open_ + close)
            return
        # short rows of scalars stay on one line
        flat = indent is None or (
            not isinstance(obj, dict) and all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in items)
        )
        pad = "" if flat else "\n" + " " * (indent * (level + 1))
        sep = ", " if flat else ","
        out.append(open_)
        for n, item in enumerate(items):
            if n:
                out.append(sep)
            out.append(pad)
            if isinstance(obj, dict):
                out.append(json.dumps(str(item[0]), ensure_ascii=False) + ": ")
                item = item[1]
            _write(item, indent, level + 1, out)
        out.append("" if flat else "\n" + " " * (indent * level))
        out.append(close)
    else:
        out.append(_scalar(obj))


def dumps(obj, indent: int | None = 2) -> str:
    """Deterministic JSON: reals at 17 significant digits, ``"inf"`` for infinities."""
    out: list[str] = []
    _write(obj, indent, 0, out)
    return "".join(out) + "\n"
