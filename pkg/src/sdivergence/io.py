"""Distribution files and curve serialization."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Iterable, Optional

from .core import Distribution, make_distribution
from .errors import DivergenceError, ParseError, ValidationError
from .symmetrized import CURVE_COLUMNS, SymmetrizedPoint

FORMATS = ("csv", "json")


def format_float(x: float) -> str:
    """17 significant digits: round-trips every double, '.' as separator."""
    return format(float(x), ".17g")


def format_order(s: float) -> str:
    """Shortest round-trip form, without a trailing '.0'."""
    r = repr(float(s))
    return r[:-2] if r.endswith(".0") else r


def infer_format(path, fmt: Optional[str]) -> str:
    if fmt:
        if fmt not in FORMATS:
            raise ValidationError(f"unknown format {fmt!r}")
        return fmt
    suffix = Path(path).suffix.lower().lstrip(".")
    return suffix if suffix in FORMATS else "csv"


def _rows_csv(text: str) -> list[tuple[int, list[float]]]:
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        try:
            rows.append((lineno, [float(tok) for tok in next(csv.reader([line]))]))
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from None
    return rows


def _rows_json(text: str) -> list[tuple[int, list[float]]]:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno) from None
    if not isinstance(data, list):
        raise ParseError("expected an array of arrays of numbers")
    rows = []
    for i, row in enumerate(data, start=1):
        if not isinstance(row, list) or not all(
            isinstance(x, (int, float)) and not isinstance(x, bool) for x in row
        ):
            raise ParseError(f"row {i} is not an array of numbers")
        rows.append((i, [float(x) for x in row]))
    return rows


def load_distributions(path, fmt: Optional[str] = None, renormalize: bool = False) -> list[Distribution]:
    """Read one distribution per CSV line or per inner JSON array.

    Validation failures are re-raised with the offending row (CSV line number,
    or 1-based array index for JSON) prefixed to the message and stored as
    ``exc.row``.
    """
    fmt = infer_format(path, fmt)
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from None
    rows = _rows_csv(text) if fmt == "csv" else _rows_json(text)
    out = []
    for row, values in rows:
        try:
            out.append(make_distribution(values, renormalize=renormalize))
        except DivergenceError as exc:
            err = type(exc)(f"row {row}: {exc}")
            err.row = row
            raise err from None
    return out


def curve_csv(points: Iterable[SymmetrizedPoint]) -> str:
    buf = io.StringIO()
    buf.write(",".join(CURVE_COLUMNS) + "\n")
    for pt in points:
        buf.write(",".join(format_float(x) for x in pt.as_row()) + "\n")
    return buf.getvalue()


def curve_json(points: Iterable[SymmetrizedPoint]) -> str:
    # assembled by hand so every number carries exactly 17 significant digits
    rows = ["    [" + ", ".join(format_float(x) for x in pt.as_row()) + "]" for pt in points]
    cols = ", ".join(json.dumps(c) for c in CURVE_COLUMNS)
    return '{\n  "columns": [' + cols + '],\n  "rows": [\n' + ",\n".join(rows) + "\n  ]\n}\n"


def read_curve(text: str, fmt: str) -> list[dict]:
    """Parse curve output back into one ``{column: value}`` dict per row."""
    if fmt == "json":
        doc = json.loads(text)
        return [dict(zip(doc["columns"], row)) for row in doc["rows"]]
    reader = csv.DictReader(io.StringIO(text))
    return [{k: float(v) for k, v in row.items()} for row in reader]
