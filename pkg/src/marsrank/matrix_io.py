"""Performance matrices: parsing, validation, orientation and serialization.

A performance matrix holds one metric value per (dataset, method) pair.
Rows are datasets, columns are methods.  Everything downstream assumes the
canonical *higher is better* orientation, which :func:`orient` produces.
"""

from __future__ import annotations

import csv
import io
import json
import math
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import IO, Sequence, Union

import numpy as np

from .errors import EmptyMatrix, MalformedInput, NonFiniteValue, TooFewMethods

__all__ = [
    "Direction",
    "PerformanceMatrix",
    "parse_matrix",
    "read_matrix",
    "orient",
    "to_csv",
    "to_json",
]

Source = Union[bytes, str, IO[bytes], IO[str]]

_NUMERAL = re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")
_NONFINITE = re.compile(r"[+-]?(?:nan|inf|infinity)", re.IGNORECASE)


class Direction(str, Enum):
    HIGHER_BETTER = "higher"
    LOWER_BETTER = "lower"

    @classmethod
    def parse(cls, value: "str | Direction") -> "Direction":
        if isinstance(value, Direction):
            return value
        key = str(value).strip().lower()
        aliases = {
            "higher": cls.HIGHER_BETTER,
            "higher_better": cls.HIGHER_BETTER,
            "lower": cls.LOWER_BETTER,
            "lower_better": cls.LOWER_BETTER,
        }
        try:
            return aliases[key]
        except KeyError:
            raise MalformedInput(f"unknown direction {value!r}; expected 'higher' or 'lower'") from None


@dataclass(frozen=True, eq=False)
class PerformanceMatrix:
    """N datasets x k methods of metric values.

    ``values`` is stored as a read-only float64 array of shape (N, k).
    Construction validates every invariant, so an instance is always usable.
    """

    method_names: tuple[str, ...]
    dataset_names: tuple[str, ...]
    values: np.ndarray = field(repr=False)
    direction: Direction = Direction.HIGHER_BETTER

    def __post_init__(self):
        methods = tuple(str(m) for m in self.method_names)
        datasets = tuple(str(d) for d in self.dataset_names)
        values = np.array(self.values, dtype=np.float64, copy=True)
        if values.ndim != 2:
            raise MalformedInput(f"values must be two-dimensional, got shape {values.shape}")
        n, k = values.shape
        if len(methods) < 2 or k < 2:
            raise TooFewMethods(f"need at least 2 methods, got {min(len(methods), k)}")
        if n == 0 or len(datasets) == 0:
            raise EmptyMatrix("matrix has no datasets")
        if (n, k) != (len(datasets), len(methods)):
            raise MalformedInput(
                f"values have shape {values.shape} but there are "
                f"{len(datasets)} dataset names and {len(methods)} method names"
            )
        _check_unique(methods, "method")
        _check_unique(datasets, "dataset")
        if not np.all(np.isfinite(values)):
            i, j = np.argwhere(~np.isfinite(values))[0]
            raise NonFiniteValue(f"non-finite value {values[i, j]!r} at dataset {datasets[i]!r}, method {methods[j]!r}")
        values.setflags(write=False)
        object.__setattr__(self, "method_names", methods)
        object.__setattr__(self, "dataset_names", datasets)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "direction", Direction.parse(self.direction))

    @property
    def n_datasets(self) -> int:
        return self.values.shape[0]

    @property
    def k(self) -> int:
        return self.values.shape[1]

    def __eq__(self, other):
        if not isinstance(other, PerformanceMatrix):
            return NotImplemented
        return (
            self.method_names == other.method_names
            and self.dataset_names == other.dataset_names
            and self.direction == other.direction
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None


def _check_unique(names: Sequence[str], what: str) -> None:
    seen = set()
    for name in names:
        if name in seen:
            raise MalformedInput(f"duplicate {what} name {name!r}")
        seen.add(name)


def _parse_value(cell: str, row: int, col: int) -> float:
    text = cell.strip()
    if _NUMERAL.fullmatch(text):
        return float(text)
    if _NONFINITE.fullmatch(text):
        raise NonFiniteValue(f"non-finite value {text!r} in row {row}, column {col}")
    raise MalformedInput(f"non-numeric cell {cell!r} in row {row}, column {col}")


def _as_text(source: Source) -> str:
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, (bytes, bytearray)):
        try:
            return bytes(source).decode("utf-8-sig")
        except UnicodeDecodeError as exc:
            raise MalformedInput(f"input is not valid UTF-8: {exc}") from None
    return source.lstrip("﻿")


def _parse_csv(text: str, direction: Direction) -> PerformanceMatrix:
    rows = [r for r in csv.reader(io.StringIO(text, newline="")) if r and any(c.strip() for c in r)]
    if not rows:
        raise MalformedInput("empty CSV: header row is mandatory")
    header = [c.strip() for c in rows[0]]
    if header[0].lower() != "dataset":
        raise MalformedInput(f"header must start with 'dataset', got {rows[0][0]!r}")
    methods = header[1:]
    if any(not m for m in methods):
        raise MalformedInput("empty method name in header")
    if len(methods) < 2:
        raise TooFewMethods(f"need at least 2 methods, got {len(methods)}")
    datasets, values = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise MalformedInput(f"row {lineno} has {len(row)} cells, expected {len(header)}")
        name = row[0].strip()
        if not name:
            raise MalformedInput(f"row {lineno} has an empty dataset name")
        datasets.append(name)
        values.append([_parse_value(c, lineno, j) for j, c in enumerate(row[1:], start=2)])
    if not datasets:
        raise EmptyMatrix("CSV has a header but no data rows")
    return PerformanceMatrix(tuple(methods), tuple(datasets), np.array(values, dtype=np.float64), direction)


def _parse_json(text: str, direction: Direction | None) -> PerformanceMatrix:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise MalformedInput("JSON matrix must be an object")
    missing = [key for key in ("methods", "datasets", "values") if key not in doc]
    if missing:
        raise MalformedInput(f"JSON matrix is missing {', '.join(missing)}")
    methods, datasets, rows = doc["methods"], doc["datasets"], doc["values"]
    if not isinstance(methods, list) or not all(isinstance(m, str) for m in methods):
        raise MalformedInput("'methods' must be a list of strings")
    if not isinstance(datasets, list) or not all(isinstance(d, str) for d in datasets):
        raise MalformedInput("'datasets' must be a list of strings")
    if len(methods) < 2:
        raise TooFewMethods(f"need at least 2 methods, got {len(methods)}")
    if not isinstance(rows, list):
        raise MalformedInput("'values' must be a list of rows")
    if not rows:
        raise EmptyMatrix("JSON matrix has no rows")
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != len(methods):
            raise MalformedInput(f"values row {i} must be a list of {len(methods)} numbers")
        for cell in row:
            if isinstance(cell, bool) or not isinstance(cell, (int, float)):
                raise MalformedInput(f"non-numeric value {cell!r} in values row {i}")
    if direction is None:
        direction = Direction.parse(doc.get("direction", "higher"))
    return PerformanceMatrix(tuple(methods), tuple(datasets), np.array(rows, dtype=np.float64), direction)


def parse_matrix(source: Source, format: str = "csv", direction: "Direction | str | None" = None) -> PerformanceMatrix:
    """Parse a performance matrix from CSV or JSON.

    Row and column order are preserved.  CSV carries no orientation, so
    ``direction`` defaults to higher-is-better there; for JSON an explicit
    ``direction`` overrides the document's own ``"direction"`` key.
    """
    text = _as_text(source)
    fmt = format.lower()
    direction = None if direction is None else Direction.parse(direction)
    if fmt == "csv":
        return _parse_csv(text, direction or Direction.HIGHER_BETTER)
    if fmt == "json":
        return _parse_json(text, direction)
    raise MalformedInput(f"unknown matrix format {format!r}")


def read_matrix(path: str, format: str | None = None, direction: "Direction | str | None" = None) -> PerformanceMatrix:
    """Read a matrix from ``path`` (``-`` for stdin); format guessed from the suffix."""
    import sys

    if format is None:
        format = "json" if str(path).lower().endswith(".json") else "csv"
    if path == "-":
        return parse_matrix(sys.stdin.buffer.read(), format, direction)
    with open(path, "rb") as fh:
        return parse_matrix(fh.read(), format, direction)


def orient(matrix: PerformanceMatrix) -> PerformanceMatrix:
    """Return the higher-is-better form of ``matrix``.

    Lower-is-better values are negated; the weight formula is a ratio of
    differences, so negation loses nothing.
    """
    if matrix.direction is Direction.HIGHER_BETTER:
        return matrix
    return PerformanceMatrix(matrix.method_names, matrix.dataset_names, -matrix.values, Direction.HIGHER_BETTER)


def _fmt(x: float) -> str:
    # repr is the shortest round-tripping decimal; also maps -0.0 to "-0.0"
    if not math.isfinite(x):
        raise NonFiniteValue(repr(x))
    return repr(float(x))


def to_csv(matrix: PerformanceMatrix) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["dataset", *matrix.method_names])
    for name, row in zip(matrix.dataset_names, matrix.values):
        writer.writerow([name, *(_fmt(v) for v in row)])
    return buf.getvalue()


def to_json(matrix: PerformanceMatrix) -> str:
    doc = {
        "methods": list(matrix.method_names),
        "datasets": list(matrix.dataset_names),
        "values": matrix.values.tolist(),
        "direction": matrix.direction.value,
    }
    return json.dumps(doc, indent=2) + "\n"
