"""Loading and validating Fourier coefficient tables.

Two on-disk layouts are understood:

* CSV with header ``n,re,im`` (complex) or ``n,value`` (real, self-dual forms),
  rows in ascending ``n``;
* JSON ``{"coefficients": [[n, re, im], ...], "meta": {...}}`` where each row may
  also be ``[n, value]``.

Coefficients are Hecke normalized, so ``lambda(1) == 1``.  Published tables are
truncated decimals and the check tolerates ``1e-9``; the stored value at n = 1
is then reset to exactly ``1 + 0j``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import IO, Any, Mapping, Sequence, Union

import numpy as np

from .errors import MissingIndex, NotNormalized, NotSelfDual, OutOfRange, ParseError

NORMALIZATION_TOL = 1e-9
SELF_DUAL_TOL = 1e-9

Source = Union[str, bytes, IO[str], IO[bytes]]


@dataclass(frozen=True)
class TableMeta:
    claimed_level: int | None = None
    claimed_r: float | None = None
    self_dual: bool = False
    label: str | None = None

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any] | None) -> "TableMeta":
        if not data:
            return cls()
        level = data.get("claimed_level", data.get("level"))
        r = data.get("claimed_r", data.get("r", data.get("spectral_parameter")))
        return cls(
            claimed_level=int(level) if level is not None else None,
            claimed_r=float(r) if r is not None else None,
            self_dual=bool(data.get("self_dual", False)),
            label=data.get("label"),
        )

    def to_mapping(self) -> dict:
        out: dict[str, Any] = {"self_dual": self.self_dual}
        if self.claimed_level is not None:
            out["claimed_level"] = self.claimed_level
        if self.claimed_r is not None:
            out["claimed_r"] = self.claimed_r
        if self.label is not None:
            out["label"] = self.label
        return out


@dataclass(frozen=True, eq=False)
class FourierCoefficientTable:
    """Immutable table of lambda(n) for n = 1..n_max.

    ``values[n - 1]`` holds lambda(n).  The array is made read-only so a table
    can be shared between worker threads.
    """

    values: np.ndarray
    meta: TableMeta = field(default_factory=TableMeta)

    def __post_init__(self):
        vals = np.array(self.values, dtype=np.complex128)
        if vals.ndim != 1 or vals.size == 0:
            raise ParseError("coefficient table must be a non-empty 1-d sequence")
        if abs(vals[0] - 1.0) > NORMALIZATION_TOL:
            raise NotNormalized(complex(vals[0]))
        vals[0] = 1.0 + 0.0j
        if self.meta.self_dual:
            bad = np.flatnonzero(np.abs(vals.imag) > SELF_DUAL_TOL)
            if bad.size:
                n = int(bad[0]) + 1
                raise NotSelfDual(n, float(vals.imag[bad[0]]))
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def n_max(self) -> int:
        return int(self.values.size)

    @property
    def is_real(self) -> bool:
        return bool(np.all(self.values.imag == 0.0))

    def __len__(self) -> int:
        return self.n_max

    def __getitem__(self, n: int) -> complex:
        return coefficient(self, n)

    def slice(self, n_lo: int, n_hi: int) -> np.ndarray:
        """lambda(n) for n_lo <= n <= n_hi as a read-only view."""
        if n_lo < 1:
            raise OutOfRange(n_lo, self.n_max)
        if n_hi > self.n_max:
            raise OutOfRange(n_hi, self.n_max)
        return self.values[n_lo - 1 : n_hi]

    def scaled(self, factor: complex) -> "FourierCoefficientTable":
        """Table with every coefficient except lambda(1) multiplied by ``factor``.

        lambda(1) stays 1 so the result is still a valid table; used for
        scale-invariance checks of the level scan.
        """
        vals = np.array(self.values) * factor
        vals[0] = 1.0
        meta = self.meta
        if meta.self_dual and complex(factor).imag != 0.0:
            meta = TableMeta(meta.claimed_level, meta.claimed_r, False, meta.label)
        return FourierCoefficientTable(vals, meta)


def table_from_values(values: Sequence[complex], **meta) -> FourierCoefficientTable:
    return FourierCoefficientTable(np.asarray(values, dtype=np.complex128), TableMeta(**meta))


def coefficient(table: FourierCoefficientTable, n: int) -> complex:
    if n < 1 or n > table.n_max:
        raise OutOfRange(n, table.n_max)
    return complex(table.values[n - 1])


def _read_text(source: Source) -> str:
    if isinstance(source, bytes):
        return source.decode("utf-8")
    if isinstance(source, str):
        return source
    data = source.read()
    if isinstance(data, bytes):
        return data.decode("utf-8")
    return data


def _assemble(rows: list[tuple[int, complex, int | None]], meta: TableMeta) -> FourierCoefficientTable:
    if not rows:
        raise ParseError("no coefficient rows found")
    prev = 0
    values = []
    for n, value, line in rows:
        if n <= prev:
            raise ParseError(f"indices must be strictly ascending, got n={n} after n={prev}", line)
        if n != prev + 1:
            raise MissingIndex(prev + 1)
        values.append(value)
        prev = n
    return FourierCoefficientTable(np.asarray(values, dtype=np.complex128), meta)


def _parse_float(text: str, line: int) -> float:
    try:
        x = float(text)
    except ValueError:
        raise ParseError(f"not a number: {text!r}", line) from None
    if not math.isfinite(x):
        raise ParseError(f"non-finite value {text!r}", line)
    return x


def _parse_csv(text: str, meta: TableMeta) -> FourierCoefficientTable:
    reader = csv.reader(io.StringIO(text))
    header = None
    rows = []
    for row in reader:
        line = reader.line_num
        if not row or not "".join(row).strip() or row[0].lstrip().startswith("#"):
            continue
        cells = [c.strip() for c in row]
        if header is None:
            header = [c.lower() for c in cells]
            if header not in (["n", "re", "im"], ["n", "value"]):
                raise ParseError(f"header must be 'n,re,im' or 'n,value', got {','.join(cells)!r}", line)
            continue
        if len(cells) != len(header):
            raise ParseError(f"expected {len(header)} columns, got {len(cells)}", line)
        try:
            n = int(cells[0])
        except ValueError:
            raise ParseError(f"bad index {cells[0]!r}", line) from None
        re = _parse_float(cells[1], line)
        im = _parse_float(cells[2], line) if len(cells) == 3 else 0.0
        rows.append((n, complex(re, im), line))
    if header is None:
        raise ParseError("missing CSV header")
    return _assemble(rows, meta)


def _parse_json(text: str) -> FourierCoefficientTable:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno) from None
    if isinstance(doc, list):
        doc = {"coefficients": doc}
    if not isinstance(doc, dict) or "coefficients" not in doc:
        raise ParseError("JSON document needs a 'coefficients' array")
    meta = TableMeta.from_mapping(doc.get("meta"))
    rows = []
    for i, entry in enumerate(doc["coefficients"]):
        if not isinstance(entry, (list, tuple)) or len(entry) not in (2, 3):
            raise ParseError(f"entry {i} must be [n, re, im] or [n, value]")
        try:
            n = int(entry[0])
            re = float(entry[1])
            im = float(entry[2]) if len(entry) == 3 else 0.0
        except (TypeError, ValueError):
            raise ParseError(f"entry {i} is not numeric: {entry!r}") from None
        if n != entry[0] or not (math.isfinite(re) and math.isfinite(im)):
            raise ParseError(f"entry {i} is malformed: {entry!r}")
        rows.append((n, complex(re, im), None))
    return _assemble(rows, meta)


def parse_coefficients(source: Source, format: str = "csv", meta: TableMeta | None = None) -> FourierCoefficientTable:
    """Parse a coefficient table from text, bytes or a file object.

    ``meta`` only applies to CSV input; JSON input carries its own.
    """
    text = _read_text(source)
    if format == "csv":
        return _parse_csv(text, meta or TableMeta())
    if format == "json":
        return _parse_json(text)
    raise ValueError(f"unknown coefficient format {format!r}")


def load_coefficients(path, format: str | None = None) -> FourierCoefficientTable:
    path = str(path)
    if format is None:
        format = "json" if path.lower().endswith(".json") else "csv"
    with open(path, "rb") as fh:
        return parse_coefficients(fh, format)


def dump_coefficients(table: FourierCoefficientTable, format: str = "csv") -> str:
    """Serialize with full round-trip precision (``repr`` of each float)."""
    vals = table.values
    if format == "csv":
        lines = ["n,re,im"]
        lines += [f"{n},{float(vals[n - 1].real)!r},{float(vals[n - 1].imag)!r}" for n in range(1, table.n_max + 1)]
        return "\n".join(lines) + "\n"
    if format == "json":
        rows = [[n, float(vals[n - 1].real), float(vals[n - 1].imag)] for n in range(1, table.n_max + 1)]
        return json.dumps({"coefficients": rows, "meta": table.meta.to_mapping()})
    raise ValueError(f"unknown coefficient format {format!r}")


@dataclass(frozen=True)
class RunConfig:
    x_grid: tuple[float, ...]
    quadrature_tol: float = 1e-10
    N: int = 1
    output_format: str = "csv"

    def __post_init__(self):
        if self.N < 1:
            raise ValueError(f"truncation order N must be >= 1, got {self.N}")
        if self.output_format not in ("csv", "json"):
            raise ValueError(f"output_format must be 'csv' or 'json', got {self.output_format!r}")
        if not self.x_grid or any(x <= 0 for x in self.x_grid):
            raise ValueError("x_grid must be non-empty with positive entries")
        if self.quadrature_tol <= 0:
            raise ValueError("quadrature_tol must be positive")

    def check_table(self, table: FourierCoefficientTable) -> None:
        """Fail if some X on the grid needs coefficients past n_max."""
        worst = max(self.x_grid)
        if 2 * worst > table.n_max:
            raise OutOfRange(math.ceil(2 * worst), table.n_max)


def x_grid(x_min: float, x_max: float, steps: int, geometric: bool = True) -> tuple[float, ...]:
    if steps < 1:
        raise ValueError("grid needs at least one point")
    if x_min <= 0 or x_max < x_min:
        raise ValueError(f"invalid grid bounds [{x_min}, {x_max}]")
    if steps == 1:
        return (float(x_min),)
    pts = np.geomspace(x_min, x_max, steps) if geometric else np.linspace(x_min, x_max, steps)
    pts[0], pts[-1] = x_min, x_max
    return tuple(float(x) for x in pts)
