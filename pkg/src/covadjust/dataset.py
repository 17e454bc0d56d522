"""Tabular data model and CSV ingestion.

A `Dataset` is an immutable set of named, equal-length, finite float
columns. Simulated and observed data go through the same type, so every
downstream computation treats them identically.
"""

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DuplicateHeader,
    InsufficientRows,
    MissingValue,
    ParseError,
    UnknownColumn,
)

_MISSING_TOKENS = {"", "na", "nan", "null", "none"}


@dataclass(frozen=True)
class ColumnSummary:
    mean: float
    variance: float
    sd: float


class Dataset:
    """Named numeric columns, one row per observation.

    Column data is stored as a read-only ``(n, k)`` float array.
    """

    __slots__ = ("_names", "_values", "_index")

    def __init__(self, column_names, values):
        names = tuple(str(c) for c in column_names)
        arr = np.array(values, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != len(names):
            raise ValueError(
                f"values of shape {arr.shape} do not match {len(names)} column names"
            )
        if arr.shape[0] < 1:
            raise ValueError("a Dataset needs at least one row")
        if any(not nm for nm in names):
            raise ValueError("column names must be nonempty")
        if len(set(names)) != len(names):
            raise DuplicateHeader(f"duplicate column names in {names}")
        if not np.isfinite(arr).all():
            raise MissingValue("Dataset cells must all be finite")
        arr.setflags(write=False)
        self._names = names
        self._values = arr
        self._index = {nm: i for i, nm in enumerate(names)}

    @classmethod
    def from_columns(cls, columns):
        """Build from a mapping ``name -> vector`` (insertion order kept)."""
        names = list(columns)
        data = np.column_stack([np.asarray(columns[nm], dtype=float) for nm in names])
        return cls(names, data)

    @property
    def column_names(self):
        return self._names

    @property
    def values(self):
        return self._values

    @property
    def n(self):
        return self._values.shape[0]

    def __len__(self):
        return self.n

    def __contains__(self, name):
        return name in self._index

    def __getitem__(self, name):
        return self.column(name)

    def __repr__(self):
        return f"Dataset(n={self.n}, columns={list(self._names)})"

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return self._names == other._names and np.array_equal(self._values, other._values)

    def column(self, name):
        try:
            return self._values[:, self._index[name]]
        except KeyError:
            raise UnknownColumn(name) from None

    def require(self, *names):
        """Raise `UnknownColumn` for the first name not present."""
        for nm in names:
            if nm not in self._index:
                raise UnknownColumn(nm)

    def with_columns(self, replacements):
        """Copy of the dataset with some columns' values replaced."""
        self.require(*replacements)
        values = np.array(self._values)
        for nm, col in replacements.items():
            values[:, self._index[nm]] = col
        return Dataset(self._names, values)

    def to_csv(self, sink=None):
        """Write as CSV with 17 significant digits (lossless for float64).

        Returns the text when `sink` is None, else writes to the text stream.
        """
        lines = [",".join(self._names)]
        lines.extend(",".join(f"{v:.17g}" for v in row) for row in self._values)
        text = "\n".join(lines) + "\n"
        if sink is None:
            return text
        sink.write(text)
        return None


def _parse_cell(token, row, col):
    cleaned = token.strip()
    if cleaned.lower() in _MISSING_TOKENS:
        raise MissingValue(f"missing value at row {row}, column {col}", row, col)
    try:
        value = float(cleaned)
    except ValueError:
        raise ParseError(
            f"cannot parse {token!r} as a number at row {row}, column {col}", row, col
        ) from None
    if math.isnan(value):
        raise MissingValue(f"missing value at row {row}, column {col}", row, col)
    if math.isinf(value):
        raise ParseError(f"non-finite value {token!r} at row {row}, column {col}", row, col)
    return value


def load_csv(source):
    """Read a Dataset from a CSV byte or text stream.

    The first record is the header. Row indices in error messages count
    data rows from 1; column indices count from 0.
    """
    raw = source.read()
    text = raw.decode("utf-8-sig") if isinstance(raw, bytes) else raw
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("empty CSV input") from None
    header = [h.strip() for h in header]
    seen = set()
    for j, h in enumerate(header):
        if not h:
            raise ParseError(f"empty column name at column {j}", 0, j)
        if h in seen:
            raise DuplicateHeader(f"duplicate column name {h!r} at column {j}", 0, j)
        seen.add(h)

    rows = []
    for i, record in enumerate(reader, start=1):
        if not record:
            continue
        if len(record) != len(header):
            raise ParseError(
                f"row {i} has {len(record)} fields, expected {len(header)}", i, None
            )
        rows.append([_parse_cell(tok, i, j) for j, tok in enumerate(record)])
    if not rows:
        raise ParseError("CSV has a header but no data rows")
    return Dataset(header, rows)


def read_csv(path):
    with open(path, "rb") as fh:
        return load_csv(fh)


def write_csv(dataset, path):
    with open(path, "w", newline="") as fh:
        dataset.to_csv(fh)


def column_summary(d, name):
    """Mean, unbiased variance and standard deviation of one column."""
    x = d.column(name)
    if d.n < 2:
        raise InsufficientRows("variance needs at least 2 rows")
    mean = float(x.mean())
    variance = float(x.var(ddof=1))
    return ColumnSummary(mean=mean, variance=variance, sd=math.sqrt(variance))
