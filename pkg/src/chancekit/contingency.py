"""Contingency tables: construction, validation, margins, and transforms.

Orientation is fixed for the whole package: rows index predicted labels and
columns index real classes.  Counts are stored as immutable 64-bit integers;
probabilities are always derived on demand and never stored as the source of
truth.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import DataError, UsageError

__all__ = [
    "ContingencyTable",
    "NormalizedTable",
    "Margins",
    "CostModel",
    "TRANSFORM_KINDS",
    "from_counts",
    "from_pairs",
    "normalize",
    "margins",
    "dichotomize",
    "transform",
    "expectation_delta",
    "repair_zero_margins",
    "require_positive_margins",
    "parse_table_csv",
    "load_table_csv",
    "parse_pairs",
    "load_pairs",
]

TRANSFORM_KINDS = ("inverse", "dual", "perverse_rows", "perverse_cols")


def _validated_counts(counts) -> np.ndarray:
    arr = np.asarray(counts)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DataError(f"counts must form a square matrix, got shape {arr.shape}")
    if arr.shape[0] < 2:
        raise DataError("a contingency table needs at least 2 labels")
    if not np.issubdtype(arr.dtype, np.integer):
        as_float = np.asarray(arr, dtype=float)
        if not np.all(np.isfinite(as_float)):
            raise DataError("counts must be finite")
        rounded = np.rint(as_float)
        if not np.array_equal(as_float, rounded):
            raise DataError("counts must be whole numbers")
        arr = rounded
    out = arr.astype(np.int64)
    if (out < 0).any():
        raise DataError("counts must be non-negative")
    return out


@dataclass(frozen=True, eq=False)
class ContingencyTable:
    """K x K integer counts plus one shared ordered label sequence.

    Row i holds everything predicted as labels[i]; column j holds everything
    that really belongs to labels[j].
    """

    counts: np.ndarray
    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        arr = _validated_counts(self.counts)
        labels = tuple(str(l) for l in self.labels)
        if len(labels) != arr.shape[0]:
            raise DataError(
                f"got {len(labels)} labels for a {arr.shape[0]}x{arr.shape[0]} table"
            )
        if len(set(labels)) != len(labels):
            raise DataError("labels must be distinct")
        arr.setflags(write=False)
        object.__setattr__(self, "counts", arr)
        object.__setattr__(self, "labels", labels)

    @property
    def k(self) -> int:
        return self.counts.shape[0]

    @property
    def n(self) -> int:
        return int(self.counts.sum())

    @property
    def row_totals(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    @property
    def col_totals(self) -> np.ndarray:
        return self.counts.sum(axis=0)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ContingencyTable):
            return NotImplemented
        return self.labels == other.labels and np.array_equal(self.counts, other.counts)

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"ContingencyTable(labels={self.labels}, counts={self.counts.tolist()})"


@dataclass(frozen=True, eq=False)
class NormalizedTable:
    """Joint probabilities derived from a count table (cells sum to 1)."""

    probs: np.ndarray
    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        probs = np.asarray(self.probs, dtype=float)
        if probs.ndim != 2 or probs.shape[0] != probs.shape[1]:
            raise DataError("probabilities must form a square matrix")
        if (probs < 0).any() or (probs > 1).any():
            raise DataError("cell probabilities must lie in [0, 1]")
        if abs(float(probs.sum()) - 1.0) > 1e-9:
            raise DataError("cell probabilities must sum to 1")
        probs = probs.copy()
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "labels", tuple(str(l) for l in self.labels))

    @property
    def k(self) -> int:
        return self.probs.shape[0]


@dataclass(frozen=True, eq=False)
class Margins:
    """Column-sum prevalences and row-sum biases of a table, as fractions."""

    prevalence: np.ndarray
    bias: np.ndarray
    labels: tuple[str, ...]


@dataclass(frozen=True)
class CostModel:
    """Class and value skew weights for skew-sensitive accuracy trade-offs.

    cs weighs the class ratio, cv the value ratio; the combined skew
    c = cv * cs is exact by construction.
    """

    cs: float
    cv: float = 1.0

    def __post_init__(self) -> None:
        for name, v in (("cs", self.cs), ("cv", self.cv)):
            if not (float(v) > 0.0) or not np.isfinite(v):
                raise UsageError(f"{name} must be a positive finite number, got {v}")

    @property
    def c(self) -> float:
        return self.cv * self.cs

    @classmethod
    def from_table(cls, t: ContingencyTable, cv: float = 1.0) -> "CostModel":
        if t.k != 2:
            raise UsageError("table skew is defined for 2x2 tables only")
        m = margins(t)
        rp, rn = float(m.prevalence[0]), float(m.prevalence[1])
        if rp == 0.0:
            raise DataError("real-positive margin is zero, class skew undefined")
        return cls(cs=rn / rp, cv=cv)


def from_counts(counts, labels: Sequence[str] | None = None) -> ContingencyTable:
    """Build a table from a square count matrix, inventing labels if needed."""
    arr = _validated_counts(counts)
    if labels is None:
        labels = tuple(str(i) for i in range(arr.shape[0]))
    return ContingencyTable(arr, tuple(labels))


def from_pairs(
    pairs: Iterable[tuple[object, object]],
    labels: Sequence[str] | None = None,
) -> ContingencyTable:
    """Tally (predicted, actual) pairs into a table.

    The label set is the union of both columns, sorted lexicographically;
    pass `labels` to force a specific order (it may include extra labels
    that never occur, which then produce zero margins).
    """
    pair_list = [(str(p), str(a)) for p, a in pairs]
    if not pair_list:
        raise DataError("no pairs to tally")
    seen = sorted({tok for pair in pair_list for tok in pair})
    if labels is None:
        ordered = seen
    else:
        ordered = [str(l) for l in labels]
        missing = [tok for tok in seen if tok not in set(ordered)]
        if missing:
            raise DataError(f"labels {missing} occur in the data but not in the label override")
    if len(ordered) < 2:
        raise DataError("need at least 2 distinct labels")
    index = {lbl: i for i, lbl in enumerate(ordered)}
    k = len(ordered)
    counts = np.zeros((k, k), dtype=np.int64)
    for predicted, actual in pair_list:
        counts[index[predicted], index[actual]] += 1
    return ContingencyTable(counts, tuple(ordered))


def normalize(t: ContingencyTable) -> NormalizedTable:
    """Divide counts by the grand total."""
    n = t.n
    if n == 0:
        raise DataError("cannot normalize an all-zero table")
    return NormalizedTable(t.counts / n, t.labels)


def margins(t: ContingencyTable) -> Margins:
    """Prevalence (column sums / n) and bias (row sums / n)."""
    n = t.n
    if n == 0:
        raise DataError("cannot take margins of an all-zero table")
    prevalence = t.col_totals / n
    bias = t.row_totals / n
    prevalence.setflags(write=False)
    bias.setflags(write=False)
    return Margins(prevalence=prevalence, bias=bias, labels=t.labels)


def require_positive_margins(t: ContingencyTable) -> None:
    """Raise DataError naming the first zero margin, if any."""
    rows = t.row_totals
    cols = t.col_totals
    for i in range(t.k):
        if cols[i] == 0:
            raise DataError(
                f"zero real-class margin (column) for label '{t.labels[i]}'"
            )
    for i in range(t.k):
        if rows[i] == 0:
            raise DataError(
                f"zero predicted margin (row) for label '{t.labels[i]}'"
            )


def dichotomize(t: ContingencyTable, label_index: int) -> ContingencyTable:
    """Collapse to 2x2 with the chosen label as positive, everything else merged."""
    k = t.k
    if not (0 <= label_index < k):
        raise UsageError(f"label index {label_index} out of range for a {k}x{k} table")
    c = t.counts
    i = label_index
    tp = int(c[i, i])
    fp = int(c[i, :].sum() - c[i, i])
    fn = int(c[:, i].sum() - c[i, i])
    tn = int(c.sum() - tp - fp - fn)
    positive = t.labels[i]
    rest = "rest"
    while rest == positive:
        rest = "_" + rest
    return ContingencyTable(
        np.array([[tp, fp], [fn, tn]], dtype=np.int64), (positive, rest)
    )


def _validated_permutation(perm: Sequence[int], k: int) -> np.ndarray:
    arr = np.asarray(perm, dtype=np.int64)
    if sorted(arr.tolist()) != list(range(k)):
        raise UsageError(f"permutation must reorder exactly the indices 0..{k - 1}")
    return arr


def transform(
    t: ContingencyTable,
    kind: str,
    permutation: Sequence[int] | None = None,
) -> ContingencyTable:
    """Relabeling transforms of a table.

    inverse        reverse both label orders (swap positive and negative roles)
    dual           transpose (swap the prediction and real-class roles)
    perverse_rows  reverse the row order only (relabel the predictions)
    perverse_cols  reverse the column order only (relabel the real classes)

    For K > 2 the default reversal is just one of the K!-1 nontrivial
    relabelings; pass `permutation` to pick another.  Labels are kept as-is:
    a transform re-routes counts between the same label slots.
    """
    if kind not in TRANSFORM_KINDS:
        raise UsageError(f"unknown transform kind '{kind}'")
    if kind == "dual":
        if permutation is not None:
            raise UsageError("dual takes no permutation")
        return ContingencyTable(t.counts.T.copy(), t.labels)
    perm = (
        np.arange(t.k - 1, -1, -1)
        if permutation is None
        else _validated_permutation(permutation, t.k)
    )
    c = t.counts
    if kind == "inverse":
        new = c[np.ix_(perm, perm)]
    elif kind == "perverse_rows":
        new = c[perm, :]
    else:
        new = c[:, perm]
    return ContingencyTable(new.copy(), t.labels)


def expectation_delta(nt: NormalizedTable) -> tuple[np.ndarray, np.ndarray, float]:
    """Expected joint probabilities under margin independence, deviations, and
    the determinant of the joint matrix.

    Returns (expected, delta, det).  expected[i, j] = bias[i] * prevalence[j];
    delta rows and columns each sum to zero.  For a 2x2 the determinant equals
    delta at the true-positive cell.
    """
    probs = nt.probs
    bias = probs.sum(axis=1)
    prevalence = probs.sum(axis=0)
    expected = np.outer(bias, prevalence)
    delta = probs - expected
    if nt.k == 2:
        det = float(probs[0, 0] * probs[1, 1] - probs[0, 1] * probs[1, 0])
    else:
        det = float(np.linalg.det(probs))
    return expected, delta, det


def repair_zero_margins(t: ContingencyTable) -> ContingencyTable:
    """Return a table whose margins are all positive.

    A zero row i paired with a zero column i gets a 1 at cell (i, i).  Any
    remaining unpaired zero row (column) gets a 1 in the lowest-index column
    (row) that already has a positive margin.  Tables with all margins
    positive come back unchanged (same object).
    """
    rows = t.row_totals
    cols = t.col_totals
    if (rows > 0).all() and (cols > 0).all():
        return t
    c = t.counts.copy()
    for i in range(t.k):
        if rows[i] == 0 and cols[i] == 0:
            c[i, i] = 1
    row_sum = c.sum(axis=1)
    col_sum = c.sum(axis=0)
    for i in range(t.k):
        if row_sum[i] == 0:
            j = int(np.argmax(col_sum > 0))
            c[i, j] += 1
            row_sum = c.sum(axis=1)
            col_sum = c.sum(axis=0)
    for j in range(t.k):
        if col_sum[j] == 0:
            i = int(np.argmax(row_sum > 0))
            c[i, j] += 1
            row_sum = c.sum(axis=1)
            col_sum = c.sum(axis=0)
    return ContingencyTable(c, t.labels)


# --- file formats ---------------------------------------------------------

_PRED_HEADER_WORDS = {"predicted", "prediction", "pred", "system", "output"}
_REAL_HEADER_WORDS = {"actual", "real", "gold", "true", "class", "label", "reference"}


def _is_count(token: str) -> bool:
    token = token.strip()
    if not token:
        return False
    try:
        float(token)
    except ValueError:
        return False
    return True


def _sniff_delimiter(text: str) -> str:
    sample = text[:4096]
    lines = sample.splitlines()
    if not lines:
        raise DataError("empty input")
    try:
        return csv.Sniffer().sniff(sample, delimiters=",;\t").delimiter
    except csv.Error:
        return "\t" if "\t" in lines[0] else ","


def _read_rows(text: str) -> list[list[str]]:
    delim = _sniff_delimiter(text)
    rows = []
    for raw in csv.reader(io.StringIO(text), delimiter=delim):
        cells = [c.strip() for c in raw]
        if any(cells):
            rows.append(cells)
    return rows


def parse_table_csv(text: str, labels: Sequence[str] | None = None) -> ContingencyTable:
    """Parse a K x K count matrix, with optional header row and label column.

    Header and label column are auto-detected from non-numeric leading cells.
    When both row and column labels are present they must name the same set;
    columns are reordered to match the row order.
    """
    rows = _read_rows(text)
    if not rows:
        raise DataError("empty table file")

    def to_matrix(data: list[list[str]], where: str) -> np.ndarray:
        k = len(data)
        out = np.zeros((k, len(data[0])), dtype=np.int64)
        for i, row in enumerate(data):
            if len(row) != len(data[0]):
                raise DataError(f"ragged table row at {where} line {i + 1}")
            for j, cell in enumerate(row):
                if not _is_count(cell):
                    raise DataError(f"non-numeric count '{cell}' at {where} line {i + 1}")
                out[i, j] = round(float(cell))
        return out

    if _is_count(rows[0][0]):
        matrix = to_matrix(rows, "data")
        return from_counts(matrix, labels)

    header = rows[0]
    body = rows[1:]
    if not body:
        raise DataError("table file has a header but no data rows")
    if not _is_count(body[0][0]):
        row_labels = [r[0] for r in body]
        data = [r[1:] for r in body]
        col_labels = header[1:] if len(header) == len(data[0]) + 1 else header
    else:
        row_labels = []
        data = body
        col_labels = header
    matrix = to_matrix(data, "data")
    if matrix.shape[0] != matrix.shape[1]:
        raise DataError(f"table is {matrix.shape[0]}x{matrix.shape[1]}, expected square")
    if row_labels:
        if col_labels and sorted(col_labels) != sorted(row_labels):
            raise DataError("row and column labels name different sets")
        if col_labels and list(col_labels) != list(row_labels):
            order = [list(col_labels).index(lbl) for lbl in row_labels]
            matrix = matrix[:, order]
        parsed = list(row_labels)
    else:
        if len(col_labels) != matrix.shape[1]:
            raise DataError("header width does not match the data width")
        parsed = list(col_labels)
    if labels is not None:
        forced = [str(l) for l in labels]
        if sorted(forced) != sorted(parsed):
            raise DataError("label override does not match the labels in the file")
        order = [parsed.index(lbl) for lbl in forced]
        matrix = matrix[np.ix_(order, order)]
        parsed = forced
    return ContingencyTable(matrix, tuple(parsed))


def parse_pairs(text: str, labels: Sequence[str] | None = None) -> ContingencyTable:
    """Parse a two-column (predicted, actual) file into a table.

    Comma or tab delimited; a first row like "predicted,actual" is treated
    as a header, anything else as data.
    """
    rows = _read_rows(text)
    if not rows:
        raise DataError("empty pairs file")
    start = 0
    first = rows[0]
    if (
        len(first) >= 2
        and first[0].lower() in _PRED_HEADER_WORDS
        and first[1].lower() in _REAL_HEADER_WORDS
    ):
        start = 1
    pairs = []
    for i, row in enumerate(rows[start:], start=start + 1):
        if len(row) != 2:
            raise DataError(f"expected 2 columns at pairs line {i}, got {len(row)}")
        pairs.append((row[0], row[1]))
    return from_pairs(pairs, labels)


def load_table_csv(path: str | Path, labels: Sequence[str] | None = None) -> ContingencyTable:
    return parse_table_csv(Path(path).read_text(), labels)


def load_pairs(path: str | Path, labels: Sequence[str] | None = None) -> ContingencyTable:
    return parse_pairs(Path(path).read_text(), labels)
