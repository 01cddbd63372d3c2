"""Presence-absence matrices: parsing, writing and all-pairs testing."""

from __future__ import annotations

import csv
import io
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from itertools import combinations
from typing import IO, Iterable, Sequence

import numpy as np

from .engines import EngineConfig, run_test
from .fdr import qvalue

__all__ = [
    "MatrixFormatError",
    "PresenceAbsenceMatrix",
    "PairReport",
    "parse_matrix",
    "read_matrix",
    "write_matrix",
    "all_pairs_test",
    "write_reports",
    "format_real",
]

log = logging.getLogger(__name__)


class MatrixFormatError(ValueError):
    """Malformed matrix input; the message names the offending line and column."""


@dataclass(frozen=True)
class PresenceAbsenceMatrix:
    """Rows are species, columns are biogeographic units."""

    row_labels: tuple[str, ...]
    column_labels: tuple[str, ...]
    cells: np.ndarray

    def __post_init__(self) -> None:
        n, m = self.cells.shape
        if len(self.row_labels) != n or len(self.column_labels) != m:
            raise MatrixFormatError("label counts do not match the cell matrix")
        for kind, labels in (("row", self.row_labels), ("column", self.column_labels)):
            seen = set()
            for lab in labels:
                if lab in seen:
                    raise MatrixFormatError(f"duplicate {kind} label {lab!r}")
                seen.add(lab)
        if np.any((self.cells != 0) & (self.cells != 1)):
            raise MatrixFormatError("cells must be 0 or 1")

    @property
    def shape(self) -> tuple[int, int]:
        return self.cells.shape

    def transpose(self) -> "PresenceAbsenceMatrix":
        return PresenceAbsenceMatrix(self.column_labels, self.row_labels, self.cells.T.copy())


def format_real(x: float) -> str:
    """17 significant digits, enough to round-trip a double."""
    return format(float(x), ".17g")


def _sniff_delimiter(text: str) -> str:
    first = next((ln for ln in text.splitlines() if ln.strip()), "")
    return "\t" if "\t" in first else ","


def _is_binary_token(tok: str) -> bool:
    return tok.strip() in ("0", "1")


def parse_matrix(text: str, *, delimiter: str | None = None, header: bool | None = None,
                 row_labels: bool | None = None) -> PresenceAbsenceMatrix:
    """Parse delimited 0/1 text.

    ``header`` and ``row_labels`` default to auto-detection: a first row (or
    first column) holding anything other than 0/1 is taken as labels. Pass
    them explicitly when labels are themselves 0 or 1.
    """
    delim = delimiter or _sniff_delimiter(text)
    rows = [(i + 1, r) for i, r in enumerate(csv.reader(io.StringIO(text), delimiter=delim))
            if any(c.strip() for c in r)]
    if not rows:
        raise MatrixFormatError("empty matrix")
    if row_labels is None:
        body = rows[1:] if len(rows) > 1 else rows
        row_labels = any(not _is_binary_token(r[0]) for _, r in body)
    if header is None:
        first = rows[0][1][1:] if row_labels else rows[0][1]
        header = any(not _is_binary_token(c) for c in first)
    col_names: list[str] | None = None
    if header:
        _, hdr = rows[0]
        col_names = [c.strip() for c in (hdr[1:] if row_labels else hdr)]
        rows = rows[1:]
    if not rows:
        raise MatrixFormatError("matrix has a header but no data rows")
    width = None
    labels: list[str] = []
    data: list[list[int]] = []
    for lineno, r in rows:
        cells = r[1:] if row_labels else r
        if width is None:
            width = len(cells)
        elif len(cells) != width:
            raise MatrixFormatError(f"line {lineno}: expected {width} cells, found {len(cells)} (ragged rows)")
        vals = []
        for j, tok in enumerate(cells):
            if not _is_binary_token(tok):
                col = j + (2 if row_labels else 1)
                raise MatrixFormatError(f"line {lineno}, column {col}: non-binary cell {tok.strip()!r}")
            vals.append(int(tok))
        data.append(vals)
        labels.append(r[0].strip() if row_labels else f"s{len(labels) + 1}")
    if width == 0:
        raise MatrixFormatError("matrix has no unit columns")
    if col_names is None:
        col_names = [f"u{j + 1}" for j in range(width)]
    elif len(col_names) != width:
        raise MatrixFormatError(f"header names {len(col_names)} columns but rows have {width}")
    return PresenceAbsenceMatrix(tuple(labels), tuple(col_names), np.array(data, dtype=np.uint8))


def read_matrix(path: str | os.PathLike, **options) -> PresenceAbsenceMatrix:
    with open(path, newline="") as fh:
        return parse_matrix(fh.read(), **options)


def write_matrix(mat: PresenceAbsenceMatrix, out: IO[str], delimiter: str = ",") -> None:
    """Write with a header row and a label column."""
    w = csv.writer(out, delimiter=delimiter, lineterminator="\n")
    w.writerow(["species", *mat.column_labels])
    for lab, row in zip(mat.row_labels, mat.cells):
        w.writerow([lab, *(int(v) for v in row)])


@dataclass(frozen=True)
class PairReport:
    label_i: str
    label_j: str
    coefficient: float
    expectation: float
    centered: float
    p_value: float
    q_value: float
    engine: str


REPORT_COLUMNS = tuple(f.name for f in fields(PairReport))


def _pair_chunk(cells: np.ndarray, pairs: Sequence[tuple[int, int]], labels: Sequence[str],
                cfg: EngineConfig) -> list:
    out = []
    for i, j in pairs:
        try:
            res = run_test(cells[i], cells[j], cfg, stream=(i, j))
        except Exception as exc:  # attach the pair, keep the exception type
            raise type(exc)(f"pair ({labels[i]}, {labels[j]}): {exc}") from exc
        out.append((res.coefficient, res.expectation, res.centered, res.p_value))
    return out


def all_pairs_test(mat: PresenceAbsenceMatrix, cfg: EngineConfig | None = None, *,
                   workers: int = 1, lambda_: float = 0.5, smoother: bool = False) -> list[PairReport]:
    """Test every unordered pair of rows, ``i < j`` in row order, and attach q-values.

    Output is identical for any ``workers``: the bootstrap draws from a
    substream keyed by ``(i, j)`` and q-values are computed after all
    p-values are in.
    """
    cfg = cfg or EngineConfig()
    n = mat.shape[0]
    if n < 2:
        raise MatrixFormatError("need at least two rows to form a pair")
    cells = mat.cells
    flat = [lab for lab, row in zip(mat.row_labels, cells) if row.all() or not row.any()]
    if flat:
        log.warning("rows present everywhere or nowhere get p = 1 in every pair: %s", ", ".join(flat))
    pairs = list(combinations(range(n), 2))
    labels = mat.row_labels
    if workers <= 1 or len(pairs) < 2 * workers:
        stats = _pair_chunk(cells, pairs, labels, cfg)
    else:
        size = -(-len(pairs) // (4 * workers))
        chunks = [pairs[k:k + size] for k in range(0, len(pairs), size)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = pool.map(_pair_chunk, [cells] * len(chunks), chunks,
                             [labels] * len(chunks), [cfg] * len(chunks))
            stats = [row for part in parts for row in part]
    q = qvalue([s[3] for s in stats], lambda_=lambda_, smoother=smoother).q_values
    return [PairReport(labels[i], labels[j], *s, float(qv), cfg.engine)
            for (i, j), s, qv in zip(pairs, stats, q)]


def write_reports(reports: Iterable[PairReport], out: IO[str], delimiter: str = ",") -> None:
    w = csv.writer(out, delimiter=delimiter, lineterminator="\n")
    w.writerow(REPORT_COLUMNS)
    for r in reports:
        w.writerow([r.label_i, r.label_j, format_real(r.coefficient), format_real(r.expectation),
                    format_real(r.centered), format_real(r.p_value), format_real(r.q_value), r.engine])
