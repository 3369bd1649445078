"""Reading and writing metric spaces as CSV."""

from __future__ import annotations

import csv
import io
from pathlib import Path

import numpy as np

from .errors import BadMatrix
from .metric import FiniteMetricSpace, from_points, validate_metric
from .persistence import fmt_num


def _is_number(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


def parse_metric_csv(text: str, pseudo: bool = False) -> FiniteMetricSpace:
    """Parse a distance matrix or a point cloud.

    A header row of labels marks a distance matrix; the following rows are the
    full matrix or its lower triangle including the diagonal. A file of
    numbers only is a point cloud, one point per row, with the Euclidean metric
    and labels ``0, 1, ...``.
    """
    rows = [[c.strip() for c in r] for r in csv.reader(io.StringIO(text)) if any(c.strip() for c in r)]
    if not rows:
        raise BadMatrix("empty input")
    if all(_is_number(c) for c in rows[0]):
        try:
            pts = np.array([[float(c) for c in r] for r in rows])
        except ValueError:
            raise BadMatrix("point rows must have equal length and be numeric") from None
        return from_points(pts)
    labels = rows[0]
    n = len(labels)
    body = rows[1:]
    if len(body) != n:
        raise BadMatrix(f"{n} labels but {len(body)} matrix rows")
    M = np.zeros((n, n))
    lower = all(len(r) == i + 1 for i, r in enumerate(body))
    for i, r in enumerate(body):
        if not lower and len(r) != n:
            raise BadMatrix(f"row {i} has {len(r)} entries, expected {n} (full) or {i + 1} (lower)")
        try:
            vals = [float(c) for c in r]
        except ValueError:
            raise BadMatrix(f"non-numeric entry in row {i}") from None
        M[i, : len(vals)] = vals
    if lower:
        M = np.tril(M) + np.tril(M, -1).T
    return validate_metric(M, labels, pseudo=pseudo)


def read_metric_csv(path: str | Path, pseudo: bool = False) -> FiniteMetricSpace:
    return parse_metric_csv(Path(path).read_text(), pseudo=pseudo)


def read_points_csv(path: str | Path) -> np.ndarray:
    rows = [r for r in csv.reader(io.StringIO(Path(path).read_text())) if any(c.strip() for c in r)]
    try:
        return np.array([[float(c) for c in r] for r in rows])
    except ValueError:
        raise BadMatrix("point cloud must be numeric, one point per row") from None


def metric_to_csv(X: FiniteMetricSpace) -> str:
    """Full matrix with a label header, numbers with 12 significant digits."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([str(x) for x in X.labels])
    for row in X.dist:
        w.writerow([fmt_num(v) for v in row])
    return buf.getvalue()
