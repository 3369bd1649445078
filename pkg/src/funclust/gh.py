"""Correspondences, distortion and Gromov-Hausdorff distance.

Convention: the distance is the infimum of the distortion over
correspondences, *without* the factor 1/2 of the textbook definition. Every
value here is therefore twice the usual Gromov-Hausdorff distance.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptySubset, NotACorrespondence, TooLarge
from .metric import FiniteMetricSpace
from .ultrametric import epsilon_metric

#: default cap on |X| + |Y| for the exhaustive search
EXACT_LIMIT = 10


class Correspondence:
    """A relation between the points of two spaces covering both sides."""

    __slots__ = ("pairs",)

    def __init__(self, pairs: Iterable[tuple]):
        self.pairs = tuple(dict.fromkeys((x, y) for x, y in pairs))

    def check(self, X: FiniteMetricSpace, Y: FiniteMetricSpace) -> None:
        xs = {x for x, _ in self.pairs}
        ys = {y for _, y in self.pairs}
        for x, y in self.pairs:
            X.index(x), Y.index(y)
        missing_x = [x for x in X.labels if x not in xs]
        if missing_x:
            raise NotACorrespondence(f"point {missing_x[0]!r} of the first space is uncovered")
        missing_y = [y for y in Y.labels if y not in ys]
        if missing_y:
            raise NotACorrespondence(f"point {missing_y[0]!r} of the second space is uncovered")

    @classmethod
    def graph(cls, mapping: dict) -> "Correspondence":
        return cls(mapping.items())

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def __repr__(self) -> str:
        return f"Correspondence({list(self.pairs)!r})"


def distortion_indices(dX: np.ndarray, dY: np.ndarray, ix: np.ndarray, iy: np.ndarray) -> float:
    """Distortion of the correspondence given as aligned index arrays."""
    if len(ix) == 0:
        return 0.0
    return float(np.abs(dX[np.ix_(ix, ix)] - dY[np.ix_(iy, iy)]).max())


def distortion(R: Correspondence, X: FiniteMetricSpace, Y: FiniteMetricSpace) -> float:
    """``max |d_X(x, x') - d_Y(y, y')|`` over pairs of pairs in ``R``."""
    R.check(X, Y)
    ix = np.array([X.index(x) for x, _ in R], dtype=int)
    iy = np.array([Y.index(y) for _, y in R], dtype=int)
    return distortion_indices(X.dist, Y.dist, ix, iy)


def _covering_clique(compat: list[int], n: int, m: int) -> list[int] | None:
    """Find pairwise-compatible pairs covering all rows and columns.

    Pairs are numbered ``p = i * m + a``. ``compat[p]`` is the bitset of pairs
    compatible with ``p``. Branches on the uncovered point with the fewest
    admissible pairs; every covering clique contains one of them, so the
    search is exhaustive.
    """
    row_mask = [sum(1 << (i * m + a) for a in range(m)) for i in range(n)]
    col_mask = [sum(1 << (i * m + a) for i in range(n)) for a in range(m)]
    all_pairs = (1 << (n * m)) - 1

    def search(chosen: list[int], allowed: int, cov_x: int, cov_y: int):
        best_mask, best_count = None, None
        for i in range(n):
            if not cov_x >> i & 1:
                cand = allowed & row_mask[i]
                c = bin(cand).count("1")
                if best_count is None or c < best_count:
                    best_mask, best_count = cand, c
        for a in range(m):
            if not cov_y >> a & 1:
                cand = allowed & col_mask[a]
                c = bin(cand).count("1")
                if best_count is None or c < best_count:
                    best_mask, best_count = cand, c
        if best_mask is None:
            return chosen
        while best_mask:
            low = best_mask & -best_mask
            p = low.bit_length() - 1
            best_mask ^= low
            found = search(chosen + [p], allowed & compat[p], cov_x | 1 << (p // m), cov_y | 1 << (p % m))
            if found is not None:
                return found
        return None

    return search([], all_pairs, 0, 0)


@dataclass(frozen=True)
class GHResult:
    value: float
    correspondence: Correspondence


def gh_exact(X: FiniteMetricSpace, Y: FiniteMetricSpace, limit: int = EXACT_LIMIT,
             witness: bool = False):
    """Exact minimum distortion over all correspondences.

    The optimum is one of the finitely many values ``|d_X(x,x') - d_Y(y,y')|``;
    a binary search over them asks, for each threshold, whether a covering set
    of pairwise compatible pairs exists. Raises ``TooLarge`` when
    ``|X| + |Y| > limit``; use :func:`gh_lower_bound` there.
    """
    n, m = X.n, Y.n
    if n == 0 or m == 0:
        raise EmptySubset("Gromov-Hausdorff distance needs nonempty spaces")
    if n + m > limit:
        raise TooLarge(f"|X|+|Y| = {n + m} exceeds the exhaustive limit {limit}; use gh_lower_bound")
    gamma = np.abs(X.dist[:, None, :, None] - Y.dist[None, :, None, :]).reshape(n * m, n * m)
    values = np.unique(gamma)
    lo, hi = 0, len(values) - 1
    best = None
    while lo <= hi:
        mid = (lo + hi) // 2
        ok = gamma <= values[mid]
        compat = [sum(1 << int(q) for q in np.flatnonzero(row)) for row in ok]
        found = _covering_clique(compat, n, m)
        if found is not None:
            best, hi = (values[mid], found), mid - 1
        else:
            lo = mid + 1
    value, pairs = best
    if not witness:
        return float(value)
    R = Correspondence((X.labels[p // m], Y.labels[p % m]) for p in pairs)
    return GHResult(float(value), R)


def gh_lower_bound(X: FiniteMetricSpace, Y: FiniteMetricSpace) -> float:
    """Cheap lower bound on :func:`gh_exact`.

    Maximum of the diameter gap and the distance-distribution bound: paired
    points ``(x, y)`` must have their distance rows within Hausdorff distance
    ``dis(R)`` of each other as subsets of the line.
    """
    if X.n == 0 or Y.n == 0:
        raise EmptySubset("Gromov-Hausdorff distance needs nonempty spaces")
    diam_gap = abs(X.diameter() - Y.diameter())
    rx = np.sort(X.dist, axis=1)
    ry = np.sort(Y.dist, axis=1)
    H = np.empty((X.n, Y.n))
    for i in range(X.n):
        for a in range(Y.n):
            H[i, a] = max(_directed_1d(rx[i], ry[a]), _directed_1d(ry[a], rx[i]))
    rows = max(H.min(axis=1).max(), H.min(axis=0).max())
    return float(max(diam_gap, rows))


def _directed_1d(a: np.ndarray, b: np.ndarray) -> float:
    """``max_{s in a} min_{t in b} |s - t|`` for sorted 1-d arrays."""
    pos = np.searchsorted(b, a)
    left = b[np.clip(pos - 1, 0, len(b) - 1)]
    right = b[np.clip(pos, 0, len(b) - 1)]
    return float(np.minimum(np.abs(a - left), np.abs(a - right)).max())


# ambient distances -------------------------------------------------------------

def _indices(Z: FiniteMetricSpace, subset: Sequence) -> np.ndarray:
    idx = np.array([Z.index(s) for s in subset], dtype=int)
    if len(idx) == 0:
        raise EmptySubset("subset is empty")
    return idx


def hausdorff(Z: FiniteMetricSpace, A: Sequence, B: Sequence) -> float:
    """Hausdorff distance in ``Z`` between two subsets given by labels."""
    block = Z.dist[np.ix_(_indices(Z, A), _indices(Z, B))]
    return float(max(block.min(axis=1).max(), block.min(axis=0).max()))


def covering_radius(Z: FiniteMetricSpace, X: Sequence) -> float:
    """``R(X)``: Hausdorff distance from ``X`` to the whole of ``Z``."""
    return hausdorff(Z, X, Z.labels)


def set_distance(Z: FiniteMetricSpace, Z1: Sequence, Z2: Sequence) -> float:
    """Smallest distance between a point of ``Z1`` and a point of ``Z2``."""
    return float(Z.dist[np.ix_(_indices(Z, Z1), _indices(Z, Z2))].min())


@dataclass(frozen=True)
class InequalityCheck:
    lhs: float
    rhs: float

    @property
    def ok(self) -> bool:
        return self.lhs >= self.rhs

    def __bool__(self) -> bool:
        return self.ok


def check_gh_contraction(X: FiniteMetricSpace, Y: FiniteMetricSpace, limit: int = EXACT_LIMIT) -> InequalityCheck:
    """Passing to minimax ultrametrics never increases the GH distance.

    ``lhs`` is the distance between the metrics, ``rhs`` between their
    ultrametrics; both exact.
    """
    lhs = gh_exact(X, Y, limit)
    rhs = gh_exact(epsilon_metric(X), epsilon_metric(Y), limit)
    return InequalityCheck(lhs, rhs)
