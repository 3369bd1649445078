"""Finite metric spaces, set maps between them, and derived metrics."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping, Sequence

import numpy as np
from scipy.sparse.csgraph import connected_components

from .errors import (
    Asymmetric,
    BadMatrix,
    LabelMismatch,
    NonpositiveScale,
    NonzeroDiagonal,
    TooFewPoints,
    TriangleViolation,
    ZeroOffDiagonal,
)

#: relative tolerance for symmetry / triangle / morphism checks
TAU = 1e-9

Label = Hashable


def sorted_labels(items: Iterable[Label]) -> list:
    """Sort labels naturally, falling back to (type, repr) for mixed types."""
    items = list(items)
    try:
        return sorted(items)
    except TypeError:
        return sorted(items, key=lambda x: (type(x).__name__, repr(x)))


def _abs_tol(dist: np.ndarray, tol: float) -> float:
    scale = float(dist.max()) if dist.size else 0.0
    return tol * max(1.0, scale)


class FiniteMetricSpace:
    """A finite set of labelled points with a distance matrix.

    The matrix is copied and frozen on construction. Use :func:`validate_metric`
    to build a space from untrusted input; the constructor itself only checks
    shapes and label uniqueness.
    """

    __slots__ = ("labels", "dist", "_index")

    def __init__(self, dist, labels: Sequence[Label] | None = None):
        d = np.array(dist, dtype=float)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise BadMatrix(f"distance matrix must be square, got shape {d.shape}")
        n = d.shape[0]
        if labels is None:
            labels = tuple(range(n))
        labels = tuple(labels)
        if len(labels) != n:
            raise LabelMismatch(f"{len(labels)} labels for {n} points")
        index = {lab: i for i, lab in enumerate(labels)}
        if len(index) != n:
            raise LabelMismatch("labels must be unique")
        d.setflags(write=False)
        self.labels = labels
        self.dist = d
        self._index = index

    @property
    def n(self) -> int:
        return len(self.labels)

    def __len__(self) -> int:
        return len(self.labels)

    def index(self, label: Label) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise LabelMismatch(f"unknown label {label!r}") from None

    def d(self, a: Label, b: Label) -> float:
        return float(self.dist[self.index(a), self.index(b)])

    def subspace(self, labels: Iterable[Label]) -> "FiniteMetricSpace":
        """Restriction of the metric to ``labels`` (kept in the given order)."""
        labels = list(labels)
        idx = [self.index(lab) for lab in labels]
        return FiniteMetricSpace(self.dist[np.ix_(idx, idx)], labels)

    def relabel(self, mapping: Mapping[Label, Label]) -> "FiniteMetricSpace":
        return FiniteMetricSpace(self.dist, [mapping[lab] for lab in self.labels])

    def permuted(self, order: Sequence[int]) -> "FiniteMetricSpace":
        order = list(order)
        return FiniteMetricSpace(self.dist[np.ix_(order, order)], [self.labels[i] for i in order])

    def diameter(self) -> float:
        return float(self.dist.max()) if self.n else 0.0

    def allclose(self, other: "FiniteMetricSpace", tol: float = TAU) -> bool:
        """Same labels in the same order and entrywise equal within ``tol``."""
        if self.labels != other.labels:
            return False
        return bool(np.all(np.abs(self.dist - other.dist) <= _abs_tol(np.abs(self.dist), tol)))

    def __repr__(self) -> str:
        return f"FiniteMetricSpace(n={self.n}, labels={list(self.labels)!r})"


@dataclass(frozen=True)
class SetMap:
    """A total map between two finite label sets."""

    domain: tuple
    codomain: tuple
    images: tuple

    def __post_init__(self):
        object.__setattr__(self, "domain", tuple(self.domain))
        object.__setattr__(self, "codomain", tuple(self.codomain))
        object.__setattr__(self, "images", tuple(self.images))
        if len(self.images) != len(self.domain):
            raise LabelMismatch("every domain point needs exactly one image")
        cod = set(self.codomain)
        for y in self.images:
            if y not in cod:
                raise LabelMismatch(f"image {y!r} is not in the codomain")

    @classmethod
    def from_dict(cls, mapping: Mapping[Label, Label], domain=None, codomain=None) -> "SetMap":
        domain = tuple(mapping) if domain is None else tuple(domain)
        if codomain is None:
            codomain = tuple(dict.fromkeys(mapping[x] for x in domain))
        try:
            images = tuple(mapping[x] for x in domain)
        except KeyError as exc:
            raise LabelMismatch(f"map undefined on {exc.args[0]!r}") from None
        return cls(domain, codomain, images)

    @classmethod
    def identity(cls, labels: Sequence[Label]) -> "SetMap":
        return cls(tuple(labels), tuple(labels), tuple(labels))

    def as_dict(self) -> dict:
        return dict(zip(self.domain, self.images))

    def __call__(self, x: Label) -> Label:
        return self.as_dict()[x]

    def is_injective(self) -> bool:
        return len(set(self.images)) == len(self.images)

    def is_bijective(self) -> bool:
        return self.is_injective() and len(self.images) == len(self.codomain)


def compose(g: SetMap, f: SetMap) -> SetMap:
    """The composite ``g ∘ f`` (apply ``f`` first)."""
    if set(f.codomain) != set(g.domain):
        raise LabelMismatch("codomain of f differs from domain of g")
    gd = g.as_dict()
    return SetMap(f.domain, g.codomain, tuple(gd[y] for y in f.images))


class MorphismClass(enum.IntEnum):
    """Finest category a map belongs to; larger value = finer class."""

    NONE = 0
    GENERAL = 1
    MONIC = 2
    ISOMETRY = 3


def validate_metric(matrix, labels: Sequence[Label] | None = None, pseudo: bool = False,
                    tol: float = TAU) -> FiniteMetricSpace:
    """Check that ``matrix`` is a (pseudo)metric and wrap it.

    Raises the first violation found, scanning pairs ``(i, j)`` with ``i < j``
    in row-major order. Triangle violations are reported as ``(i, j, k)``
    with ``d(i, j) > d(i, k) + d(k, j)``, choosing the lexicographically least
    triple.
    """
    d = np.array(matrix, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise BadMatrix(f"distance matrix must be square, got shape {d.shape}")
    if not np.all(np.isfinite(d)):
        raise BadMatrix("distance matrix has non-finite entries")
    if np.any(d < 0):
        raise BadMatrix("distance matrix has negative entries")
    n = d.shape[0]
    atol = _abs_tol(d, tol)
    for i in range(n):
        if abs(d[i, i]) > atol:
            raise NonzeroDiagonal(i, d[i, i])
    bad = np.argwhere(np.triu(np.abs(d - d.T) > atol, 1))
    if len(bad):
        i, j = bad[0]
        raise Asymmetric(int(i), int(j), d[i, j], d[j, i])
    if not pseudo:
        zero = np.argwhere(np.triu(d <= 0.0, 1))
        if len(zero):
            i, j = zero[0]
            raise ZeroOffDiagonal(int(i), int(j))
    best = None
    for k in range(n):
        viol = d > d[:, [k]] + d[[k], :] + atol
        hits = np.argwhere(np.triu(viol, 1))
        if len(hits):
            cand = (int(hits[0][0]), int(hits[0][1]), k)
            if best is None or cand < best:
                best = cand
    if best is not None:
        raise TriangleViolation(*best)
    np.fill_diagonal(d, 0.0)
    d = (d + d.T) / 2.0
    return FiniteMetricSpace(d, labels)


def two_point_space(delta: float, labels=("p", "q")) -> FiniteMetricSpace:
    """The space Z(delta): two points at distance ``delta``."""
    return FiniteMetricSpace([[0.0, delta], [delta, 0.0]], labels)


def from_points(points, labels: Sequence[Label] | None = None) -> FiniteMetricSpace:
    """Euclidean metric on the rows of ``points``."""
    from scipy.spatial.distance import cdist

    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    return FiniteMetricSpace(cdist(pts, pts), labels)


def separation(X: FiniteMetricSpace) -> float:
    """Minimum distance between two distinct points."""
    if X.n < 2:
        raise TooFewPoints("separation needs at least two points")
    off = X.dist[~np.eye(X.n, dtype=bool)]
    return float(off.min())


def scale_metric(X: FiniteMetricSpace, lam: float) -> FiniteMetricSpace:
    if not lam > 0:
        raise NonpositiveScale(f"scale must be positive, got {lam!r}")
    return FiniteMetricSpace(lam * X.dist, X.labels)


def _floyd_warshall(w: np.ndarray) -> np.ndarray:
    d = w.copy()
    for k in range(d.shape[0]):
        np.minimum(d, d[:, [k]] + d[[k], :], out=d)
    return d


def path_metric(W, labels: Sequence[Label] | None = None) -> FiniteMetricSpace:
    """Shortest-path closure of a symmetric non-negative weight matrix.

    This is the largest pseudometric bounded above by ``W`` entrywise. Zero
    weights are genuine zero-length edges, so the result may be a pseudometric.
    """
    w = np.array(W, dtype=float)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise BadMatrix(f"weight matrix must be square, got shape {w.shape}")
    if np.any(w < 0) or np.any(np.isnan(w)):
        raise BadMatrix("weights must be non-negative")
    if np.any(np.diag(w) != 0):
        raise NonzeroDiagonal(int(np.flatnonzero(np.diag(w))[0]), float(np.diag(w)[np.diag(w) != 0][0]))
    if not np.array_equal(w, w.T):
        i, j = np.argwhere(w != w.T)[0]
        raise Asymmetric(int(i), int(j), w[i, j], w[j, i])
    return FiniteMetricSpace(_floyd_warshall(w), labels)


def components_at(dist: np.ndarray, r: float) -> np.ndarray:
    """Component id of each point in the graph with edges ``d <= r``."""
    n = dist.shape[0]
    if n == 0:
        return np.zeros(0, dtype=int)
    _, comp = connected_components(dist <= r, directed=False)
    return comp


def quotient_at_scale(X: FiniteMetricSpace, r: float) -> tuple[FiniteMetricSpace, SetMap]:
    """The space of ``~_r`` classes with the largest metric below the min-linkage weights.

    Returns the quotient space, whose labels are the sorted tuples of member
    labels, together with the projection sending each point to its class.
    """
    comp = components_at(X.dist, r)
    k = int(comp.max()) + 1 if X.n else 0
    members = [[X.labels[i] for i in np.flatnonzero(comp == c)] for c in range(k)]
    block_labels = [tuple(sorted_labels(m)) for m in members]
    first = {b[0]: c for c, b in enumerate(block_labels)}
    order = [first[lab] for lab in sorted_labels(first)]
    block_labels = [block_labels[c] for c in order]
    remap = {c: new for new, c in enumerate(order)}
    comp = np.array([remap[c] for c in comp], dtype=int)
    W = np.zeros((k, k))
    for a in range(k):
        ia = np.flatnonzero(comp == a)
        for b in range(a + 1, k):
            ib = np.flatnonzero(comp == b)
            W[a, b] = W[b, a] = X.dist[np.ix_(ia, ib)].min()
    Q = path_metric(W, block_labels)
    proj = SetMap(X.labels, tuple(block_labels), tuple(block_labels[comp[i]] for i in range(X.n)))
    return Q, proj


def classify_morphism(f: SetMap, X: FiniteMetricSpace, Y: FiniteMetricSpace,
                      tol: float = TAU) -> MorphismClass:
    """Finest class of ``f`` among isometry, monic, general; NONE if it expands a distance."""
    if set(f.domain) != set(X.labels) or len(f.domain) != X.n:
        raise LabelMismatch("map domain does not match the source space")
    if set(f.codomain) != set(Y.labels) or len(f.codomain) != Y.n:
        raise LabelMismatch("map codomain does not match the target space")
    fmap = f.as_dict()
    idx = np.array([Y.index(fmap[x]) for x in X.labels], dtype=int)
    dy = Y.dist[np.ix_(idx, idx)]
    atol = tol * max(1.0, X.diameter(), Y.diameter())
    if np.any(dy > X.dist + atol):
        return MorphismClass.NONE
    if f.is_bijective() and np.all(np.abs(dy - X.dist) <= atol):
        return MorphismClass.ISOMETRY
    if f.is_injective():
        return MorphismClass.MONIC
    return MorphismClass.GENERAL


def is_distance_nonincreasing(f: SetMap, X: FiniteMetricSpace, Y: FiniteMetricSpace) -> bool:
    return classify_morphism(f, X, Y) >= MorphismClass.GENERAL


# random instances ------------------------------------------------------------

def random_metric_space(rng: np.random.Generator, n: int, kind: str = "mixed",
                        labels: Sequence[Label] | None = None) -> FiniteMetricSpace:
    """A random strict metric space on ``n`` points.

    ``kind`` is ``"euclidean"`` (uniform points in the plane), ``"graph"``
    (shortest paths over random positive weights), ``"integer"`` (shortest
    paths over small integer weights, so ties are common), or ``"mixed"``
    which picks one of the three at random.
    """
    if kind == "mixed":
        kind = ("euclidean", "graph", "integer")[int(rng.integers(3))]
    if kind == "euclidean":
        X = from_points(rng.uniform(0.0, 10.0, size=(n, 2)), labels)
        if n >= 2 and separation(X) <= 0:
            return random_metric_space(rng, n, kind, labels)
        return X
    if kind == "graph":
        w = rng.uniform(0.5, 10.0, size=(n, n))
    elif kind == "integer":
        w = rng.integers(1, 6, size=(n, n)).astype(float)
    else:
        raise ValueError(f"unknown kind {kind!r}")
    w = np.triu(w, 1)
    w = w + w.T
    return path_metric(w, labels)
