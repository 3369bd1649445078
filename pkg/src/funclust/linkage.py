"""Single-linkage dendrograms and multi-merge agglomerative clustering."""

from __future__ import annotations

import enum

import numpy as np
from scipy.cluster.hierarchy import DisjointSet
from scipy.sparse.csgraph import connected_components

from .errors import EmptySpace
from .metric import FiniteMetricSpace
from .persistence import TAU_H, Dendrogram, Partition, PersistentSet


class LinkageRule(str, enum.Enum):
    SINGLE = "single"
    COMPLETE = "complete"
    AVERAGE = "average"


def rgen(X: FiniteMetricSpace) -> Dendrogram:
    """Single-linkage dendrogram: ``theta(r)`` is the partition into ``~_r`` classes.

    Two points are ``~_r`` related when a chain of points joins them with every
    step at most ``r``. Edges are added in order of length (Kruskal); each union
    is a merge event and events within ``TAU_H`` share one breakpoint.
    """
    if X.n == 0:
        raise EmptySpace("cannot cluster an empty space")
    iu, ju = np.triu_indices(X.n, 1)
    w = X.dist[iu, ju]
    order = np.argsort(w, kind="stable")
    ds = DisjointSet(range(X.n))
    levels = []
    for e in order:
        i, j = int(iu[e]), int(ju[e])
        if ds.merge(i, j):
            levels.append((float(w[e]), _snapshot(X, ds)))
            if ds.n_subsets == 1:
                break
    P = PersistentSet.from_levels(X.labels, levels)
    return Dendrogram(P.ground, P.breakpoints, P.partitions)


def _snapshot(X: FiniteMetricSpace, ds: DisjointSet) -> Partition:
    return Partition(tuple(tuple(X.labels[i] for i in s) for s in ds.subsets()))


def linkage_matrix(X: FiniteMetricSpace, blocks: list[np.ndarray], rule: LinkageRule) -> np.ndarray:
    """Linkage value between every pair of blocks, computed from raw distances."""
    k = len(blocks)
    member = np.zeros((X.n, k))
    for b, idx in enumerate(blocks):
        member[idx, b] = 1.0
    if rule is LinkageRule.AVERAGE:
        sizes = member.sum(axis=0)
        return member.T @ X.dist @ member / np.outer(sizes, sizes)
    reduce = np.min if rule is LinkageRule.SINGLE else np.max
    cols = np.stack([reduce(X.dist[:, idx], axis=1) for idx in blocks], axis=1)
    return np.stack([reduce(cols[idx], axis=0) for idx in blocks], axis=0)


def agglomerate(X: FiniteMetricSpace, rule: LinkageRule | str = LinkageRule.SINGLE) -> Dendrogram:
    """Agglomerative clustering where every tie merges at once.

    Each round takes ``r = min l(B, B')`` over distinct current blocks and
    merges blocks joined by a chain of block pairs with ``l <= r`` (up to
    ``TAU_H``). The resulting partition holds from ``r`` until the next round.
    """
    rule = LinkageRule(rule)
    if X.n == 0:
        raise EmptySpace("cannot cluster an empty space")
    blocks = [np.array([i]) for i in range(X.n)]
    levels = []
    while len(blocks) > 1:
        L = linkage_matrix(X, blocks, rule)
        np.fill_diagonal(L, np.inf)
        r = float(L.min())
        _, comp = connected_components(L <= r + TAU_H, directed=False)
        blocks = [np.concatenate([blocks[b] for b in np.flatnonzero(comp == c)])
                  for c in range(comp.max() + 1)]
        part = Partition(tuple(tuple(X.labels[i] for i in idx) for idx in blocks))
        levels.append((r, part))
    P = PersistentSet.from_levels(X.labels, levels)
    return Dendrogram(P.ground, P.breakpoints, P.partitions)

