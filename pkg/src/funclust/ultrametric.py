"""The minimax (subdominant) ultrametric of a finite metric space."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptySpace
from .linkage import rgen
from .metric import TAU, FiniteMetricSpace, _abs_tol
from .persistence import persistent_to_pseudometric


def minimax_matrix(dist: np.ndarray) -> np.ndarray:
    """Minimax path cost between all pairs, via Prim's tree.

    When ``v`` joins the tree through ``p`` with edge ``w``, every tree vertex
    ``u`` is reached from ``v`` through ``p``, so ``eps[v, u] = max(eps[p, u], w)``.
    """
    n = dist.shape[0]
    eps = np.zeros((n, n))
    if n == 0:
        return eps
    in_tree = np.zeros(n, dtype=bool)
    best = dist[0].copy()
    parent = np.zeros(n, dtype=int)
    in_tree[0] = True
    members = [0]
    for _ in range(n - 1):
        cand = np.where(in_tree, np.inf, best)
        v = int(np.argmin(cand))
        p, w = int(parent[v]), float(best[v])
        row = np.maximum(eps[p, members], w)
        eps[v, members] = row
        eps[members, v] = row
        in_tree[v] = True
        members.append(v)
        closer = ~in_tree & (dist[v] < best)
        best[closer] = dist[v, closer]
        parent[closer] = v
    return eps


def epsilon_metric(X: FiniteMetricSpace) -> FiniteMetricSpace:
    """``eps(x, x')`` = least ``r`` with ``x ~_r x'``; the single-linkage ultrametric."""
    if X.n == 0:
        raise EmptySpace("empty space")
    return FiniteMetricSpace(minimax_matrix(X.dist), X.labels)


@dataclass(frozen=True)
class UltrametricVerdict:
    ok: bool
    triple: tuple | None = None

    def __bool__(self) -> bool:
        return self.ok


def check_ultrametric(U: FiniteMetricSpace, tol: float = TAU) -> UltrametricVerdict:
    """Strong triangle inequality ``d(i,k) <= max(d(i,j), d(j,k))``.

    A violation is reported as the lexicographically least ``(i, j, k)``.
    """
    d = U.dist
    atol = _abs_tol(d, tol)
    best = None
    for j in range(U.n):
        viol = d > np.maximum(d[:, [j]], d[[j], :]) + atol
        hits = np.argwhere(viol)
        if len(hits):
            i, k = hits[0]
            cand = (int(i), j, int(k))
            if best is None or cand < best:
                best = cand
    return UltrametricVerdict(best is None, best)


def dendrogram_ultrametric_roundtrip(X: FiniteMetricSpace, tol: float = TAU) -> bool:
    """Merge heights of the single-linkage dendrogram equal the minimax metric."""
    from_tree = persistent_to_pseudometric(rgen(X))
    aligned = from_tree.subspace(X.labels)
    return epsilon_metric(X).allclose(aligned, tol)
