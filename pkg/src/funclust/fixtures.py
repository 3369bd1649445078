"""Small named examples used in tests, demos and the counterexample search."""

from __future__ import annotations

from .metric import FiniteMetricSpace, SetMap
from .persistence import Partition, PersistentSet

PRIMES = ("A'", "B'", "C'")


def complete_linkage_counterexample() -> tuple[FiniteMetricSpace, FiniteMetricSpace, SetMap]:
    """Three-point spaces on which complete and average linkage are not functorial.

    ``X`` has side lengths ``{4, 3, 5}`` and ``Y`` has ``{4, 3, 2}``. The
    assignment of lengths to sides is not given with the source example; it
    was reconstructed by enumerating all assignments and keeping the one where

    * ``f: A->A', B->B', C->C'`` is distance non-increasing,
    * complete linkage at ``r = 3.5`` gives ``{{A, C}, {B}}`` on ``X`` and
      ``{{A', B'}, {C'}}`` on ``Y``.

    That forces ``AC=3`` and ``A'B'=2, A'C'=3, B'C'=4``; ``AB`` and ``BC``
    may be swapped without changing either dendrogram, and we fix
    ``AB=4, BC=5``.
    """
    X = FiniteMetricSpace([[0, 4, 3], [4, 0, 5], [3, 5, 0]], ("A", "B", "C"))
    Y = FiniteMetricSpace([[0, 2, 3], [2, 0, 4], [3, 4, 0]], PRIMES)
    f = SetMap(("A", "B", "C"), PRIMES, PRIMES)
    return X, Y, f


def persistence_preserving_example() -> tuple[PersistentSet, PersistentSet, SetMap]:
    """Two dendrograms on three points and a persistence-preserving map between them.

    Only the middle range is pinned down by the source: for ``r`` in ``[1, 2)``
    the target is ``{{A', B'}, {C'}}`` and the source is discrete. The other
    two ranges are filled in minimally: both sides discrete on ``[0, 1)`` and
    both single blocks from ``r = 2`` on, giving three ranges in total.
    """
    X = ("A", "B", "C")
    theta = PersistentSet(X, (2.0,), (Partition.discrete(X), Partition.single(X)))
    eta = PersistentSet(
        PRIMES,
        (1.0, 2.0),
        (Partition.discrete(PRIMES), Partition((("A'", "B'"), ("C'",))), Partition.single(PRIMES)),
    )
    f = SetMap(X, PRIMES, PRIMES)
    return theta, eta, f
