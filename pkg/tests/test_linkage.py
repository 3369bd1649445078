import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import metric_spaces
from funclust.errors import EmptySpace
from funclust.fixtures import PRIMES, complete_linkage_counterexample
from funclust.functorial import random_nonincreasing_map
from funclust.linkage import LinkageRule, agglomerate, linkage_matrix, rgen
from funclust.metric import FiniteMetricSpace, from_points, scale_metric, two_point_space
from funclust.persistence import Partition, is_persistence_preserving, scale_persistent, theta_at
from oracles import chain_partition_blocks


def blocks_of(part, X):
    return {frozenset(X.index(x) for x in b) for b in part.blocks}


class TestRgen:
    def test_two_point(self):
        D = rgen(two_point_space(1.5))
        assert D.breakpoints == (1.5,)

    def test_line(self):
        D = rgen(from_points([0, 1, 3]))
        assert D.breakpoints == (1.0, 2.0)
        assert D.partitions[1] == Partition(((0, 1), (2,)))

    def test_one_point(self):
        D = rgen(FiniteMetricSpace([[0.0]], ("x",)))
        assert D.breakpoints == () and D.partitions == (Partition((("x",),)),)

    def test_empty(self):
        with pytest.raises(EmptySpace):
            rgen(FiniteMetricSpace(np.zeros((0, 0))))

    @given(metric_spaces(max_n=7, kind="integer"))
    def test_matches_chain_enumeration(self, X):
        D = rgen(X)
        off = X.dist[~np.eye(X.n, dtype=bool)]
        candidates = sorted(set(off.tolist()) | {0.0})
        for r in candidates + [c + 0.5 for c in candidates]:
            assert blocks_of(theta_at(D, r), X) == chain_partition_blocks(X.dist, r)
        # breakpoints are exactly the heights where the relation coarsens
        coarsen = [r for r in candidates[1:] if chain_partition_blocks(X.dist, r) != chain_partition_blocks(X.dist, np.nextafter(r, 0))]
        assert list(D.breakpoints) == coarsen

    @given(metric_spaces(max_n=8), st.integers(0, 2**32 - 1))
    def test_permutation_equivariance(self, X, seed):
        perm = np.random.default_rng(seed).permutation(X.n)
        renamed = {x: f"v{x}" for x in X.labels}
        Xp = X.permuted(perm).relabel(renamed)
        back = {v: k for k, v in renamed.items()}
        Dp = rgen(Xp)
        restored = [Partition(tuple(tuple(back[x] for x in b) for b in p.blocks)) for p in Dp.partitions]
        D = rgen(X)
        assert D.breakpoints == Dp.breakpoints and list(D.partitions) == restored

    @given(metric_spaces(max_n=8), st.integers(0, 2**32 - 1))
    def test_functorial_on_general_maps(self, X, seed):
        rng = np.random.default_rng(seed)
        Y, f = random_nonincreasing_map(rng, X, int(rng.integers(1, 9)), injective=False)
        assert is_persistence_preserving(f, rgen(X), rgen(Y))

    @given(metric_spaces(max_n=8), st.floats(0.01, 50))
    def test_scale_naturality(self, X, lam):
        assert rgen(scale_metric(X, lam)).isclose(scale_persistent(rgen(X), lam))


class TestAgglomerate:
    @given(metric_spaces(max_n=8))
    def test_single_equals_rgen(self, X):
        assert agglomerate(X, LinkageRule.SINGLE).isclose(rgen(X))

    def test_counterexample_target(self):
        _, Y, _ = complete_linkage_counterexample()
        D = agglomerate(Y, LinkageRule.COMPLETE)
        assert theta_at(D, 3.5) == Partition((PRIMES[:2], PRIMES[2:]))

    def test_counterexample_source(self):
        X, _, _ = complete_linkage_counterexample()
        assert theta_at(agglomerate(X, "complete"), 3.5) == Partition((("A", "C"), ("B",)))

    @pytest.mark.parametrize("rule", list(LinkageRule))
    def test_equilateral_multi_merge(self, rule):
        X = FiniteMetricSpace(2.0 * (1 - np.eye(3)), ("a", "b", "c"))
        D = agglomerate(X, rule)
        assert D.breakpoints == (2.0,) and len(D.partitions[1]) == 1

    def test_chain_multi_merge(self):
        # blocks {0},{1},{2} with linkage 1 between neighbours only: one chained merge
        X = from_points([0.0, 1.0, 2.0])
        D = agglomerate(X, LinkageRule.COMPLETE)
        assert D.breakpoints == (1.0,)

    def test_linkage_formulas(self):
        X = from_points([0.0, 1.0, 5.0, 9.0])
        blocks = [np.array([0, 1]), np.array([2, 3])]
        L = {r: linkage_matrix(X, blocks, r)[0, 1] for r in LinkageRule}
        assert L[LinkageRule.SINGLE] == 4.0
        assert L[LinkageRule.COMPLETE] == 9.0
        assert L[LinkageRule.AVERAGE] == (5 + 9 + 4 + 8) / 4

    @pytest.mark.parametrize("rule", list(LinkageRule))
    @given(X=metric_spaces(max_n=8))
    def test_outputs_are_dendrograms(self, rule, X):
        D = agglomerate(X, rule)
        assert D.is_dendrogram and D.partitions[0].is_discrete()
        # blocks merge only at computed linkage heights; recompute each round by hand
        for (r0, p0), (r1, p1) in itertools.pairwise(D.levels):
            blocks = [np.array([X.index(x) for x in b]) for b in p0.blocks]
            L = linkage_matrix(X, blocks, rule)
            off = L[~np.eye(len(blocks), dtype=bool)]
            assert abs(off.min() - r1) <= 1e-9
