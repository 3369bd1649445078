import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import metric_spaces
from funclust.errors import EmptySubset, NotACorrespondence, TooLarge
from funclust.fixtures import complete_linkage_counterexample
from funclust.gh import (
    Correspondence,
    check_gh_contraction,
    covering_radius,
    distortion,
    gh_exact,
    gh_lower_bound,
    hausdorff,
    set_distance,
)
from funclust.metric import FiniteMetricSpace, from_points, random_metric_space, two_point_space
from oracles import gh_brute


def Z(a, labels=("p", "q")):
    return two_point_space(a, labels)


class TestDistortion:
    def test_identity(self):
        X = from_points([0, 1, 3])
        assert distortion(Correspondence((x, x) for x in X.labels), X, X) == 0

    def test_two_point(self):
        R = Correspondence([("p", "p'"), ("q", "q'")])
        assert distortion(R, Z(1), Z(4, ("p'", "q'"))) == 3

    def test_counterexample_graph(self):
        X, Y, f = complete_linkage_counterexample()
        assert distortion(Correspondence.graph(f.as_dict()), X, Y) == 2

    def test_uncovered(self):
        with pytest.raises(NotACorrespondence):
            distortion(Correspondence([("p", "p")]), Z(1), Z(1))


class TestExact:
    def test_examples(self):
        X = from_points([0, 1, 3])
        assert gh_exact(X, X) == 0
        assert gh_exact(Z(1), Z(3)) == 2
        assert gh_exact(X, FiniteMetricSpace([[0.0]])) == X.diameter()

    def test_witness(self):
        res = gh_exact(Z(1), Z(3), witness=True)
        assert distortion(res.correspondence, Z(1), Z(3)) == res.value

    def test_limits(self):
        X = from_points(np.arange(6.0))
        with pytest.raises(TooLarge):
            gh_exact(X, X)
        with pytest.raises(EmptySubset):
            gh_exact(X, FiniteMetricSpace(np.zeros((0, 0))))

    @settings(max_examples=40)
    @given(metric_spaces(max_n=3), metric_spaces(max_n=3))
    def test_matches_brute_force(self, X, Y):
        assert gh_exact(X, Y) == pytest.approx(gh_brute(X.dist, Y.dist), abs=1e-12)

    @settings(max_examples=25)
    @given(st.integers(0, 2**32 - 1))
    def test_pseudometric_axioms(self, seed):
        rng = np.random.default_rng(seed)
        X, Y, W = (random_metric_space(rng, int(rng.integers(1, 4))) for _ in range(3))
        assert gh_exact(X, Y) == gh_exact(Y, X)
        assert gh_exact(X, X.permuted(rng.permutation(X.n))) == 0
        assert gh_exact(X, W) <= gh_exact(X, Y) + gh_exact(Y, W) + 1e-12

    @settings(max_examples=25)
    @given(metric_spaces(max_n=5), metric_spaces(max_n=5), st.integers(0, 2**32 - 1))
    def test_any_correspondence_bounds_from_above(self, X, Y, seed):
        rng = np.random.default_rng(seed)
        pairs = [(x, Y.labels[rng.integers(Y.n)]) for x in X.labels]
        pairs += [(X.labels[rng.integers(X.n)], y) for y in Y.labels]
        assert distortion(Correspondence(pairs), X, Y) >= gh_exact(X, Y) - 1e-12


class TestLowerBound:
    def test_examples(self):
        X = from_points([0, 1, 3])
        assert gh_lower_bound(X, X) == 0
        assert gh_lower_bound(Z(1), Z(4)) == 3

    @settings(max_examples=30)
    @given(metric_spaces(max_n=5), metric_spaces(max_n=5))
    def test_below_exact(self, X, Y):
        assert gh_lower_bound(X, Y) <= gh_exact(X, Y) + 1e-12


class TestAmbient:
    def test_line(self):
        L = from_points([0.0, 1.0, 2.0, 3.0])
        assert covering_radius(L, L.labels) == 0
        assert covering_radius(L, [0, 3]) == 1
        assert hausdorff(L, [0], [3]) == 3

    def test_set_distance(self):
        L = from_points([0.0, 1.0, 5.0, 6.0])
        assert set_distance(L, [0, 1], [2, 3]) == 4

    def test_empty(self):
        with pytest.raises(EmptySubset):
            covering_radius(from_points([0.0]), [])

    @settings(max_examples=20)
    @given(st.integers(0, 2**32 - 1))
    def test_subset_within_twice_hausdorff(self, seed):
        rng = np.random.default_rng(seed)
        Zs = random_metric_space(rng, 6)
        k = int(rng.integers(1, 5))
        sub = list(rng.choice(6, size=k, replace=False))
        X = Zs.subspace([Zs.labels[i] for i in sub])
        assert gh_exact(X, Zs) <= 2 * covering_radius(Zs, X.labels) + 1e-12


class TestContraction:
    def test_equal_spaces(self):
        X = from_points([0, 1, 3])
        c = check_gh_contraction(X, X)
        assert c.ok and c.lhs == c.rhs == 0

    def test_two_point_equality(self):
        c = check_gh_contraction(Z(1), Z(3))
        assert c.lhs == c.rhs == 2

    @settings(max_examples=40)
    @given(metric_spaces(min_n=4, max_n=4), metric_spaces(min_n=4, max_n=4))
    def test_random_four_point(self, X, Y):
        assert check_gh_contraction(X, Y)
