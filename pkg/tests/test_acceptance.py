"""Acceptance criteria 1-12, each at its stated size and tolerance.

Every criterion prints one ``PASS``/``FAIL`` line (shown in the pytest
terminal summary, or on stdout when this file is run as a script).
"""

from __future__ import annotations

import math
import time

import numpy as np
import pytest

from funclust.convergence import component_space, convergence_experiment, sample_shape, stability_experiment
from funclust.fixtures import PRIMES, complete_linkage_counterexample, persistence_preserving_example
from funclust.functorial import (
    cardinality_filtered,
    check_conditions,
    counterexample_search,
    get_scheme,
    random_nonincreasing_map,
)
from funclust.gh import check_gh_contraction, gh_exact
from funclust.linkage import LinkageRule, agglomerate, rgen
from funclust.metric import MorphismClass, classify_morphism, from_points, random_metric_space, scale_metric, two_point_space
from funclust.persistence import (
    Partition,
    interval_report,
    is_persistence_preserving,
    persistent_to_pseudometric,
    pullback,
    refines,
    scale_persistent,
    theta_at,
)
from funclust.ultrametric import check_ultrametric, epsilon_metric
from funclust.zigzag import (
    ZigZagF2Diagram,
    bootstrap_zigzag,
    interval_decomposition,
    linearize,
    random_set_zigzag,
    validate_barcode,
)
from oracles import exhaustive_barcode, random_dendrogram, random_f2_diagram

TAU = 1e-9
RESULTS: list[str] = []
DISKS3 = dict(w13=4.0, w23=6.0, w12=11.0, radius=1.0)
DISKS3_SPEC = "disks3:w13=4,w23=6,w12=11,radius=1"


def run_criterion(number: int, title: str, body, limit: float | None = None) -> None:
    start = time.perf_counter()
    error = None
    try:
        detail = body()
    except AssertionError as exc:
        detail, error = str(exc) or "assertion failed", exc
    elapsed = time.perf_counter() - start
    if error is None and limit is not None and elapsed >= limit:
        error = AssertionError(f"runtime {elapsed:.1f}s exceeds {limit:.0f}s")
        detail = str(error)
    status = "PASS" if error is None else "FAIL"
    line = f"[{status}] criterion {number:2d}: {title} ({elapsed:.2f}s) {detail or ''}".rstrip()
    RESULTS.append(line)
    print(line)
    if error is not None:
        raise error


# 1 --------------------------------------------------------------------------------

def single_linkage_equivalence():
    rng = np.random.default_rng(101)
    for t in range(500):
        X = random_metric_space(rng, int(rng.integers(1, 9)))
        A, R = agglomerate(X, LinkageRule.SINGLE), rgen(X)
        assert A.partitions == R.partitions, f"space {t}: partitions differ"
        assert all(abs(a - b) <= TAU for a, b in zip(A.breakpoints, R.breakpoints)), f"space {t}: breakpoints"
        assert len(A.breakpoints) == len(R.breakpoints)
    return "500 spaces, n <= 8"


def test_criterion_01():
    run_criterion(1, "single-linkage recursion equals chain equivalence", single_linkage_equivalence, limit=10)


# 2 --------------------------------------------------------------------------------

def uniqueness_conditions():
    rep = check_conditions("rgen", trials=200, delta_trials=50, seed=2)
    assert rep.passed, rep.to_dict()
    assert rep.results["I"].checked == 200 and rep.results["II"].checked == 50
    w = counterexample_search("rgen", max_n=8, trials=500, seed=2)
    assert w is None, f"unexpected witness {w}"
    return f"I/II/III pass ({rep.results['III'].checked} scale checks); 500 search trials, no witness"


def test_criterion_02():
    run_criterion(2, "uniqueness conditions and no counterexample for single linkage", uniqueness_conditions, limit=30)


# 3 --------------------------------------------------------------------------------

def complete_linkage_failure():
    X, Y, f = complete_linkage_counterexample()
    DX, DY = agglomerate(X, LinkageRule.COMPLETE), agglomerate(Y, LinkageRule.COMPLETE)
    assert theta_at(DX, 3.5) == Partition((("A", "C"), ("B",)))
    assert theta_at(DY, 3.5) == Partition((PRIMES[:2], PRIMES[2:]))
    assert pullback(f, theta_at(DY, 3.5)) == Partition((("A", "B"), ("C",)))
    assert classify_morphism(f, X, Y) >= MorphismClass.GENERAL
    v = is_persistence_preserving(f, DX, DY)
    assert not v and v.r == 3.5, v
    w = counterexample_search("average", max_n=8, trials=500, seed=3)
    assert w is not None, "no witness for average linkage"
    avg = get_scheme("average")
    assert classify_morphism(w.f, w.X, w.Y) >= MorphismClass.GENERAL
    assert not is_persistence_preserving(w.f, avg(w.X), avg(w.Y))
    return f"complete witness r={v.r:g}; average witness at trial {w.trial}, r={w.r:.6g}"


def test_criterion_03():
    run_criterion(3, "complete/average linkage are not functorial", complete_linkage_failure)


# 4 --------------------------------------------------------------------------------

def preserving_example():
    theta, eta, f = persistence_preserving_example()
    assert is_persistence_preserving(f, theta, eta)
    ranges = [(0.0, 1.0), (1.0, 2.0), (2.0, math.inf)]
    cuts = sorted(set((0.0,) + theta.breakpoints + eta.breakpoints))
    assert [(a, b) for a, b in zip(cuts, cuts[1:] + [math.inf])] == ranges
    for lo, hi in ranges:
        for r in (lo, lo + 0.5 if math.isinf(hi) else (lo + hi) / 2):
            assert refines(theta_at(theta, r), pullback(f, theta_at(eta, r))), (lo, r)
    for r in (1.0, 1.5, 1.999):
        assert pullback(f, theta_at(eta, r)) == Partition((("A", "B"), ("C",)))
    return "three ranges preserved; f*(eta) = A,B|C on [1,2)"


def test_criterion_04():
    run_criterion(4, "persistence-preserving map example", preserving_example)


# 5 --------------------------------------------------------------------------------

def ultrametric_properties():
    rng = np.random.default_rng(105)
    for t in range(500):
        X = random_metric_space(rng, int(rng.integers(1, 13)))
        E = epsilon_metric(X)
        assert check_ultrametric(E, TAU), f"space {t}"
        tree = persistent_to_pseudometric(rgen(X)).subspace(X.labels)
        assert np.all(np.abs(tree.dist - E.dist) <= TAU * max(1.0, E.dist.max())), f"space {t}"
    return "500 spaces, n <= 12"


def test_criterion_05():
    run_criterion(5, "minimax metric is an ultrametric and matches the dendrogram", ultrametric_properties, limit=10)


# 6 --------------------------------------------------------------------------------

def gh_contraction():
    rng = np.random.default_rng(106)
    worst = math.inf
    for t in range(200):
        X, Y = random_metric_space(rng, 4), random_metric_space(rng, 4)
        c = check_gh_contraction(X, Y)
        assert c.lhs >= c.rhs - TAU, f"pair {t}: {c}"
        worst = min(worst, c.lhs - c.rhs)
    for t in range(20):
        a, b = rng.uniform(0.1, 10, size=2)
        c = check_gh_contraction(two_point_space(a), two_point_space(b))
        assert c.lhs == c.rhs == pytest.approx(abs(a - b), abs=TAU)
    return f"200 four-point pairs (min slack {worst:.3g}); equality on 20 two-point pairs"


def test_criterion_06():
    run_criterion(6, "minimax ultrametrics do not increase GH distance", gh_contraction, limit=120)


# 7 --------------------------------------------------------------------------------

def stability_bound():
    rows = []
    for spec in ("circle:radius=1", DISKS3_SPEC):
        exact = stability_experiment(spec, [3, 4, 5], [0, 1, 2])
        assert all(r.method == "exact" for r in exact)
        upper = stability_experiment(spec, [25, 50, 100, 200], [0, 1])
        assert all(r.method == "nn-upper" for r in upper)
        rows += exact + upper
    bad = [r for r in rows if not r.lhs <= r.bound]
    assert not bad, bad[0]
    return f"{len(rows)} rows on circle and three-disk fixture, all within 2(R+R')"


def test_criterion_07():
    run_criterion(7, "finite stability bound", stability_bound)


# 8 --------------------------------------------------------------------------------

def convergence_bound():
    rows = convergence_experiment(DISKS3_SPEC, [30, 60, 120, 240], [0])
    for r in rows:
        assert r.distortion <= 2 * r.R, r
        assert r.sandwich_ok and r.all_hit, r
    d = [r.distortion for r in rows]
    assert all(a > b for a, b in zip(d, d[1:])), f"not decreasing: {d}"
    delta = rows[-1].delta
    assert d[-1] < 0.1 * delta, f"final distortion {d[-1]} vs delta {delta}"
    A = component_space(sample_shape(DISKS3_SPEC, 30, 0))
    assert abs(A.d(1, 3) - DISKS3["w13"]) <= TAU and abs(A.d(2, 3) - DISKS3["w23"]) <= TAU
    assert A.d(1, 2) == A.d(1, 3) + A.d(3, 2)
    assert abs(A.d(1, 2) - (DISKS3["w13"] + DISKS3["w23"])) <= TAU
    return "distortion " + " > ".join(f"{x:.4f}" for x in d) + f"; delta={delta:g}; d_A(a1,a2)={A.d(1, 2):g}"


def test_criterion_08():
    run_criterion(8, "convergence to the component space", convergence_bound)


# 9 --------------------------------------------------------------------------------

def scale_and_richness():
    rng = np.random.default_rng(109)
    for t in range(100):
        X = random_metric_space(rng, int(rng.integers(1, 9)))
        lam = float(rng.uniform(0.1, 10.0))
        assert rgen(scale_metric(X, lam)) == scale_persistent(rgen(X), lam), f"pair {t}"
    for t in range(100):
        D = random_dendrogram(rng, int(rng.integers(1, 9)))
        assert rgen(persistent_to_pseudometric(D)) == D, f"dendrogram {t}"
    return "100 scalings, 100 dendrograms, exact equality"


def test_criterion_09():
    run_criterion(9, "scale naturality and richness round trip", scale_and_richness)


# 10 -------------------------------------------------------------------------------

def size_filtered_split():
    m = 3
    rng = np.random.default_rng(110)
    for t in range(200):
        X = random_metric_space(rng, int(rng.integers(1, 9)))
        Y, f = random_nonincreasing_map(rng, X, X.n + int(rng.integers(0, 3)), injective=True)
        assert classify_morphism(f, X, Y) >= MorphismClass.MONIC
        assert is_persistence_preserving(f, cardinality_filtered(X, m), cardinality_filtered(Y, m)), f"map {t}"
    w = counterexample_search(f"cardinality-{m}", max_n=8, trials=1000, seed=10, morphisms="general")
    assert w is not None, "no witness in 1000 general trials"
    assert not is_persistence_preserving(w.f, cardinality_filtered(w.X, m), cardinality_filtered(w.Y, m))
    return f"m={m}: 200 injective maps preserved; general-map witness at trial {w.trial}"


def test_criterion_10():
    run_criterion(10, "size-filtered clustering: functorial on injective maps only", size_filtered_split)


# 11 -------------------------------------------------------------------------------

def interval_decomposition_checks():
    rng = np.random.default_rng(111)
    for t in range(500):
        V = random_set_zigzag(rng, int(rng.integers(1, 10)), 5)
        v = validate_barcode(V, interval_decomposition(V))
        assert v, f"diagram {t}: {v.reason}"
    for t in range(50):
        V = random_f2_diagram(rng, max_total=6, alternate=True)
        assert list(interval_decomposition(V)) == exhaustive_barcode(V), f"diagram {t}"
    one = np.ones((1, 1))
    assert interval_decomposition(ZigZagF2Diagram([1, 1, 1], [one, one])).bars == ((0, 2),)
    return "500 set-map zigzags valid; 50 agree with exhaustive search; k->k<-k gives [0,2]"


def test_criterion_11():
    run_criterion(11, "zig-zag interval decomposition", interval_decomposition_checks, limit=120)


# 12 -------------------------------------------------------------------------------

def two_blob_pipeline():
    rng = np.random.default_rng(112)
    pts = np.vstack([rng.normal(0, 0.3, (25, 2)), rng.normal(0, 0.3, (25, 2)) + [10.0, 0.0]])
    X = from_points(pts)
    side = {x: int(pts[X.index(x), 0] > 5) for x in X.labels}
    blob_diam = max(from_points(pts[:25]).diameter(), from_points(pts[25:]).diameter())
    gap = float(X.dist[:25, 25:].min())
    below, above = 0.5 * (blob_diam + gap), gap + 1.0
    assert blob_diam < below < gap
    D = bootstrap_zigzag(X, 20, 5, below, seed=12)
    assert all({side[x] for x in s} == {0, 1} for s in D.samples), "a sample missed a blob"
    B = interval_decomposition(linearize(D))
    M = linearize(D).length
    assert B.bars == ((0, M), (0, M)), B
    B1 = interval_decomposition(linearize(bootstrap_zigzag(X, 20, 5, above, seed=12)))
    assert B1.bars == ((0, M),), B1
    return f"eps={below:.3g}: {len(B)} full bars; eps={above:.3g}: {len(B1)} full bar"


def test_criterion_12():
    run_criterion(12, "two-blob bootstrap barcode", two_blob_pipeline)


if __name__ == "__main__":
    import sys

    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
