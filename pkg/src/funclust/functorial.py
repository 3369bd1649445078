"""Functoriality checks for clustering schemes.

A scheme maps a finite metric space to a persistent set. This module checks
the three normalisation conditions that single out single linkage, searches
for maps that a scheme fails to carry to persistence-preserving maps, builds
the size-filtered scheme ``theta^m``, and assembles the cluster graph of a
cover.
"""

from __future__ import annotations

import itertools
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import networkx as nx
import numpy as np

from .errors import UncoveredPoint, UnknownScheme
from .linkage import LinkageRule, agglomerate, rgen
from .metric import (
    FiniteMetricSpace,
    MorphismClass,
    SetMap,
    classify_morphism,
    components_at,
    path_metric,
    random_metric_space,
    separation,
    two_point_space,
)
from .persistence import Partition, PersistentSet, is_persistence_preserving, theta_at


def cardinality_filtered(X: FiniteMetricSpace, m: int) -> PersistentSet:
    """Single linkage with small clusters dissolved.

    At each scale a ``~_r`` class is kept if it has at least ``m`` points;
    points of smaller classes become singletons.
    """
    if m < 1:
        raise ValueError("m must be a positive integer")
    base = rgen(X)
    levels = []
    for r, part in base.levels:
        blocks = []
        for b in part.blocks:
            blocks.extend([b] if len(b) >= m else [(x,) for x in b])
        levels.append((r, Partition(tuple(blocks))))
    return PersistentSet.from_levels(X.labels, levels)


@dataclass(frozen=True)
class ClusteringScheme:
    name: str
    run: Callable[[FiniteMetricSpace], PersistentSet]

    def __call__(self, X: FiniteMetricSpace) -> PersistentSet:
        return self.run(X)


_FIXED = {
    "rgen": rgen,
    "single": lambda X: agglomerate(X, LinkageRule.SINGLE),
    "complete": lambda X: agglomerate(X, LinkageRule.COMPLETE),
    "average": lambda X: agglomerate(X, LinkageRule.AVERAGE),
}


def scheme_names() -> list[str]:
    return sorted(_FIXED) + ["cardinality-<m>"]


def get_scheme(name: str | ClusteringScheme) -> ClusteringScheme:
    """Look up a scheme: ``rgen``, ``single``, ``complete``, ``average`` or ``cardinality-<m>``."""
    if isinstance(name, ClusteringScheme):
        return name
    if name in _FIXED:
        return ClusteringScheme(name, _FIXED[name])
    match = re.fullmatch(r"cardinality-(\d+)", name)
    if match and int(match.group(1)) >= 1:
        m = int(match.group(1))
        return ClusteringScheme(name, lambda X: cardinality_filtered(X, m))
    raise UnknownScheme(f"unknown scheme {name!r}; known: {', '.join(scheme_names())}")


# condition checks -----------------------------------------------------------------

@dataclass
class ConditionResult:
    name: str
    passed: bool = True
    checked: int = 0
    witness: dict | None = None

    def fail(self, **witness) -> None:
        if self.passed:
            self.passed = False
            self.witness = witness


@dataclass
class ConditionReport:
    scheme: str
    results: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results.values())

    def to_dict(self) -> dict:
        return {
            "scheme": self.scheme,
            "passed": self.passed,
            "conditions": {
                k: {"passed": r.passed, "checked": r.checked, "witness": r.witness}
                for k, r in self.results.items()
            },
        }


def check_conditions(scheme, trials: int = 200, seed: int = 0, delta_trials: int = 50,
                     max_n: int = 10, scales_per_space: int = 5) -> ConditionReport:
    """Empirically test the three uniqueness conditions on a scheme.

    * ``I``: the output lives on the input's point set (``trials`` random spaces).
    * ``II``: on two-point spaces ``Z(delta)`` the output is discrete below
      ``delta`` and one block from ``delta`` on (``delta_trials`` random deltas).
    * ``III``: below the separation of a space the output is discrete.
    """
    scheme = get_scheme(scheme)
    rng = np.random.default_rng(seed)
    report = ConditionReport(scheme.name)
    I, II, III = (ConditionResult(k) for k in ("I", "II", "III"))
    report.results.update(I=I, II=II, III=III)
    for t in range(trials):
        n = int(rng.integers(1, max_n + 1))
        X = random_metric_space(rng, n)
        P = scheme(X)
        I.checked += 1
        if set(P.ground) != set(X.labels) or len(P.ground) != X.n:
            I.fail(trial=t, dist=X.dist.tolist(), ground=[str(x) for x in P.ground])
        if n < 2:
            continue
        sep = separation(X)
        scales = [0.0, float(np.nextafter(sep, 0.0))]
        scales += [float(u) * sep for u in rng.uniform(0.0, 1.0, size=scales_per_space)]
        for r in scales:
            III.checked += 1
            if not theta_at(P, r).is_discrete():
                III.fail(trial=t, dist=X.dist.tolist(), r=r, partition=str(theta_at(P, r)))
    for t in range(delta_trials):
        delta = float(rng.uniform(0.01, 10.0))
        labels = ("p", "q")
        P = scheme(two_point_space(delta, labels))
        expected = PersistentSet(labels, (delta,), (Partition.discrete(labels), Partition.single(labels)))
        II.checked += 1
        if P != expected:
            II.fail(trial=t, delta=delta, got=repr(P))
    return report


# counterexample search --------------------------------------------------------------

def random_nonincreasing_map(rng: np.random.Generator, X: FiniteMetricSpace, m: int,
                             injective: bool = False, max_tries: int = 100):
    """A random space ``Y`` on ``m`` points and a distance non-increasing ``f: X -> Y``.

    A random set map is drawn first (injective if asked). Weights between image
    points are capped by the smallest distance between their preimages and
    shrunk by a random factor; other weights are random. The shortest-path
    closure of these weights only lowers them, so the map stays
    non-increasing. The class is re-checked and the draw rejected otherwise.
    """
    n = X.n
    if injective and m < n:
        raise ValueError("an injective map needs m >= |X|")
    ylab = tuple(f"y{i}" for i in range(m))
    for _ in range(max_tries):
        img = rng.permutation(m)[:n] if injective else rng.integers(0, m, size=n)
        W = np.triu(rng.uniform(0.5, 10.0, size=(m, m)), 1)
        W = W + W.T
        cap = np.full((m, m), np.inf)
        for i, j in itertools.combinations(range(n), 2):
            a, b = img[i], img[j]
            if a != b:
                cap[a, b] = cap[b, a] = min(cap[a, b], X.dist[i, j])
        capped = np.isfinite(cap)
        shrink = np.where(rng.random((m, m)) < 0.3, 1.0, rng.uniform(0.3, 1.0, size=(m, m)))
        shrink = np.triu(shrink, 1) + np.triu(shrink, 1).T
        W[capped] = (np.where(capped, cap, 0.0) * shrink)[capped]
        np.fill_diagonal(W, 0.0)
        if np.any(W[~np.eye(m, dtype=bool)] <= 0):
            continue
        Y = path_metric(W, ylab)
        f = SetMap(X.labels, ylab, tuple(ylab[a] for a in img))
        cls = classify_morphism(f, X, Y)
        if cls >= (MorphismClass.MONIC if injective else MorphismClass.GENERAL):
            return Y, f
    raise RuntimeError("could not draw a distance non-increasing map")


@dataclass(frozen=True)
class Witness:
    """A map ``f: X -> Y`` whose image under a scheme is not persistence preserving."""

    trial: int
    X: FiniteMetricSpace
    Y: FiniteMetricSpace
    f: SetMap
    r: float
    interval: tuple
    block: tuple
    pulled: tuple

    def to_dict(self) -> dict:
        return {
            "trial": self.trial,
            "X": {"labels": [str(x) for x in self.X.labels], "dist": self.X.dist.tolist()},
            "Y": {"labels": [str(y) for y in self.Y.labels], "dist": self.Y.dist.tolist()},
            "f": {str(x): str(y) for x, y in zip(self.f.domain, self.f.images)},
            "r": self.r,
            "interval": [self.interval[0], self.interval[1] if np.isfinite(self.interval[1]) else None],
            "block": [str(x) for x in self.block],
            "pulled_back_blocks": [[str(x) for x in b] for b in self.pulled],
        }


def _check_map(scheme: ClusteringScheme, trial: int, X, Y, f) -> Witness | None:
    verdict = is_persistence_preserving(f, scheme(X), scheme(Y))
    if verdict:
        return None
    return Witness(trial, X, Y, f, verdict.r, verdict.interval, verdict.block, verdict.pulled)


def _draw_trial(seed: int, trial: int, max_n: int, morphisms: str):
    rng = np.random.default_rng([seed, trial])
    n = int(rng.integers(2, max_n + 1))
    X = random_metric_space(rng, n)
    injective = morphisms == "monic"
    lo = n if injective else 1
    m = int(rng.integers(lo, max(lo, max_n) + 1))
    Y, f = random_nonincreasing_map(rng, X, m, injective=injective)
    return X, Y, f


def counterexample_search(scheme, max_n: int = 8, trials: int = 500, seed: int = 0,
                          morphisms: str = "general", fixtures: Sequence = (),
                          threads: int = 1) -> Witness | None:
    """Look for a morphism the scheme does not carry to a persistence-preserving map.

    ``fixtures`` are ``(X, Y, f)`` triples tried first (reported with negative
    trial numbers). Random trial ``t`` draws from its own stream seeded by
    ``(seed, t)``, so the result does not depend on ``threads``: the witness
    with the smallest trial index is returned.
    """
    if morphisms not in ("general", "monic"):
        raise ValueError("morphisms must be 'general' or 'monic'")
    scheme = get_scheme(scheme)
    for k, (X, Y, f) in enumerate(fixtures):
        w = _check_map(scheme, k - len(fixtures), X, Y, f)
        if w is not None:
            return w

    def run(t: int):
        return _check_map(scheme, t, *_draw_trial(seed, t, max_n, morphisms))

    if threads <= 1:
        for t in range(trials):
            w = run(t)
            if w is not None:
                return w
        return None
    batch = 8 * threads
    with ThreadPoolExecutor(max_workers=threads) as pool:
        for start in range(0, trials, batch):
            for w in pool.map(run, range(start, min(trials, start + batch))):
                if w is not None:
                    return w
    return None


# cover and cluster ------------------------------------------------------------------

def cover_cluster_graph(X: FiniteMetricSpace, lens: Sequence[float], intervals: Sequence[tuple],
                        eps: float) -> nx.Graph:
    """One-skeleton of the diagram of clusters over a cover of the lens range.

    Each interval's preimage, and each nonempty overlap of two preimages, is
    clustered by single linkage at the fixed scale ``eps``. Nodes are
    ``("cover", i, block)`` and ``("overlap", (i, j), block)``; an overlap
    cluster is joined to the cluster of each preimage that contains it.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    lens = np.asarray(lens, dtype=float)
    if lens.shape != (X.n,):
        raise ValueError("need one lens value per point")
    intervals = [(float(a), float(b)) for a, b in intervals]
    member = np.array([[a <= v <= b for a, b in intervals] for v in lens], dtype=bool).reshape(X.n, len(intervals))
    uncovered = np.flatnonzero(~member.any(axis=1))
    if len(uncovered):
        i = int(uncovered[0])
        raise UncoveredPoint(f"lens value {lens[i]!r} of point {X.labels[i]!r} lies in no interval")

    def clusters(idx: np.ndarray) -> list[tuple]:
        comp = components_at(X.dist[np.ix_(idx, idx)], eps)
        return list(Partition.from_assignment([X.labels[i] for i in idx], comp).blocks)

    G = nx.Graph()
    cover_blocks = []
    for i in range(len(intervals)):
        idx = np.flatnonzero(member[:, i])
        blocks = clusters(idx) if len(idx) else []
        cover_blocks.append(blocks)
        for b in blocks:
            G.add_node(("cover", i, b), kind="cover", interval=i, members=b)
    for i, j in itertools.combinations(range(len(intervals)), 2):
        idx = np.flatnonzero(member[:, i] & member[:, j])
        if not len(idx):
            continue
        for b in clusters(idx):
            node = ("overlap", (i, j), b)
            G.add_node(node, kind="overlap", interval=(i, j), members=b)
            for k in (i, j):
                parent = next(c for c in cover_blocks[k] if b[0] in c)
                G.add_edge(node, ("cover", k, parent))
    return G
