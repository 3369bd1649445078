"""Partitions, persistent sets and dendrograms.

A persistent set is stored as a finite list of breakpoints ``0 < r_1 < ... < r_k``
and one partition per half-open interval ``[0, r_1), [r_1, r_2), ..., [r_k, inf)``.
Evaluation is right-continuous: at a breakpoint the coarser partition applies.
"""

from __future__ import annotations

import bisect
import json
import math
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence

import numpy as np

from .errors import (
    GroundSetMismatch,
    NegativeScale,
    NonpositiveScale,
    NotADendrogram,
    NotAPersistentSet,
)
from .metric import FiniteMetricSpace, SetMap, sorted_labels

#: absolute tolerance under which merge heights count as tied
TAU_H = 1e-9


@dataclass(frozen=True)
class Partition:
    """A set partition in canonical form.

    Labels are sorted inside each block and blocks are sorted by their least
    label, so two partitions are equal iff their ``blocks`` tuples are equal.
    """

    blocks: tuple

    def __post_init__(self):
        blocks = [tuple(sorted_labels(b)) for b in self.blocks]
        if any(len(b) == 0 for b in blocks):
            raise NotAPersistentSet("partition blocks must be nonempty")
        seen = set()
        for b in blocks:
            for x in b:
                if x in seen:
                    raise NotAPersistentSet(f"label {x!r} occurs in two blocks")
                seen.add(x)
        first = {b[0]: b for b in blocks}
        object.__setattr__(self, "blocks", tuple(first[x] for x in sorted_labels(first)))

    @classmethod
    def discrete(cls, labels: Iterable[Hashable]) -> "Partition":
        return cls(tuple((x,) for x in labels))

    @classmethod
    def single(cls, labels: Iterable[Hashable]) -> "Partition":
        labels = tuple(labels)
        return cls((labels,) if labels else ())

    @classmethod
    def from_assignment(cls, labels: Sequence[Hashable], ids: Sequence) -> "Partition":
        groups: dict = {}
        for x, c in zip(labels, ids):
            groups.setdefault(c, []).append(x)
        return cls(tuple(groups.values()))

    @property
    def ground(self) -> frozenset:
        return frozenset(x for b in self.blocks for x in b)

    def __len__(self) -> int:
        return len(self.blocks)

    def __iter__(self):
        return iter(self.blocks)

    def block_of(self, x) -> tuple:
        for b in self.blocks:
            if x in b:
                return b
        raise GroundSetMismatch(f"{x!r} is not in the partition")

    def block_index(self) -> dict:
        return {x: i for i, b in enumerate(self.blocks) for x in b}

    def is_discrete(self) -> bool:
        return all(len(b) == 1 for b in self.blocks)

    def refines(self, other: "Partition") -> bool:
        return refines(self, other)

    def __str__(self) -> str:
        return "|".join(",".join(str(x) for x in b) for b in self.blocks)


def refines(p1: Partition, p2: Partition) -> bool:
    """True iff every block of ``p1`` lies inside a block of ``p2``."""
    if p1.ground != p2.ground:
        raise GroundSetMismatch("partitions live on different ground sets")
    where = p2.block_index()
    return all(len({where[x] for x in b}) == 1 for b in p1.blocks)


def pullback(f: SetMap, partition: Partition) -> Partition:
    """The partition of ``f.domain`` into nonempty preimages of blocks."""
    if set(f.codomain) != partition.ground:
        raise GroundSetMismatch("partition does not cover the codomain of the map")
    where = partition.block_index()
    return Partition.from_assignment(f.domain, [where[y] for y in f.images])


@dataclass(frozen=True, eq=False)
class PersistentSet:
    ground: tuple
    breakpoints: tuple
    partitions: tuple

    def __post_init__(self):
        object.__setattr__(self, "ground", tuple(sorted_labels(self.ground)))
        object.__setattr__(self, "breakpoints", tuple(float(r) for r in self.breakpoints))
        object.__setattr__(self, "partitions", tuple(self.partitions))
        g = frozenset(self.ground)
        if len(g) != len(self.ground):
            raise NotAPersistentSet("ground labels must be unique")
        if len(self.partitions) != len(self.breakpoints) + 1:
            raise NotAPersistentSet("need one partition per interval")
        prev = 0.0
        for r in self.breakpoints:
            if not (r > prev) or not math.isfinite(r):
                raise NotAPersistentSet("breakpoints must be finite, positive and strictly increasing")
            prev = r
        for p in self.partitions:
            if p.ground != g:
                raise NotAPersistentSet("partition ground set differs from the persistent set")
        for a, b in zip(self.partitions, self.partitions[1:]):
            if a == b:
                raise NotAPersistentSet("adjacent intervals carry the same partition")
            if not refines(a, b):
                raise NotAPersistentSet("partitions must coarsen as the scale grows")

    @classmethod
    def from_levels(cls, ground: Iterable, levels: Iterable[tuple[float, Partition]],
                    tol: float = TAU_H) -> "PersistentSet":
        """Build from ``(r, partition)`` pairs meaning "from ``r`` on, use ``partition``".

        Levels closer than ``tol`` to the start of a group are collapsed onto it
        (the coarsest partition of the group wins), levels within ``tol`` of 0
        define the partition at 0, and repeated partitions are dropped. With no
        level at 0 the partition at 0 is discrete.
        """
        ground = tuple(ground)
        levels = sorted(levels, key=lambda t: t[0])
        grouped: list[list] = []
        for r, p in levels:
            if r < -tol:
                raise NegativeScale(f"level at negative scale {r!r}")
            r = 0.0 if r <= tol else float(r)
            if grouped and r - grouped[-1][0] <= tol:
                grouped[-1][1] = p
            else:
                grouped.append([r, p])
        if not grouped or grouped[0][0] != 0.0:
            grouped.insert(0, [0.0, Partition.discrete(ground)])
        bps, parts = [], [grouped[0][1]]
        for r, p in grouped[1:]:
            if p != parts[-1]:
                bps.append(r)
                parts.append(p)
        return cls(ground, tuple(bps), tuple(parts))

    @classmethod
    def constant(cls, partition: Partition) -> "PersistentSet":
        return cls(tuple(partition.ground), (), (partition,))

    # comparisons -------------------------------------------------------------
    def __eq__(self, other) -> bool:
        if not isinstance(other, PersistentSet):
            return NotImplemented
        return (self.ground == other.ground and self.breakpoints == other.breakpoints
                and self.partitions == other.partitions)

    def __hash__(self) -> int:
        return hash((self.ground, self.breakpoints, self.partitions))

    def isclose(self, other: "PersistentSet", tol: float = TAU_H) -> bool:
        """Equal partitions and breakpoints equal within ``tol``."""
        return (self.ground == other.ground and self.partitions == other.partitions
                and len(self.breakpoints) == len(other.breakpoints)
                and all(abs(a - b) <= tol for a, b in zip(self.breakpoints, other.breakpoints)))

    # structure ---------------------------------------------------------------
    @property
    def is_dendrogram(self) -> bool:
        return len(self.partitions[-1]) <= 1

    @property
    def levels(self) -> list[tuple[float, Partition]]:
        return list(zip((0.0,) + self.breakpoints, self.partitions))

    def __call__(self, r: float) -> Partition:
        return theta_at(self, r)

    def __repr__(self) -> str:
        body = "; ".join(f"r={r:g}: {p}" for r, p in self.levels)
        return f"{type(self).__name__}({body})"


class Dendrogram(PersistentSet):
    """A persistent set that ends in the single-block partition."""

    def __post_init__(self):
        super().__post_init__()
        if len(self.partitions[-1]) > 1:
            raise NotADendrogram("final partition has more than one block")


def as_dendrogram(P: PersistentSet) -> Dendrogram:
    if isinstance(P, Dendrogram):
        return P
    if not P.is_dendrogram:
        raise NotADendrogram("final partition has more than one block")
    return Dendrogram(P.ground, P.breakpoints, P.partitions)


def theta_at(P: PersistentSet, r: float) -> Partition:
    """Partition of ``P`` at scale ``r`` (right-continuous)."""
    if r < 0:
        raise NegativeScale(f"scale must be non-negative, got {r!r}")
    return P.partitions[bisect.bisect_right(P.breakpoints, r)]


@dataclass(frozen=True)
class PreservationVerdict:
    """Outcome of :func:`is_persistence_preserving`.

    On failure ``interval`` is the first interval ``[lo, hi)`` on which the
    refinement breaks, ``r`` a representative scale inside it (the midpoint,
    or ``lo`` for the unbounded last interval), ``block`` the offending block
    of the source partition and ``pulled`` the pulled-back blocks it meets.
    """

    ok: bool
    r: float | None = None
    interval: tuple | None = None
    block: tuple | None = None
    pulled: tuple = field(default=())

    def __bool__(self) -> bool:
        return self.ok


def is_persistence_preserving(f: SetMap, P: PersistentSet, Q: PersistentSet) -> PreservationVerdict:
    """Check that ``P(r)`` refines ``f*(Q(r))`` for every scale ``r``.

    Both sides are piecewise constant, so testing the left end of every
    interval of the common refinement of the two breakpoint lists suffices.
    """
    if set(f.domain) != set(P.ground) or len(f.domain) != len(P.ground):
        raise GroundSetMismatch("map domain differs from the source ground set")
    if set(f.codomain) != set(Q.ground) or len(f.codomain) != len(Q.ground):
        raise GroundSetMismatch("map codomain differs from the target ground set")
    cuts = sorted(set((0.0,) + P.breakpoints + Q.breakpoints))
    for a, lo in enumerate(cuts):
        source = theta_at(P, lo)
        target = pullback(f, theta_at(Q, lo))
        where = target.block_index()
        for b in source.blocks:
            hit = sorted({where[x] for x in b})
            if len(hit) > 1:
                hi = cuts[a + 1] if a + 1 < len(cuts) else math.inf
                r = lo if math.isinf(hi) else (lo + hi) / 2.0
                return PreservationVerdict(False, r, (lo, hi), b, tuple(target.blocks[i] for i in hit))
    return PreservationVerdict(True)


def scale_persistent(P: PersistentSet, lam: float) -> PersistentSet:
    """The persistent set ``r -> P(r / lam)``."""
    if not lam > 0:
        raise NonpositiveScale(f"scale must be positive, got {lam!r}")
    return type(P)(P.ground, tuple(lam * r for r in P.breakpoints), P.partitions)


def persistent_to_pseudometric(P: PersistentSet) -> FiniteMetricSpace:
    """Distance = least scale at which two points share a block.

    The result is an ultrametric (a pseudometric when the partition at 0 is
    not discrete).
    """
    if not P.is_dendrogram:
        raise NotADendrogram("final partition has more than one block")
    labels = P.ground
    pos = {x: i for i, x in enumerate(labels)}
    n = len(labels)
    d = np.full((n, n), np.nan)
    for r, part in P.levels:
        for b in part.blocks:
            idx = [pos[x] for x in b]
            sub = d[np.ix_(idx, idx)]
            sub[np.isnan(sub)] = r
            d[np.ix_(idx, idx)] = sub
    np.fill_diagonal(d, 0.0)
    return FiniteMetricSpace(d, labels)


@dataclass(frozen=True)
class IntervalRecord:
    start: float
    end: float
    partition: Partition

    @property
    def length(self) -> float:
        return self.end - self.start


def interval_report(P: PersistentSet) -> list[IntervalRecord]:
    """The intervals of constancy of ``P``, the last one unbounded."""
    starts = (0.0,) + P.breakpoints
    ends = P.breakpoints + (math.inf,)
    return [IntervalRecord(a, b, p) for a, b, p in zip(starts, ends, P.partitions)]


def long_intervals(P: PersistentSet, threshold: float) -> list[IntervalRecord]:
    """Finite intervals at least ``threshold`` long."""
    return [rec for rec in interval_report(P) if math.isfinite(rec.end) and rec.length >= threshold]


# serialization ---------------------------------------------------------------

def fmt_num(x: float) -> str:
    """Numbers are written with 12 significant digits."""
    return "inf" if math.isinf(x) else format(float(x), ".12g")


def to_text(P: PersistentSet) -> str:
    """One line per level: ``r=<height>; <block>|<block>|...``."""
    return "".join(f"r={fmt_num(r)}; {p}\n" for r, p in P.levels)


def from_text(text: str) -> PersistentSet:
    """Parse :func:`to_text` output. Labels come back as strings."""
    levels = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        head, _, body = line.partition(";")
        if not head.startswith("r="):
            raise NotAPersistentSet(f"bad dendrogram line {line!r}")
        blocks = tuple(tuple(b.split(",")) for b in body.strip().split("|")) if body.strip() else ()
        levels.append((float(head[2:]), Partition(blocks)))
    if not levels:
        raise NotAPersistentSet("empty dendrogram text")
    ground = tuple(levels[0][1].ground)
    if levels[0][0] != 0.0:
        raise NotAPersistentSet("first level must be at r=0")
    P = PersistentSet(ground, tuple(r for r, _ in levels[1:]), tuple(p for _, p in levels))
    return as_dendrogram(P) if P.is_dendrogram else P


def to_json(P: PersistentSet) -> str:
    doc = {
        "ground": [str(x) for x in P.ground],
        "levels": [{"r": float(fmt_num(r)), "blocks": [[str(x) for x in b] for b in p.blocks]}
                   for r, p in P.levels],
    }
    return json.dumps(doc, indent=2) + "\n"


def from_json(text: str) -> PersistentSet:
    doc = json.loads(text)
    levels = [(lvl["r"], Partition(tuple(tuple(b) for b in lvl["blocks"]))) for lvl in doc["levels"]]
    P = PersistentSet(tuple(doc["ground"]), tuple(r for r, _ in levels[1:]), tuple(p for _, p in levels))
    return as_dendrogram(P) if P.is_dendrogram else P


def to_dot(P: PersistentSet, name: str = "dendrogram") -> str:
    """Graphviz rendering: one node per (level, block), edges to the parent block."""
    lines = [f"digraph {name} {{", "  rankdir=BT;"]
    levels = P.levels
    ids = {}
    for li, (r, part) in enumerate(levels):
        for bi, b in enumerate(part.blocks):
            node = f"n{li}_{bi}"
            ids[(li, b)] = node
            label = ",".join(str(x) for x in b)
            lines.append(f'  {node} [label="{label}\\nr={fmt_num(r)}"];')
    for li in range(1, len(levels)):
        parent = levels[li][1]
        for b in levels[li - 1][1].blocks:
            up = parent.block_of(b[0])
            lines.append(f"  {ids[(li - 1, b)]} -> {ids[(li, up)]};")
    lines.append("}")
    return "\n".join(lines) + "\n"
