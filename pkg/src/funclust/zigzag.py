"""Bootstrap zig-zag clustering and interval decomposition over the two-element field.

Repeated samples ``S_0, ..., S_{N-1}`` of a metric space are clustered at a
fixed threshold together with the unions ``S_i ∪ S_{i+1}``. Because
single linkage at a fixed scale is compatible with inclusions, every block
of a sample lies in exactly one block of each adjacent union, which gives a
zig-zag of set maps

    B(S_0) -> B(S_0 ∪ S_1) <- B(S_1) -> B(S_1 ∪ S_2) <- ... <- B(S_{N-1}).

Linearizing over F2 and splitting into interval summands turns clusters that
persist across many samples into long bars.

Vectors over F2 are stored as Python ints used as bitsets; bit ``i`` is the
coefficient of the ``i``-th basis element.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import EmptySample, NonpositiveScale, ShapeMismatch
from .metric import FiniteMetricSpace, components_at
from .persistence import Partition

FORWARD, BACKWARD = "f", "b"


# F2 helpers ---------------------------------------------------------------------

def to_bits(column: Sequence[int]) -> int:
    return sum(1 << i for i, v in enumerate(column) if int(v) % 2)


def from_bits(v: int, dim: int) -> np.ndarray:
    return np.array([(v >> i) & 1 for i in range(dim)], dtype=np.uint8)


def columns(matrix: np.ndarray) -> list[int]:
    """Columns of a 0/1 matrix as bitsets."""
    return [to_bits(matrix[:, j]) for j in range(matrix.shape[1])]


def apply(cols: list[int], v: int) -> int:
    """Matrix (given by its columns) times vector."""
    out = 0
    while v:
        low = v & -v
        out ^= cols[low.bit_length() - 1]
        v ^= low
    return out


def rank_f2(matrix: np.ndarray) -> int:
    table: dict[int, int] = {}
    for v in columns(np.asarray(matrix)):
        while v:
            p = v.bit_length() - 1
            if p not in table:
                table[p] = v
                break
            v ^= table[p]
    return len(table)


class _Reducer:
    """Incremental Gaussian elimination that remembers how each pivot row was formed."""

    def __init__(self):
        self.table: dict[int, tuple[int, int]] = {}

    def reduce(self, v: int, combo: int) -> tuple[int, int]:
        while v:
            p = v.bit_length() - 1
            if p not in self.table:
                return v, combo
            pv, pc = self.table[p]
            v ^= pv
            combo ^= pc
        return 0, combo

    def add(self, v: int, combo: int) -> bool:
        """Insert; returns False (and leaves the table alone) if ``v`` is dependent."""
        r, c = self.reduce(v, combo)
        if r == 0:
            return False
        self.table[r.bit_length() - 1] = (r, c)
        return True


# diagrams -------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ZigZagF2Diagram:
    """Spaces ``F2^dims[i]`` joined by arrows; arrow ``j`` links ``j`` and ``j + 1``.

    A forward arrow is a ``dims[j+1] x dims[j]`` matrix ``V_j -> V_{j+1}``, a
    backward arrow a ``dims[j] x dims[j+1]`` matrix ``V_{j+1} -> V_j``. The
    default directions alternate starting forward.
    """

    dims: tuple
    matrices: tuple
    directions: tuple

    def __init__(self, dims: Sequence[int], matrices: Sequence, directions: Sequence[str] | None = None):
        dims = tuple(int(d) for d in dims)
        if not dims or min(dims) < 0:
            raise ShapeMismatch("need at least one space and nonnegative dimensions")
        if len(matrices) != len(dims) - 1:
            raise ShapeMismatch(f"{len(dims)} spaces need {len(dims) - 1} arrows, got {len(matrices)}")
        if directions is None:
            directions = tuple(FORWARD if j % 2 == 0 else BACKWARD for j in range(len(matrices)))
        directions = tuple(directions)
        if len(directions) != len(matrices) or set(directions) - {FORWARD, BACKWARD}:
            raise ShapeMismatch("one direction 'f' or 'b' per arrow")
        mats = []
        for j, (m, d) in enumerate(zip(matrices, directions)):
            want = (dims[j + 1], dims[j]) if d == FORWARD else (dims[j], dims[j + 1])
            m = np.asarray(m, dtype=np.int64)
            if m.size == 0 and 0 in want:
                m = m.reshape(want)
            if m.shape != want:
                raise ShapeMismatch(f"arrow {j} has shape {m.shape}, expected {want}")
            mats.append((m % 2).astype(np.uint8))
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "matrices", tuple(mats))
        object.__setattr__(self, "directions", directions)

    @property
    def length(self) -> int:
        """Index of the last space."""
        return len(self.dims) - 1

    def ranks(self) -> list[int]:
        return [rank_f2(m) for m in self.matrices]

    def to_dict(self) -> dict:
        return {
            "dims": list(self.dims),
            "directions": list(self.directions),
            "matrices": [m.tolist() for m in self.matrices],
        }


@dataclass(frozen=True)
class Barcode:
    """Multiset of closed integer intervals ``[a, b]``, sorted by ``(a, b)``."""

    bars: tuple

    def __init__(self, bars):
        object.__setattr__(self, "bars", tuple(sorted((int(a), int(b)) for a, b in bars)))

    def __iter__(self):
        return iter(self.bars)

    def __len__(self) -> int:
        return len(self.bars)

    def spanning(self, start: int, end: int) -> list[tuple[int, int]]:
        return [(a, b) for a, b in self.bars if a <= start and b >= end]

    def to_text(self) -> str:
        return "".join(f"{a} {b}\n" for a, b in self.bars)


@dataclass(frozen=True)
class BarcodeVerdict:
    ok: bool
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def validate_barcode(V: ZigZagF2Diagram, B: Barcode | Sequence) -> BarcodeVerdict:
    """Dimension and rank consistency of a barcode with a diagram.

    Checks ``dim V_i = #{bars containing i}`` and, for every arrow, that its
    rank equals the number of bars containing both endpoints. These are
    necessary conditions for ``B`` to be the interval decomposition of ``V``.
    """
    bars = list(B)
    for a, b in bars:
        if not 0 <= a <= b <= V.length:
            return BarcodeVerdict(False, f"bar [{a}, {b}] outside [0, {V.length}]")
    for i, d in enumerate(V.dims):
        c = sum(a <= i <= b for a, b in bars)
        if c != d:
            return BarcodeVerdict(False, f"dimension mismatch at {i}: dim {d}, {c} bars")
    for j, r in enumerate(V.ranks()):
        c = sum(a <= j and j + 1 <= b for a, b in bars)
        if c != r:
            return BarcodeVerdict(False, f"rank mismatch at arrow {j}: rank {r}, {c} bars span it")
    return BarcodeVerdict(True)


# decomposition ----------------------------------------------------------------------

@dataclass
class _Bar:
    birth: int
    forward_born: bool  # born at index 0 or at the head of a forward arrow
    gen: int  # generator in the current space


def _robustness_key(bar: _Bar, slot: int) -> tuple:
    """Most robust first. A bar may absorb (be replaced by its sum with) any more robust bar.

    Adding bar ``k`` into bar ``i`` is an automorphism of the truncated
    diagram exactly when the births agree, or ``k`` is older and ``i`` was
    born at a forward arrow, or ``k`` is younger and was born at a backward
    arrow. This is a total preorder: kernel-born bars by birth descending,
    then forward-born bars by birth ascending.
    """
    if bar.forward_born:
        return (1, bar.birth, slot)
    return (0, -bar.birth, slot)


def interval_decomposition(V: ZigZagF2Diagram) -> Barcode:
    """Interval summands of a zig-zag of F2 vector spaces.

    Sweeps left to right keeping a basis of the current space whose elements
    are the current values of the open bars. At a forward arrow, bars whose
    images depend on images of more robust bars end, the rest carry on
    through their images, and a completion of the image starts new bars. At
    a backward arrow, the image is rewritten in the current basis and
    reduced with the least robust bar of each support as pivot; pivot bars
    carry on through preimages, the others end, and a kernel basis starts
    new bars.
    """
    done: list[tuple[int, int]] = []
    bars = [_Bar(0, True, 1 << i) for i in range(V.dims[0])]
    for j, (m, d) in enumerate(zip(V.matrices, V.directions)):
        cols = columns(m)
        order = sorted(range(len(bars)), key=lambda s: _robustness_key(bars[s], s))
        nxt: list[_Bar] = []
        if d == FORWARD:
            red = _Reducer()
            for s in order:
                image = apply(cols, bars[s].gen)
                if red.add(image, 0):
                    nxt.append(_Bar(bars[s].birth, bars[s].forward_born, image))
                else:
                    done.append((bars[s].birth, j))
            for i in range(V.dims[j + 1]):
                if red.add(1 << i, 0):
                    nxt.append(_Bar(j + 1, True, 1 << i))
        else:
            # coordinates in the current basis, with bit position = robustness rank
            basis = _Reducer()
            for pos, s in enumerate(order):
                basis.add(bars[s].gen, 1 << pos)
            red = _Reducer()
            kernel = []
            for col_index, c in enumerate(cols):
                _, coords = basis.reduce(c, 0)
                if not red.add(coords, 1 << col_index):
                    kernel.append(red.reduce(coords, 1 << col_index)[1])
            pivots = {}
            for p, (_, combo) in red.table.items():
                pivots[p] = combo
            for pos, s in enumerate(order):
                if pos in pivots:
                    pre = pivots[pos]
                    nxt.append(_Bar(bars[s].birth, bars[s].forward_born, pre))
                else:
                    done.append((bars[s].birth, j))
            for k in kernel:
                nxt.append(_Bar(j + 1, False, k))
        bars = nxt
    done.extend((b.birth, V.length) for b in bars)
    return Barcode(done)


def interval_diagram(a: int, b: int, length: int, directions: Sequence[str] | None = None) -> ZigZagF2Diagram:
    """The interval summand ``Z[a, b]`` on indices ``0..length``."""
    dims = [1 if a <= i <= b else 0 for i in range(length + 1)]
    if directions is None:
        directions = [FORWARD if j % 2 == 0 else BACKWARD for j in range(length)]
    mats = []
    for j, d in enumerate(directions):
        shape = (dims[j + 1], dims[j]) if d == FORWARD else (dims[j], dims[j + 1])
        mats.append(np.ones(shape, dtype=np.uint8))
    return ZigZagF2Diagram(dims, mats, directions)


# set diagrams ---------------------------------------------------------------------

@dataclass(frozen=True)
class ZigZagSetDiagram:
    """Samples, their blocks and the blocks of consecutive unions, with the induced maps.

    ``forward[i][k]`` is the union block of ``S_i ∪ S_{i+1}`` containing
    block ``k`` of ``S_i``; ``backward[i][k]`` the union block containing
    block ``k`` of ``S_{i+1}``.
    """

    samples: tuple
    multiplicities: tuple
    sample_blocks: tuple
    union_blocks: tuple
    forward: tuple
    backward: tuple

    @property
    def block_sets(self) -> list[Partition]:
        """Block-sets in diagram order ``B(S_0), B(S_0 ∪ S_1), B(S_1), ...``."""
        out = []
        for i, p in enumerate(self.sample_blocks):
            out.append(p)
            if i < len(self.union_blocks):
                out.append(self.union_blocks[i])
        return out

    def to_dict(self) -> dict:
        spaces = [[list(b) for b in p] for p in self.block_sets]
        maps = []
        for i in range(len(self.forward)):
            maps.append({"from": 2 * i, "to": 2 * i + 1, "map": list(self.forward[i])})
            maps.append({"from": 2 * i + 2, "to": 2 * i + 1, "map": list(self.backward[i])})
        return {
            "samples": [list(s) for s in self.samples],
            "multiplicities": [list(m) for m in self.multiplicities],
            "spaces": spaces,
            "maps": maps,
        }


def _cluster(X: FiniteMetricSpace, labels: Sequence, eps: float) -> Partition:
    sub = X.subspace(labels)
    return Partition.from_assignment(sub.labels, components_at(sub.dist, eps))


def _inclusion(small: Partition, big: Partition) -> tuple:
    where = big.block_index()
    return tuple(where[blk[0]] for blk in small)


def bootstrap_zigzag(X: FiniteMetricSpace, n: int, N: int, eps: float, seed) -> ZigZagSetDiagram:
    """Sample ``N`` times ``n`` points with replacement and cluster at threshold ``eps``.

    Repeated draws are collapsed, the multiplicities kept for reporting.
    Blocks are single-linkage clusters ``d <= eps`` of each sample and of each
    union of consecutive samples.
    """
    if X.n == 0 or n < 1:
        raise EmptySample("need a nonempty space and n >= 1")
    if N < 2:
        raise EmptySample("need at least two samples")
    if not eps > 0:
        raise NonpositiveScale("eps must be positive")
    rng = np.random.default_rng(seed)
    samples, mults, parts = [], [], []
    for _ in range(N):
        idx, counts = np.unique(rng.choice(X.n, size=n, replace=True), return_counts=True)
        labels = tuple(X.labels[i] for i in idx)
        samples.append(labels)
        mults.append(tuple(int(c) for c in counts))
        parts.append(_cluster(X, labels, eps))
    unions, fwd, bwd = [], [], []
    for i in range(N - 1):
        keep = set(samples[i]) | set(samples[i + 1])
        labels = tuple(x for x in X.labels if x in keep)
        u = _cluster(X, labels, eps)
        unions.append(u)
        fwd.append(_inclusion(parts[i], u))
        bwd.append(_inclusion(parts[i + 1], u))
    return ZigZagSetDiagram(tuple(samples), tuple(mults), tuple(parts), tuple(unions), tuple(fwd), tuple(bwd))


def set_map_matrix(images: Sequence[int], target_dim: int) -> np.ndarray:
    """Linearization of a set map given by the image index of each source element."""
    m = np.zeros((target_dim, len(images)), dtype=np.uint8)
    m[list(images), np.arange(len(images))] = 1
    return m


def linearize(D: ZigZagSetDiagram) -> ZigZagF2Diagram:
    """``F2[B(S_i)]`` with blocks in canonical order as the basis; columns are image blocks."""
    dims = [len(p) for p in D.block_sets]
    mats, dirs = [], []
    for i in range(len(D.forward)):
        u = len(D.union_blocks[i])
        mats.append(set_map_matrix(D.forward[i], u))
        dirs.append(FORWARD)
        mats.append(set_map_matrix(D.backward[i], u))
        dirs.append(BACKWARD)
    return ZigZagF2Diagram(dims, mats, dirs)


def random_set_zigzag(rng: np.random.Generator, length: int, max_dim: int,
                      directions: Sequence[str] | None = None) -> ZigZagF2Diagram:
    """Linearization of random set maps between sets of sizes ``1..max_dim``.

    ``length`` counts spaces, so the last index is ``length - 1``.
    """
    dims = rng.integers(1, max_dim + 1, size=length).tolist()
    if directions is None:
        directions = [FORWARD if j % 2 == 0 else BACKWARD for j in range(length - 1)]
    mats = []
    for j, d in enumerate(directions):
        src, dst = (dims[j], dims[j + 1]) if d == FORWARD else (dims[j + 1], dims[j])
        mats.append(set_map_matrix(rng.integers(0, dst, size=src).tolist(), dst))
    return ZigZagF2Diagram(dims, mats, directions)
