"""Sampling experiments for the stability and convergence bounds of single linkage.

A compact shape in the plane is represented by a dense finite net (the
*proxy*). Samples are quasi-uniform: scrambled Halton sequences, so a sample
of size ``n`` is the prefix of the sample of any larger size with the same
seed. The ambient space of an experiment is the proxy together with every
sample drawn, so the samples are genuine subsets of a finite metric space
and the bounds apply to it verbatim.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.spatial import cKDTree
from scipy.stats import qmc

from .errors import BadSpec, MissingLabels, OverlappingComponents, SampleTooSparse
from .gh import distortion_indices, gh_exact
from .metric import FiniteMetricSpace, from_points, path_metric
from .ultrametric import epsilon_metric, minimax_matrix

#: proxy size = REF_FACTOR * largest sample size
REF_FACTOR = 50


# shapes -----------------------------------------------------------------------

@dataclass(frozen=True)
class Circle:
    radius: float = 1.0
    center: tuple = (0.0, 0.0)

    def __post_init__(self):
        if not self.radius > 0:
            raise BadSpec("radius must be positive")
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))

    def measure(self) -> float:
        return 2 * math.pi * self.radius

    def draw(self, u: np.ndarray) -> np.ndarray:
        t = 2 * math.pi * u[:, 0]
        return np.column_stack([self.center[0] + self.radius * np.cos(t),
                                self.center[1] + self.radius * np.sin(t)])

    dim = 1


@dataclass(frozen=True)
class Disk:
    radius: float = 1.0
    center: tuple = (0.0, 0.0)

    def __post_init__(self):
        if not self.radius > 0:
            raise BadSpec("radius must be positive")
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))

    def measure(self) -> float:
        return math.pi * self.radius ** 2

    def draw(self, u: np.ndarray) -> np.ndarray:
        rho = self.radius * np.sqrt(u[:, 0])
        t = 2 * math.pi * u[:, 1]
        return np.column_stack([self.center[0] + rho * np.cos(t), self.center[1] + rho * np.sin(t)])

    dim = 2


@dataclass(frozen=True)
class Union:
    """Disjoint labelled components."""

    components: tuple  # ((label, Circle | Disk), ...)


def three_disks_shape(w13: float, w23: float, w12: float, radius: float = 1.0) -> Union:
    """Three disks with prescribed gaps ``D(Z_i, Z_j) = w_ij``.

    Gaps between disks are center distance minus ``2 * radius``, so the
    centers form a triangle with sides ``w_ij + 2 * radius``; it must exist.
    """
    c13, c23, c12 = (w + 2 * radius for w in (w13, w23, w12))
    if min(w13, w23, w12) <= 0:
        raise BadSpec("gaps must be positive")
    if c12 > c13 + c23 or c13 > c12 + c23 or c23 > c12 + c13:
        raise BadSpec("no planar placement of three disks realises these gaps; enlarge the radius")
    # component 3 at the origin, component 1 on the x axis
    x = (c13 ** 2 + c23 ** 2 - c12 ** 2) / (2 * c13)
    y = math.sqrt(max(c23 ** 2 - x ** 2, 0.0))
    return Union((
        (1, Disk(radius, (c13, 0.0))),
        (2, Disk(radius, (x, y))),
        (3, Disk(radius, (0.0, 0.0))),
    ))


def two_blobs_shape(gap: float, radius: float = 1.0) -> Union:
    c = gap + 2 * radius
    return Union(((1, Disk(radius, (0.0, 0.0))), (2, Disk(radius, (c, 0.0)))))


def _params(body: str) -> dict:
    out = {}
    for item in filter(None, (s.strip() for s in body.split(","))):
        key, sep, val = item.partition("=")
        if not sep:
            raise BadSpec(f"expected key=value, got {item!r}")
        try:
            out[key.strip()] = float(val)
        except ValueError:
            raise BadSpec(f"bad number in {item!r}") from None
    return out


def _component(doc: dict):
    kind = doc.get("type")
    center = tuple(float(c) for c in doc.get("center", (0.0, 0.0)))
    radius = float(doc.get("radius", 1.0))
    if radius <= 0:
        raise BadSpec("radius must be positive")
    if kind == "circle":
        return Circle(radius, center)
    if kind == "disk":
        return Disk(radius, center)
    raise BadSpec(f"unknown component type {kind!r}")


def parse_shape(text: str):
    """Parse ``circle:radius=1``, ``disk:radius=1,cx=0,cy=0``,
    ``disks3:w13=4,w23=6,w12=11,radius=1``, ``blobs:gap=5,radius=1`` or a JSON
    document ``{"components": [{"label": .., "type": "disk", "center": [..], "radius": ..}, ...]}``.
    """
    text = text.strip()
    if text.startswith("{"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise BadSpec(f"invalid JSON shape: {exc}") from None
        if "components" in doc:
            return Union(tuple((c.get("label", i), _component(c)) for i, c in enumerate(doc["components"])))
        return _component(doc)
    kind, _, body = text.partition(":")
    p = _params(body)
    try:
        if kind == "circle":
            return Circle(p.get("radius", 1.0), (p.get("cx", 0.0), p.get("cy", 0.0)))
        if kind == "disk":
            return Disk(p.get("radius", 1.0), (p.get("cx", 0.0), p.get("cy", 0.0)))
        if kind == "disks3":
            return three_disks_shape(p["w13"], p["w23"], p["w12"], p.get("radius", 1.0))
        if kind == "blobs":
            return two_blobs_shape(p["gap"], p.get("radius", 1.0))
    except KeyError as exc:
        raise BadSpec(f"missing parameter {exc.args[0]!r}") from None
    raise BadSpec(f"unknown shape {kind!r}")


def _parts(shape) -> list:
    if isinstance(shape, (Circle, Disk)):
        return [(None, shape)]
    if isinstance(shape, Union):
        if not shape.components:
            raise BadSpec("union without components")
        return list(shape.components)
    raise BadSpec(f"not a shape: {shape!r}")


def _allocate(n: int, weights: Sequence[float]) -> list[int]:
    """Largest-remainder split of ``n``, at least one per part when possible."""
    k = len(weights)
    w = np.asarray(weights, dtype=float) / sum(weights)
    if n >= k:
        base = np.ones(k, dtype=int)
        rest = n - k
    else:
        base = np.zeros(k, dtype=int)
        rest = n
    quota = w * rest
    counts = base + np.floor(quota).astype(int)
    short = n - counts.sum()
    order = np.argsort(-(quota - np.floor(quota)), kind="stable")
    counts[order[:short]] += 1
    return counts.tolist()


def _boundary_point(s, toward: np.ndarray) -> np.ndarray:
    c = np.asarray(s.center, dtype=float)
    v = toward - c
    return c + s.radius * v / np.linalg.norm(v)


def anchor_points(shape) -> tuple[np.ndarray, np.ndarray | None]:
    """Closest pairs between components, so the net realises every gap exactly."""
    parts = _parts(shape)
    pts, labs = [], []
    for a in range(len(parts)):
        for b in range(a + 1, len(parts)):
            (la, sa), (lb, sb) = parts[a], parts[b]
            ca, cb = np.asarray(sa.center, float), np.asarray(sb.center, float)
            if np.allclose(ca, cb):
                continue
            pts += [_boundary_point(sa, cb), _boundary_point(sb, ca)]
            labs += [la, lb]
    if not pts:
        return np.zeros((0, 2)), (None if len(parts) == 1 and parts[0][0] is None else np.array([], dtype=object))
    return np.array(pts), np.array(labs, dtype=object)


def draw(shape, n: int, seed: int, iid: bool = False) -> tuple[np.ndarray, np.ndarray | None]:
    """``n`` points on ``shape`` and their component labels (``None`` for a single shape)."""
    parts = _parts(shape)
    counts = _allocate(n, [s.measure() for _, s in parts])
    pts, labs = [], []
    for k, ((label, s), c) in enumerate(zip(parts, counts)):
        rng = np.random.default_rng([seed, k])
        if iid:
            u = rng.random((c, s.dim))
        else:
            u = qmc.Halton(d=s.dim, scramble=True, seed=rng).random(c) if c else np.zeros((0, s.dim))
        pts.append(s.draw(u) if c else np.zeros((0, 2)))
        labs.extend([label] * c)
    points = np.concatenate(pts, axis=0)
    return points, (None if isinstance(shape, (Circle, Disk)) else np.array(labs, dtype=object))


# ambient samples ------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class AmbientSample:
    """A dense proxy of a compact shape plus samples taken from it.

    ``points`` is the ambient set ``Z`` (proxy net followed by the samples),
    ``samples`` holds one index array per sample, ``components`` the component
    label of every ambient point (or ``None``).
    """

    points: np.ndarray
    samples: tuple
    components: np.ndarray | None = None
    n_ref: int = 0
    shape: object = None

    def sample_points(self, k: int = 0) -> np.ndarray:
        return self.points[self.samples[k]]

    def sample_space(self, k: int = 0) -> FiniteMetricSpace:
        return from_points(self.sample_points(k))

    def sample_components(self, k: int = 0) -> np.ndarray:
        if self.components is None:
            raise MissingLabels("sample has no component labels")
        return self.components[self.samples[k]]

    def ambient_space(self) -> FiniteMetricSpace:
        """The whole ambient set as a metric space (dense matrix; small proxies only)."""
        return from_points(self.points)

    def covering_radius(self, k: int = 0) -> float:
        """``R(X)``: the farthest ambient point from sample ``k``."""
        dist, _ = cKDTree(self.sample_points(k)).query(self.points)
        return float(dist.max())

    def proxy_mesh(self, factor: int = 4, seed: int = 987654321) -> float:
        """Estimated covering radius of the proxy net itself in the true shape."""
        if self.shape is None or self.n_ref == 0:
            return 0.0
        probe, _ = draw(self.shape, factor * self.n_ref, seed)
        dist, _ = cKDTree(self.points[: self.n_ref]).query(probe)
        return float(dist.max())


def sample_shape(shape, n: int | Sequence[int], seed: int | Sequence[int], n_ref: int | None = None,
                 ref_seed: int = 10_007, iid: bool = False) -> AmbientSample:
    """Draw one or more samples from ``shape`` inside a shared ambient proxy.

    ``n`` and ``seed`` may be sequences to draw several samples (e.g. ``X`` and
    ``X'``). The proxy has ``n_ref`` points, ``REF_FACTOR`` times the largest
    sample by default.
    """
    if isinstance(shape, str):
        shape = parse_shape(shape)
    sizes = [n] if np.isscalar(n) else list(n)
    seeds = [seed] if np.isscalar(seed) else list(seed)
    if len(sizes) != len(seeds):
        raise BadSpec("need one seed per sample")
    if any(int(s) < 1 for s in sizes):
        raise BadSpec("sample size must be at least 1")
    n_ref = REF_FACTOR * max(sizes) if n_ref is None else n_ref
    ref, ref_lab = draw(shape, n_ref, ref_seed)
    if isinstance(shape, Union):
        extra, extra_lab = anchor_points(shape)
        ref = np.concatenate([ref, extra], axis=0)
        ref_lab = np.concatenate([ref_lab, extra_lab])
        n_ref = len(ref)
    chunks, labs, samples = [ref], [ref_lab], []
    offset = n_ref
    for size, s in zip(sizes, seeds):
        p, lab = draw(shape, int(size), int(s), iid=iid)
        chunks.append(p)
        labs.append(lab)
        samples.append(np.arange(offset, offset + len(p)))
        offset += len(p)
    comps = None if labs[0] is None else np.concatenate(labs)
    return AmbientSample(np.concatenate(chunks, axis=0), tuple(samples), comps, n_ref, shape)


def _component_labels(sample: AmbientSample) -> list:
    if sample.components is None:
        raise MissingLabels("ambient sample has no component labels")
    return sorted(set(sample.components.tolist()))


def _regions_meet(a, b) -> bool:
    d = float(np.hypot(a.center[0] - b.center[0], a.center[1] - b.center[1]))
    if isinstance(a, Circle) and isinstance(b, Circle):
        return abs(a.radius - b.radius) <= d <= a.radius + b.radius
    if isinstance(a, Disk) and isinstance(b, Disk):
        return d <= a.radius + b.radius
    circle, disk = (a, b) if isinstance(a, Circle) else (b, a)
    return abs(d - circle.radius) <= disk.radius


def component_weights(sample: AmbientSample) -> tuple[list, np.ndarray]:
    """Component labels and the matrix of set distances between components."""
    labels = _component_labels(sample)
    if isinstance(sample.shape, Union):
        parts = sample.shape.components
        for i in range(len(parts)):
            for j in range(i + 1, len(parts)):
                if _regions_meet(parts[i][1], parts[j][1]):
                    raise OverlappingComponents(f"components {parts[i][0]!r} and {parts[j][0]!r} meet")
    groups = [sample.points[sample.components == a] for a in labels]
    k = len(labels)
    W = np.zeros((k, k))
    for a in range(k):
        tree = cKDTree(groups[a])
        for b in range(a + 1, k):
            W[a, b] = W[b, a] = float(tree.query(groups[b])[0].min())
    off = W[~np.eye(k, dtype=bool)]
    if k > 1 and off.min() <= 0:
        raise OverlappingComponents("two components touch or overlap")
    return labels, W


def component_space(sample: AmbientSample) -> FiniteMetricSpace:
    """Components as points, with the shortest-path metric over inter-component gaps."""
    labels, W = component_weights(sample)
    return path_metric(W, labels)


# experiments ------------------------------------------------------------------------

def nn_correspondence(P: np.ndarray, Q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Pairs each point with its nearest neighbour on the other side (both directions)."""
    _, q_of_p = cKDTree(Q).query(P)
    _, p_of_q = cKDTree(P).query(Q)
    ip = np.concatenate([np.arange(len(P)), p_of_q])
    iq = np.concatenate([q_of_p, np.arange(len(Q))])
    pairs = np.unique(np.column_stack([ip, iq]), axis=0)
    return pairs[:, 0], pairs[:, 1]


@dataclass
class StabilityRow:
    n: int
    n_prime: int
    seed: int
    seed_prime: int
    R: float
    R_prime: float
    lhs: float
    method: str
    bound: float
    mesh: float

    @property
    def passed(self) -> bool:
        return self.lhs <= self.bound


def stability_experiment(shape, sizes: Sequence[int], seeds: Sequence[int], exact_limit: int = 10,
                         n_ref: int | None = None) -> list[StabilityRow]:
    """For each size ``n`` and seed ``s`` compare two samples drawn with seeds ``s`` and ``s + 1``.

    The left side is the exact GH distance between the minimax ultrametrics
    when ``2n <= exact_limit``, otherwise the distortion of the
    nearest-neighbour correspondence, which bounds it from above.
    """
    if isinstance(shape, str):
        shape = parse_shape(shape)
    rows = []
    for n in sizes:
        for s in seeds:
            amb = sample_shape(shape, (n, n), (s, s + 1), n_ref=n_ref or REF_FACTOR * max(sizes))
            R, Rp = amb.covering_radius(0), amb.covering_radius(1)
            EX, EXp = epsilon_metric(amb.sample_space(0)), epsilon_metric(amb.sample_space(1))
            if EX.n + EXp.n <= exact_limit:
                lhs, method = gh_exact(EX, EXp, exact_limit), "exact"
            else:
                ip, iq = nn_correspondence(amb.sample_points(0), amb.sample_points(1))
                lhs, method = distortion_indices(EX.dist, EXp.dist, ip, iq), "nn-upper"
            rows.append(StabilityRow(n, n, s, s + 1, R, Rp, lhs, method, 2 * (R + Rp), amb.proxy_mesh()))
    return rows


@dataclass
class ConvergenceRow:
    n: int
    seed: int
    R: float
    delta: float
    distortion: float
    bound: float
    sandwich_ok: bool
    all_hit: bool
    mesh: float

    @property
    def passed(self) -> bool:
        return self.distortion <= self.bound and self.sandwich_ok and self.all_hit


def convergence_terms(amb: AmbientSample, k: int = 0):
    """Ultrametrics of the sample and of the component space, aligned through ``x -> alpha(x)``."""
    labels, W = component_weights(amb)
    A = path_metric(W, labels)
    eps_A = minimax_matrix(A.dist)
    alpha = np.array([labels.index(c) for c in amb.sample_components(k)], dtype=int)
    eps_X = minimax_matrix(amb.sample_space(k).dist)
    return eps_X, eps_A, alpha, W


def convergence_experiment(shape, sizes: Sequence[int], seeds: Sequence[int] = (0,),
                           n_ref: int | None = None) -> list[ConvergenceRow]:
    """Distortion of ``{(x, alpha(x))}`` between the sample and the component space.

    Raises ``SampleTooSparse`` when ``R(X) >= delta / 2`` with ``delta`` the
    smallest gap between components.
    """
    if isinstance(shape, str):
        shape = parse_shape(shape)
    rows = []
    for n in sizes:
        for s in seeds:
            amb = sample_shape(shape, n, s, n_ref=n_ref or REF_FACTOR * max(sizes))
            R = amb.covering_radius()
            eps_X, eps_A, alpha, W = convergence_terms(amb)
            k = W.shape[0]
            delta = float(W[~np.eye(k, dtype=bool)].min()) if k > 1 else math.inf
            if not R < delta / 2:
                raise SampleTooSparse(f"R(X) = {R:.6g} is not below half the component gap {delta:.6g}")
            target = eps_A[np.ix_(alpha, alpha)]
            dist = float(np.abs(eps_X - target).max())
            tol = 1e-12 * max(1.0, float(eps_X.max()))
            sandwich = bool(np.all(target <= eps_X + tol) and np.all(eps_X <= target + 2 * R + tol))
            all_hit = len(set(alpha.tolist())) == k
            rows.append(ConvergenceRow(n, s, R, delta, dist, 2 * R, sandwich, all_hit, amb.proxy_mesh()))
    return rows


def rows_to_csv(rows: Sequence) -> str:
    """Experiment rows as CSV, numbers with 12 significant digits."""
    if not rows:
        return ""
    fields = list(rows[0].__dataclass_fields__) + ["passed"]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(fields)
    for row in rows:
        vals = [getattr(row, f) for f in fields]
        w.writerow([format(v, ".12g") if isinstance(v, float) else v for v in vals])
    return buf.getvalue()
