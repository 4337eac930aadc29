"""Geometric checks on constructed tilings and an approximate tiling metric."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import ConvexHull, QhullError, cKDTree
from shapely import STRtree
from shapely.ops import unary_union

from .algebra import default_core, tiles_intersection
from .errors import PreconditionError
from .geometry import IfsSpec, Similitude, compose_left, invert
from .symbolic import EventuallyPeriodic, Word, check_level, e_weight, omega_level
from .tiling import Tiling, pi_prefix


@dataclass(frozen=True)
class OverlapReport:
    ok: bool
    max_overlap: float
    worst_pair: tuple[int, int] | None
    threshold: float
    authoritative: bool = True
    note: str = ""


def overlap_threshold(spec: IfsSpec, tiling: Tiling) -> float:
    top = int(tiling.powers.max()) if len(tiling) else 0
    return 1e-9 * spec.geometry.area * spec.s ** (2 * top)


def nonoverlap_check(tiling: Tiling) -> OverlapReport:
    """Largest pairwise intersection area among tiles, with an R-tree
    prefilter on bounding boxes."""
    spec = tiling.spec
    if not spec.is_polygon:
        return _pointcloud_overlap(tiling)
    threshold = overlap_threshold(spec, tiling)
    polys = tiling.polygons
    tree = STRtree(polys)
    left, right = tree.query(polys, predicate="intersects")
    worst, pair = 0.0, None
    for a, b in zip(left, right):
        if a >= b:
            continue
        area = polys[a].intersection(polys[b]).area
        if area > worst:
            worst, pair = float(area), (int(a), int(b))
    return OverlapReport(worst <= threshold, worst, pair, threshold)


def _pointcloud_overlap(tiling: Tiling) -> OverlapReport:
    # estimate only: a point of one tile sitting closer to another tile than
    # the typical in-tile spacing suggests overlap
    pts = tiling.geometries
    n, m, _ = pts.shape
    if n < 2:
        return OverlapReport(True, 0.0, None, 0.0, False, "fewer than two tiles")
    flat = pts.reshape(-1, pts.shape[2])
    owner = np.repeat(np.arange(n), m)
    tree = cKDTree(flat)
    dist, idx = tree.query(flat, k=2)
    spacing = float(np.median(dist[:, 1]))
    worst, pair = 0.0, None
    close = tree.query_pairs(0.1 * spacing, output_type="ndarray")
    if len(close):
        cross = owner[close[:, 0]] != owner[close[:, 1]]
        frac = cross.mean()
        worst = float(frac)
        if cross.any():
            a, b = close[np.flatnonzero(cross)[0]]
            pair = (int(owner[a]), int(owner[b]))
    return OverlapReport(pair is None, worst, pair, 0.0, False, "nearest-neighbour estimate for point-cloud tiles")


@dataclass(frozen=True)
class SelfSimilarityReport:
    ok: bool
    psi: Similitude
    prefix_length: int
    larger_prefix_length: int
    decomposition: dict[int, tuple[int, ...]]
    failures: list[int] = field(default_factory=list)


def self_similarity_map(alpha: Word, beta: Word, spec: IfsSpec) -> Similitude:
    """``f_{-alpha} f_{-beta} (f_{-alpha})^-1``."""
    lead = spec.neg_word_map(alpha)
    return lead @ spec.neg_word_map(beta) @ invert(lead)


def self_similarity_check(alpha: Word, beta: Word, spec: IfsSpec, K: int | None = None, rtol: float = 1e-6) -> SelfSimilarityReport:
    """Check that ``psi`` sends every tile of ``pi(theta|K)``, with
    ``theta = alpha beta beta ...``, onto a union of tiles of the independently
    built ``pi(theta|K + |beta|)``.

    A tile ``f_{-theta|K} f_w (A)`` should be covered by the tiles with words
    extending ``w``; this is checked by transform algebra and, for polygons,
    by comparing the union of the pieces with the image tile.
    """
    pv = spec.pv
    alpha, beta = pv.validate(alpha), pv.validate(beta)
    if not beta:
        raise PreconditionError("the periodic part must be nonempty")
    word = EventuallyPeriodic(alpha, beta)
    need_weight = e_weight(alpha + beta, pv) + pv.a_max
    shortest = max(len(alpha) + len(beta), len(word.prefix_reaching(need_weight, pv)))
    if K is None:
        K = shortest
    if K < shortest:
        raise PreconditionError(f"prefix length {K} too short, need at least {shortest}")
    K2 = K + len(beta)
    small_word, big_word = word.prefix(K), word.prefix(K2)
    k1, k2 = e_weight(small_word, pv), e_weight(big_word, pv)
    check_level(k2)
    psi = self_similarity_map(alpha, beta, spec)

    small = pi_prefix(small_word, spec)
    big = pi_prefix(big_word, spec)
    words_small = omega_level(k1, pv)
    words_big = omega_level(k2, pv)
    pos_small = {w: j for j, w in enumerate(words_small)}
    children: dict[int, list[int]] = {j: [] for j in range(len(words_small))}
    for jb, w in enumerate(words_big):
        for cut in range(len(w), 0, -1):
            j = pos_small.get(w[:cut])
            if j is not None:
                children[j].append(jb)
                break

    images = small.mapped(psi)
    failures = []
    for j in range(len(small)):
        kids = children[j]
        if not kids:
            failures.append(j)
            continue
        # transform algebra: kid = psi o g_j o f_tail
        g = images.transform(j)
        ok = True
        for jb in kids:
            tail = words_big[jb][len(words_small[j]):]
            expect = g @ spec.word_map(tail)
            if not expect.isclose(big.transform(jb)):
                ok = False
                break
        if ok and spec.is_polygon:
            target = images.polygons[j]
            pieces = unary_union([big.polygons[jb] for jb in kids])
            covered = float(big.areas[kids].sum())
            mismatch = target.symmetric_difference(pieces).area
            ok = abs(covered - target.area) <= rtol * target.area and mismatch <= rtol * target.area
        if not ok:
            failures.append(j)
    decomposition = {j: tuple(children[j]) for j in range(len(small))}
    return SelfSimilarityReport(not failures, psi, K, K2, decomposition, failures)


@dataclass(frozen=True)
class QuasiReport:
    copies: list[Similitude]
    covering_radius: float
    samples: int

    @property
    def ok(self) -> bool:
        return bool(self.copies) and math.isfinite(self.covering_radius)


def find_copies(patch: Tiling, tiling: Tiling) -> list[Similitude]:
    """Isometries ``E`` with ``E(P)`` contained in ``T``, by transform matching."""
    spec = tiling.spec
    if not len(patch):
        raise PreconditionError("empty patch")
    counts = {int(p): int((tiling.powers == p).sum()) for p in np.unique(patch.powers)}
    anchor = min(range(len(patch)), key=lambda j: (counts[int(patch.powers[j])], j))
    inv_anchor = invert(patch.transform(anchor))
    same = np.flatnonzero(tiling.powers == patch.powers[anchor])
    found: list[Similitude] = []
    feats: list[np.ndarray] = []
    for sym in spec.symmetries:
        rel = compose_left(sym @ inv_anchor, patch.powers, patch.orthos, patch.trans)
        for t in same:
            g = tiling.transform(t)
            if (tiling.index.lookup(*compose_left(g, *rel)) < 0).any():
                continue
            E = g @ sym @ inv_anchor
            f = E.features()
            if any(np.abs(f - h).max() <= 1e-6 for h in feats):
                continue
            found.append(E)
            feats.append(f)
    return found


def _sample_points(window: Tiling) -> np.ndarray:
    if not window.spec.is_polygon:
        return window.centroids
    return np.concatenate([window.geometries.reshape(-1, window.spec.dim), window.centroids])


def _hull_points(points: np.ndarray) -> np.ndarray:
    # the farthest point of a set from any x is a vertex of its convex hull
    try:
        return points[ConvexHull(points).vertices]
    except QhullError:
        return points


def covering_radius(copies: list[Similitude], patch: Tiling, points: np.ndarray) -> float:
    """Smallest ``R`` such that a ball of radius ``R`` around every sample
    point holds a whole copy of the patch."""
    if not copies:
        return math.inf
    verts = _hull_points(patch.geometries.reshape(-1, patch.spec.dim))
    best = np.full(len(points), np.inf)
    for E in copies:
        image = E(verts)
        d = np.sqrt(((points[:, None, :] - image[None, :, :]) ** 2).sum(-1)).max(axis=1)
        best = np.minimum(best, d)
    return float(best.max())


def quasiperiodicity_probe(patch: Tiling, tiling: Tiling, window: Tiling | None = None) -> QuasiReport:
    """All copies of ``patch`` in ``tiling`` and the covering radius measured
    at the vertices and centroids of ``window`` (default: inner core of the
    tiling)."""
    copies = find_copies(patch, tiling)
    window = default_core(tiling) if window is None else window
    pts = _sample_points(window)
    return QuasiReport(copies, covering_radius(copies, patch, pts), len(pts))


@dataclass(frozen=True)
class InjectivityReport:
    ok: bool | None
    pairs: list[dict]
    note: str = ""


def injectivity_precondition(spec: IfsSpec, rtol: float = 1e-6) -> InjectivityReport:
    """True when no pair ``pi(i), pi(j)`` has common tiles that tile the
    intersection of their supports."""
    if not spec.is_polygon:
        return InjectivityReport(None, [], "point-cloud attractor: inconclusive")
    tilings = [pi_prefix((i,), spec) for i in spec.pv.letters()]
    pairs, ok = [], True
    for i in range(spec.n):
        for j in range(i + 1, spec.n):
            rep = tiles_intersection(tilings[i], tilings[j], rtol=rtol)
            pairs.append({
                "pair": (i + 1, j + 1),
                "common_tiles": int(len(rep.common)),
                "intersection_area": rep.support_area,
                "covered_area": rep.covered_area,
                "uncovered_fraction": rep.uncovered_fraction,
                "tiles_intersection": rep.tiles,
            })
            ok = ok and not rep.tiles
    return InjectivityReport(ok, pairs)


@dataclass(frozen=True)
class DistinctnessReport:
    ok: bool
    words: int
    collisions: list[tuple[Word, Word]]


def _fingerprint(tiling: Tiling, digits: int = 6) -> tuple:
    f = np.concatenate([tiling.orthos.reshape(len(tiling), -1), tiling.trans, tiling.powers[:, None]], axis=1)
    f = np.round(f, digits) + 0.0
    order = np.lexsort(f.T[::-1])
    return tuple(map(tuple, f[order]))


def pairwise_distinctness(spec: IfsSpec, max_length: int) -> DistinctnessReport:
    """``pi(w)`` for all words of length at most ``max_length`` are pairwise
    different tilings; equal fingerprints are re-compared exactly."""
    from itertools import product
    from .tiling import same_tiles

    buckets: dict[tuple, list[tuple[Word, Tiling]]] = {}
    count = 0
    collisions = []
    for n in range(max_length + 1):
        for w in product(spec.pv.letters(), repeat=n):
            t = pi_prefix(w, spec)
            count += 1
            key = (len(t), round(t.diameter, 6), _fingerprint(t))
            for other_w, other in buckets.get(key, []):
                if same_tiles(t, other):
                    collisions.append((other_w, w))
            buckets.setdefault(key, []).append((w, t))
    return DistinctnessReport(not collisions, count, collisions)


def _edges(tiling: Tiling):
    g = tiling.geometries
    start = g.reshape(-1, 2)
    end = np.roll(g, -1, axis=1).reshape(-1, 2)
    d = end - start
    length = np.sqrt((d**2).sum(-1))
    # distance from the origin to each edge bounds the conformal factor
    u = np.clip(-(start * d).sum(-1) / np.maximum(length**2, 1e-300), 0.0, 1.0)
    near = np.sqrt(((start + u[:, None] * d) ** 2).sum(-1))
    return start, end, length / (1 + near**2)


def boundary_samples(tiling: Tiling, spacing: float) -> np.ndarray:
    """Points along every tile edge, vertices included, so that consecutive
    points are at most ``spacing`` apart once projected to the sphere.
    Point-cloud tiles contribute their points."""
    if not len(tiling):
        raise PreconditionError("empty tiling")
    if not tiling.spec.is_polygon:
        return tiling.geometries.reshape(-1, tiling.spec.dim)
    start, end, arc = _edges(tiling)
    counts = np.maximum(1, np.ceil(arc / spacing)).astype(int)
    out = []
    for n_seg in np.unique(counts):
        mask = counts == n_seg
        t = np.arange(n_seg) / n_seg
        a, b = start[mask], end[mask]
        out.append((a[:, None, :] + t[None, :, None] * (b - a)[:, None, :]).reshape(-1, 2))
    return np.concatenate(out)


def stereographic(points: np.ndarray) -> np.ndarray:
    """Inverse stereographic projection onto the sphere of radius 1/2 resting
    on the plane at the origin."""
    pts = np.asarray(points, dtype=float)
    r2 = (pts**2).sum(-1, keepdims=True)
    return np.concatenate([pts / (1 + r2), r2 / (1 + r2)], axis=-1)


def _chord_to_arc(chord: np.ndarray) -> np.ndarray:
    return np.arcsin(np.clip(chord, 0.0, 1.0))


@dataclass(frozen=True)
class DistanceResult:
    value: float
    resolution: float

    def __float__(self) -> float:
        return self.value


def tiling_distance(t1: Tiling, t2: Tiling, samples: int = 2000) -> DistanceResult:
    """Hausdorff distance between sampled tile boundaries after projecting to
    the sphere, in the round metric.  ``resolution`` bounds the spherical
    gap between neighbouring samples, so it also bounds the error against the
    unsampled distance."""
    if samples < 100:
        raise PreconditionError("need at least 100 samples")
    if not len(t1) or not len(t2):
        raise PreconditionError("empty tiling")
    if t1.spec.dim != 2:
        raise PreconditionError("tiling distance is implemented for the plane")
    if not (t1.spec.is_polygon and t2.spec.is_polygon):
        raise PreconditionError("tiling distance needs polygon tiles")
    total = float(_edges(t1)[2].sum() + _edges(t2)[2].sum())
    spacing = total / (2 * samples)
    p1 = stereographic(boundary_samples(t1, spacing))
    p2 = stereographic(boundary_samples(t2, spacing))
    d12 = cKDTree(p2).query(p1)[0].max()
    d21 = cKDTree(p1).query(p2)[0].max()
    return DistanceResult(float(_chord_to_arc(np.array(max(d12, d21)))), spacing)
