"""Canonical tilings ``T_k``, the tilings ``pi(theta)`` and tile-set queries.

A :class:`Tiling` keeps its tile maps as stacked arrays (powers, orthogonal
parts, translations) so that composition and matching run in numpy; the
per-tile :class:`Tile` objects are built on demand.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np
from scipy.spatial import cKDTree
from shapely import unary_union
from shapely.geometry import Point, Polygon

from .errors import InconsistencyError, PreconditionError
from .geometry import (
    MATCH_TOL,
    IfsSpec,
    Similitude,
    compose_left,
    compose_right,
    point_set_diameter,
)
from .symbolic import (
    AbsoluteAddress,
    EventuallyPeriodic,
    Word,
    check_level,
    e_weight,
    normalize_address,
    omega_level,
)


@dataclass(frozen=True, eq=False)
class Tile:
    address: AbsoluteAddress | None
    transform: Similitude
    proto_index: int

    def geometry(self, spec: IfsSpec) -> np.ndarray:
        """Polygon vertices or point cloud of the tile."""
        return self.transform(spec.geometry.points)


class TileIndex:
    """Nearest-neighbour lookup of tile maps.  Each tile is registered once
    per self-map of the attractor, so two maps that draw the same set
    match."""

    def __init__(self, powers, orthos, trans, spec: IfsSpec, tol: float = MATCH_TOL):
        self.tol = tol
        self.size = len(powers)
        feats, owners = [], []
        for sym in spec.symmetries:
            p, o, t = compose_right(powers, orthos, trans, sym, spec.s)
            feats.append(_features(p, o, t))
            owners.append(np.arange(len(powers)))
        self._owner = np.concatenate(owners) if owners else np.zeros(0, int)
        data = np.concatenate(feats) if feats else np.zeros((0, 1))
        self._tree = cKDTree(data) if len(data) else None

    def lookup(self, powers, orthos, trans) -> np.ndarray:
        """Index of the matching tile for each query map, or -1."""
        if self._tree is None or len(powers) == 0:
            return np.full(len(powers), -1)
        dist, idx = self._tree.query(
            _features(powers, orthos, trans), k=1, p=np.inf, distance_upper_bound=self.tol
        )
        out = np.full(len(powers), -1)
        hit = np.isfinite(dist)
        out[hit] = self._owner[idx[hit]]
        return out


def _features(powers, orthos, trans) -> np.ndarray:
    n = len(powers)
    return np.hstack([orthos.reshape(n, -1), trans, 10.0 * np.asarray(powers, float)[:, None]])


@dataclass(frozen=True, eq=False)
class Tiling:
    """Finite set of tiles ``t_j = g_j(A)`` plus where it came from.

    ``provenance`` is ``("level", k)`` for canonical tilings,
    ``("theta", word)`` for ``pi(theta)`` and ``("derived", text)`` for
    anything produced by an operator.
    """

    powers: np.ndarray
    orthos: np.ndarray
    trans: np.ndarray
    addresses: tuple
    spec: IfsSpec
    provenance: tuple = ("derived", "")

    def __post_init__(self):
        dim = self.spec.dim
        powers = np.asarray(self.powers, dtype=int).reshape(-1)
        orthos = np.asarray(self.orthos, dtype=float).reshape(len(powers), dim, dim)
        trans = np.asarray(self.trans, dtype=float).reshape(len(powers), dim)
        object.__setattr__(self, "powers", powers)
        object.__setattr__(self, "orthos", orthos)
        object.__setattr__(self, "trans", trans)
        addresses = tuple(self.addresses) if self.addresses is not None else (None,) * len(powers)
        if len(addresses) != len(powers):
            raise PreconditionError("one address (or None) per tile is required")
        object.__setattr__(self, "addresses", addresses)

    @classmethod
    def from_tiles(cls, tiles: Iterable[Tile], spec: IfsSpec, provenance=("derived", "")) -> "Tiling":
        tiles = list(tiles)
        dim = spec.dim
        if not tiles:
            return cls.empty(spec, provenance)
        return cls(
            np.array([t.transform.power for t in tiles]),
            np.stack([t.transform.ortho for t in tiles]),
            np.stack([t.transform.trans for t in tiles]).reshape(-1, dim),
            tuple(t.address for t in tiles),
            spec,
            provenance,
        )

    @classmethod
    def empty(cls, spec: IfsSpec, provenance=("derived", "empty")) -> "Tiling":
        d = spec.dim
        return cls(np.zeros(0, int), np.zeros((0, d, d)), np.zeros((0, d)), (), spec, provenance)

    def __len__(self) -> int:
        return len(self.powers)

    def __iter__(self) -> Iterator[Tile]:
        return iter(self.tiles)

    def transform(self, j: int) -> Similitude:
        return Similitude(self.powers[j], self.orthos[j], self.trans[j], self.spec.s)

    @cached_property
    def tiles(self) -> tuple[Tile, ...]:
        return tuple(
            Tile(self.addresses[j], self.transform(j), int(self.powers[j])) for j in range(len(self))
        )

    @cached_property
    def index(self) -> TileIndex:
        return TileIndex(self.powers, self.orthos, self.trans, self.spec)

    @property
    def proto_indices(self) -> np.ndarray:
        return self.powers

    @cached_property
    def geometries(self) -> np.ndarray:
        """Array ``(n_tiles, n_points, dim)`` of tile vertices / points."""
        base = self.spec.geometry.points
        scales = self.spec.s ** self.powers.astype(float)
        return scales[:, None, None] * np.einsum("nij,pj->npi", self.orthos, base) + self.trans[:, None, :]

    @cached_property
    def polygons(self) -> list[Polygon]:
        self._require_polygon()
        return [Polygon(g) for g in self.geometries]

    @cached_property
    def areas(self) -> np.ndarray:
        self._require_polygon()
        return self.spec.geometry.area * self.spec.s ** (2.0 * self.powers)

    @cached_property
    def support(self):
        """Union of tile polygons (shapely geometry)."""
        self._require_polygon()
        if not len(self):
            return Polygon()
        return unary_union(self.polygons)

    @cached_property
    def bboxes(self) -> tuple[np.ndarray, np.ndarray]:
        g = self.geometries
        return g.min(axis=1), g.max(axis=1)

    @cached_property
    def centroids(self) -> np.ndarray:
        return self.geometries.mean(axis=1)

    @property
    def diameter(self) -> float:
        if not len(self):
            return 0.0
        return point_set_diameter(self.geometries.reshape(-1, self.spec.dim))

    def _require_polygon(self):
        if not self.spec.is_polygon:
            raise PreconditionError("operation needs an exact polygon attractor")

    def subset(self, indices, provenance=None) -> "Tiling":
        idx = np.asarray(indices, dtype=int).reshape(-1)
        return Tiling(
            self.powers[idx],
            self.orthos[idx],
            self.trans[idx],
            tuple(self.addresses[j] for j in idx),
            self.spec,
            provenance or ("derived", f"subset of {format_provenance(self.provenance)}"),
        )

    def mapped(self, f: Similitude, provenance=None, keep_addresses: bool = True) -> "Tiling":
        """The tiling ``f(T)``; addresses are carried along as labels."""
        p, o, t = compose_left(f, self.powers, self.orthos, self.trans)
        return Tiling(
            p, o, t, self.addresses if keep_addresses else None, self.spec,
            provenance or ("derived", f"image of {format_provenance(self.provenance)}"),
        )

    def address_strings(self) -> list[str | None]:
        return [None if a is None else str(a) for a in self.addresses]

    def locate(self, other: "Tiling") -> np.ndarray:
        """For each tile of ``other``, its index in this tiling or -1."""
        return self.index.lookup(other.powers, other.orthos, other.trans)


def concat(tilings: Sequence[Tiling], provenance=("derived", "union")) -> Tiling:
    tilings = [t for t in tilings if len(t)]
    if not tilings:
        raise PreconditionError("nothing to concatenate")
    return Tiling(
        np.concatenate([t.powers for t in tilings]),
        np.concatenate([t.orthos for t in tilings]),
        np.concatenate([t.trans for t in tilings]),
        tuple(a for t in tilings for a in t.addresses),
        tilings[0].spec,
        provenance,
    )


def format_provenance(prov: tuple) -> str:
    kind, value = prov
    if kind == "level":
        return f"T_{value}"
    if kind == "theta":
        from .symbolic import format_word

        return f"pi({format_word(value) or 'empty'})"
    return str(value)


def is_subtiling(small: Tiling, big: Tiling) -> bool:
    return bool(len(small) == 0 or (big.locate(small) >= 0).all())


def same_tiles(a: Tiling, b: Tiling) -> bool:
    """Tile-set equality up to the matching tolerance."""
    if len(a) != len(b):
        return False
    hits = a.locate(b)
    return bool((hits >= 0).all() and len(np.unique(hits)) == len(a))


def common_tiles(a: Tiling, b: Tiling) -> np.ndarray:
    """Indices into ``a`` of tiles that also belong to ``b``."""
    hits = b.locate(a)
    return np.flatnonzero(hits >= 0)


def _omega_maps(k: int, spec: IfsSpec):
    """Stacked maps ``f_sigma`` for ``sigma`` in ``Omega_k`` (sorted order)."""
    cache = spec._cache.setdefault("omega_maps", {})
    if k in cache:
        return cache[k]
    pv = spec.pv
    words = omega_level(k, pv)
    dim = spec.dim
    if k < pv.a_max:
        maps = [spec.word_map(w) for w in words]
        out = (
            np.array([m.power for m in maps]),
            np.stack([m.ortho for m in maps]),
            np.stack([m.trans for m in maps]).reshape(-1, dim),
        )
    else:
        # words starting with i, in sorted order, are i + Omega_{k - a_i} in sorted order
        first = np.array([w[0] for w in words])
        powers = np.zeros(len(words), int)
        orthos = np.zeros((len(words), dim, dim))
        trans = np.zeros((len(words), dim))
        for i in pv.letters():
            sub = _omega_maps(k - pv.a[i - 1], spec)
            rows = first == i
            powers[rows], orthos[rows], trans[rows] = compose_left(spec.maps[i - 1], *sub)
        out = (powers, orthos, trans)
    cache[k] = out
    return out


def canonical_tiling(k: int, spec: IfsSpec) -> Tiling:
    """``T_k = { s^-k f_sigma(A) : sigma in Omega_k }`` with relative addresses."""
    check_level(k)
    words = omega_level(k, spec.pv)
    p, o, t = compose_left(spec.scaling(-k), *_omega_maps(k, spec))
    return Tiling(p, o, t, tuple(AbsoluteAddress((), w) for w in words), spec, ("level", k))


def e_theta(theta: Sequence[int], spec: IfsSpec) -> Similitude:
    """The isometry ``f_{-theta} o s^{e(theta)}`` carrying ``T_e(theta)`` onto ``pi(theta)``."""
    return spec.neg_word_map(theta) @ spec.scaling(e_weight(theta, spec.pv))


def pi_prefix(theta: Sequence[int], spec: IfsSpec) -> Tiling:
    """``pi(theta) = { f_{-theta} f_sigma(A) : sigma in Omega_{e(theta)} }``."""
    theta = spec.pv.validate(theta)
    k = e_weight(theta, spec.pv)
    check_level(k)
    words = omega_level(k, spec.pv)
    p, o, t = compose_left(spec.neg_word_map(theta), *_omega_maps(k, spec))
    addresses = tuple(normalize_address(theta, w) for w in words)
    return Tiling(p, o, t, addresses, spec, ("theta", theta))


def pi_sequence(theta, spec: IfsSpec, start: int = 0) -> Iterator[Tiling]:
    """Lazily yield ``pi(theta|k)`` for ``k = start, start + 1, ...``.  ``theta``
    is an :class:`EventuallyPeriodic` word or a finite word (the iterator
    then stops at its full length)."""
    k = start
    while True:
        if isinstance(theta, EventuallyPeriodic):
            prefix = theta.prefix(k)
        else:
            if k > len(theta):
                return
            prefix = tuple(theta[:k])
        yield pi_prefix(prefix, spec)
        k += 1


@dataclass(frozen=True)
class NestingResult:
    ok: bool
    prefix: Word | None = None
    tile: Tile | None = None

    def __bool__(self) -> bool:
        return self.ok


def nesting_check(theta: Sequence[int], spec: IfsSpec, chain: Sequence[Tiling] | None = None) -> NestingResult:
    """Verify ``pi(theta|j-1)`` is contained in ``pi(theta|j)`` for every
    prefix, by normalized address and by matching tile maps.

    ``chain`` may supply precomputed tilings ``pi(theta|0), ..., pi(theta)``.
    """
    theta = spec.pv.validate(theta)
    if not theta:
        raise PreconditionError("nesting needs a nonempty word")
    if chain is None:
        chain = [pi_prefix(theta[:j], spec) for j in range(len(theta) + 1)]
    if len(chain) != len(theta) + 1:
        raise PreconditionError("chain must hold one tiling per prefix length 0..|theta|")
    for j in range(1, len(chain)):
        small, big = chain[j - 1], chain[j]
        known = set(a for a in big.addresses if a is not None)
        hits = big.locate(small)
        for idx in range(len(small)):
            addr = small.addresses[idx]
            if hits[idx] < 0 or (addr is not None and known and addr not in known):
                return NestingResult(False, theta[: j - 1], small.tiles[idx])
    return NestingResult(True)


def prototile_census(tiling: Tiling) -> dict[int, int]:
    return dict(sorted(Counter(int(p) for p in tiling.powers).items()))


def patch(tiling: Tiling, center, radius: float) -> Tiling:
    """Tiles meeting the closed ball ``B(center, radius)``, as a sub-tiling."""
    if radius <= 0:
        raise PreconditionError("patch radius must be positive")
    c = np.asarray(center, dtype=float)
    lo, hi = tiling.bboxes
    gap = np.maximum(np.maximum(lo - c, c - hi), 0.0)
    near = np.flatnonzero(np.sqrt((gap**2).sum(1)) <= radius)
    keep = []
    if tiling.spec.is_polygon:
        ball_center = Point(c)
        for j in near:
            if tiling.polygons[j].distance(ball_center) <= radius:
                keep.append(j)
    else:
        for j in near:
            if np.sqrt(((tiling.geometries[j] - c) ** 2).sum(1)).min() <= radius:
                keep.append(j)
    return tiling.subset(keep, ("derived", f"patch of {format_provenance(tiling.provenance)}"))


def diameter_to_level(tiling: Tiling, spec: IfsSpec | None = None) -> int:
    """Recover ``e(theta)`` from the support diameter of ``pi(theta)``."""
    spec = spec or tiling.spec
    if not len(tiling):
        raise PreconditionError("empty tiling has no diameter")
    ratio = (math.log(spec.geometry.diameter) - math.log(tiling.diameter)) / math.log(spec.s)
    level = round(ratio)
    if abs(ratio - level) > 0.4:
        raise InconsistencyError(f"diameter ratio gives non-integer level {ratio:.3f}")
    return int(level)


def tk_decomposition(k: int, spec: IfsSpec) -> Tiling:
    """``E_{k,1} T_{k-a_1} + ... + E_{k,N} T_{k-a_N}`` with
    ``E_{k,i} = s^-k o f_i o s^(k - a_i)``, built from the smaller levels."""
    pv = spec.pv
    if k < pv.a_max:
        raise PreconditionError(f"decomposition needs k >= a_max = {pv.a_max}")
    parts = []
    for i in pv.letters():
        a = pv.a[i - 1]
        iso = spec.scaling(-k) @ spec.maps[i - 1] @ spec.scaling(k - a)
        sub = canonical_tiling(k - a, spec).mapped(iso, keep_addresses=False)
        parts.append(sub)
    return concat(parts, ("derived", f"decomposition of T_{k}"))


def tk_formula_check(k: int, spec: IfsSpec) -> bool:
    return same_tiles(canonical_tiling(k, spec), tk_decomposition(k, spec))


def refinement_check(k: int, spec: IfsSpec) -> bool:
    """Every set of ``s^-1 T_k`` is a union of tiles of ``T_{k+1}``: a tile
    ``.w`` either survives as ``.w`` or splits into ``.w1, ..., .wN``."""
    pv = spec.pv
    coarse = canonical_tiling(k, spec)
    fine = canonical_tiling(k + 1, spec)
    fine_words = {a.omega: j for j, a in enumerate(fine.addresses)}
    magnified = coarse.mapped(spec.scaling(-1))
    for j, addr in enumerate(coarse.addresses):
        w = addr.omega
        g = magnified.transform(j)
        if w in fine_words:
            if not g.isclose(fine.transform(fine_words[w])):
                return False
            continue
        if e_weight(w, pv) != k + 1:
            return False
        for i in pv.letters():
            child = w + (i,)
            if child not in fine_words:
                return False
            if not (g @ spec.maps[i - 1]).isclose(fine.transform(fine_words[child])):
                return False
    return True
