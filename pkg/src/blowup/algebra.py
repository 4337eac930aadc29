"""Partner sets, amalgamation-and-shrinking, shift maps and rigidity searches.

All searches enumerate candidate isometries of the form
``E = t2 o sigma o t1^-1`` where ``t1``, ``t2`` are tiles of equal prototile
index and ``sigma`` is a self-map of the attractor.  Any isometry that makes
two tilings share a tile has this form, so the candidate list is complete
for that purpose; verdicts are still reported as search results, not
proofs.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree
from shapely import affinity

from .errors import InconsistencyError, NotInDomainError, PreconditionError
from .geometry import IfsSpec, Similitude, compose_left, compose_right, invert
from .symbolic import AbsoluteAddress, Word, e_weight
from .tiling import Tiling, canonical_tiling, common_tiles, format_provenance, pi_prefix, same_tiles


@dataclass(frozen=True)
class SearchBounds:
    max_candidates: int = 200_000
    area_rtol: float = 1e-6


@dataclass(frozen=True, eq=False)
class PartnerSet:
    isometry: Similitude
    members: tuple[int, ...]  # tile index matching E o f_i, for i = 1..N


@dataclass(frozen=True, eq=False)
class PartnerDetection:
    partner_sets: list[PartnerSet]
    unmatched_small: list[int]
    loose: list[int]

    @property
    def in_domain(self) -> bool:
        return not self.unmatched_small


@dataclass(frozen=True, eq=False)
class RigidityReport:
    verdict: str  # "rigid" | "not_rigid" | "inconclusive"
    witness: Similitude | None = None
    common: Tiling | None = None
    reason: str = ""
    bounds: SearchBounds = field(default_factory=SearchBounds)
    candidates_checked: int = 0

    @property
    def rigid(self) -> bool:
        return self.verdict == "rigid"


def _require_prototiles(tiling: Tiling) -> None:
    a_max = tiling.spec.a_max
    if len(tiling) and (tiling.powers.min() < 1 or tiling.powers.max() > a_max):
        raise PreconditionError(f"tile powers must lie in 1..{a_max}")


def detect_partners(tiling: Tiling) -> PartnerDetection:
    """Find the set of partners ``E T_0`` of every small tile.

    A small tile sitting in two different partner sets (or two partner sets
    sharing a tile) is reported as :class:`NotInDomainError`.
    """
    _require_prototiles(tiling)
    spec = tiling.spec
    a_max = spec.a_max
    small = np.flatnonzero(tiling.powers == a_max)
    found: dict[tuple[int, ...], PartnerSet] = {}
    owners: dict[int, set[tuple[int, ...]]] = {int(t): set() for t in small}
    if len(small):
        sp, so, st = tiling.powers[small], tiling.orthos[small], tiling.trans[small]
        for j, fj in enumerate(spec.maps):
            if fj.power != a_max:
                continue
            for sym in spec.symmetries:
                ep, eo, et = compose_right(sp, so, st, sym @ invert(fj), spec.s)
                members = []
                for fi in spec.maps:
                    members.append(tiling.index.lookup(*compose_right(ep, eo, et, fi, spec.s)))
                members = np.stack(members, axis=1)
                for row in np.flatnonzero((members >= 0).all(axis=1)):
                    key = tuple(int(x) for x in members[row])
                    if len(set(key)) != len(key):
                        continue
                    if key not in found:
                        iso = Similitude(ep[row], eo[row], et[row], spec.s)
                        found[key] = PartnerSet(iso, key)
                    for m in key:
                        if m in owners:
                            owners[m].add(key)
    used: dict[int, tuple[int, ...]] = {}
    for key in found:
        for m in key:
            if m in used and set(used[m]) != set(key):
                raise NotInDomainError(f"tile {m} belongs to two partner sets {used[m]} and {key}")
            used[m] = key
    for t, keys in owners.items():
        if len(keys) > 1:
            raise NotInDomainError(f"small tile {t} has {len(keys)} candidate partner sets")
    unmatched = [int(t) for t in small if not owners[int(t)]]
    sets = sorted(found.values(), key=lambda p: min(p.members))
    loose = [j for j in range(len(tiling)) if j not in used]
    return PartnerDetection(sets, unmatched, loose)


def _parent_address(addresses) -> AbsoluteAddress | None:
    if any(a is None for a in addresses):
        return None
    theta = addresses[0].theta
    stem = addresses[0].omega[:-1]
    if not stem:
        return None
    for i, a in enumerate(addresses, 1):
        if a.theta != theta or a.omega != stem + (i,):
            return None
    return AbsoluteAddress(theta, stem)


def amalgamate(tiling: Tiling) -> Tiling:
    """Merge every set of partners ``E T_0`` into the tile ``s E A`` and shrink
    all remaining tiles by ``s``.

    Addresses follow along when they can: partners ``.w1 .. .wN`` become
    ``.w``, other tiles keep theirs.
    """
    det = detect_partners(tiling)
    if det.unmatched_small:
        raise NotInDomainError(f"small tiles without partners: {det.unmatched_small}")
    spec = tiling.spec
    shrink = spec.scaling(1)
    owner = {m: ps for ps in det.partner_sets for m in ps.members}
    emitted: set[int] = set()
    powers, orthos, trans, addresses = [], [], [], []
    for j in range(len(tiling)):
        if j in owner:
            ps = owner[j]
            if id(ps) in emitted:
                continue
            emitted.add(id(ps))
            g = shrink @ ps.isometry
            addresses.append(_parent_address([tiling.addresses[m] for m in ps.members]))
        else:
            g = shrink @ tiling.transform(j)
            addresses.append(tiling.addresses[j])
        powers.append(g.power)
        orthos.append(g.ortho)
        trans.append(g.trans)
    if not powers:
        return Tiling.empty(spec)
    return Tiling(
        np.array(powers), np.stack(orthos), np.stack(trans), tuple(addresses), spec,
        ("derived", f"alpha({format_provenance(tiling.provenance)})"),
    )


def amalgamate_inverse(tiling: Tiling) -> Tiling:
    """Magnify by ``s^-1`` and split each large tile into its partners."""
    _require_prototiles(tiling)
    spec = tiling.spec
    grown = compose_left(spec.scaling(-1), tiling.powers, tiling.orthos, tiling.trans)
    powers, orthos, trans, addresses = [], [], [], []
    for j in range(len(tiling)):
        p, o, t = grown[0][j], grown[1][j], grown[2][j]
        addr = tiling.addresses[j]
        if p == 0:
            iso = Similitude(p, o, t, spec.s)
            for i, fi in enumerate(spec.maps, 1):
                g = iso @ fi
                powers.append(g.power)
                orthos.append(g.ortho)
                trans.append(g.trans)
                addresses.append(None if addr is None else AbsoluteAddress(addr.theta, addr.omega + (i,)))
        else:
            powers.append(p)
            orthos.append(o)
            trans.append(t)
            addresses.append(addr)
    if not powers:
        return Tiling.empty(spec)
    return Tiling(
        np.array(powers), np.stack(orthos), np.stack(trans), tuple(addresses), spec,
        ("derived", f"alpha^-1({format_provenance(tiling.provenance)})"),
    )


def annular_decomposition(theta: Word, spec: IfsSpec) -> list[Tiling]:
    """``pi(empty)`` followed by the differences ``pi(theta|j) - pi(theta|j-1)``,
    split by normalized address."""
    theta = spec.pv.validate(theta)
    full = pi_prefix(theta, spec)
    pos = {a: j for j, a in enumerate(full.addresses)}
    pieces, seen = [], set()
    for j in range(len(theta) + 1):
        layer = [pos[a] for a in pi_prefix(theta[:j], spec).addresses if a not in seen]
        if any(a not in pos for a in pi_prefix(theta[:j], spec).addresses):
            raise InconsistencyError(f"pi({theta[:j]}) is not nested in pi({theta})")
        seen.update(full.addresses[i] for i in layer)
        pieces.append(full.subset(layer))
    if len(seen) != len(full):
        raise InconsistencyError("annuli do not cover the tiling")
    return pieces


def _theta_of(tiling: Tiling) -> Word:
    kind, value = tiling.provenance
    if kind != "theta":
        raise PreconditionError("shift needs a tiling built as pi(theta)")
    return value


def shift(i: int, tiling: Tiling, check_annuli: bool = True) -> Tiling:
    """``S_i = f_i o s^-a_i o alpha^a_i`` applied to ``pi(theta)`` with
    ``theta_1 = i``; the result is checked against ``pi(S theta)`` and takes
    its addresses."""
    spec = tiling.spec
    theta = _theta_of(tiling)
    if not theta or theta[0] != i:
        raise PreconditionError(f"shift({i}) needs a word starting with {i}, got {theta}")
    a_i = spec.pv.a[i - 1]
    if check_annuli:
        annular_decomposition(theta, spec)
    out = tiling
    for _ in range(a_i):
        out = amalgamate(out)
    out = out.mapped(spec.maps[i - 1] @ spec.scaling(-a_i))
    direct = pi_prefix(theta[1:], spec)
    return _adopt(out, direct, f"S_{i}")


def unshift(i: int, tiling: Tiling) -> Tiling:
    """``S_i^-1 = alpha^-a_i o s^a_i o f_i^-1``: ``pi(theta)`` to ``pi(i theta)``."""
    spec = tiling.spec
    theta = _theta_of(tiling)
    a_i = spec.pv.a[i - 1]
    out = tiling.mapped(spec.scaling(a_i) @ invert(spec.maps[i - 1]))
    for _ in range(a_i):
        out = amalgamate_inverse(out)
    direct = pi_prefix((i,) + tuple(theta), spec)
    return _adopt(out, direct, f"S_{i}^-1")


def _adopt(computed: Tiling, direct: Tiling, label: str) -> Tiling:
    if not same_tiles(computed, direct):
        raise InconsistencyError(f"{label} disagrees with the direct construction of {format_provenance(direct.provenance)}")
    hits = direct.locate(computed)
    return Tiling(
        computed.powers, computed.orthos, computed.trans,
        tuple(direct.addresses[h] for h in hits), computed.spec, direct.provenance,
    )


def _shapely_params(f: Similitude) -> list[float]:
    lin = f.linear
    return [lin[0, 0], lin[0, 1], lin[1, 0], lin[1, 1], f.trans[0], f.trans[1]]


def mapped_support(tiling: Tiling, f: Similitude):
    return affinity.affine_transform(tiling.support, _shapely_params(f))


@dataclass(frozen=True)
class IntersectionReport:
    common: np.ndarray  # indices into the first tiling
    covered_area: float
    support_area: float
    tiles: bool

    @property
    def uncovered_fraction(self) -> float:
        if self.support_area <= 0:
            return 0.0
        return max(0.0, 1.0 - self.covered_area / self.support_area)


def tiles_intersection(a: Tiling, b: Tiling, support_b=None, rtol: float = 1e-6) -> IntersectionReport:
    """Whether the common tiles of ``a`` and ``b`` tile the intersection of
    their supports, by area comparison."""
    common = common_tiles(a, b)
    covered = 0.0
    if len(common):
        # repeated copies of one tile count once
        distinct = np.unique(a.index.lookup(a.powers[common], a.orthos[common], a.trans[common]))
        covered = float(a.areas[distinct].sum())
    sb = b.support if support_b is None else support_b
    inter = float(a.support.intersection(sb).area)
    ok = len(common) > 0 and abs(covered - inter) <= rtol * max(inter, 1e-300)
    return IntersectionReport(common, covered, inter, ok)


def _dedupe(maps: list[Similitude], tol: float = 1e-6) -> list[Similitude]:
    if not maps:
        return []
    feats = np.stack([f.features() for f in maps])
    tree = cKDTree(feats)
    keep = np.ones(len(maps), dtype=bool)
    for a, b in sorted(tree.query_pairs(tol, p=np.inf)):
        if keep[a]:
            keep[b] = False
    return [f for f, k in zip(maps, keep) if k]


def _candidates(src: Tiling, dst: Tiling, limit: int):
    """Isometries ``E`` with ``E(t1) = t2`` for ``t1`` in src, ``t2`` in dst."""
    spec = src.spec
    out: list[Similitude] = []
    for p in np.unique(src.powers):
        s_idx = np.flatnonzero(src.powers == p)
        d_idx = np.flatnonzero(dst.powers == p)
        for a in s_idx:
            inv_a = invert(src.transform(a))
            for sym in spec.symmetries:
                right = sym @ inv_a
                ep, eo, et = compose_right(dst.powers[d_idx], dst.orthos[d_idx], dst.trans[d_idx], right, spec.s)
                for r in range(len(d_idx)):
                    out.append(Similitude(ep[r], eo[r], et[r], spec.s))
                    if len(out) > limit:
                        return out, False
    return _dedupe(out), True


def rigidity_check(spec: IfsSpec, bounds: SearchBounds = SearchBounds()) -> RigidityReport:
    """Search for an isometry violating rigidity: a non-identity ``E`` with
    ``E A = A``, or one for which ``T_0 & E T_0`` is nonempty and tiles
    ``A & E A``."""
    if not spec.is_polygon:
        return RigidityReport("inconclusive", reason="point-cloud attractor: isometries are not enumerable", bounds=bounds)
    t0 = canonical_tiling(0, spec)
    for sym in spec.symmetries[1:]:
        return RigidityReport("not_rigid", sym, t0, "non-identity isometry maps the attractor onto itself", bounds, 0)
    cands, complete = _candidates(t0, t0, bounds.max_candidates)
    checked = 0
    for E in cands:
        if E.is_identity():
            continue
        checked += 1
        image = t0.mapped(E)
        rep = tiles_intersection(t0, image, mapped_support(t0, E), bounds.area_rtol)
        if rep.tiles:
            return RigidityReport("not_rigid", E, t0.subset(rep.common), "T_0 and E T_0 share tiles that tile A & E A", bounds, checked)
    if not complete:
        return RigidityReport("inconclusive", reason="candidate limit reached", bounds=bounds, candidates_checked=checked)
    return RigidityReport("rigid", reason="no violating isometry among tile-onto-tile candidates", bounds=bounds, candidates_checked=checked)


def strong_rigidity_check(spec: IfsSpec, bounds: SearchBounds = SearchBounds()) -> RigidityReport:
    """For ``i, j < a_max`` look for ``E`` such that ``T_i & E T_j`` tiles
    ``A_i & E A_j`` while neither tiling contains the other."""
    base = rigidity_check(spec, bounds)
    if not base.rigid:
        return base
    levels = [canonical_tiling(k, spec) for k in range(spec.a_max)]
    checked = 0
    for i, ti in enumerate(levels):
        for j, tj in enumerate(levels):
            cands, complete = _candidates(tj, ti, bounds.max_candidates)
            if not complete:
                return RigidityReport("inconclusive", reason="candidate limit reached", bounds=bounds, candidates_checked=checked)
            for E in cands:
                if i == j and E.is_identity():
                    continue
                checked += 1
                image = tj.mapped(E)
                rep = tiles_intersection(ti, image, mapped_support(tj, E), bounds.area_rtol)
                if not rep.tiles:
                    continue
                if len(rep.common) == len(ti) or len(rep.common) == len(image):
                    continue
                return RigidityReport(
                    "not_rigid", E, ti.subset(rep.common),
                    f"T_{i} & E T_{j} tiles the overlap but neither contains the other", bounds, checked,
                )
    return RigidityReport("rigid", reason="no counterexample within bounds", bounds=bounds, candidates_checked=checked)


def default_core(tiling: Tiling) -> Tiling:
    """Inner window used by unbounded-tiling searches: ``pi(theta|n - a_max)``
    for ``pi(theta|n)``, otherwise the tiles near the support centre."""
    spec = tiling.spec
    kind, value = tiling.provenance
    if kind == "theta":
        return pi_prefix(value[: max(0, len(value) - spec.a_max)], spec)
    centre = tiling.centroids.mean(axis=0)
    dist = np.sqrt(((tiling.centroids - centre) ** 2).sum(1))
    keep = np.flatnonzero(dist <= 0.25 * tiling.diameter)
    return tiling if len(keep) == 0 else tiling.subset(keep)


def symmetry_search(tiling: Tiling, bounds: SearchBounds = SearchBounds(), core: Tiling | None = None) -> list[Similitude]:
    """Non-identity isometries ``E`` such that ``E T`` covers the core window
    tile-for-tile and ``T & E T`` tiles the overlap of the supports."""
    spec = tiling.spec
    if not len(tiling):
        return []
    core = default_core(tiling) if core is None else core
    counts = {int(p): int((tiling.powers == p).sum()) for p in np.unique(core.powers)}
    anchor = min(range(len(core)), key=lambda j: (counts[int(core.powers[j])], j))
    g_anchor = core.transform(anchor)
    same = np.flatnonzero(tiling.powers == core.powers[anchor])
    found: list[Similitude] = []
    checked = 0
    for sym in spec.symmetries:
        # E = anchor o sym o t^-1; the tile t is sent onto the anchor
        back = invert(sym) @ invert(g_anchor)
        q = compose_left(back, core.powers, core.orthos, core.trans)
        for t in same:
            checked += 1
            if checked > bounds.max_candidates:
                return found
            g_t = tiling.transform(t)
            E = g_anchor @ sym @ invert(g_t)
            if E.is_identity():
                continue
            if (tiling.index.lookup(*compose_left(g_t, *q)) < 0).any():
                continue
            image = tiling.mapped(E)
            rep = tiles_intersection(tiling, image, mapped_support(tiling, E), bounds.area_rtol)
            if rep.tiles:
                found.append(E)
    return _dedupe(found)


@dataclass(frozen=True)
class DichotomyResult:
    tis_cases: int
    violations: list
    equal_level_violations: list


def intersection_dichotomy(t1: Tiling, t2: Tiling, bounds: SearchBounds = SearchBounds()) -> DichotomyResult:
    """For every candidate ``E`` with ``t1 & E t2`` tiling the overlap, check
    that one tiling contains the other (and equality at equal levels)."""
    cands, _ = _candidates(t2, t1, bounds.max_candidates)
    equal_level = _level_of(t1) == _level_of(t2)
    tis, bad, bad_eq = 0, [], []
    for E in cands:
        image = t2.mapped(E)
        rep = tiles_intersection(t1, image, mapped_support(t2, E), bounds.area_rtol)
        if not rep.tiles:
            continue
        tis += 1
        n = len(rep.common)
        if n != len(t1) and n != len(image):
            bad.append(E)
        elif equal_level and not same_tiles(t1, image):
            bad_eq.append(E)
    return DichotomyResult(tis, bad, bad_eq)


def _level_of(tiling: Tiling) -> int | None:
    kind, value = tiling.provenance
    if kind == "theta":
        return e_weight(value, tiling.spec.pv)
    if kind == "level":
        return value
    return None
