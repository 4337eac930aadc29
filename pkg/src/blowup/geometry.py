"""Similitude algebra and attractor geometry.

A similitude is stored as ``x -> s**power * ortho @ x + trans``.  The base
ratio ``s`` lives once on the IFS; the scale of a map is only ever carried
as the integer ``power``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import shapely
from scipy import optimize
from shapely.geometry import Polygon

from .errors import ConfigError, PreconditionError
from .symbolic import PowerVector

ALGEBRA_TOL = 1e-9
_MEMO_LEN = 16
MATCH_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class Similitude:
    power: int
    ortho: np.ndarray
    trans: np.ndarray
    s: float

    def __post_init__(self):
        ortho = np.array(self.ortho, dtype=float)
        trans = np.array(self.trans, dtype=float).reshape(-1)
        if ortho.shape != (trans.size, trans.size):
            raise PreconditionError(f"orthogonal part {ortho.shape} does not match translation {trans.shape}")
        ortho.setflags(write=False)
        trans.setflags(write=False)
        object.__setattr__(self, "ortho", ortho)
        object.__setattr__(self, "trans", trans)
        object.__setattr__(self, "power", int(self.power))

    @classmethod
    def identity(cls, dim: int, s: float) -> "Similitude":
        return cls(0, np.eye(dim), np.zeros(dim), s)

    @classmethod
    def scaling(cls, power: int, dim: int, s: float) -> "Similitude":
        """The map ``x -> s**power * x``."""
        return cls(power, np.eye(dim), np.zeros(dim), s)

    @property
    def dim(self) -> int:
        return self.trans.size

    @property
    def scale(self) -> float:
        return self.s**self.power

    @property
    def linear(self) -> np.ndarray:
        return self.scale * self.ortho

    def __call__(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        return pts @ self.linear.T + self.trans

    def __matmul__(self, other: "Similitude") -> "Similitude":
        return compose(self, other)

    def inverse(self) -> "Similitude":
        return invert(self)

    def features(self) -> np.ndarray:
        return np.concatenate([self.ortho.ravel(), self.trans, [float(self.power)]])

    def isclose(self, other: "Similitude", tol: float = MATCH_TOL) -> bool:
        return (
            self.power == other.power
            and np.allclose(self.ortho, other.ortho, rtol=0, atol=tol)
            and np.allclose(self.trans, other.trans, rtol=0, atol=tol)
        )

    def is_identity(self, tol: float = MATCH_TOL) -> bool:
        return self.isclose(Similitude.identity(self.dim, self.s), tol)

    def __repr__(self) -> str:
        return f"Similitude(power={self.power}, ortho={self.ortho.tolist()}, trans={self.trans.tolist()})"


def compose(f: Similitude, g: Similitude) -> Similitude:
    """``f o g``."""
    if f.dim != g.dim:
        raise PreconditionError(f"dimension mismatch: {f.dim} vs {g.dim}")
    return Similitude(f.power + g.power, f.ortho @ g.ortho, f.scale * (f.ortho @ g.trans) + f.trans, f.s)


def invert(f: Similitude) -> Similitude:
    ot = f.ortho.T
    return Similitude(-f.power, ot, -(f.s ** (-f.power)) * (ot @ f.trans), f.s)


def compose_left(f: Similitude, powers, orthos, trans):
    """``f o g_j`` for every row of a batch of maps."""
    return (
        powers + f.power,
        np.einsum("ij,njk->nik", f.ortho, orthos),
        f.scale * trans @ f.ortho.T + f.trans,
    )


def compose_right(powers, orthos, trans, g: Similitude, s: float):
    """``g_j o g`` for every row of a batch of maps."""
    scales = s ** powers.astype(float)
    return (
        powers + g.power,
        orthos @ g.ortho,
        scales[:, None] * np.einsum("nij,j->ni", orthos, g.trans) + trans,
    )


@dataclass(frozen=True)
class ExactPolygon:
    vertices: tuple[tuple[float, ...], ...]


@dataclass(frozen=True)
class PointCloud:
    depth: int = 8


@dataclass(frozen=True, eq=False)
class AttractorGeom:
    kind: str
    points: np.ndarray
    bbox: tuple[np.ndarray, np.ndarray]
    area: float | None = None

    @property
    def diameter(self) -> float:
        return point_set_diameter(self.points)


def point_set_diameter(points: np.ndarray) -> float:
    pts = np.asarray(points, dtype=float)
    if len(pts) < 2:
        return 0.0
    if pts.shape[1] == 2 and len(pts) > 3:
        try:
            from scipy.spatial import ConvexHull

            pts = pts[ConvexHull(pts).vertices]
        except Exception:
            pass
    diff = pts[:, None, :] - pts[None, :, :]
    return float(np.sqrt((diff**2).sum(-1)).max())


def polygon_area(vertices) -> float:
    v = np.asarray(vertices, dtype=float)
    x, y = v[:, 0], v[:, 1]
    return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def _as_polygon(vertices) -> Polygon:
    poly = Polygon(np.asarray(vertices, dtype=float))
    if poly.area <= 0:
        raise PreconditionError("degenerate polygon (zero area)")
    return poly


def polygon_clip_area(p, q) -> float:
    """Area of the intersection of two simple polygons (2D)."""
    return float(_as_polygon(p).intersection(_as_polygon(q)).area)


def _drop_collinear(vertices: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    keep = []
    n = len(vertices)
    for i in range(n):
        a, b, c = vertices[i - 1], vertices[i], vertices[(i + 1) % n]
        cross = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0])
        if abs(cross) > tol:
            keep.append(b)
    return np.array(keep)


def _fit_isometry(src: np.ndarray, dst: np.ndarray):
    """Orthogonal Procrustes (reflections allowed)."""
    cs, cd = src.mean(0), dst.mean(0)
    u, _, vt = np.linalg.svd((dst - cd).T @ (src - cs))
    ortho = u @ vt
    return ortho, cd - ortho @ cs


def polygon_symmetries(vertices, s: float, tol: float = MATCH_TOL) -> list[Similitude]:
    """Isometries mapping the polygon onto itself, found by matching the
    vertex cycle to its rotations and reversals.  Identity comes first."""
    v = _drop_collinear(np.asarray(vertices, dtype=float))
    n = len(v)
    found: list[Similitude] = [Similitude.identity(v.shape[1], s)]
    for shift, direction in itertools.product(range(n), (1, -1)):
        order = [(shift + direction * j) % n for j in range(n)]
        dst = v[order]
        ortho, trans = _fit_isometry(v, dst)
        if np.abs(v @ ortho.T + trans - dst).max() > tol:
            continue
        cand = Similitude(0, ortho, trans, s)
        if not any(cand.isclose(g, tol) for g in found):
            found.append(cand)
    return found


@dataclass(frozen=True, eq=False)
class IfsSpec:
    """A similitude IFS whose ratios are integer powers of one base ``s``."""

    name: str
    s: float
    maps: tuple[Similitude, ...]
    attractor_model: ExactPolygon | PointCloud
    polynomial: tuple[float, ...] | None = None
    bracket: tuple[float, float] | None = None
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "maps", tuple(self.maps))
        if len(self.maps) < 2:
            raise ConfigError("an IFS needs at least two maps")
        if not 0 < self.s < 1:
            raise ConfigError(f"base ratio must lie in (0, 1), got {self.s}")
        dim = self.maps[0].dim
        for idx, f in enumerate(self.maps, 1):
            if f.dim != dim:
                raise ConfigError(f"map {idx} has dimension {f.dim}, expected {dim}")
            if f.power < 1:
                raise ConfigError(f"map {idx} has power {f.power}; powers must be >= 1")
            if abs(f.s - self.s) > 0:
                raise ConfigError(f"map {idx} uses base ratio {f.s}, spec uses {self.s}")
            if not np.allclose(f.ortho @ f.ortho.T, np.eye(dim), rtol=0, atol=ALGEBRA_TOL):
                raise ConfigError(f"map {idx}: linear part is not orthogonal")
        try:
            PowerVector(tuple(f.power for f in self.maps))
        except PreconditionError as exc:
            raise ConfigError(str(exc))
        if isinstance(self.attractor_model, ExactPolygon):
            verts = np.asarray(self.attractor_model.vertices, dtype=float)
            if dim != 2:
                raise ConfigError("exact polygon attractors are supported for dimension 2 only")
            if verts.ndim != 2 or len(verts) < 3 or verts.shape[1] != 2:
                raise ConfigError("attractor polygon needs at least three 2D vertices")
            if np.allclose(verts[0], verts[-1]):
                raise ConfigError("attractor polygon: list vertices once, without repeating the first")
            poly = Polygon(verts)
            if not poly.is_valid or not shapely.is_simple(poly.exterior) or poly.area <= 0:
                raise ConfigError("attractor polygon is not simple or has zero area")
        elif isinstance(self.attractor_model, PointCloud):
            if self.attractor_model.depth < 0:
                raise ConfigError("point cloud depth must be >= 0")
        else:
            raise ConfigError(f"unknown attractor model {self.attractor_model!r}")

    @property
    def dim(self) -> int:
        return self.maps[0].dim

    @property
    def n(self) -> int:
        return len(self.maps)

    @property
    def pv(self) -> PowerVector:
        return PowerVector(tuple(f.power for f in self.maps))

    @property
    def a_max(self) -> int:
        return self.pv.a_max

    @property
    def is_polygon(self) -> bool:
        return isinstance(self.attractor_model, ExactPolygon)

    def identity(self) -> Similitude:
        return Similitude.identity(self.dim, self.s)

    def scaling(self, power: int) -> Similitude:
        return Similitude.scaling(power, self.dim, self.s)

    def word_map(self, theta: Sequence[int]) -> Similitude:
        return word_map(theta, self)

    def neg_word_map(self, theta: Sequence[int]) -> Similitude:
        return neg_word_map(theta, self)

    @property
    def geometry(self) -> AttractorGeom:
        if "geom" not in self._cache:
            self._cache["geom"] = attractor(self)
        return self._cache["geom"]

    @property
    def symmetries(self) -> list[Similitude]:
        """Self-maps of the attractor used by candidate generators.  Point
        clouds only report the identity."""
        if "sym" not in self._cache:
            if self.is_polygon:
                self._cache["sym"] = polygon_symmetries(self.attractor_model.vertices, self.s)
            else:
                self._cache["sym"] = [self.identity()]
        return self._cache["sym"]


def word_map(theta: Sequence[int], spec: IfsSpec) -> Similitude:
    """``f_theta = f_{theta_1} o ... o f_{theta_k}``; identity for the empty word."""
    theta = spec.pv.validate(theta)
    memo = spec._cache.setdefault("word_map", {(): spec.identity()})
    if theta in memo:
        return memo[theta]
    # build from the longest cached prefix
    j = len(theta)
    while theta[:j] not in memo:
        j -= 1
    out = memo[theta[:j]]
    for idx in range(j, len(theta)):
        out = compose(out, spec.maps[theta[idx] - 1])
        if idx < _MEMO_LEN:
            memo[theta[: idx + 1]] = out
    return out


def neg_word_map(theta: Sequence[int], spec: IfsSpec) -> Similitude:
    """``f_{-theta} = f_{theta_1}^{-1} o ... o f_{theta_k}^{-1}``."""
    theta = spec.pv.validate(theta)
    out = spec.identity()
    for letter in theta:
        out = compose(out, invert(spec.maps[letter - 1]))
    return out


def fixed_point(f: Similitude) -> np.ndarray:
    return np.linalg.solve(np.eye(f.dim) - f.linear, f.trans)


def attractor(spec: IfsSpec, depth: int | None = None) -> AttractorGeom:
    """Exact polygon verbatim, or the point cloud ``{f_w(x0) : |w| = depth}``
    with ``x0`` the fixed point of the first map."""
    model = spec.attractor_model
    if isinstance(model, ExactPolygon) and depth is None:
        verts = np.asarray(model.vertices, dtype=float)
        return AttractorGeom("polygon", verts, (verts.min(0), verts.max(0)), polygon_area(verts))
    depth = model.depth if depth is None and isinstance(model, PointCloud) else depth
    if depth is None or depth < 0:
        raise PreconditionError("point cloud depth must be >= 0")
    pts = fixed_point(spec.maps[0])[None, :]
    for _ in range(depth):
        pts = np.concatenate([f(pts) for f in spec.maps])
    return AttractorGeom("pointcloud", pts, (pts.min(0), pts.max(0)))


def refine_root(coeffs: Sequence[float], bracket: Sequence[float], guess: float | None = None) -> float:
    """Root of the polynomial (highest degree first) inside ``bracket``,
    polished by Newton iteration."""
    lo, hi = float(bracket[0]), float(bracket[1])
    poly = np.poly1d([float(c) for c in coeffs])
    dpoly = poly.deriv()
    if guess is None:
        flo, fhi = poly(lo), poly(hi)
        if flo * fhi > 0:
            raise ConfigError(f"polynomial has no sign change on [{lo}, {hi}]")
        guess = optimize.brentq(poly, lo, hi, xtol=1e-6)
    root = optimize.newton(poly, guess, fprime=dpoly, tol=1e-15, maxiter=100)
    if not lo <= root <= hi:
        raise ConfigError(f"Newton iteration left the bracket [{lo}, {hi}]: {root}")
    return float(root)


def rotation_matrix(degrees: float, reflect: bool = False) -> np.ndarray:
    """Rotation by ``degrees``, applied after ``(x, y) -> (-x, y)`` when
    ``reflect`` is set.  Multiples of 90 degrees are exact."""
    quarter = degrees / 90.0
    if abs(quarter - round(quarter)) < 1e-12:
        c, s = [(1, 0), (0, 1), (-1, 0), (0, -1)][int(round(quarter)) % 4]
    else:
        rad = np.radians(degrees)
        c, s = np.cos(rad), np.sin(rad)
    rot = np.array([[c, -s], [s, c]], dtype=float)
    if reflect:
        rot = rot @ np.diag([-1.0, 1.0])
    return rot
