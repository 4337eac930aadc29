"""Reference implementations used only by the tests.

Each one takes a slower, independent route: brute-force word enumeration,
exhaustive prefix counting, homogeneous-matrix products, ear-clipping plus
convex clipping for polygon areas, ray casting for point location.
"""
from __future__ import annotations

import itertools

import numpy as np


def brute_force_omega_levels(kmax: int, a: tuple[int, ...]) -> dict[int, list[tuple[int, ...]]]:
    """For every ``k <= kmax`` the words with ``e(w) > k >= e(w minus last
    letter)``, found by listing every word up to the longest possible length
    and filtering."""
    a = np.asarray(a)
    n = len(a)
    longest = kmax // a.min() + 1
    out: dict[int, list] = {k: [] for k in range(kmax + 1)}
    for length in range(1, longest + 1):
        idx = np.indices((n,) * length, dtype=np.int8).reshape(length, -1).T  # rows are words, 0-based
        weights = a[idx]
        full = weights.sum(1)
        head = full - weights[:, -1]
        for k in range(kmax + 1):
            keep = (full > k) & (head <= k)
            out[k].extend(tuple(int(x) + 1 for x in row) for row in idx[keep])
    return {k: sorted(v, key=lambda w: (len(w), w)) for k, v in out.items()}


def brute_force_omega(k: int, a: tuple[int, ...]) -> list[tuple[int, ...]]:
    return brute_force_omega_levels(k, a)[k]


def exhaustive_partition(words, depth: int, n: int):
    """First word of length ``depth`` not having exactly one prefix in
    ``words``, or ``None``."""
    words = set(map(tuple, words))
    for w in itertools.product(range(1, n + 1), repeat=depth):
        hits = sum(1 for j in range(1, depth + 1) if w[:j] in words)
        if hits != 1:
            return w
    return None


def homogeneous(ortho, trans, scale: float) -> np.ndarray:
    m = np.eye(3)
    m[:2, :2] = scale * np.asarray(ortho, dtype=float)
    m[:2, 2] = trans
    return m


def spec_matrices(spec) -> list[np.ndarray]:
    return [homogeneous(f.ortho, f.trans, spec.s**f.power) for f in spec.maps]


def word_matrix(word, mats) -> np.ndarray:
    m = np.eye(3)
    for i in word:
        m = m @ mats[i - 1]
    return m


def neg_word_matrix(word, mats) -> np.ndarray:
    m = np.eye(3)
    for i in word:
        m = m @ np.linalg.inv(mats[i - 1])
    return m


def apply(m: np.ndarray, pts) -> np.ndarray:
    pts = np.asarray(pts, dtype=float)
    return pts @ m[:2, :2].T + m[:2, 2]


def shoelace(poly) -> float:
    p = np.asarray(poly, dtype=float)
    x, y = p[:, 0], p[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def ear_clip(poly) -> list[np.ndarray]:
    """Triangulate a simple polygon (any orientation)."""
    pts = [np.asarray(p, dtype=float) for p in poly]
    if shoelace(pts) < 0:
        pts = pts[::-1]
    tris = []
    idx = list(range(len(pts)))
    guard = 0
    while len(idx) > 3 and guard < 10_000:
        guard += 1
        for j in range(len(idx)):
            i0, i1, i2 = idx[j - 1], idx[j], idx[(j + 1) % len(idx)]
            a, b, c = pts[i0], pts[i1], pts[i2]
            if _cross(a, b, c) <= 1e-15:
                continue
            inside = False
            for m in idx:
                if m in (i0, i1, i2):
                    continue
                p = pts[m]
                if _cross(a, b, p) >= 0 and _cross(b, c, p) >= 0 and _cross(c, a, p) >= 0:
                    inside = True
                    break
            if not inside:
                tris.append(np.array([a, b, c]))
                idx.pop(j)
                break
        else:
            # only degenerate (collinear) corners left
            idx.pop(0)
    if len(idx) == 3:
        tris.append(np.array([pts[i] for i in idx]))
    return tris


def clip_convex(subject, clipper) -> list:
    """Sutherland-Hodgman: ``subject`` clipped by convex counter-clockwise
    ``clipper``."""
    out = [np.asarray(p, dtype=float) for p in subject]
    clipper = [np.asarray(p, dtype=float) for p in clipper]
    for j in range(len(clipper)):
        if not out:
            break
        a, b = clipper[j - 1], clipper[j]
        inp, out = out, []
        for m in range(len(inp)):
            cur, prev = inp[m], inp[m - 1]
            cur_in = _cross(a, b, cur) >= 0
            prev_in = _cross(a, b, prev) >= 0
            if cur_in:
                if not prev_in:
                    out.append(_intersect(prev, cur, a, b))
                out.append(cur)
            elif prev_in:
                out.append(_intersect(prev, cur, a, b))
    return out


def _intersect(p, q, a, b):
    d1 = q - p
    d2 = b - a
    den = d1[0] * d2[1] - d1[1] * d2[0]
    if den == 0:
        return q
    t = ((a[0] - p[0]) * d2[1] - (a[1] - p[1]) * d2[0]) / den
    return p + t * d1


def intersection_area(p, q) -> float:
    """Area of the intersection of two simple polygons via triangle pairs."""
    total = 0.0
    tq = ear_clip(q)
    for t1 in ear_clip(p):
        for t2 in tq:
            piece = clip_convex(t1, t2)
            if len(piece) >= 3:
                total += abs(shoelace(piece))
    return total


def point_in_polygon(pt, poly) -> bool:
    x, y = pt
    inside = False
    n = len(poly)
    for j in range(n):
        x1, y1 = poly[j - 1]
        x2, y2 = poly[j]
        if (y1 > y) != (y2 > y):
            xc = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            if x < xc:
                inside = not inside
    return inside
