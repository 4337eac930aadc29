"""Deterministic SVG output for tilings."""
from __future__ import annotations

from dataclasses import dataclass
from xml.sax.saxutils import escape

import numpy as np

from .errors import PreconditionError
from .tiling import Tiling

PALETTE = ("#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#ff9da7")


@dataclass(frozen=True)
class RenderStyle:
    width: int = 800
    margin: float = 10.0
    stroke: str = "#222222"
    stroke_width: float = 0.5
    color_by: str = "proto"  # or "depth"
    labels: bool = False
    point_radius: float = 0.8


def _fmt(x: float) -> str:
    return "%.6f" % (x + 0.0)


def tile_color(tiling: Tiling, j: int, style: RenderStyle) -> str:
    if style.color_by == "proto":
        key = int(tiling.powers[j]) - 1
    elif style.color_by == "depth":
        addr = tiling.addresses[j]
        key = 0 if addr is None else len(addr.omega)
    else:
        raise PreconditionError(f"unknown colouring {style.color_by!r}")
    return PALETTE[key % len(PALETTE)]


def render_svg(tiling: Tiling, style: RenderStyle = RenderStyle()) -> str:
    """SVG 1.1 text; y is flipped so the picture has the usual orientation.
    Identical inputs give byte-identical output."""
    if tiling.spec.dim != 2:
        raise PreconditionError("rendering needs a planar tiling")
    w = style.width
    if not len(tiling):
        return (
            '<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{w}" viewBox="0 0 {w} {w}">\n'
            "</svg>\n"
        )
    g = tiling.geometries
    lo, hi = g.reshape(-1, 2).min(0), g.reshape(-1, 2).max(0)
    span = max(float((hi - lo).max()), 1e-12)
    scale = (w - 2 * style.margin) / span
    h = int(np.ceil((hi[1] - lo[1]) * scale + 2 * style.margin))

    def to_px(pts):
        x = (pts[..., 0] - lo[0]) * scale + style.margin
        y = (hi[1] - pts[..., 1]) * scale + style.margin
        return x, y

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">',
    ]
    polygon = tiling.spec.is_polygon
    for j in range(len(tiling)):
        x, y = to_px(g[j])
        color = tile_color(tiling, j, style)
        if polygon:
            pts = " ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in zip(x, y))
            lines.append(
                f'<polygon points="{pts}" fill="{color}" stroke="{style.stroke}" stroke-width="{_fmt(style.stroke_width)}"/>'
            )
        else:
            lines.append(f'<g fill="{color}">')
            for a, b in zip(x, y):
                lines.append(f'<circle cx="{_fmt(a)}" cy="{_fmt(b)}" r="{_fmt(style.point_radius)}"/>')
            lines.append("</g>")
        if style.labels and tiling.addresses[j] is not None:
            cx, cy = float(x.mean()), float(y.mean())
            lines.append(
                f'<text x="{_fmt(cx)}" y="{_fmt(cy)}" font-size="8" text-anchor="middle">{escape(str(tiling.addresses[j]))}</text>'
            )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
