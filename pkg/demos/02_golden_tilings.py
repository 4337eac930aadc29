"""Canonical tilings T_k and a nested sequence pi(theta|k), written as SVG.

Run: python demos/02_golden_tilings.py [outdir]
"""
import sys
from pathlib import Path

from blowup import RenderStyle, canonical_tiling, load_spec, pi_prefix, prototile_census, render_svg
from blowup.symbolic import EventuallyPeriodic

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_output")
out.mkdir(exist_ok=True)
spec = load_spec("goldenb")

for k in (3, 6, 9):
    t = canonical_tiling(k, spec)
    print(f"T_{k}: {len(t)} tiles, census {prototile_census(t)}, area {t.areas.sum():.6f}")
    (out / f"T_{k}.svg").write_text(render_svg(t, RenderStyle(labels=k <= 3)))

# pi(theta|k) for theta = 1 2 1 2 ... grows outward, each one inside the next
theta = EventuallyPeriodic((), (1, 2))
for k in range(2, 9, 2):
    t = pi_prefix(theta.prefix(k), spec)
    (out / f"pi_12_{k}.svg").write_text(render_svg(t, RenderStyle(color_by="depth")))
    print(f"pi(theta|{k}): {len(t)} tiles, diameter {t.diameter:.3f}")
print("SVG files in", out)
