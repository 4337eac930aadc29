"""Amalgamation, its inverse and the shift maps.

Run: python demos/03_operators.py
"""
from blowup import amalgamate, amalgamate_inverse, canonical_tiling, load_spec, pi_prefix, shift
from blowup.algebra import detect_partners, rigidity_check, strong_rigidity_check, symmetry_search
from blowup.tiling import same_tiles

spec = load_spec("goldenb")

t5 = canonical_tiling(5, spec)
det = detect_partners(t5)
print(f"T_5 has {len(det.partner_sets)} partner sets and {len(det.loose)} loose tiles")
print("alpha(T_5) == T_4:", same_tiles(amalgamate(t5), canonical_tiling(4, spec)))
print("alpha^-1(T_4) == T_5:", same_tiles(amalgamate_inverse(canonical_tiling(4, spec)), t5))

# S_1 takes pi(1 2 2 1) to pi(2 2 1) and keeps addresses consistent
out = shift(1, pi_prefix((1, 2, 2, 1), spec))
print("shift result:", out.provenance, out.address_strings()[:5])

print("golden b rigidity:", rigidity_check(spec).verdict, "/ strong:", strong_rigidity_check(spec).verdict)
print("symmetries of pi(12121212):", symmetry_search(pi_prefix((1, 2) * 4, spec)))

square = load_spec("square")
rep = rigidity_check(square)
print("square grid:", rep.verdict, "-", rep.reason)
print("square grid symmetries found:", len(symmetry_search(pi_prefix((1, 4), square))))
