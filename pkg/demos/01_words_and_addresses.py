"""Index sets Omega_k and tile addresses for the golden b system.

Run: python demos/01_words_and_addresses.py
"""
from blowup import load_spec, omega_level, pi_prefix
from blowup.symbolic import cylinder_partition_check, format_word

spec = load_spec("goldenb")
pv = spec.pv

# Omega_k grows like the Fibonacci numbers because a = (1, 2)
for k in range(8):
    words = omega_level(k, pv)
    print(f"k={k}  |Omega_k|={len(words):3d}  " + " ".join(format_word(w) for w in words[:8]) + (" ..." if len(words) > 8 else ""))

# each Omega_k cuts the word tree into disjoint cylinders
print("partition at k=6:", cylinder_partition_check(6, 6 + pv.a_max, pv).ok)

# absolute addresses theta.omega, normalized so the last letter of theta and
# the first letter of omega differ
for theta in [(1,), (1, 2), (2, 1, 1)]:
    t = pi_prefix(theta, spec)
    print(f"pi({format_word(theta)}):", " ".join(t.address_strings()))
