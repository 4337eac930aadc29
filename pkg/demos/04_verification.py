"""Overlap, self-similarity, repetition, injectivity and the tiling metric.

Run: python demos/04_verification.py
"""
from blowup import (
    canonical_tiling,
    injectivity_precondition,
    load_spec,
    nonoverlap_check,
    patch,
    pi_prefix,
    quasiperiodicity_probe,
    self_similarity_check,
    tiling_distance,
)
from blowup.symbolic import EventuallyPeriodic

spec = load_spec("goldenb")

rep = nonoverlap_check(canonical_tiling(10, spec))
print(f"T_10 overlap: max {rep.max_overlap:.2e} (threshold {rep.threshold:.2e}) ok={rep.ok}")

for alpha, beta in [((), (1, 2)), ((1,), (2,))]:
    ss = self_similarity_check(alpha, beta, spec)
    print(f"alpha={alpha} beta={beta}: psi has power {ss.psi.power}, {len(ss.decomposition)} tiles checked, ok={ss.ok}")

t4 = canonical_tiling(4, spec)
p = patch(t4, t4.centroids[0], 0.6)
q = quasiperiodicity_probe(p, canonical_tiling(10, spec))
print(f"patch of {len(p)} tiles: {len(q.copies)} copies in T_10, covering radius {q.covering_radius:.3f}")

inj = injectivity_precondition(spec)
print("injectivity precondition:", inj.ok, "uncovered fraction", round(inj.pairs[0]["uncovered_fraction"], 6))

theta = EventuallyPeriodic((1,), (2,))
seq = [pi_prefix(theta.prefix(k), spec) for k in range(2, 10)]
for k, (a, b) in enumerate(zip(seq, seq[1:]), start=2):
    d = tiling_distance(a, b, samples=8000)
    print(f"d(pi(theta|{k}), pi(theta|{k + 1})) = {d.value:.4f} +- {d.resolution:.4f}")
