"""
Boundary evidence
=================

Away from its spectrum an inner function extends across the circle.
The ratio |u''| / |u'|^2 stays bounded there for the functions studied
here.  Radial limits at the spectrum stay below 1.  Both checks are
evidence, not proof.
"""

import cmath

from onecomp import atomic, blaschke, compose, frostman_shift
from onecomp.criterion import aleksandrov_ratio, criterion_scan

S = atomic()
print("ratio for S at a few points:", [round(aleksandrov_ratio(S, cmath.exp(1j * t)), 12) for t in (0.1, 1, 3)])

for name, u in [
    ("S", S),
    ("S(z^2)", compose(S, blaschke(0, 0))),
    ("S o b_0.3i", compose(S, blaschke(0.3j, -0.5))),
    ("Frostman shift of S by 1/2", frostman_shift(S, 0.5)),
]:
    rep = criterion_scan(u)
    probes = ", ".join(f"{p.value:.3g}" for p in rep.probes)
    print(f"{name:28s} sups={rep.sups[0]:.6g}/{rep.sups[1]:.6g} probes=[{probes}] -> {rep.verdict_hint}")
