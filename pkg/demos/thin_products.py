"""
A thin product never connects at small levels
=============================================

Zeros 1 - n^-n are spread so far apart that every small sublevel set
breaks into one piece per zero.
"""

from onecomp import InfiniteBlaschke, ZeroSequence, is_connected, label_components
from onecomp.sequences import hoffman_constants, interpolation_constant, interp_delta_n

seq = ZeroSequence("superexponential")
for n in range(1, 7):
    print(f"n={n}  z_n={seq.points(n)[-1].real:.8f}  delta_n={interp_delta_n(seq, n, 6).value:.6f}")

u = InfiniteBlaschke(seq, 6)
eps = hoffman_constants(interpolation_constant(seq, 6)).epsilon
v = is_connected(u, eps)
cmap = label_components(v.sample, u)
print(f"epsilon={eps:.5f}: {v.verdict}, {cmap.count} components with zeros {cmap.zero_count}")
for k in range(cmap.count):
    lo, hi = cmap.annulus[k]
    print(f"  component {k}: {lo:.6f} <= |z| <= {hi:.6f}")
