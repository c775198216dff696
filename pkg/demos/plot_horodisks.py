"""
Level sets of the atomic inner function
=======================================

The sublevel sets of S(z) = exp(-(1+z)/(1-z)) are horodisks, disks
tangent to the circle at 1.  We classify a grid, compare it with the
closed form and draw a picture.
"""

import math
import os
from pathlib import Path

import numpy as np

from onecomp import atomic, horodisk, is_connected, render, sample
from onecomp.sublevel import IN, UNCERTAIN

out = Path(os.environ.get("ONECOMP_OUT_DIR", "onecomp-out"))
S = atomic()

# Every grid cell is IN, OUT or UNCERTAIN.  Only the first two carry a claim.
for eta in (math.exp(-3), math.exp(-1), 0.5):
    s = sample(S, eta, level=2)
    cert = np.flatnonzero(s.classes != UNCERTAIN)
    d = horodisk(eta)
    z = s.grid.geometry(cert).z
    agree = np.mean((np.abs(z - d.center) < d.radius) == (s.classes[cert] == IN))
    print(f"eta={eta:.4f}  cells={len(s.grid):6d}  certified={cert.size:6d}  agreement={agree:.4%}")

# Connectivity is decided from the IN cells and the IN-or-uncertain cells.
v = is_connected(S, 0.5)
print("verdict at 0.5:", v.verdict, "history", v.history)

# A nested picture: darker colors are smaller levels.
print("wrote", render(S, [0.05, 0.2, 0.5, 0.8], out / "horodisks.ppm", size=256))
print("wrote", render(S, [0.05, 0.2, 0.5, 0.8], out / "horodisks.svg", size=256))
