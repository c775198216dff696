"""
Constants of the geometric sequence
===================================

Zeros z_n = 1 - 2^-n form an interpolating sequence.  Its measured
interpolation constant fixes Hoffman's (delta, eta, epsilon): below
epsilon the product is small only inside disjoint pseudodisks of radius
eta around the zeros.
"""

from onecomp import InfiniteBlaschke, ZeroSequence, is_connected
from onecomp.report import hoffman_inclusion, sequence_constants

geo = ZeroSequence("geometric")
c = sequence_constants(geo, 20)
print("consecutive rho:", c["consecutive_rho"])
print("separation:", c["separation"])
print("VHN ratio:", c["vhn_ratio"])
print("Hoffman:", c["hoffman"])

res = hoffman_inclusion(geo, 20)
print(f"{res['in_cells']} IN cells at epsilon, all inside the pseudodisks: {res['all_inside']}, "
      f"disks disjoint: {res['disjoint']}, components: {res['in_components']}")

# Above the largest consecutive distance the sublevel set is connected.
sigma = c["consecutive_rho"]["max"] + 0.1
print(f"sigma={sigma}:", is_connected(InfiniteBlaschke(geo, 20), sigma).verdict)
