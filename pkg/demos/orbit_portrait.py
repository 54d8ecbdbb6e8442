"""Classify orbits of two maps on small balls and scan for invariant circles."""

import math

from holodyn.orbits import FamilyH, SaddleNode, classify_ball, invariant_circle_scan, iterate_orbit

rec = iterate_orbit(SaddleNode(), (0.1, 0.1), 0.5, 10_000)
print("saddle-node from (0.1, 0.1):", rec.status, "forward steps", rec.mu_forward)

print("saddle-node, rho 0.5:", classify_ball(SaddleNode(), 0.5, 32, 100_000).counts())
print("xy-preserving map, f = 2 pi i:",
      classify_ball(FamilyH((2j * math.pi,)), 0.3, 16, 100_000).counts())

for c in invariant_circle_scan((1.0,), rays=8):
    print(f"  circle xy = {c['C']:.6f}  drift {c['drift']:.1e}")
