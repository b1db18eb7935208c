#!/usr/bin/env python3
"""The epsilon-net oracle: an independent upper bound that certifies the solver.

Run:  python demos/06_oracle.py
"""

from lpcube import complexes as cc
from lpcube import oracle as orc
from lpcube import solver as sv
from lpcube.complexes import Point

corner = cc.corner_complex()
x = Point.make(0, {0: 0.3, 1: 0.9})
y = Point.make(0, {2: 0.8, 3: 0.7})

print("=== dyadic refinement: halving eps never increases the upper bound ===")
exact = sv.distance(corner, x, y, 2.0)
for eps in (0.5, 0.25, 0.125, 0.0625, 0.03125):
    upper = orc.oracle_distance(corner, x, y, 2.0, eps)
    print(f"eps={eps:<8} net step {orc.dyadic_step(eps):<9} "
          f"oracle {upper:.8f}  (solver {exact:.8f}, gap {upper - exact:.2e})")

print("\n=== certification ===")
print("solver path certified:", orc.oracle_certify(corner, x, y, 2.0, 0.05))

detour = Point.make(0, {1: 0.95, 2: 0.95})
fake = sv.PiecewisePath(corner, 2.0, (x, detour, y))
print(f"a detour path is {fake.length - exact:.3f} too long; certified:",
      orc.certify_path(corner, fake, 0.05))

print("\n=== a bigger instance: diagonal of the 2x2x2 grid ===")
g = cc.grid(2, 2, 2)
gx = Point.make(0, {0: 0.5, 2: 0.5, 4: 0.5})
gy = Point.make(0b010101, {1: 0.5, 3: 0.5, 5: 0.5})
upper = orc.oracle_distance(g, gx, gy, 2.0, 0.05)
print("oracle:", upper, " solver:", sv.distance(g, gx, gy, 2.0), " (exact sqrt(3))")
