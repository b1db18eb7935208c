#!/usr/bin/env python3
"""How geodesics deform as p varies, and the limiting break positions.

The square/3-cube fixture has a single break point on the shared edge; its
position moves continuously from 1/3 (as p -> 1) to 1/2 (as p -> infinity),
passing through 1/(1+sqrt(2)) at p = 2.

Run:  python demos/04_p_sweeps_and_limits.py
"""

import math

from lpcube import analysis as an
from lpcube import complexes as cc
from lpcube.complexes import Point

scb = cc.square_cube_book()
x, y = Point.make(0b0010), Point.make(0b1101)
fn = an.break_coordinate_functional(scb, "d")

table = an.p_sweep(scb, x, y, fn, an.geometric_grid(1.01, 64.0, 26))
print("      p      break position")
for p, z in table.rows:
    bar = "#" * int((z - 0.30) * 200)
    print(f"{p:9.4f}   {z:.6f}  {bar}")
print(f"\nmax adjacent gap: {table.max_gap:.5f}  (continuity proxy)")
print(f"p -> 1 limit target 1/3       = {1/3:.6f}")
print(f"p = 2  closed form 1/(1+sqrt2) = {1/(1+math.sqrt(2)):.6f}")
print(f"p -> inf limit target 1/2     = 0.500000")

print("\nrank-4 lattice minimizer (two triangles sharing the diagonal):")
for p in (1.5, 2.0, 3.0, 8.0):
    x_num, y_num, x_closed, residual = an.rank4_lattice_check(p)
    print(f"  p={p}: x={x_num:.8f} (closed {x_closed:.8f}), y={y_num:.8f}, "
          f"residual {residual:.1e}")

print("\nten-triangle angle test (when do 10 orthosimplex corners crowd a vertex?):")
for n in (1, 2, 3):
    angle, threshold, ok = an.decagon_angle_check(n)
    print(f"  n={n}: angle {angle:.5f} vs 2*pi/10 = {threshold:.5f} -> "
          f"{'below (crowded)' if ok else 'not below'}")
