#!/usr/bin/env python3
"""Sampled verification of the convexity / smoothness / bolicity inequalities.

Run:  python demos/05_convexity_suites.py        (takes a minute or two)
"""

from lpcube import analysis as an
from lpcube import complexes as cc

corner = cc.corner_complex()
rect = cc.grid(12, 1, 0)

print("=== midpoint convexity: d(m(x,y), m(x,y')) <= d(y,y')/2 ===")
rep = an.midpoint_convexity_suite(corner, 3.0, 300, seed=42)
print(f"{rep.samples} triples, {rep.violations} violations, "
      f"worst margin {rep.worst_margin:.2e}")
print("replayed witness margin:", an.replay_witness(corner, rep.witness))

print("\n=== full busemann convexity along a t-grid ===")
rep = an.busemann_suite(corner, 2.0, 150, seed=43)
print(f"{rep.samples} quadruples, {rep.violations} violations, "
      f"worst margin {rep.worst_margin:.2e}")

print("\n=== uniform convexity with k = 1/2^p ===")
for p in (2.0, 3.0):
    rep = an.uniform_convexity_suite(corner, p, None, 300, seed=44)
    print(f"p={p}, k={rep.constants_used['k']}: {rep.violations} violations, "
          f"worst margin {rep.worst_margin:.2e}")

print("\n=== uniform smoothness on a long flat strip ===")
rep = an.uniform_smoothness_suite(rect, 2.0, 1.0, r=1.0, R=4.0,
                                  n_samples=200, seed=45)
print(f"C=1: {rep.violations} violations, worst margin {rep.worst_margin:.2e}")
print("(the sharper C=1/4 admits flat counterexamples; see the test suite)")

print("\n=== bolicity: four-point smoothness (B1) and midpoint contraction (B2) ===")
rep = an.bolicity_b1_suite(rect, 2.0, delta=0.1, r=1.0, n_samples=150, seed=46)
print(f"B1 at scale R={rep.constants_used['R']}: {rep.violations} violations")
rep = an.bolicity_b2_suite(rect, 2.0, None, 1.0, n_samples=150, seed=47)
print(f"B2 with threshold N={rep.constants_used['N']}: {rep.violations} violations")
