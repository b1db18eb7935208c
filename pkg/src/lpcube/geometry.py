"""lp norm primitives and within-cube metric operations.

All reals are double precision.  p = inf is computed as an exact max norm,
never as a large-p approximation; large finite p is only ever used on purpose
by the sweep operations.
"""

from __future__ import annotations

import math
from typing import Iterable, Optional, Union

import numpy as np

from .complexes import CubeComplex, CubeRef, Point
from .errors import NoCommonCube

INF = math.inf
PValue = Union[int, float]


def check_p(p: PValue, *, finite: bool = False, smooth: bool = False) -> float:
    p = float(p)
    if math.isnan(p) or p < 1.0:
        raise ValueError(f"p must satisfy p >= 1, got {p}")
    if smooth and not 1.0 < p < INF:
        raise ValueError(f"operation requires p in (1, inf), got {p}")
    if finite and p == INF:
        raise ValueError("operation requires finite p")
    return p


def lp_norm(v, p: PValue) -> float:
    """(sum |v_i|^p)^(1/p); max norm at p = inf.  Scaled for large-p stability."""
    p = check_p(p)
    a = np.abs(np.asarray(v, dtype=float))
    if a.size == 0:
        return 0.0
    m = float(a.max())
    if p == INF or m == 0.0:
        return m
    if p == 2.0:
        return float(np.sqrt(np.dot(a, a)))
    return m * float(np.sum((a / m) ** p)) ** (1.0 / p)


def lp_norm_grad(v: np.ndarray, p: float, norm: Optional[float] = None) -> np.ndarray:
    """Gradient of the lp norm at v != 0 (p in (1, inf))."""
    if norm is None:
        norm = lp_norm(v, p)
    if norm == 0.0:
        raise ZeroDivisionError("lp norm gradient is undefined at 0")
    if p == 2.0:
        return v / norm
    u = np.abs(v) / norm
    return np.sign(v) * u ** (p - 1.0)


def cube_distance(complex: CubeComplex, x: Point, y: Point, p: PValue) -> float:
    """lp distance between two points sharing a cube."""
    if complex.minimal_cube_pair(x, y) is None:
        raise NoCommonCube("points do not share a cube")
    n = len(complex.hyperplanes)
    return lp_norm(x.ambient(n) - y.ambient(n), p)


def factor_component(complex: CubeComplex, x: Point, z: Point,
                     factor: Iterable[int | str]) -> np.ndarray:
    """Sub-vector of the coordinate difference indexed by the factor's hyperplanes."""
    pair = complex.minimal_cube_pair(x, z)
    if pair is None:
        raise NoCommonCube("points do not share a cube")
    idx = sorted(complex.label_index[h] if isinstance(h, str) else int(h) for h in factor)
    mask = 0
    for i in idx:
        mask |= 1 << i
    if mask & ~pair.mask:
        raise NoCommonCube("factor is not contained in the common cube's support")
    n = len(complex.hyperplanes)
    diff = x.ambient(n) - z.ambient(n)
    return diff[idx]


def power_map(complex: CubeComplex, x: Point, v: int, p: PValue) -> Point:
    """Coordinatewise t -> t^(p/2) relative to the vertex v as origin.

    Maps an lp configuration to the l2 configuration with the same factor
    structure: the squared l2 factor norms of the image equal the p-th power
    lp factor norms of the source.
    """
    p = check_p(p, finite=True)
    cube = x.minimal_cube()
    if not complex.is_cube(cube):
        raise ValueError("point is not valid in this complex")
    if (v & ~cube.mask) != cube.corner:
        raise ValueError("v must be a vertex of the point's minimal cube")
    exponent = p / 2.0
    coords = {}
    for h, t in x.coords:
        rel = 1.0 - t if v >> h & 1 else t
        rel = rel ** exponent
        coords[h] = 1.0 - rel if v >> h & 1 else rel
    return Point.make(x.base, coords)


def ambient(complex: CubeComplex, x: Point) -> np.ndarray:
    return x.ambient(len(complex.hyperplanes))


def distance_lower_bound(complex: CubeComplex, x: Point, y: Point, p: PValue) -> float:
    """Cheap admissible lower bound on the lp path distance.

    Any path must change each hyperplane coordinate by at least its net
    difference, giving the ambient lp bound; and per unit of lp length the
    total coordinate movement is at most d_max^(1 - 1/p) where d_max is the
    largest cube dimension, giving an l1-based bound that is much stronger
    across long complexes.
    """
    p = check_p(p)
    n = len(complex.hyperplanes)
    diff = np.abs(x.ambient(n) - y.ambient(n))
    lp = lp_norm(diff, p)
    dmax = max((q.dim for q in complex.maximal_cubes()), default=1)
    if dmax <= 1 or p == INF:
        l1_bound = float(diff.sum()) if p != INF else 0.0
        return max(lp, l1_bound) if p != INF else lp
    return max(lp, float(diff.sum()) / dmax ** (1.0 - 1.0 / p))


def box_clamp_distance(point_vec: np.ndarray, cube: CubeRef, n: int, p: PValue) -> float:
    """lp distance from an ambient point to a cube, via per-coordinate clamping."""
    gaps = np.zeros(n)
    for i in range(n):
        bit = 1 << i
        if cube.mask & bit:
            lo, hi = 0.0, 1.0
        else:
            lo = hi = 1.0 if cube.corner & bit else 0.0
        t = point_vec[i]
        if t < lo:
            gaps[i] = lo - t
        elif t > hi:
            gaps[i] = t - hi
    return lp_norm(gaps, p)
