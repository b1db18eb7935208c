"""Sampled verification suites for the metric inequalities, p-sweeps, and the
two closed-form worked examples (rank-4 lattice minimizer, decagon angle).

Every suite is deterministic given (seed, n_samples): sample i draws from the
substream default_rng([seed, i]) regardless of evaluation order, and the worst
witness is serialized so it can be replayed to the same margin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .complexes import CubeComplex, Point, point_from_obj, point_to_obj
from .errors import InsufficientDiameter
from .geometry import check_p, distance_lower_bound, lp_norm
from .solver import DEFAULT_TOL, PiecewisePath, distance, geodesic
from .solver import bicombing as _bicombing

SUITE_TOL = 1e-8
MAX_REJECTS = 20_000


@dataclass
class CheckReport:
    """Outcome of one sampled inequality suite."""

    suite: str
    samples: int
    violations: int
    worst_margin: float
    witness: Optional[dict]
    constants_used: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.violations == 0

    def to_obj(self) -> dict:
        return {
            "suite": self.suite,
            "samples": self.samples,
            "violations": self.violations,
            "worst_margin": self.worst_margin,
            "witness": self.witness,
            "constants_used": self.constants_used,
        }


def default_convexity_constant(p: float) -> float:
    """k = 1/2^p for p >= 2; a conservative documented default below 2."""
    return 0.5 ** p if p >= 2.0 else (p - 1.0) / 8.0


def default_smoothness_constant(p: float) -> float:
    if p < 2.0:
        raise ValueError("the smoothness constant (p-1)^2/4 requires p >= 2")
    return (p - 1.0) ** 2 / 4.0


def _rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng([seed & 0xFFFFFFFFFFFFFFFF, index])


def sample_point(complex: CubeComplex, rng: np.random.Generator,
                 margin: float = 0.02) -> Point:
    """Uniform point of a uniformly chosen maximal cube (interior, clamped)."""
    cubes = complex.maximal_cubes()
    ref = cubes[int(rng.integers(len(cubes)))]
    coords = {}
    for i in range(len(complex.hyperplanes)):
        if ref.mask >> i & 1:
            coords[i] = float(rng.uniform(margin, 1.0 - margin))
    return Point.make(ref.corner, coords)


def _far_bound(complex: CubeComplex, a: Point, b: Point, p: float) -> float:
    """Admissible lower bound used to certify that sampled pairs are far."""
    return distance_lower_bound(complex, a, b, p)


def _worst(report_state: dict, margin: float, witness: dict) -> None:
    if margin < report_state["worst"]:
        report_state["worst"] = margin
        report_state["witness"] = witness


def _finish(name: str, n: int, state: dict, tol: float, constants: dict) -> CheckReport:
    worst = state["worst"] if state["worst"] != math.inf else 0.0
    return CheckReport(name, n, state["violations"], worst, state["witness"], constants)


# -- convexity-style suites ----------------------------------------------------


def midpoint_convexity_suite(complex: CubeComplex, p: float, n_samples: int,
                             seed: int, tol: float = SUITE_TOL,
                             scale: float = 1.0) -> CheckReport:
    """d(mid(x,y), mid(x,y')) <= d(y,y')/2 on sampled triples."""
    check_p(p, smooth=True)
    state = {"worst": math.inf, "witness": None, "violations": 0}
    for i in range(n_samples):
        rng = _rng(seed, i)
        x, y, y2 = (sample_point(complex, rng) for _ in range(3))
        m1 = _bicombing(complex, x, y, 0.5, p)
        m2 = _bicombing(complex, x, y2, 0.5, p)
        margin = scale * (0.5 * distance(complex, y, y2, p)
                          - distance(complex, m1, m2, p))
        if margin < -tol:
            state["violations"] += 1
        _worst(state, margin, {
            "suite": "midpoint", "p": p, "scale": scale, "index": i,
            "x": point_to_obj(complex, x), "y": point_to_obj(complex, y),
            "y2": point_to_obj(complex, y2),
        })
    return _finish("midpoint", n_samples, state, tol,
                   {"p": p, "tol": tol, "scale": scale, "seed": seed})


def busemann_suite(complex: CubeComplex, p: float, n_samples: int, seed: int,
                   tol: float = SUITE_TOL, t_values: Sequence[float] = None,
                   scale: float = 1.0) -> CheckReport:
    """d(s1(t), s2(t)) <= (1-t) d(x,x') + t d(y,y') on sampled quadruples."""
    check_p(p, smooth=True)
    if t_values is None:
        t_values = [i / 10 for i in range(1, 10)]
    state = {"worst": math.inf, "witness": None, "violations": 0}
    for i in range(n_samples):
        rng = _rng(seed, i)
        x, y, x2, y2 = (sample_point(complex, rng) for _ in range(4))
        s1 = geodesic(complex, x, y, p)
        s2 = geodesic(complex, x2, y2, p)
        dx = distance(complex, x, x2, p)
        dy = distance(complex, y, y2, p)
        sample_worst = math.inf
        worst_t = None
        for t in t_values:
            bound = (1 - t) * dx + t * dy
            val = distance(complex, s1.evaluate(t), s2.evaluate(t), p)
            m = scale * (bound - val)
            if m < sample_worst:
                sample_worst, worst_t = m, t
        if sample_worst < -tol:
            state["violations"] += 1
        _worst(state, sample_worst, {
            "suite": "busemann", "p": p, "scale": scale, "index": i, "t": worst_t,
            "x": point_to_obj(complex, x), "y": point_to_obj(complex, y),
            "x2": point_to_obj(complex, x2), "y2": point_to_obj(complex, y2),
        })
    return _finish("busemann", n_samples, state, tol,
                   {"p": p, "tol": tol, "scale": scale, "seed": seed,
                    "t_values": list(t_values)})


def uniform_convexity_suite(complex: CubeComplex, p: float, k: Optional[float],
                            n_samples: int, seed: int,
                            tol: float = SUITE_TOL, scale: float = 1.0) -> CheckReport:
    """d(x,m)^q <= d(x,y)^q/2 + d(x,z)^q/2 - k d(y,z)^q, m the y-z midpoint.

    The inequality exponent is q = max(p, 2): lp norms are power-type-p
    uniformly convex only for p >= 2 and power-type-2 below (no constant
    makes the p-power form true for p < 2, as the modulus is quadratic).
    """
    check_p(p, smooth=True)
    if k is None:
        k = default_convexity_constant(p)
    q = max(p, 2.0)
    state = {"worst": math.inf, "witness": None, "violations": 0}
    sq = scale ** q
    for i in range(n_samples):
        rng = _rng(seed, i)
        x, y, z = (sample_point(complex, rng) for _ in range(3))
        m = _bicombing(complex, y, z, 0.5, p)
        margin = sq * (0.5 * distance(complex, x, y, p) ** q
                       + 0.5 * distance(complex, x, z, p) ** q
                       - k * distance(complex, y, z, p) ** q
                       - distance(complex, x, m, p) ** q)
        if margin < -tol:
            state["violations"] += 1
        _worst(state, margin, {
            "suite": "uniform_convexity", "p": p, "k": k, "q": q, "scale": scale,
            "index": i,
            "x": point_to_obj(complex, x), "y": point_to_obj(complex, y),
            "z": point_to_obj(complex, z),
        })
    return _finish("uniform_convexity", n_samples, state, tol,
                   {"p": p, "k": k, "q": q, "tol": tol, "scale": scale, "seed": seed})


# -- smoothness / bolicity suites ----------------------------------------------


def _diameter_lower_bound(complex: CubeComplex, p: float) -> float:
    """True distance between the most separated vertex pair (by crossing count)."""
    verts = sorted(complex.vertices)
    best_pair = None
    best_count = -1
    for i, u in enumerate(verts):
        for w in verts[i + 1:]:
            crossings = bin(u ^ w).count("1")
            if crossings > best_count:
                best_count = crossings
                best_pair = (u, w)
    if best_pair is None:
        return 0.0
    return distance(complex, Point.make(best_pair[0]), Point.make(best_pair[1]), p)


def _nearby_point(complex: CubeComplex, rng: np.random.Generator, center: Point,
                  radius: float, p: float) -> Point:
    """A point within lp distance radius of center, inside one of its cubes."""
    ref = None
    cubes = [c for c in complex.maximal_cubes()
             if c.contains_cube(center.minimal_cube())]
    ref = cubes[int(rng.integers(len(cubes)))]
    n = len(complex.hyperplanes)
    vec = center.ambient(n).copy()
    free = [i for i in range(n) if ref.mask >> i & 1]
    delta = rng.uniform(-1.0, 1.0, size=len(free))
    nrm = lp_norm(delta, p)
    if nrm > 0:
        delta *= rng.uniform(0.0, radius * 0.99) / nrm
    for j, i in enumerate(free):
        vec[i] = min(max(vec[i] + delta[j], 0.0), 1.0)
    from .complexes import point_from_ambient
    return point_from_ambient(vec, ref)


def uniform_smoothness_suite(complex: CubeComplex, p: float, C: Optional[float],
                             r: float, R: float, n_samples: int, seed: int,
                             tol: float = SUITE_TOL) -> CheckReport:
    """d(x, mid(y,z)) <= d(x,z) - d(y,z)/2 + C r^2 / R over stretched triples."""
    check_p(p, smooth=True)
    if C is None:
        C = default_smoothness_constant(p)
    if R < 2 * r:
        raise ValueError("R must be at least 2r")
    if _diameter_lower_bound(complex, p) < R:
        raise InsufficientDiameter(f"complex cannot realize d(y,z) >= {R}")
    state = {"worst": math.inf, "witness": None, "violations": 0}
    allowance = C * r * r / R
    for i in range(n_samples):
        rng = _rng(seed, i)
        y = z = None
        for _ in range(MAX_REJECTS):
            y = sample_point(complex, rng)
            z = sample_point(complex, rng)
            if _far_bound(complex, y, z, p) >= R:
                break
        else:
            raise InsufficientDiameter("could not sample a pair at distance R")
        x = _nearby_point(complex, rng, y, r, p)
        m = _bicombing(complex, y, z, 0.5, p)
        margin = (distance(complex, x, z, p) - 0.5 * distance(complex, y, z, p)
                  + allowance - distance(complex, x, m, p))
        if margin < -tol:
            state["violations"] += 1
        _worst(state, margin, {
            "suite": "uniform_smoothness", "p": p, "C": C, "r": r, "R": R, "index": i,
            "x": point_to_obj(complex, x), "y": point_to_obj(complex, y),
            "z": point_to_obj(complex, z),
        })
    return _finish("uniform_smoothness", n_samples, state, tol,
                   {"p": p, "C": C, "r": r, "R": R, "tol": tol, "seed": seed})


def b1_witness_radius(delta: float, r: float, C: float) -> float:
    """The four-point scale R = max(2 C r^2 / delta, 2r)."""
    return max(2.0 * C * r * r / delta, 2.0 * r)


def bolicity_b1_suite(complex: CubeComplex, p: float, delta: float, r: float,
                      n_samples: int, seed: int, C: Optional[float] = None,
                      tol: float = SUITE_TOL) -> CheckReport:
    """Four-point excess d(a,b)+d(a',b')-d(a,b')-d(a',b) <= delta at scale R."""
    check_p(p, smooth=True)
    if C is None:
        C = default_smoothness_constant(p)
    R = b1_witness_radius(delta, r, C)
    if _diameter_lower_bound(complex, p) < R:
        raise InsufficientDiameter(f"complex cannot realize the scale R = {R}")
    state = {"worst": math.inf, "witness": None, "violations": 0}
    for i in range(n_samples):
        rng = _rng(seed, i)
        found = False
        for _ in range(MAX_REJECTS):
            a = sample_point(complex, rng)
            b = sample_point(complex, rng)
            if _far_bound(complex, a, b, p) < R + 2 * r:
                continue
            a2 = _nearby_point(complex, rng, a, r, p)
            b2 = _nearby_point(complex, rng, b, r, p)
            if all(_far_bound(complex, u, w, p) >= R
                   for u, w in ((a, b), (a2, b2), (a, b2), (a2, b))):
                found = True
                break
        if not found:
            raise InsufficientDiameter("could not sample a B1 quadruple at scale R")
        excess = (distance(complex, a, b, p) + distance(complex, a2, b2, p)
                  - distance(complex, a, b2, p) - distance(complex, a2, b, p))
        margin = delta - excess
        if margin < -tol:
            state["violations"] += 1
        _worst(state, margin, {
            "suite": "bolicity_b1", "p": p, "delta": delta, "r": r, "R": R, "index": i,
            "a": point_to_obj(complex, a), "b": point_to_obj(complex, b),
            "a2": point_to_obj(complex, a2), "b2": point_to_obj(complex, b2),
        })
    return _finish("bolicity_b1", n_samples, state, tol,
                   {"p": p, "delta": delta, "r": r, "R": R, "C": C,
                    "tol": tol, "seed": seed})


def b2_threshold(k: float, C: float, p: float) -> float:
    """Smallest admissible N with (1-k)^(1/p) < 1 - C/N, nudged up to be safe."""
    if not 0 < k < 1:
        raise ValueError("k must lie in (0, 1)")
    n_min = C / (1.0 - (1.0 - k) ** (1.0 / p))
    return float(math.floor(n_min) + 1)


def bolicity_b2_suite(complex: CubeComplex, p: float, k: Optional[float],
                      C: float, n_samples: int, seed: int,
                      tol: float = SUITE_TOL) -> CheckReport:
    """d(x, mid(y,z)) < N - C whenever d(x,y), d(x,z) <= N < d(y,z)."""
    check_p(p, smooth=True)
    if k is None:
        k = default_convexity_constant(p)
    N = b2_threshold(k, C, max(p, 2.0))  # exponent of the convexity type in use
    if _diameter_lower_bound(complex, p) <= N:
        raise InsufficientDiameter(f"complex diameter does not exceed N = {N}")
    state = {"worst": math.inf, "witness": None, "violations": 0}
    for i in range(n_samples):
        rng = _rng(seed, i)
        found = False
        for _ in range(MAX_REJECTS):
            y = sample_point(complex, rng)
            z = sample_point(complex, rng)
            if _far_bound(complex, y, z, p) <= N:
                continue
            x = sample_point(complex, rng)
            if _far_bound(complex, x, y, p) > N or \
               _far_bound(complex, x, z, p) > N:
                continue
            if distance(complex, x, y, p) <= N and distance(complex, x, z, p) <= N:
                found = True
                break
        if not found:
            raise InsufficientDiameter("could not sample a B2 triple around N")
        m = _bicombing(complex, y, z, 0.5, p)
        margin = (N - C) - distance(complex, x, m, p)
        if margin < -tol:
            state["violations"] += 1
        _worst(state, margin, {
            "suite": "bolicity_b2", "p": p, "k": k, "C": C, "N": N, "index": i,
            "x": point_to_obj(complex, x), "y": point_to_obj(complex, y),
            "z": point_to_obj(complex, z),
        })
    return _finish("bolicity_b2", n_samples, state, tol,
                   {"p": p, "k": k, "C": C, "N": N, "tol": tol, "seed": seed})


def replay_witness(complex: CubeComplex, witness: dict) -> float:
    """Recompute a witness's margin from its serialization."""
    suite = witness["suite"]
    p = witness["p"]
    pt = lambda key: point_from_obj(complex, witness[key])
    if suite == "midpoint":
        x, y, y2 = pt("x"), pt("y"), pt("y2")
        m1 = _bicombing(complex, x, y, 0.5, p)
        m2 = _bicombing(complex, x, y2, 0.5, p)
        return witness["scale"] * (0.5 * distance(complex, y, y2, p)
                                   - distance(complex, m1, m2, p))
    if suite == "busemann":
        x, y, x2, y2 = pt("x"), pt("y"), pt("x2"), pt("y2")
        t = witness["t"]
        s1 = geodesic(complex, x, y, p)
        s2 = geodesic(complex, x2, y2, p)
        bound = (1 - t) * distance(complex, x, x2, p) + t * distance(complex, y, y2, p)
        return witness["scale"] * (bound - distance(complex, s1.evaluate(t),
                                                    s2.evaluate(t), p))
    if suite == "uniform_convexity":
        x, y, z = pt("x"), pt("y"), pt("z")
        q = witness["q"]
        m = _bicombing(complex, y, z, 0.5, p)
        return witness["scale"] ** q * (
            0.5 * distance(complex, x, y, p) ** q
            + 0.5 * distance(complex, x, z, p) ** q
            - witness["k"] * distance(complex, y, z, p) ** q
            - distance(complex, x, m, p) ** q)
    if suite == "uniform_smoothness":
        x, y, z = pt("x"), pt("y"), pt("z")
        m = _bicombing(complex, y, z, 0.5, p)
        return (distance(complex, x, z, p) - 0.5 * distance(complex, y, z, p)
                + witness["C"] * witness["r"] ** 2 / witness["R"]
                - distance(complex, x, m, p))
    if suite == "bolicity_b1":
        a, b, a2, b2 = pt("a"), pt("b"), pt("a2"), pt("b2")
        excess = (distance(complex, a, b, p) + distance(complex, a2, b2, p)
                  - distance(complex, a, b2, p) - distance(complex, a2, b, p))
        return witness["delta"] - excess
    if suite == "bolicity_b2":
        x, y, z = pt("x"), pt("y"), pt("z")
        m = _bicombing(complex, y, z, 0.5, p)
        return (witness["N"] - witness["C"]) - distance(complex, x, m, p)
    raise ValueError(f"unknown suite {suite!r}")


# -- p sweeps and limiting bicombings -------------------------------------------


@dataclass
class SweepTable:
    rows: list[tuple[float, float]]
    max_gap: float

    def to_obj(self) -> dict:
        return {"rows": self.rows, "max_adjacent_gap": self.max_gap}


def p_sweep(complex: CubeComplex, x: Point, y: Point,
            functional: Callable[[PiecewisePath], float],
            p_grid: Sequence[float], tol: float = DEFAULT_TOL) -> SweepTable:
    """Evaluate a path functional along a sorted grid of exponents.

    The limiting paths at p = 1 and p = infinity are reached by running the
    grid toward 1.001-ish and 64-ish values rather than solving the endpoint
    metrics, whose geodesics are not unique.
    """
    grid = list(p_grid)
    if any(q2 <= q1 for q1, q2 in zip(grid, grid[1:])):
        raise ValueError("p grid must be strictly increasing")
    if grid and (grid[0] <= 1.0 or math.isinf(grid[-1])):
        raise ValueError("p grid must lie in (1, inf)")
    rows = []
    for q in grid:
        rows.append((q, float(functional(geodesic(complex, x, y, q, tol)))))
    gap = 0.0
    for (_, v1), (_, v2) in zip(rows, rows[1:]):
        gap = max(gap, abs(v2 - v1))
    return SweepTable(rows, gap)


def break_coordinate_functional(complex: CubeComplex, label: str) -> Callable:
    """Functional reading the first interior break's coordinate on a hyperplane."""
    idx = complex.label_index[label]

    def read(path: PiecewisePath) -> float:
        if len(path.breaks) < 3:
            raise ValueError("path has no interior break point")
        b = path.breaks[1]
        for h, t in b.coords:
            if h == idx:
                return t
        return float(b.base >> idx & 1)

    return read


def geometric_grid(lo: float, hi: float, count: int) -> list[float]:
    if not 1.0 < lo < hi:
        raise ValueError("need 1 < lo < hi")
    if count < 2:
        raise ValueError("need at least two grid points")
    # geometric in (p - 1), so the grid accumulates toward the p -> 1 end
    a, b = lo - 1.0, hi - 1.0
    return [1.0 + a * (b / a) ** (i / (count - 1)) for i in range(count)]


# -- closed-form example checks --------------------------------------------------


def _golden_min(fn: Callable[[float], float], lo: float, hi: float,
                iters: int = 90) -> float:
    phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - phi * (b - a)
    d = a + phi * (b - a)
    fc, fd = fn(c), fn(d)
    for _ in range(iters):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - phi * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + phi * (b - a)
            fd = fn(d)
    return 0.5 * (a + b)


def rank4_lattice_check(p: float) -> tuple[float, float, float, float]:
    """Numeric minimizer of the two-triangle detour length versus closed form.

    Minimizes ((1-x)^p + y^p + 2 x^p)^(1/p) + ((1-x)^p + (1-y)^p + 2 x^p)^(1/p)
    over the unit square by nested golden section; the exact minimizer is
    y = 1/2, x = (1 + 2^(1/(p-1)))^(-1).  Both target values lie strictly
    inside (0,1), so the bracketed search is exact.
    """
    p = check_p(p, smooth=True)

    def F(x: float, y: float) -> float:
        common = (1 - x) ** p + 2 * x ** p
        return ((common + y ** p) ** (1 / p)
                + (common + (1 - y) ** p) ** (1 / p))

    def inner(x: float) -> float:
        return _golden_min(lambda y: F(x, y), 0.0, 1.0)

    x_num = _golden_min(lambda x: F(x, inner(x)), 0.0, 1.0)
    y_num = inner(x_num)
    x_closed = 1.0 / (1.0 + 2.0 ** (1.0 / (p - 1.0)))
    residual = max(abs(x_num - x_closed), abs(y_num - 0.5))
    return x_num, y_num, x_closed, residual


def decagon_angle_check(n: int) -> tuple[float, float, bool]:
    """Apex angle arccos(n / sqrt(n (n+1))) against the 2 pi / 10 threshold."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    angle = math.acos(n / math.sqrt(n * (n + 1.0)))
    threshold = 2.0 * math.pi / 10.0
    return angle, threshold, angle < threshold
