"""Finite CAT(0) cube complexes as median-closed vertex sets in a hypercube.

A complex is stored as a set of sign vectors over a global list of named
hyperplanes; vertex v is an int whose bit i gives the side of hyperplane i.
This makes the median operation a three-way bit majority, cube membership a
submask sweep, and hulls exact set computations.

Points carry a base vertex plus fractional coordinates along the hyperplanes
of their minimal cube.  The canonical form puts the base on side 0 of every
fractional hyperplane and forbids coordinate values 0 and 1, so equality of
points is exact float equality.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple, Optional, Sequence

import numpy as np

from .errors import (
    Disconnected,
    DisjointCubes,
    NotMedian,
    ParseError,
    ScaleExceeded,
)

SCALE_CAP = 10_000          # vertex cap for generators
EXHAUSTIVE_MEDIAN_CAP = 600  # generator-built complexes above this skip the O(n^3) check
SNAP_TOL = 1e-12             # coordinates closer than this to 0/1 snap onto the face


def median_of(u: int, v: int, w: int) -> int:
    """Coordinatewise majority of three sign vectors."""
    return (u & v) | (u & w) | (v & w)


class CubeRef(NamedTuple):
    """A cube of the complex: the corner with all support bits 0, plus the support mask."""

    corner: int
    mask: int

    @property
    def dim(self) -> int:
        return bin(self.mask).count("1")

    def corners(self) -> Iterable[int]:
        sub = self.mask
        while True:
            yield self.corner | sub
            if sub == 0:
                return
            sub = (sub - 1) & self.mask

    def contains_cube(self, other: "CubeRef") -> bool:
        if other.mask & ~self.mask:
            return False
        return (other.corner & ~self.mask) == (self.corner & ~self.mask)


def cube_intersection(a: CubeRef, b: CubeRef) -> Optional[CubeRef]:
    """Intersection of two cubes as a cube, or None if they are disjoint."""
    outside = ~(a.mask | b.mask)
    if (a.corner ^ b.corner) & outside:
        return None
    mask = a.mask & b.mask
    # bits on a.mask\b.mask come from b's fixed side, bits on b.mask\a.mask from a's
    corner = (a.corner & outside) | (b.corner & (a.mask & ~mask)) | (
        a.corner & (b.mask & ~mask)
    )
    return CubeRef(corner & ~mask, mask)


@dataclass(frozen=True)
class Point:
    """Location in a complex: base vertex plus fractional hyperplane coordinates.

    ``coords`` maps hyperplane index -> value in the open interval (0, 1),
    measured on the global orientation (side 0 toward side 1).  The base vertex
    always sits on side 0 of every fractional hyperplane.
    """

    base: int
    coords: tuple[tuple[int, float], ...] = ()

    @staticmethod
    def make(base: int, coords: Mapping[int, float] | Iterable[tuple[int, float]] = ()) -> "Point":
        items = dict(coords)
        canon = {}
        for h, t in items.items():
            t = float(t)
            if not 0.0 < t < 1.0:
                raise ValueError(f"coordinate for hyperplane {h} must lie in (0,1), got {t}")
            bit = 1 << h
            if base & bit:
                base ^= bit
                t = 1.0 - t
            canon[h] = t
        return Point(base, tuple(sorted(canon.items())))

    @property
    def coord_mask(self) -> int:
        m = 0
        for h, _ in self.coords:
            m |= 1 << h
        return m

    def minimal_cube(self) -> CubeRef:
        return CubeRef(self.base, self.coord_mask)

    def ambient(self, n_hyperplanes: int) -> np.ndarray:
        vec = np.zeros(n_hyperplanes)
        b = self.base
        for i in range(n_hyperplanes):
            if b >> i & 1:
                vec[i] = 1.0
        for h, t in self.coords:
            vec[h] = t
        return vec

    def is_vertex(self) -> bool:
        return not self.coords


def point_from_ambient(vec: Sequence[float], cube: CubeRef, snap: float = SNAP_TOL) -> Point:
    """Reconstruct the canonical Point for an ambient coordinate vector.

    The vector must describe a location inside ``cube``; values within ``snap``
    of an integer side are snapped onto it, which re-bases the point.
    """
    base = cube.corner
    coords = {}
    for i in range(len(vec)):
        bit = 1 << i
        if not cube.mask & bit:
            if vec[i] > 0.5:
                base |= bit
            continue
        t = float(vec[i])
        if t <= snap:
            continue
        if t >= 1.0 - snap:
            base |= bit
            continue
        coords[i] = t
    return Point.make(base, coords)


class CubeComplex:
    """Validated finite CAT(0) cube complex.

    Immutable after construction; all queries are pure.  Cube lookups and hull
    computations are memoized on the instance (safe under the GIL: cache writes
    are idempotent, so observable behavior is single-threaded-equivalent).
    """

    def __init__(self, hyperplanes: Sequence[str], vertices: Iterable[int], *,
                 vertex_order: Optional[Sequence[int]] = None, validate: bool = True,
                 check_median: Optional[bool] = None):
        self.hyperplanes: tuple[str, ...] = tuple(hyperplanes)
        if len(set(self.hyperplanes)) != len(self.hyperplanes):
            raise ParseError("duplicate hyperplane labels")
        self.vertices: frozenset[int] = frozenset(vertices)
        self.vertex_order: tuple[int, ...] = tuple(vertex_order) if vertex_order is not None \
            else tuple(sorted(self.vertices))
        self.label_index = {h: i for i, h in enumerate(self.hyperplanes)}
        self.vertex_index = {v: i for i, v in enumerate(self.vertex_order)}
        self._cube_cache: dict[CubeRef, bool] = {}
        self._hull_cache: dict[tuple, "SubComplex"] = {}
        self._solver_cache: dict = {}
        self._all_cubes: Optional[tuple[CubeRef, ...]] = None
        self._maximal_cubes: Optional[tuple[CubeRef, ...]] = None
        if validate:
            if check_median is None:
                check_median = True
            self._validate(check_median=check_median)

    # -- validation ---------------------------------------------------------

    def _validate(self, check_median: bool = True) -> None:
        if not self.vertices:
            raise ParseError("vertex set is empty")
        n_bits = len(self.hyperplanes)
        full = (1 << n_bits) - 1
        for v in self.vertices:
            if v & ~full:
                raise ParseError("vertex assigns a side to an unknown hyperplane")
        self._check_connected()
        if check_median:
            self._check_median()

    def _check_connected(self) -> None:
        verts = self.vertices
        start = next(iter(verts))
        seen = {start}
        stack = [start]
        nbits = len(self.hyperplanes)
        while stack:
            v = stack.pop()
            for i in range(nbits):
                w = v ^ (1 << i)
                if w in verts and w not in seen:
                    seen.add(w)
                    stack.append(w)
        if len(seen) != len(verts):
            raise Disconnected(
                f"vertex graph has {len(verts) - len(seen)} vertices unreachable "
                f"from vertex {start:b}",
                component=[self.vertex_sides(v) for v in sorted(seen)],
            )

    def _check_median(self) -> None:
        verts = sorted(self.vertices)
        vset = self.vertices
        n = len(verts)
        for i in range(n):
            u = verts[i]
            for j in range(i + 1, n):
                v = verts[j]
                a = u & v
                o = u | v
                for w in verts:
                    m = a | (w & o)
                    if m not in vset:
                        raise NotMedian(
                            "vertex set is not median-closed",
                            witness={
                                "u": self.vertex_sides(u),
                                "v": self.vertex_sides(v),
                                "w": self.vertex_sides(w),
                                "missing_median": self.vertex_sides(m),
                            },
                        )

    # -- vertex helpers -----------------------------------------------------

    def vertex_sides(self, v: int) -> dict[str, int]:
        return {h: (v >> i) & 1 for i, h in enumerate(self.hyperplanes)}

    def vertex_from_sides(self, sides: Mapping[str, int]) -> int:
        if set(sides) != set(self.hyperplanes):
            raise ParseError("vertex must assign exactly the complex's hyperplanes")
        v = 0
        for h, s in sides.items():
            if s not in (0, 1):
                raise ParseError(f"side of {h} must be 0 or 1, got {s}")
            if s:
                v |= 1 << self.label_index[h]
        return v

    def median(self, u: int, v: int, w: int) -> int:
        for x in (u, v, w):
            if x not in self.vertices:
                raise ValueError(f"{x:b} is not a vertex of the complex")
        return median_of(u, v, w)

    # -- cubes --------------------------------------------------------------

    def is_cube(self, ref: CubeRef) -> bool:
        if ref.corner & ref.mask:
            ref = CubeRef(ref.corner & ~ref.mask, ref.mask)
        cached = self._cube_cache.get(ref)
        if cached is not None:
            return cached
        ok = all(c in self.vertices for c in ref.corners())
        self._cube_cache[ref] = ok
        return ok

    def cube(self, base: int, support: Iterable[int | str]) -> CubeRef:
        mask = 0
        for h in support:
            mask |= 1 << (self.label_index[h] if isinstance(h, str) else h)
        ref = CubeRef(base & ~mask, mask)
        if not self.is_cube(ref):
            raise ValueError("not a cube of the complex")
        return ref

    def check_point(self, p: Point) -> Point:
        ref = p.minimal_cube()
        if not self.is_cube(ref):
            raise ValueError("point's minimal cube is not a cube of the complex")
        return p

    def all_cubes(self) -> tuple[CubeRef, ...]:
        """Every cube of the complex, enumerated bottom-up.  Desk scale only."""
        if self._all_cubes is not None:
            return self._all_cubes
        self._all_cubes = _enumerate_cubes(self.vertices, len(self.hyperplanes))
        for ref in self._all_cubes:
            self._cube_cache[ref] = True
        return self._all_cubes

    def maximal_cubes(self) -> tuple[CubeRef, ...]:
        if self._maximal_cubes is not None:
            return self._maximal_cubes
        cubes = self.all_cubes()
        maximal = []
        nbits = len(self.hyperplanes)
        for ref in cubes:
            extendable = False
            for i in range(nbits):
                bit = 1 << i
                if ref.mask & bit:
                    continue
                other = CubeRef((ref.corner ^ bit) & ~ref.mask, ref.mask)
                if all(c in self.vertices for c in other.corners()):
                    extendable = True
                    break
            if not extendable:
                maximal.append(ref)
        self._maximal_cubes = tuple(maximal)
        return self._maximal_cubes

    def minimal_cube_pair(self, x: Point, y: Point) -> Optional[CubeRef]:
        """Smallest cube containing both points, or None."""
        mask = x.coord_mask | y.coord_mask
        mask |= (x.base ^ y.base) & ~mask
        ref = CubeRef(x.base & ~mask, mask)
        return ref if self.is_cube(ref) else None

    # -- hulls --------------------------------------------------------------

    def convex_hull_vertices(self, seeds: Iterable[int]) -> frozenset[int]:
        """Vertices of the median hull (smallest convex vertex set) of the seeds.

        Convex subsets of a median graph are exactly the intersections of
        hyperplane halfspaces, so the hull is the set of vertices lying bitwise
        between the AND and the OR of the seeds.  Geodesics between points of
        the hull stay inside it, which plain median-closure would not give.
        """
        lo = hi = None
        for s in seeds:
            if s not in self.vertices:
                raise ValueError("hull seed is not a vertex")
            lo = s if lo is None else lo & s
            hi = s if hi is None else hi | s
        if lo is None:
            raise ValueError("empty seed set")
        return frozenset(v for v in self.vertices if not (lo & ~v) and not (v & ~hi))

    def hull_restriction(self, points: Sequence[Point]) -> "SubComplex":
        seeds: set[int] = set()
        for p in points:
            self.check_point(p)
            seeds.update(p.minimal_cube().corners())
        lo = hi = next(iter(seeds))
        for s in seeds:
            lo &= s
            hi |= s
        key = (lo, hi)
        cached = self._hull_cache.get(key)
        if cached is not None:
            return cached
        hull_vertices = self.convex_hull_vertices(seeds)
        sub = _restrict(self, hull_vertices)
        self._hull_cache[key] = sub
        return sub

    def median_hull(self, points: Sequence[Point]) -> "CubeComplex":
        """Hull sub-complex containing the points' minimal cubes and all geodesics."""
        return self.hull_restriction(points).complex

    def split_hull(self, c1: CubeRef, c2: CubeRef) -> tuple[CubeRef, "SubComplex"]:
        """Split the hull of two intersecting cubes as (shared cube D) x Y."""
        if not (self.is_cube(c1) and self.is_cube(c2)):
            raise ValueError("arguments must be cubes of the complex")
        d = cube_intersection(c1, c2)
        if d is None:
            raise DisjointCubes("cubes do not intersect")
        hull_vertices = self.convex_hull_vertices(set(c1.corners()) | set(c2.corners()))
        kept = [i for i in range(len(self.hyperplanes)) if not d.mask >> i & 1]
        y = _restrict(self, hull_vertices, kept_indices=kept)
        return d, y

    # -- misc ---------------------------------------------------------------

    def ambient_vertex(self, v: int) -> np.ndarray:
        return np.array([(v >> i) & 1 for i in range(len(self.hyperplanes))], dtype=float)

    def __repr__(self) -> str:
        return (f"CubeComplex({len(self.hyperplanes)} hyperplanes, "
                f"{len(self.vertices)} vertices)")


def _enumerate_cubes(vertices: frozenset[int], nbits: int) -> tuple[CubeRef, ...]:
    current = {CubeRef(v, 0) for v in vertices}
    out = list(current)
    while current:
        grown = set()
        for ref in current:
            for i in range(nbits):
                bit = 1 << i
                if ref.mask & bit or ref.corner & bit:
                    continue
                twin = CubeRef(ref.corner | bit, ref.mask)
                if twin in current:
                    grown.add(CubeRef(ref.corner, ref.mask | bit))
        out.extend(grown)
        current = grown
    return tuple(out)


@dataclass(frozen=True)
class SubComplex:
    """A sub-complex with the bookkeeping to move vertices and points across.

    ``kept`` maps sub hyperplane index -> parent index; hyperplanes that do not
    separate the sub-complex's vertices are dropped, and their constant parent
    side is recorded in ``pattern``.
    """

    complex: CubeComplex
    parent_nbits: int
    kept: tuple[int, ...]
    pattern: int

    def to_sub_vertex(self, v: int) -> int:
        out = 0
        for j, i in enumerate(self.kept):
            if v >> i & 1:
                out |= 1 << j
        return out

    def to_parent_vertex(self, v: int) -> int:
        out = self.pattern
        for j, i in enumerate(self.kept):
            if v >> j & 1:
                out |= 1 << i
        return out

    def to_sub_point(self, p: Point) -> Point:
        pos = {i: j for j, i in enumerate(self.kept)}
        coords = {}
        for h, t in p.coords:
            if h not in pos:
                raise ValueError("point has a fractional coordinate outside the sub-complex")
            coords[pos[h]] = t
        return Point.make(self.to_sub_vertex(p.base), coords)

    def project_point(self, p: Point) -> Point:
        """Project onto the kept hyperplanes, discarding the others' coordinates."""
        pos = {i: j for j, i in enumerate(self.kept)}
        coords = {pos[h]: t for h, t in p.coords if h in pos}
        return Point.make(self.to_sub_vertex(p.base), coords)

    def to_parent_point(self, p: Point) -> Point:
        coords = {self.kept[h]: t for h, t in p.coords}
        return Point.make(self.to_parent_vertex(p.base), coords)


def _restrict(parent: CubeComplex, hull_vertices: frozenset[int],
              kept_indices: Optional[Sequence[int]] = None) -> SubComplex:
    some = next(iter(hull_vertices))
    varying = 0
    for v in hull_vertices:
        varying |= v ^ some
    if kept_indices is None:
        kept = tuple(i for i in range(len(parent.hyperplanes)) if varying >> i & 1)
    else:
        kept = tuple(i for i in kept_indices if varying >> i & 1)
    drop_mask = 0
    for i in kept:
        drop_mask |= 1 << i
    pattern = some & ~drop_mask
    labels = [parent.hyperplanes[i] for i in kept]
    sub_vertices = set()
    for v in hull_vertices:
        out = 0
        for j, i in enumerate(kept):
            if v >> i & 1:
                out |= 1 << j
        sub_vertices.add(out)
    sub = CubeComplex(labels, sub_vertices, validate=False)
    return SubComplex(sub, len(parent.hyperplanes), kept, pattern)


# -- document loading -------------------------------------------------------


def load(document) -> CubeComplex:
    """Parse and exhaustively validate a complex description.

    Accepts a JSON text, bytes, or an already-decoded mapping with keys
    "hyperplanes" (list of labels) and "vertices" (list of label->side maps).
    """
    if isinstance(document, (str, bytes)):
        try:
            doc = json.loads(document)
        except json.JSONDecodeError as e:
            raise ParseError(f"invalid JSON: {e}") from None
    elif isinstance(document, Mapping):
        doc = document
    else:
        raise ParseError(f"unsupported document type {type(document).__name__}")
    if not isinstance(doc, Mapping):
        raise ParseError("top-level document must be an object")
    try:
        labels = doc["hyperplanes"]
        raw_vertices = doc["vertices"]
    except KeyError as e:
        raise ParseError(f"missing key {e}") from None
    if not isinstance(labels, list) or not all(isinstance(h, str) for h in labels):
        raise ParseError('"hyperplanes" must be a list of strings')
    if not isinstance(raw_vertices, list):
        raise ParseError('"vertices" must be a list')
    index = {h: i for i, h in enumerate(labels)}
    if len(index) != len(labels):
        raise ParseError("duplicate hyperplane labels")
    masks = []
    for k, entry in enumerate(raw_vertices):
        if not isinstance(entry, Mapping) or set(entry) != set(labels):
            raise ParseError(f"vertex {k} must assign exactly the declared hyperplanes")
        v = 0
        for h, s in entry.items():
            if s not in (0, 1):
                raise ParseError(f"vertex {k}: side of {h} must be 0 or 1")
            if s:
                v |= 1 << index[h]
        masks.append(v)
    if len(set(masks)) != len(masks):
        raise ParseError("duplicate vertices")
    return CubeComplex(labels, masks, vertex_order=masks, validate=True)


def point_to_obj(complex: CubeComplex, p: Point) -> dict:
    return {
        "vertex": complex.vertex_index[p.base],
        "coords": {complex.hyperplanes[h]: t for h, t in p.coords},
    }


def point_from_obj(complex: CubeComplex, obj: Mapping) -> Point:
    base = complex.vertex_order[obj["vertex"]]
    coords = {complex.label_index[h]: float(t) for h, t in obj.get("coords", {}).items()}
    return complex.check_point(Point.make(base, coords))


def dump(complex: CubeComplex) -> str:
    """Serialize a complex back to the document format."""
    return json.dumps(
        {
            "hyperplanes": list(complex.hyperplanes),
            "vertices": [complex.vertex_sides(v) for v in complex.vertex_order],
        },
        indent=1,
    )


# -- generators -------------------------------------------------------------


def _finish(labels: Sequence[str], vertices: Iterable[int],
            order: Optional[Sequence[int]] = None) -> CubeComplex:
    vertices = list(vertices)
    if len(vertices) > SCALE_CAP:
        raise ScaleExceeded(f"{len(vertices)} vertices exceeds the desk-scale cap {SCALE_CAP}")
    check = len(vertices) <= EXHAUSTIVE_MEDIAN_CAP
    return CubeComplex(labels, vertices, vertex_order=order or sorted(vertices),
                       validate=True, check_median=check)


def hypercube(n: int) -> CubeComplex:
    if n < 0:
        raise ValueError("dimension must be nonnegative")
    if 2 ** max(n, 0) > SCALE_CAP:
        raise ScaleExceeded(f"hypercube({n}) exceeds the desk-scale cap")
    labels = [f"h{i + 1}" for i in range(n)]
    return _finish(labels, range(1 << n))


def tree(edges: Sequence[tuple[str, str]]) -> CubeComplex:
    """Tree complex from an edge list; every edge is its own hyperplane."""
    if not edges:
        raise ValueError("edge list is empty")
    adj: dict[str, list[tuple[str, int]]] = {}
    for i, (a, b) in enumerate(edges):
        adj.setdefault(a, []).append((b, i))
        adj.setdefault(b, []).append((a, i))
    if len(adj) != len(edges) + 1:
        raise ParseError("edge list does not describe a tree")
    root = edges[0][0]
    masks = {root: 0}
    stack = [root]
    while stack:
        u = stack.pop()
        for w, i in adj[u]:
            if w not in masks:
                masks[w] = masks[u] | (1 << i)
                stack.append(w)
    if len(masks) != len(adj):
        raise ParseError("edge list is not connected")
    labels = [f"{a}-{b}" for a, b in edges]
    return _finish(labels, masks.values())


def book_of_squares(k: int) -> CubeComplex:
    """k unit squares sharing one common edge."""
    if k < 1:
        raise ValueError("need at least one page")
    labels = ["spine"] + [f"page{i + 1}" for i in range(k)]
    vertices = [0, 1]  # the shared edge (spine hyperplane = bit 0)
    for i in range(k):
        page = 1 << (i + 1)
        vertices += [page, page | 1]
    return _finish(labels, vertices)


def corner_complex() -> CubeComplex:
    """Three unit squares around one vertex (an L of squares), 4 hyperplanes."""
    labels = ["a1", "a2", "b1", "b2"]
    a1, a2, b1, b2 = 1, 2, 4, 8
    vertices = [0, a1, a2, a1 | a2, b1, a2 | b1, b2, b1 | b2]
    return _finish(labels, vertices)


def square_cube_book() -> CubeComplex:
    """One square and one 3-cube glued along an edge."""
    labels = ["d", "a", "b1", "b2"]
    d, a, b1, b2 = 1, 2, 4, 8
    vertices = {0, d, a, a | d}
    for s in range(8):
        v = (d if s & 1 else 0) | (b1 if s & 2 else 0) | (b2 if s & 4 else 0)
        vertices.add(v)
    return _finish(labels, sorted(vertices))


def grid(n1: int, n2: int, n3: int) -> CubeComplex:
    """Axis-aligned box [0,n1]x[0,n2]x[0,n3] of unit cubes (axes of size 0 collapse)."""
    dims = (n1, n2, n3)
    if any(n < 0 for n in dims):
        raise ValueError("grid sizes must be nonnegative")
    count = (n1 + 1) * (n2 + 1) * (n3 + 1)
    if count > SCALE_CAP:
        raise ScaleExceeded(f"grid{dims} has {count} vertices, beyond the desk-scale cap")
    labels = []
    offsets = []
    for axis, n in enumerate(dims):
        offsets.append(len(labels))
        labels += [f"{'xyz'[axis]}{i + 1}" for i in range(n)]
    vertices = []
    order = []
    for i in range(n1 + 1):
        for j in range(n2 + 1):
            for k in range(n3 + 1):
                v = 0
                for axis, val in enumerate((i, j, k)):
                    for step in range(val):
                        v |= 1 << (offsets[axis] + step)
                vertices.append(v)
                order.append(v)
    return _finish(labels, vertices, order=order)
