import itertools
import json

import numpy as np
import pytest

from lpcube import complexes as cc
from lpcube.complexes import CubeComplex, CubeRef, Point, cube_intersection, median_of
from lpcube.errors import Disconnected, NotMedian, ParseError, ScaleExceeded
from lpcube.geometry import lp_norm

from conftest import random_point


def brute_median_closed(vertices):
    vs = sorted(vertices)
    for u, v, w in itertools.product(vs, repeat=3):
        if median_of(u, v, w) not in vertices:
            return False
    return True


def brute_interval_hull(vertices, seeds):
    """Oracle: closure under bitwise intervals, iterated to a fixpoint."""
    hull = set(seeds)
    changed = True
    while changed:
        changed = False
        for u, v in itertools.combinations(sorted(hull), 2):
            lo, hi = u & v, u | v
            for z in vertices:
                if z not in hull and not (lo & ~z) and not (z & ~hi):
                    hull.add(z)
                    changed = True
    return frozenset(hull)


def doc(labels, masks):
    return json.dumps({
        "hyperplanes": labels,
        "vertices": [{h: (m >> i) & 1 for i, h in enumerate(labels)} for m in masks],
    })


class TestLoad:
    def test_unit_square(self):
        cx = cc.load(doc(["h1", "h2"], [0, 1, 2, 3]))
        assert len(cx.hyperplanes) == 2
        assert len(cx.vertices) == 4

    def test_l_shape_is_valid(self):
        # {00, 01, 10}: majority of any triple is again listed, by brute force
        masks = [0, 1, 2]
        assert brute_median_closed(set(masks))
        cx = cc.load(doc(["h1", "h2"], masks))
        assert len(cx.vertices) == 3

    def test_not_median_witness(self):
        # the 6-cycle in the 3-cube is connected but not median-closed
        masks = [0b000, 0b001, 0b011, 0b111, 0b110, 0b100]
        assert not brute_median_closed(set(masks))
        with pytest.raises(NotMedian) as ei:
            cc.load(doc(["h1", "h2", "h3"], masks))
        w = ei.value.witness
        assert "missing_median" in w

    def test_disconnected_witness(self):
        with pytest.raises(Disconnected):
            cc.load(doc(["h1", "h2"], [0, 3]))

    def test_parse_errors(self):
        with pytest.raises(ParseError):
            cc.load("{not json")
        with pytest.raises(ParseError):
            cc.load(doc(["h1", "h1"], [0]))
        with pytest.raises(ParseError):
            cc.load(json.dumps({"hyperplanes": ["h1"], "vertices": [{"h2": 0}]}))
        with pytest.raises(ParseError):
            cc.load(json.dumps({"hyperplanes": ["h1"]}))

    def test_dump_round_trip(self, corner):
        again = cc.load(cc.dump(corner))
        assert again.vertices == corner.vertices
        assert again.hyperplanes == corner.hyperplanes


class TestMedian:
    def test_degenerate(self, square):
        assert square.median(0, 0, 3) == 0

    def test_square_majority(self, square):
        # (00, 01, 10) -> 00
        assert square.median(0, 1, 2) == 0

    def test_path_graph(self):
        t = cc.tree([("a", "b"), ("b", "c")])
        a, b, c = 0, 1, 3
        assert t.vertices == {a, b, c}
        assert t.median(a, b, c) == b

    def test_symmetry_and_idempotence(self, grid222):
        rng = np.random.default_rng(3)
        verts = sorted(grid222.vertices)
        for _ in range(200):
            u, v, w = (verts[int(rng.integers(len(verts)))] for _ in range(3))
            m = grid222.median(u, v, w)
            assert m == grid222.median(w, u, v) == grid222.median(v, w, u)
            assert grid222.median(u, u, v) == u
            assert m in grid222.vertices


class TestCubes:
    def test_minimal_cube_vertex(self, square):
        p = Point.make(0)
        assert p.minimal_cube() == CubeRef(0, 0)

    def test_minimal_cube_interior(self, square):
        p = Point.make(0, {0: 0.5, 1: 0.25})
        assert p.minimal_cube() == CubeRef(0, 3)

    def test_edge_point_of_cube3(self, cube3):
        p = Point.make(0, {1: 0.5})
        assert p.minimal_cube() == CubeRef(0, 2)
        assert cube3.is_cube(p.minimal_cube())

    def test_minimal_cube_pair_brute(self, corner, grid222):
        # oracle: scan all cubes for the support-minimal one containing both
        for cx in (corner, grid222):
            rng = np.random.default_rng(11)
            cubes = cx.all_cubes()
            for _ in range(60):
                x = random_point(cx, rng)
                y = random_point(cx, rng)
                got = cx.minimal_cube_pair(x, y)
                containing = [q for q in cubes
                              if q.contains_cube(x.minimal_cube())
                              and q.contains_cube(y.minimal_cube())]
                if not containing:
                    assert got is None
                else:
                    best = min(containing, key=lambda q: (q.dim, q.corner))
                    assert got == best

    def test_pair_absent_across_wedge(self, corner):
        x = Point.make(0, {0: 0.5, 1: 0.5})
        y = Point.make(0, {2: 0.5, 3: 0.5})
        assert corner.minimal_cube_pair(x, y) is None

    def test_pair_vertex_with_cube(self, cube3):
        y = Point.make(0, {0: 0.3, 1: 0.3, 2: 0.3})
        x = Point.make(7)
        assert cube3.minimal_cube_pair(x, y) == CubeRef(0, 7)

    def test_every_cube_is_induced_subhypercube(self, grid222):
        for q in grid222.all_cubes():
            for corner_v in q.corners():
                assert corner_v in grid222.vertices


class TestHulls:
    def test_single_point(self, corner):
        p = Point.make(0, {0: 0.5, 1: 0.5})
        hull = corner.median_hull([p])
        assert len(hull.vertices) == 4

    def test_square_from_corners(self, square):
        hull = square.median_hull([Point.make(0), Point.make(3)])
        assert len(hull.vertices) == 4

    def test_diagonal_cubes_full_grid(self, grid222):
        x = Point.make(0, {0: 0.5, 2: 0.5, 4: 0.5})
        y = Point.make(0b010101, {1: 0.5, 3: 0.5, 5: 0.5})
        hull = grid222.median_hull([x, y])
        assert len(hull.vertices) == 27

    def test_against_interval_closure_oracle(self, corner, grid222, scb):
        rng = np.random.default_rng(5)
        for cx in (corner, grid222, scb):
            for _ in range(12):
                x = random_point(cx, rng)
                y = random_point(cx, rng)
                seeds = set(x.minimal_cube().corners()) | set(y.minimal_cube().corners())
                expected = brute_interval_hull(cx.vertices, seeds)
                got = cx.convex_hull_vertices(seeds)
                assert got == expected

    def test_closure_operator(self, grid222):
        rng = np.random.default_rng(6)
        for _ in range(10):
            pts = [random_point(grid222, rng) for _ in range(2)]
            sub = grid222.hull_restriction(pts)
            seeds1 = set()
            for p in pts:
                seeds1 |= set(p.minimal_cube().corners())
            h1 = grid222.convex_hull_vertices(seeds1)
            # idempotent: hull of the hull is the hull
            assert grid222.convex_hull_vertices(h1) == h1
            # extensive
            assert seeds1 <= h1
            # monotone: adding a seed point can only grow the hull
            extra = random_point(grid222, rng)
            seeds2 = seeds1 | set(extra.minimal_cube().corners())
            assert h1 <= grid222.convex_hull_vertices(seeds2)


class TestSplitHull:
    def test_shared_edge(self, book2):
        spine = book2.cube(0, ["spine"])
        sq1 = book2.cube(0, ["spine", "page1"])
        sq2 = book2.cube(0, ["spine", "page2"])
        d, y = book2.split_hull(sq1, sq2)
        assert d == spine
        # Y = wedge of two edges
        assert len(y.complex.vertices) == 3
        assert len(y.complex.hyperplanes) == 2

    def test_shared_vertex(self, corner):
        c1 = corner.cube(0, ["a1", "a2"])
        c2 = corner.cube(0, ["b1", "b2"])
        d, y = corner.split_hull(c1, c2)
        assert d.mask == 0
        assert len(y.complex.vertices) == 8

    def test_two_cubes_sharing_square(self):
        g = cc.grid(2, 1, 1)
        cb1 = g.cube(0, ["x1", "y1", "z1"])
        cb2 = g.cube(1, ["x2", "y1", "z1"])
        d, y = g.split_hull(cb1, cb2)
        assert d.dim == 2
        assert len(y.complex.hyperplanes) == 2
        assert len(y.complex.vertices) == 3

    def test_product_law(self, book2):
        # d(x,y)^p = d_D(pi_D x, pi_D y)^p + d_Y(pi_Y x, pi_Y y)^p on the hull
        from lpcube import solver as sv
        sq1 = book2.cube(0, ["spine", "page1"])
        sq2 = book2.cube(0, ["spine", "page2"])
        d, y = book2.split_hull(sq1, sq2)
        rng = np.random.default_rng(9)
        n = len(book2.hyperplanes)
        for p in (1.5, 2.0, 3.0, 64.0):
            for _ in range(8):
                a = random_point(book2, rng)
                b = random_point(book2, rng)
                total = sv.distance(book2, a, b, p)
                da = np.abs(a.ambient(n)[0] - b.ambient(n)[0])  # spine coordinate
                ya = y.project_point(a)
                yb = y.project_point(b)
                dy = sv.distance(y.complex, ya, yb, p)
                assert abs(total - (da ** p + dy ** p) ** (1 / p)) < 1e-9


class TestGenerators:
    def test_hypercube_counts(self):
        h = cc.hypercube(3)
        assert len(h.vertices) == 8
        assert len(h.hyperplanes) == 3

    def test_book_counts(self, book2):
        assert len(book2.vertices) == 6
        assert len(book2.maximal_cubes()) == 2

    def test_corner_counts(self, corner):
        assert len(corner.vertices) == 8
        assert len(corner.hyperplanes) == 4
        assert sorted(q.dim for q in corner.maximal_cubes()) == [2, 2, 2]
        # explicit construction validated by load()
        cc.load(cc.dump(corner))

    def test_square_cube_book_counts(self, scb):
        assert len(scb.vertices) == 10
        assert sorted(q.dim for q in scb.maximal_cubes()) == [2, 3]

    def test_grid_counts(self, grid222):
        assert len(grid222.vertices) == 27
        assert len(grid222.maximal_cubes()) == 8

    def test_tree(self):
        t = cc.tree([("a", "b"), ("b", "c"), ("b", "d")])
        assert len(t.vertices) == 4
        assert all(q.dim <= 1 for q in t.maximal_cubes())

    def test_scale_cap(self):
        with pytest.raises(ScaleExceeded):
            cc.hypercube(20)
        with pytest.raises(ScaleExceeded):
            cc.grid(100, 100, 0)


class TestPoints:
    def test_canonical_rejects_side_values(self):
        with pytest.raises(ValueError):
            Point.make(0, {0: 0.0})
        with pytest.raises(ValueError):
            Point.make(0, {0: 1.0})

    def test_rebase_flips_coordinate(self):
        p = Point.make(1, {0: 0.25})
        assert p.base == 0
        assert dict(p.coords)[0] == 0.75

    def test_ambient_round_trip(self, scb):
        rng = np.random.default_rng(12)
        for _ in range(20):
            p = random_point(scb, rng)
            vec = p.ambient(len(scb.hyperplanes))
            back = cc.point_from_ambient(vec, p.minimal_cube())
            assert back == p
