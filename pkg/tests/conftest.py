import numpy as np
import pytest

from lpcube import complexes as cc
from lpcube.complexes import CubeComplex, Point


@pytest.fixture(scope="session")
def square():
    return cc.hypercube(2)


@pytest.fixture(scope="session")
def cube3():
    return cc.hypercube(3)


@pytest.fixture(scope="session")
def corner():
    return cc.corner_complex()


@pytest.fixture(scope="session")
def scb():
    return cc.square_cube_book()


@pytest.fixture(scope="session")
def grid222():
    return cc.grid(2, 2, 2)


@pytest.fixture(scope="session")
def rect():
    return cc.grid(12, 1, 0)


@pytest.fixture(scope="session")
def book2():
    return cc.book_of_squares(2)


def random_point(cx: CubeComplex, rng: np.random.Generator, margin=0.02) -> Point:
    cubes = cx.maximal_cubes()
    ref = cubes[int(rng.integers(len(cubes)))]
    coords = {i: float(rng.uniform(margin, 1 - margin))
              for i in range(len(cx.hyperplanes)) if ref.mask >> i & 1}
    return Point.make(ref.corner, coords)


def build_wedge_instance(seed: int):
    """Seeded random staircase wedge: (complex, x, v=0, y, k_built).

    C and C' meet exactly at the origin vertex; the full chain of corner
    cubes between them is present, so generic endpoints have a k-factor
    canonical decomposition.
    """
    rng = np.random.default_rng([555, seed])
    dc = int(rng.integers(1, 4))
    dcp = int(rng.integers(1, 4))
    k = int(rng.integers(1, min(dc, dcp) + 1))
    labels = [f"a{i}" for i in range(dc)] + [f"b{i}" for i in range(dcp)]
    a_idx = list(range(dc))
    b_idx = list(range(dc, dc + dcp))
    rng.shuffle(a_idx)
    rng.shuffle(b_idx)

    def split(idx, parts):
        if parts == 1:
            return [list(idx)]
        cuts = sorted(rng.choice(np.arange(1, len(idx)), size=parts - 1, replace=False))
        out, prev = [], 0
        for c in list(cuts) + [len(idx)]:
            out.append(list(idx[prev:c]))
            prev = c
        return out

    A = split(a_idx, k)
    B = split(b_idx, k)
    masks = []
    for j in range(k + 1):
        m = 0
        for i in range(j):
            for h in B[i]:
                m |= 1 << h
        for i in range(j, k):
            for h in A[i]:
                m |= 1 << h
        masks.append(m)
    verts = set()
    for m in masks:
        sub = m
        while True:
            verts.add(sub)
            if sub == 0:
                break
            sub = (sub - 1) & m
    cx = CubeComplex(labels, verts, validate=True)
    x = Point.make(0, {h: float(rng.uniform(0.1, 0.95)) for h in range(dc)})
    y = Point.make(0, {h: float(rng.uniform(0.1, 0.95)) for h in range(dc, dc + dcp)})
    return cx, x, 0, y, k
