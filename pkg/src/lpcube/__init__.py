"""lp geodesics, distances and canonical factor decompositions on finite
CAT(0) cube complexes, with sampled convexity, smoothness and bolicity
verification suites and the limiting p -> 1 / p -> infinity bicombings."""

from .complexes import (
    CubeComplex,
    CubeRef,
    Point,
    book_of_squares,
    corner_complex,
    grid,
    hypercube,
    load,
    square_cube_book,
    tree,
)
from .decomposition import (
    Decomposition,
    amgm_check,
    canonical_decomposition,
    distance_formula,
    wedge_product_embedding,
)
from .geometry import cube_distance, factor_component, lp_norm, power_map
from .oracle import oracle_certify, oracle_distance
from .solver import (
    ConditionReport,
    Gallery,
    PiecewisePath,
    bicombing,
    check_no_shortcut,
    check_zero_tension,
    distance,
    enumerate_galleries,
    geodesic,
    optimize_breakpoints,
)

__version__ = "0.1.0"
