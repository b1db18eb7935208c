"""Bundled example complexes, shipped as description documents."""

from importlib import resources

from ..complexes import CubeComplex, load

NAMES = (
    "square",
    "hypercube3",
    "book_of_squares2",
    "corner_complex",
    "square_cube_book",
    "grid222",
    "long_rectangle",
)


def fixture_text(name: str) -> str:
    if name not in NAMES:
        raise KeyError(f"unknown fixture {name!r}; available: {', '.join(NAMES)}")
    return resources.files(__package__).joinpath(f"{name}.json").read_text()


def load_fixture(name: str) -> CubeComplex:
    return load(fixture_text(name))
