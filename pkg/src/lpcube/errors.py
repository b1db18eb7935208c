"""Exception types shared across the package.

Every domain error carries enough payload to reproduce the failure (witness
triples, component representatives, residuals) so callers and the CLI can emit
machine-readable error objects.
"""


class LpCubeError(Exception):
    """Base class for all domain errors."""

    def payload(self) -> dict:
        return {"type": type(self).__name__, "message": str(self)}


class ParseError(LpCubeError):
    """Complex description document is malformed."""


class NotMedian(LpCubeError):
    """Vertex set is not closed under coordinatewise majority."""

    def __init__(self, message, witness):
        super().__init__(message)
        self.witness = witness  # (u, v, w, missing_median) as side dicts

    def payload(self):
        d = super().payload()
        d["witness"] = self.witness
        return d


class Disconnected(LpCubeError):
    """Hamming-1 vertex graph is not connected."""

    def __init__(self, message, component):
        super().__init__(message)
        self.component = component

    def payload(self):
        d = super().payload()
        d["component"] = self.component
        return d


class ScaleExceeded(LpCubeError):
    """Requested object is beyond the configured desk-scale cap."""


class NoCommonCube(LpCubeError):
    """Two points do not lie in any common cube."""


class DisjointCubes(LpCubeError):
    """Two cubes that were required to intersect do not."""


class NoConvergence(LpCubeError):
    """Break-point optimization hit its iteration cap."""

    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual

    def payload(self):
        d = super().payload()
        d["residual"] = self.residual
        return d


class UniquenessViolation(LpCubeError):
    """Two optimal galleries produced visibly different paths."""


class PreconditionViolated(LpCubeError):
    """Operation precondition does not hold for the given arguments."""


class NotVertexIntersection(LpCubeError):
    """The two cubes around the wedge vertex intersect in more than a vertex."""


class DecompositionMismatch(LpCubeError):
    """Decomposition does not belong to the given configuration."""


class InsufficientDiameter(LpCubeError):
    """Complex is too small to realize the requested distance scale."""
