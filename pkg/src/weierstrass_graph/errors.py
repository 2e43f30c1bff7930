"""Exception hierarchy shared by every module of the package."""


class WeierstrassGraphError(Exception):
    """Base class; the CLI maps these to exit status 3."""


class ParameterDomainError(WeierstrassGraphError, ValueError):
    """Invalid (lambda, n_b) pair or derived configuration value."""


class DomainError(WeierstrassGraphError, ValueError):
    """Argument outside the domain of an operation."""


class ShapeError(WeierstrassGraphError, ValueError):
    """Vertex function does not match the level it is used with."""


class VertexLookupError(WeierstrassGraphError, KeyError):
    """Vertex is not part of the requested level."""


class ConsistencyError(WeierstrassGraphError, RuntimeError):
    """Two independent computations of the same quantity disagree."""


class DegenerateGeometryError(WeierstrassGraphError, ValueError):
    """A polygon has zero area."""


class DegenerateDiscriminantError(DomainError):
    """Characteristic equation has a double root (lambda_tilde in {0, 4})."""


class ForbiddenEigenvalueError(WeierstrassGraphError, ArithmeticError):
    """Endpoint system of the eigenfunction extension is singular."""


class ResourceError(WeierstrassGraphError, MemoryError):
    """Requested computation exceeds the configured budget."""
