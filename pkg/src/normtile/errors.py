"""Exception types raised by normtile."""


class TilingError(Exception):
    """Base class for all normtile errors."""


# mesh construction
class DanglingReference(TilingError, KeyError):
    pass


class OpenBoundaryWalk(TilingError, ValueError):
    pass


class NonManifoldEdge(TilingError, ValueError):
    pass


class OrientationMismatch(TilingError, ValueError):
    """Face walks disagree with the clockwise order of half-tangents at a node."""


class UnknownFace(TilingError, KeyError):
    pass


class UnknownNode(TilingError, KeyError):
    pass


# geometry
class DegenerateArc(TilingError, ValueError):
    pass


class BadPairIndex(TilingError, IndexError):
    pass


class DegeneracyOverflow(TilingError, ValueError):
    """A node has more than two degenerate pairs."""


class OpenTrace(TilingError, ValueError):
    pass


# metrics
class SingularDenominator(TilingError, ZeroDivisionError):
    pass


class BallExceedsPatch(TilingError, ValueError):
    pass


# generators
class InvalidSpec(TilingError, ValueError):
    pass


class SeedCollision(TilingError, ValueError):
    pass


class OutOfDomain(TilingError, ValueError):
    pass


# deregularization
class InfeasibleTarget(TilingError, ValueError):
    pass


class GeometryCollision(TilingError, RuntimeError):
    pass


class ZeroCornerDegree(TilingError, ValueError):
    pass


# monohedral
class NotMonohedral(TilingError, ValueError):
    pass


# io
class ParseError(TilingError, ValueError):
    pass


class VersionMismatch(TilingError, ValueError):
    pass


class IoError(TilingError, OSError):
    pass
