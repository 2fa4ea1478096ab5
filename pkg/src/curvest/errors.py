"""Exception types raised across curvest."""


class CurvestError(Exception):
    """Base class for every error raised by this package."""


class InvalidInput(CurvestError, ValueError):
    pass


class InvalidParams(CurvestError, ValueError):
    pass


class DimensionMismatch(CurvestError, ValueError):
    pass


class AllWeightsZero(CurvestError, ValueError):
    pass


# -- file I/O
class RaggedRows(CurvestError, ValueError):
    pass


class ParseError(CurvestError, ValueError):
    pass


class EmptyFile(CurvestError, ValueError):
    pass


class IoError(CurvestError, OSError):
    pass


# -- noise
class NegativeScale(InvalidParams):
    pass


# -- neighborhoods and per-point estimation
class SingletonPoint(CurvestError):
    """A point whose neighborhood (excluding itself) is empty."""

    def __init__(self, index, message=None):
        self.index = index
        super().__init__(message or f"point {index} has no neighbors")


class InsufficientPoints(CurvestError, ValueError):
    pass


class NoNeighbors(InsufficientPoints):
    """A one-point cloud has nothing to return once the query point is excluded."""


class DegenerateNeighborhood(CurvestError):
    pass


class InsufficientNeighbors(CurvestError):
    pass


class CodimensionNotOne(CurvestError, ValueError):
    pass


# -- metrics / harness
class ZeroVector(CurvestError, ValueError):
    pass


class LengthMismatch(CurvestError, ValueError):
    pass


class Empty(CurvestError, ValueError):
    pass


class MissingColumn(CurvestError, KeyError):
    pass
