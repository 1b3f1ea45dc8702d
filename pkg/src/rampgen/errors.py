"""Exception taxonomy for the ramp generation pipeline.

Every error a caller can act on has its own class; the CLI and HTTP
service map them onto exit codes / status codes without string matching.
"""

from __future__ import annotations


class RampgenError(Exception):
    """Base class for all rampgen errors."""


class MalformedInput(RampgenError):
    """Environment or parameter input is syntactically invalid."""


class InvalidBoundary(MalformedInput):
    """Boundary polygon is degenerate or self-intersecting."""


class EndpointOutsideBoundary(MalformedInput):
    """Start or end point lies outside the boundary polygon."""


class EndpointInsideObstacle(MalformedInput):
    """Start or end point lies inside an obstacle footprint."""


class ResolutionTooCoarse(RampgenError):
    """Grid resolution leaves too few free cells to search."""


class EndpointCellBlocked(RampgenError):
    """An endpoint falls into a blocked grid cell at its elevation."""


class NoPath(RampgenError):
    """The free region disconnects start from end."""


class NoFeasibleRamp(RampgenError):
    """No slope in the configured range yields a buildable ramp."""


class InsufficientRun(RampgenError):
    """Route is too short for the rise at the commanded slope.

    ``shortfall`` is how many metres of extra run would be needed.
    """

    def __init__(self, message: str, shortfall: float = 0.0):
        super().__init__(message)
        self.shortfall = shortfall


class InvalidManualLandings(RampgenError):
    """Manual landing stations are out of order or off the path."""


class SelfIntersectingSweep(RampgenError):
    """Deck sweep folds over at a corner sharper than the width allows."""

    def __init__(self, message: str, station_index: int | None = None):
        super().__init__(message)
        self.station_index = station_index


class MismatchedProvenance(RampgenError):
    """A model was paired with a path it was not built from."""
