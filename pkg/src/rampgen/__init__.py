"""Accessibility-ramp generation: environment rasterization, constrained
path search, slope optimization, swept solid modelling, and rule checking."""

from .env_model import (
    EnvironmentSpec,
    GridMatrix,
    Obstacle,
    parse_environment,
    rasterize,
    serialize_environment,
)
from .errors import (
    EndpointCellBlocked,
    EndpointInsideObstacle,
    EndpointOutsideBoundary,
    InvalidBoundary,
    InvalidManualLandings,
    MalformedInput,
    NoFeasibleRamp,
    NoPath,
    RampgenError,
    ResolutionTooCoarse,
    SelfIntersectingSweep,
)
from .params import (
    GeomParams,
    GridParams,
    RailingParams,
    RampParams,
    RuleSet,
    SearchParams,
    SupportParams,
    load_rules,
    params_from_overrides,
    params_to_dict,
)

__version__ = "0.1.0"

__all__ = [
    "EnvironmentSpec",
    "GridMatrix",
    "Obstacle",
    "parse_environment",
    "rasterize",
    "serialize_environment",
    "EndpointCellBlocked",
    "EndpointInsideObstacle",
    "EndpointOutsideBoundary",
    "InvalidBoundary",
    "InvalidManualLandings",
    "MalformedInput",
    "NoFeasibleRamp",
    "NoPath",
    "RampgenError",
    "ResolutionTooCoarse",
    "SelfIntersectingSweep",
    "GeomParams",
    "GridParams",
    "RailingParams",
    "RampParams",
    "RuleSet",
    "SearchParams",
    "SupportParams",
    "load_rules",
    "params_from_overrides",
    "params_to_dict",
    "__version__",
]
