"""Parameter dataclasses and the configurable rule set.

``RampParams`` bundles everything a generation request can adjust:
search behaviour, deck/railing/support geometry, grid resolution, and
material names.  Unset request fields fall back to these defaults.  The
compliance ``RuleSet`` ships as a versioned JSON file (``data/rules.json``)
so jurisdiction-specific limits can be swapped without touching code; the
``RAMPGEN_RULES`` environment variable points at an alternative file.
"""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass, field
from importlib import resources
from typing import Any, Sequence

from .errors import MalformedInput

DEFAULT_SLOPE = 1.0 / 12.0

RAILING_TYPES = ("single-square", "single-rounded", "double-rounded")
PATH_TYPES = ("straight", "curve")

# Built-in MTL diffuse colours, keyed by material tag.  Extensible via
# GeomParams.extra_materials.
MATERIAL_COLORS = {
    "concrete": (0.68, 0.66, 0.62),
    "steel": (0.56, 0.57, 0.60),
    "wood": (0.55, 0.38, 0.21),
    "glass": (0.62, 0.78, 0.82),
}
FALLBACK_COLOR = (0.70, 0.70, 0.70)


@dataclass(frozen=True)
class SearchParams:
    """Path search configuration (slopes, landings, clearances)."""

    desired_slope: float = DEFAULT_SLOPE
    # None means "follow desired_slope" (no sweep); set both to search a band.
    slope_min: float | None = None
    slope_max: float | None = None
    slope_step: float = 1.0 / 240.0
    connectivity: int = 8                 # 4 or 8
    clearance: float = 2.1                # headroom above the deck, m
    inter_path_distance: float = 1.5      # min plan gap between parallel legs, m
    max_rise_per_run: float = 0.76        # m of rise allowed between landings
    landing_length: float = 1.525         # m
    landing_mode: str = "automatic"       # "automatic" | "manual"
    manual_landings: tuple[float, ...] = ()   # arc-length starts, manual mode
    path_type: str = "straight"           # "straight" | "curve"
    weight_slope: float = 1.0
    weight_length: float = 1.0
    max_expansions_3d: int = 500_000      # search budget per slope candidate

    def slope_range(self) -> tuple[float, float]:
        """Candidate slope band; collapses to the desired slope when unset."""
        lo = self.desired_slope if self.slope_min is None else self.slope_min
        hi = self.desired_slope if self.slope_max is None else self.slope_max
        return lo, hi

    def validate(self) -> None:
        if self.desired_slope <= 0:
            raise MalformedInput("desired_slope must be positive")
        lo, hi = self.slope_range()
        if not 0.0 < lo <= hi:
            raise MalformedInput(
                f"slope range must satisfy 0 < slope_min <= slope_max, got [{lo}, {hi}]"
            )
        if self.slope_step <= 0:
            raise MalformedInput("slope_step must be positive")
        if self.connectivity not in (4, 8):
            raise MalformedInput(f"connectivity must be 4 or 8, got {self.connectivity}")
        if self.clearance <= 0:
            raise MalformedInput("clearance must be positive")
        if self.max_rise_per_run <= 0:
            raise MalformedInput("max_rise_per_run must be positive")
        if self.landing_length <= 0:
            raise MalformedInput("landing_length must be positive")
        if self.landing_mode not in ("automatic", "manual"):
            raise MalformedInput(f"unknown landing mode {self.landing_mode!r}")
        if self.path_type not in PATH_TYPES:
            raise MalformedInput(f"unknown path type {self.path_type!r}")
        if self.weight_slope < 0 or self.weight_length < 0:
            raise MalformedInput("optimizer weights must be non-negative")
        if self.weight_slope == 0 and self.weight_length == 0:
            raise MalformedInput("optimizer weights must not both be zero")
        if self.inter_path_distance <= 0:
            raise MalformedInput("inter_path_distance must be positive")


@dataclass(frozen=True)
class RailingParams:
    height: float = 0.9           # centreline of the top rail above the deck, m
    thickness: float = 0.05       # post/rail cross-section side or diameter, m
    post_spacing: float = 1.5     # max distance between posts, m
    type: str = "single-square"   # see RAILING_TYPES

    def validate(self) -> None:
        if self.height <= 0 or self.thickness <= 0 or self.post_spacing <= 0:
            raise MalformedInput("railing dimensions must be positive")
        if self.type not in RAILING_TYPES:
            raise MalformedInput(f"unknown railing type {self.type!r}")


@dataclass(frozen=True)
class SupportParams:
    thickness: float = 0.15     # column side, m
    spacing: float = 2.0        # max distance between columns, m
    enabled: bool = True

    def validate(self) -> None:
        if self.thickness <= 0 or self.spacing <= 0:
            raise MalformedInput("support dimensions must be positive")


@dataclass(frozen=True)
class GeomParams:
    """Deck, railing and support geometry plus material tags."""

    deck_width: float = 0.915
    deck_thickness: float = 0.15
    railing: RailingParams = field(default_factory=RailingParams)
    supports: SupportParams = field(default_factory=SupportParams)
    deck_material: str = "concrete"
    railing_material: str = "steel"
    support_material: str = "steel"
    extra_materials: tuple[tuple[str, tuple[float, float, float]], ...] = ()

    def validate(self) -> None:
        if self.deck_width <= 0 or self.deck_thickness <= 0:
            raise MalformedInput("deck dimensions must be positive")
        self.railing.validate()
        self.supports.validate()

    def material_color(self, tag: str) -> tuple[float, float, float]:
        for name, rgb in self.extra_materials:
            if name == tag:
                return rgb
        return MATERIAL_COLORS.get(tag, FALLBACK_COLOR)


@dataclass(frozen=True)
class GridParams:
    """Rasterization and search-lattice resolution."""

    cell: float = 0.1          # fine occupancy resolution, m/cell
    z_step: float = 0.05       # vertical occupancy quantum, m
    z_margin: float = 3.0      # headroom modelled above the end elevation, m
    search_cell: float = 0.5   # planar cell size of the layered search lattice, m

    def validate(self) -> None:
        if min(self.cell, self.z_step, self.z_margin, self.search_cell) <= 0:
            raise MalformedInput("grid resolutions must be positive")
        if self.search_cell < self.cell:
            raise MalformedInput("search_cell must be >= cell")


@dataclass(frozen=True)
class RampParams:
    """Every adjustable parameter of a generation run."""

    search: SearchParams = field(default_factory=SearchParams)
    geom: GeomParams = field(default_factory=GeomParams)
    grid: GridParams = field(default_factory=GridParams)

    def validate(self) -> None:
        self.search.validate()
        self.geom.validate()
        self.grid.validate()


@dataclass(frozen=True)
class RuleSet:
    """Compliance limits, normally loaded from rules.json."""

    max_slope: float
    max_cross_slope: float
    min_width: float
    max_rise_per_run: float
    min_landing_length: float
    handrail_height: tuple[float, float]
    min_clearance: float
    source: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "handrail_height", tuple(self.handrail_height))

    def validate(self) -> None:
        numeric = (
            self.max_slope,
            self.max_cross_slope,
            self.min_width,
            self.max_rise_per_run,
            self.min_landing_length,
            self.min_clearance,
        )
        if any(v <= 0 for v in numeric):
            raise MalformedInput("all rule limits must be positive")
        lo, hi = self.handrail_height
        if not (0 < lo < hi):
            raise MalformedInput("handrail height range must be non-empty and positive")

    def to_dict(self) -> dict[str, Any]:
        return {
            "max_slope": self.max_slope,
            "max_cross_slope": self.max_cross_slope,
            "min_width": self.min_width,
            "max_rise_per_run": self.max_rise_per_run,
            "min_landing_length": self.min_landing_length,
            "handrail_height": list(self.handrail_height),
            "min_clearance": self.min_clearance,
            "source": self.source,
        }


def load_rules(path: str | None = None) -> RuleSet:
    """Load the rule set from ``path``, ``$RAMPGEN_RULES``, or the bundled default."""
    if path is None:
        path = os.environ.get("RAMPGEN_RULES")
    if path is None:
        text = resources.files("rampgen").joinpath("data/rules.json").read_text("utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"rules file is not valid JSON: {exc}") from exc
    try:
        rules = RuleSet(
            max_slope=float(raw["max_slope"]),
            max_cross_slope=float(raw["max_cross_slope"]),
            min_width=float(raw["min_width"]),
            max_rise_per_run=float(raw["max_rise_per_run"]),
            min_landing_length=float(raw["min_landing_length"]),
            handrail_height=(float(raw["handrail_height"][0]), float(raw["handrail_height"][1])),
            min_clearance=float(raw["min_clearance"]),
            source=str(raw.get("source", "")),
        )
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise MalformedInput(f"rules file is missing or mistypes a field: {exc}") from exc
    rules.validate()
    return rules


def _merge_dataclass(instance: Any, overrides: dict[str, Any], label: str) -> Any:
    """Return a copy of ``instance`` with ``overrides`` applied field-wise."""
    names = {f.name: f for f in dataclasses.fields(instance)}
    changes: dict[str, Any] = {}
    for key, value in overrides.items():
        if key not in names:
            raise MalformedInput(f"unknown {label} parameter {key!r}")
        current = getattr(instance, key)
        if dataclasses.is_dataclass(current) and isinstance(value, dict):
            changes[key] = _merge_dataclass(current, value, f"{label}.{key}")
        elif isinstance(current, tuple) and isinstance(value, Sequence) and not isinstance(value, (str, bytes)):
            changes[key] = tuple(value)
        elif isinstance(current, bool):
            if not isinstance(value, bool):
                raise MalformedInput(f"{label}.{key} expects a boolean")
            changes[key] = value
        elif isinstance(current, int) and not isinstance(current, bool):
            changes[key] = int(value)
        elif isinstance(current, float):
            changes[key] = float(value)
        else:
            changes[key] = value
    return dataclasses.replace(instance, **changes)


def params_from_overrides(overrides: dict[str, Any] | None) -> RampParams:
    """Build RampParams from a nested override dict (request/params file)."""
    params = RampParams()
    if overrides:
        if not isinstance(overrides, dict):
            raise MalformedInput("params overrides must be an object")
        params = _merge_dataclass(params, overrides, "params")
    params.validate()
    return params


def params_to_dict(params: RampParams) -> dict[str, Any]:
    """Flatten RampParams into plain JSON-serializable structures."""
    return dataclasses.asdict(params)
