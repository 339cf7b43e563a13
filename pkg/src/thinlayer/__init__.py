"""Asymptotic contact models for thin elastic layers of variable thickness."""

from .errors import (
    ConfigError,
    DomainError,
    IncompressibleSingularity,
    NoContact,
    ShapeError,
    SolverError,
    ThinLayerError,
)
from .geometry import EllipseDomain, ParaboloidGap, gap_eval
from .materials import Material, engineering_from_lame, lame_from_engineering

__all__ = [
    "ConfigError",
    "DomainError",
    "EllipseDomain",
    "IncompressibleSingularity",
    "Material",
    "NoContact",
    "ParaboloidGap",
    "ShapeError",
    "SolverError",
    "ThinLayerError",
    "engineering_from_lame",
    "gap_eval",
    "lame_from_engineering",
]
