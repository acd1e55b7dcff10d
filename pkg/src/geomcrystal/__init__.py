"""Geometric crystals for SL(n): path model, group picture, Pitman transforms and geometric RS."""

from .errors import (
    ConfigError,
    DomainExit,
    DriftNotDominant,
    GeomCrystalError,
    NotInBigCell,
    NotInImage,
    NotTotallyPositive,
    PathFormatError,
    PreconditionError,
    TypeOrderViolation,
    UnrecognizedType,
)
from .pathmodel import ExtPath, Path
from .rootsys import RootSystem, WeylElt, build_type_a
from .transforms import RSOutput, rs_forward, rs_inverse

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "DomainExit",
    "DriftNotDominant",
    "ExtPath",
    "GeomCrystalError",
    "NotInBigCell",
    "NotInImage",
    "NotTotallyPositive",
    "Path",
    "PathFormatError",
    "PreconditionError",
    "RSOutput",
    "RootSystem",
    "TypeOrderViolation",
    "UnrecognizedType",
    "WeylElt",
    "build_type_a",
    "rs_forward",
    "rs_inverse",
]
