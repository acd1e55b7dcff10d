"""Exception hierarchy shared by every module and mapped to CLI exit codes."""

from __future__ import annotations


class GeomCrystalError(Exception):
    """Base class for all library errors."""

    exit_code = 3


class ConfigError(GeomCrystalError, ValueError):
    """Invalid configuration (group size, flags, tolerances)."""

    exit_code = 2


class PreconditionError(GeomCrystalError, ValueError):
    """An operation was called outside its documented domain."""

    exit_code = 2


class PathFormatError(GeomCrystalError, ValueError):
    """Malformed path file; carries the offending line number when known."""

    exit_code = 2

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NotInBigCell(GeomCrystalError, ArithmeticError):
    """A leading principal minor vanishes, so no Gauss decomposition exists."""

    def __init__(self, index: int):
        self.index = index
        super().__init__(f"leading principal minor {index} vanishes")


class NotTotallyPositive(GeomCrystalError, ArithmeticError):
    """A factorization along a reduced word produced a non-positive parameter."""


class DomainExit(GeomCrystalError, ArithmeticError):
    """g.B_t left the big cell along the trajectory."""

    def __init__(self, time: float, index: int):
        self.time = time
        self.index = index
        super().__init__(f"minor {index} is not positive at t={time:.6g}")


class TypeOrderViolation(GeomCrystalError, ArithmeticError):
    """A transform was applied in an order that breaks integrability."""


class UnrecognizedType(GeomCrystalError, ArithmeticError):
    """The log-asymptotics of an extended path match no Weyl element."""


class NotInImage(GeomCrystalError, ArithmeticError):
    """RS data violates the highest-weight compatibility condition."""


class DriftNotDominant(GeomCrystalError, ArithmeticError):
    """The declared drift is not in the open Weyl chamber."""
