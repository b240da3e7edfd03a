"""Domain errors raised by the workbench services.

Every error carries a ``witness``: the smallest piece of data showing why the
input was rejected (a triple of arrows, a point, a JSON path, ...).
"""
from typing import Any, Optional


class WorkbenchError(ValueError):
    """Base class for every domain failure."""

    exit_code: int = 1

    def __init__(self, message: str, witness: Any = None):
        super().__init__(message)
        self.message = message
        self.witness = witness

    def to_dict(self) -> dict:
        return {"error": type(self).__name__, "message": self.message, "witness": self.witness}


# Groupoid axioms

class EmptyGroupoid(WorkbenchError):
    pass


class NonAssociative(WorkbenchError):
    pass


class BadUnit(WorkbenchError):
    pass


class BadInverse(WorkbenchError):
    pass


class SourceTargetMismatch(WorkbenchError):
    pass


class NotAHomomorphism(WorkbenchError):
    pass


# Haar systems

class NotInvariant(WorkbenchError):
    pass


class NotPositive(WorkbenchError):
    pass


# Constructors

class NotAGroup(WorkbenchError):
    pass


class NotAnAction(WorkbenchError):
    pass


class NotACover(WorkbenchError):
    pass


class NotFree(WorkbenchError):
    pass


class NotPrincipal(WorkbenchError):
    pass


# Algebras and bimodules

class ParentMismatch(WorkbenchError):
    pass


class DimensionMismatch(WorkbenchError):
    pass


class MiddleMismatch(WorkbenchError):
    pass


class HaarMismatch(WorkbenchError):
    pass


class NoStar(WorkbenchError):
    pass


class BimoduleAxiomError(WorkbenchError):
    pass


class NotEquivariant(WorkbenchError):
    pass


# Bibundles

class BibundleLawError(WorkbenchError):
    pass


class ActionDomainError(BibundleLawError):
    pass


class AnchorEquivarianceError(BibundleLawError):
    pass


class ActionUnitError(BibundleLawError):
    pass


class ActionAssociativityError(BibundleLawError):
    pass


class CommutationFailure(BibundleLawError):
    pass


class NotComposable(WorkbenchError):
    pass


class NotBiprincipal(WorkbenchError):
    pass


# Bornology

class OffSpan(WorkbenchError):
    pass


class DimensionLimitExceeded(WorkbenchError):
    pass


# Numerics

class GridTooCoarse(WorkbenchError):
    pass


class QuadratureControlError(WorkbenchError):
    pass


class ThetaMismatch(WorkbenchError):
    pass


class ModeRangeError(WorkbenchError):
    pass


class ZeroElement(WorkbenchError):
    pass


# Documents

class SchemaError(WorkbenchError):
    """A JSON document failed validation at ``path``."""

    exit_code = 2

    def __init__(self, message: str, path: str = "$", witness: Optional[Any] = None):
        super().__init__(f"{path}: {message}", witness if witness is not None else path)
        self.path = path


# Command surface

class CommandError(Exception):
    """Raised by controllers; ``detail`` is printed to standard error."""

    def __init__(self, exit_code: int, detail: Any):
        super().__init__(str(detail))
        self.exit_code = exit_code
        self.detail = detail
