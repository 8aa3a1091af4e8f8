"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class TrussError(Exception):
    """Base class for every error raised by trusskit."""


class CycleDetected(TrussError):
    pass


class UnknownElement(TrussError):
    pass


class NotMonotone(TrussError):
    pass


class FiberError(TrussError):
    """A 1-truss word is empty, uses letters other than S/R, or does not alternate."""


class BordismError(TrussError):
    pass


class BundleError(TrussError):
    """Structural violation inside a truss bundle."""


class LevelOutOfRange(TrussError):
    pass


class InvalidPath(TrussError):
    pass


class NotASubtruss(TrussError):
    pass


class SidesMismatch(TrussError):
    pass


class NotOpen(TrussError):
    pass


class NotClosed(TrussError):
    pass


class StratumCrossesFibers(TrussError):
    pass


class SizeBoundExceeded(TrussError):
    pass


class NoCommonRefinement(TrussError):
    pass


class NotADiagram(TrussError):
    pass


class NotACellDiagram(TrussError):
    pass


class InternalDisagreement(TrussError):
    """Two independent computations of the same quantity disagree."""


class NotInQ(TrussError):
    pass


class NotATangle(TrussError):
    pass


class FibersMismatch(TrussError):
    pass


class DimensionUnsupported(TrussError):
    pass


class SchemaError(TrussError):
    def __init__(self, message: str, pointer: str = ""):
        super().__init__(f"{pointer or '/'}: {message}")
        self.pointer = pointer


class ValidationError(TrussError):
    pass
