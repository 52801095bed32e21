"""Errors raised by affine_flips. Every error is a ValueError underneath."""
from typing import Optional


class SurfaceError(ValueError):
    """Base class for every invalid surface, path or parameter."""


class DegenerateTriangle(SurfaceError):
    pass


class DoubleGluing(SurfaceError):
    pass


class BadAuxiliary(SurfaceError):
    pass


class BoundaryEdge(SurfaceError):
    pass


class NonOrientable(SurfaceError):
    pass


class HasBoundary(SurfaceError):
    pass


class DisconnectedPath(SurfaceError):
    pass


class BoundaryCrossing(SurfaceError):
    pass


class NotClosed(SurfaceError):
    pass


class ZeroLengthSegment(SurfaceError):
    pass


class ZeroTurning(SurfaceError):
    """An exterior angle of exactly ±π: the turning direction is ambiguous."""


class NotFlippable(SurfaceError):
    def __init__(self, predicate: str, message: str = ""):
        self.predicate = predicate
        super().__init__(message or f"Edge is not flippable: {predicate} does not hold.")


class BudgetZero(SurfaceError):
    pass


class IncompatibleTargets(SurfaceError):
    pass


class StartOnEdge(SurfaceError):
    pass


class ZeroDirection(SurfaceError):
    pass


class InvalidStrip(SurfaceError):
    pass


class BadParams(SurfaceError):
    pass


class NonSimplePolygon(SurfaceError):
    pass


class BadPairing(SurfaceError):
    pass


class SurfaceSyntaxError(SurfaceError):
    def __init__(self, line: Optional[int], message: str):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(f"{prefix}{message}")
