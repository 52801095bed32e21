"""Develops strips of triangles into a common plane and measures linear holonomy and the turning
index of closed piecewise-geodesic loops.
"""
import cmath
import logging
import math
from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Sequence, Tuple

from affine_flips.config import ANGLE_TOLERANCE, RENORMALIZE_THRESHOLD
from affine_flips.exceptions import (
    BoundaryCrossing,
    DisconnectedPath,
    NotClosed,
    ZeroLengthSegment,
    ZeroTurning,
)
from affine_flips.surface import IDENTITY, CornerRef, HalfEdgeRef, Surface, Transition, TWO_PI

logger = logging.getLogger(__name__)


class HolonomyKind(str, Enum):
    TRANSLATION = "translation"
    DILATION = "dilation"
    GENERAL = "general"


@dataclass(frozen=True)
class DevelopedChain:
    """Triangles of a dual path placed into the chart of the first one.

    When placements grow past RENORMALIZE_THRESHOLD every stored placement is rescaled by the same
    similarity; `normalization` records it, so the exact placement of entry i is
    `normalization.inverse().compose(placements[i][1])`.
    """

    placements: Tuple[Tuple[int, Transition], ...]
    crossings: Tuple[HalfEdgeRef, ...]
    cumulative: Transition
    normalization: Transition = IDENTITY

    @property
    def end(self) -> int:
        return self.placements[-1][0]


@dataclass(frozen=True)
class LoopPolyline:
    """A closed loop developed into the plane: the last point is `closure` of the first."""

    points: Tuple[complex, ...]
    closure: Transition


@dataclass(frozen=True)
class LoopIndex:
    theta: float
    holonomy: complex


def _needs_renormalizing(placement: Transition) -> bool:
    scale = abs(placement.a)
    return (
        scale > RENORMALIZE_THRESHOLD
        or scale < 1 / RENORMALIZE_THRESHOLD
        or abs(placement.b) > RENORMALIZE_THRESHOLD
    )


def develop_strip(
    surface: Surface, start: int, crossings: Sequence[HalfEdgeRef]
) -> DevelopedChain:
    """Places `start` by the identity and every following triangle by previous ∘ g^-1."""
    current = start
    placement = IDENTITY
    cumulative = IDENTITY
    normalization = IDENTITY
    placements: List[Tuple[int, Transition]] = [(start, IDENTITY)]
    for crossing in crossings:
        crossing = HalfEdgeRef(*crossing)
        if crossing.triangle != current:
            raise DisconnectedPath(
                f"Crossing {crossing} does not leave the current triangle {current}."
            )
        partner = surface.opposite(crossing)
        if partner is None:
            raise BoundaryCrossing(f"Crossing {crossing} is a boundary half-edge.")
        transition = surface.transition(crossing)
        placement = placement.compose(transition.inverse())
        cumulative = transition.compose(cumulative)
        if _needs_renormalizing(placement):
            rescale = Transition(1 / abs(placement.a), -placement.b / abs(placement.a))
            logger.debug("renormalizing strip at crossing %s", crossing)
            placements = [(tid, rescale.compose(stored)) for tid, stored in placements]
            placement = rescale.compose(placement)
            normalization = rescale.compose(normalization)
        current = partner.triangle
        placements.append((current, placement))
    return DevelopedChain(tuple(placements), tuple(crossings), cumulative, normalization)


def loop_holonomy(surface: Surface, dual_loop: Sequence[HalfEdgeRef]) -> complex:
    """Returns the derivative of the chart change accumulated around a closed dual loop."""
    if not dual_loop:
        raise NotClosed("A dual loop needs at least one crossing.")
    start = dual_loop[0][0]
    chain = develop_strip(surface, start, dual_loop)
    if chain.end != start:
        raise NotClosed(f"Dual loop starts in triangle {start} but ends in {chain.end}.")
    return chain.cumulative.a


def classify_holonomy(a: complex, tolerance: float = ANGLE_TOLERANCE) -> HolonomyKind:
    if abs(a - 1) <= tolerance:
        return HolonomyKind.TRANSLATION
    if abs(a.imag) <= tolerance * max(1.0, abs(a)):
        return HolonomyKind.DILATION
    return HolonomyKind.GENERAL


def holonomy_generators(surface: Surface) -> List[Tuple[HalfEdgeRef, complex]]:
    """Returns the holonomy of each loop closed by a glued pair off a dual spanning tree."""
    placements: Dict[int, Transition] = {0: IDENTITY}
    tree = set()
    queue = deque([0])
    while queue:
        triangle_id = queue.popleft()
        for edge in range(3):
            half_edge = HalfEdgeRef(triangle_id, edge)
            partner = surface.opposite(half_edge)
            if partner is None or partner.triangle in placements:
                continue
            placements[partner.triangle] = placements[triangle_id].compose(
                surface.transition(half_edge).inverse()
            )
            tree.add(half_edge)
            tree.add(partner)
            queue.append(partner.triangle)

    generators = []
    for half_edge, partner in surface.gluings.items():
        if half_edge in tree or partner < half_edge or half_edge.triangle not in placements:
            continue
        derivative = placements[half_edge.triangle].a / (
            surface.transition(half_edge).a * placements[partner.triangle].a
        )
        generators.append((half_edge, derivative))
    return generators


def surface_kind(surface: Surface) -> HolonomyKind:
    """Classifies as translation when all holonomy is trivial, dilation when all of it is real."""
    kinds = {classify_holonomy(a) for _, a in holonomy_generators(surface)}
    if HolonomyKind.GENERAL in kinds:
        return HolonomyKind.GENERAL
    if HolonomyKind.DILATION in kinds:
        return HolonomyKind.DILATION
    return HolonomyKind.TRANSLATION


def _exterior_angle(incoming: complex, outgoing: complex) -> float:
    angle = cmath.phase(outgoing / incoming)
    if abs(abs(angle) - math.pi) <= 1e-12:
        raise ZeroTurning("A loop reverses direction; its turning at the cusp is ambiguous.")
    return angle


def loop_index(surface: Surface, loop: LoopPolyline) -> LoopIndex:
    """Returns the total signed turning of a developed closed polyline, in full turns."""
    points = loop.points
    if len(points) < 2:
        raise NotClosed("A closed polyline needs at least one segment.")
    scale = max(abs(point) for point in points) or 1.0
    if abs(loop.closure(points[0]) - points[-1]) > ANGLE_TOLERANCE * scale:
        raise NotClosed("The last point is not the holonomy image of the first.")

    segments = [end - begin for begin, end in zip(points, points[1:])]
    for index, segment in enumerate(segments):
        if abs(segment) <= ANGLE_TOLERANCE * scale:
            raise ZeroLengthSegment(f"Segment {index} of the loop has zero length.")

    turning = sum(_exterior_angle(first, second) for first, second in zip(segments, segments[1:]))
    turning += _exterior_angle(segments[-1], loop.closure.a * segments[0])
    return LoopIndex(theta=turning / TWO_PI, holonomy=loop.closure.a)


def vertex_link_loop(surface: Surface, vertex: int, epsilon: float = 0.1) -> LoopPolyline:
    """Builds a small loop around an interior vertex, cutting each corner at `epsilon`."""
    corners = surface.vertex_corners(vertex)
    if surface.cones[vertex].is_boundary:
        raise NotClosed(f"Vertex {vertex} is on the boundary and has no closed link.")

    def cut_point(corner: CornerRef) -> complex:
        triangle = surface.triangle(corner.triangle)
        here = triangle.point(corner.corner)
        return here + epsilon * (triangle.point(corner.corner + 1) - here)

    placement = IDENTITY
    points = []
    for corner in corners:
        points.append(placement(cut_point(corner)))
        incoming = HalfEdgeRef(corner.triangle, (corner.corner - 1) % 3)
        placement = placement.compose(surface.transition(incoming).inverse())
    points.append(placement(cut_point(corners[0])))
    return LoopPolyline(tuple(points), placement)


def triangle_boundary_loop(surface: Surface, triangle_id: int) -> LoopPolyline:
    triangle = surface.triangle(triangle_id)
    return LoopPolyline((triangle.p0, triangle.p1, triangle.p2, triangle.p0), IDENTITY)
