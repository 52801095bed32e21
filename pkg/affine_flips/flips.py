"""Geometric edge flips: replace the diagonal of a strictly convex developed quadrilateral by the
other diagonal. Also finds self-folded triangles.
"""
import logging
import math
import warnings
from dataclasses import dataclass
from typing import Dict, List, NamedTuple, Optional, Tuple

from affine_flips.config import ANGLE_TOLERANCE, CONVEXITY_EPSILON
from affine_flips.exceptions import BoundaryEdge, NotFlippable
from affine_flips.surface import CornerRef, HalfEdgeRef, Surface, Triangle, build_surface, cross

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class QuadView:
    """The two triangles on either side of an interior edge, developed into the first one's chart.

    A and C are the ends of the edge; A, B, C and A, C, D are the two triangles.
    """

    edge: int
    corners: Tuple[complex, complex, complex, complex]
    distinct_triangles: bool
    strictly_convex: bool
    embedded: bool

    @property
    def failing_predicate(self) -> Optional[str]:
        for predicate in ("distinct_triangles", "strictly_convex", "embedded"):
            if not getattr(self, predicate):
                return predicate
        return None

    @property
    def flippable(self) -> bool:
        return self.failing_predicate is None


@dataclass(frozen=True)
class FlipMove:
    removed: int
    inserted: int
    half_edges: Tuple[HalfEdgeRef, HalfEdgeRef]
    shapes: Tuple[complex, complex]


class SelfFolded(NamedTuple):
    triangle: int
    apex: int


def _quad_sides(surface: Surface, edge: int) -> Tuple[HalfEdgeRef, HalfEdgeRef]:
    half_edge = surface.edge_half(edge)
    twin = surface.opposite(half_edge)
    if twin is None:
        raise BoundaryEdge(f"Edge {edge} is on the boundary and bounds no quadrilateral.")
    return half_edge, twin


def quad_of_edge(surface: Surface, edge: int) -> QuadView:
    half_edge, twin = _quad_sides(surface, edge)
    triangle = surface.triangle(half_edge.triangle)
    other = surface.triangle(twin.triangle)
    k = half_edge.edge
    back = surface.transition(half_edge).inverse()

    a, b, c = triangle.point(k + 1), triangle.point(k + 2), triangle.point(k)
    d = back(other.point(twin.edge + 2))
    corners = (a, b, c, d)

    diameter = max(abs(p - q) for p in corners for q in corners)
    margin = CONVEXITY_EPSILON * diameter * diameter
    turns = [
        cross(corners[index] - corners[index - 1], corners[(index + 1) % 4] - corners[index])
        for index in range(4)
    ]
    return QuadView(
        edge=edge,
        corners=corners,
        distinct_triangles=half_edge.triangle != twin.triangle,
        strictly_convex=all(turn > margin for turn in turns),
        embedded=cross(c - a, b - a) < -margin and cross(c - a, d - a) > margin,
    )


def flip_move(surface: Surface, edge: int) -> Tuple[Surface, FlipMove]:
    """Flips `edge` and reports the edge id of the inserted diagonal in the new surface."""
    quad = quad_of_edge(surface, edge)
    if not quad.flippable:
        raise NotFlippable(
            quad.failing_predicate, f"Edge {edge} fails {quad.failing_predicate}."
        )

    half_edge, twin = _quad_sides(surface, edge)
    t, k = half_edge
    u, m = twin
    a, b, c, d = quad.corners
    forward = surface.transition(half_edge)

    triangles = list(surface.triangles)
    triangles[t] = Triangle(t, b, d, a)
    triangles[u] = Triangle(u, forward(b), forward(c), forward(d))

    renamed: Dict[HalfEdgeRef, HalfEdgeRef] = {
        HalfEdgeRef(t, (k + 1) % 3): HalfEdgeRef(t, 2),
        HalfEdgeRef(t, (k + 2) % 3): HalfEdgeRef(u, 0),
        HalfEdgeRef(u, (m + 1) % 3): HalfEdgeRef(u, 1),
        HalfEdgeRef(u, (m + 2) % 3): HalfEdgeRef(t, 1),
    }
    gluings = [(HalfEdgeRef(t, 0), HalfEdgeRef(u, 2))]
    for first, second in surface.gluings.items():
        if first in (half_edge, twin) or second < first:
            continue
        gluings.append((renamed.get(first, first), renamed.get(second, second)))

    corner_moves = {
        CornerRef(t, (k + 1) % 3): CornerRef(t, 2),
        CornerRef(t, (k + 2) % 3): CornerRef(t, 0),
        CornerRef(t, k): CornerRef(u, 1),
        CornerRef(u, m): CornerRef(t, 2),
        CornerRef(u, (m + 1) % 3): CornerRef(u, 1),
        CornerRef(u, (m + 2) % 3): CornerRef(t, 1),
    }
    auxiliary = [corner_moves.get(corner, corner) for corner in surface.auxiliary_corners]

    flipped = build_surface(triangles, gluings, auxiliary, name=surface.name)
    inserted = flipped.edge_id(HalfEdgeRef(t, 0))
    move = FlipMove(
        removed=edge,
        inserted=inserted,
        half_edges=(HalfEdgeRef(t, 0), HalfEdgeRef(u, 2)),
        shapes=(_shape(flipped.triangle(t)), _shape(flipped.triangle(u))),
    )
    logger.debug("flipped edge %d of %s into edge %d", edge, surface.name, inserted)
    return flipped, move


def flip(surface: Surface, edge: int) -> Surface:
    return flip_move(surface, edge)[0]


def flippable_edges(surface: Surface) -> List[int]:
    """Returns interior edges whose quadrilateral passes every flip predicate, in edge order."""
    return [edge for edge in surface.interior_edges() if quad_of_edge(surface, edge).flippable]


def _shape(triangle: Triangle) -> complex:
    return (triangle.p2 - triangle.p0) / (triangle.p1 - triangle.p0)


def self_folded_scan(surface: Surface) -> List[SelfFolded]:
    """Finds triangles with two of their own half-edges glued together, and their fold vertex."""
    found = []
    for triangle in surface.triangles:
        for edge in range(3):
            partner = surface.opposite(HalfEdgeRef(triangle.id, edge))
            if partner is None or partner.triangle != triangle.id or partner.edge < edge:
                continue
            shared = {edge, (edge + 1) % 3} & {partner.edge, (partner.edge + 1) % 3}
            apex = surface.vertex_of(CornerRef(triangle.id, shared.pop()))
            if surface.cones[apex].angle >= math.pi - ANGLE_TOLERANCE:
                warnings.warn(
                    f"Self-folded triangle {triangle.id} folds at vertex {apex} "
                    f"of angle {surface.cones[apex].angle} >= pi."
                )
            found.append(SelfFolded(triangle.id, apex))
    return found
