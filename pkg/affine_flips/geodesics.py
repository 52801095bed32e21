"""Straight-line trajectories, saddle connections and straightening of arcs by the funnel
algorithm. Every routine works in developed coordinates: the triangles met along the way are
placed in the chart where the walk started.
"""
import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

from affine_flips.config import (
    ANGLE_TOLERANCE,
    DEFAULT_BUDGET,
    LIMIT_CYCLE_REPEATS,
    MAX_CYCLE_PERIOD,
    VERTEX_HIT_TOLERANCE,
)
from affine_flips.developing import develop_strip
from affine_flips.exceptions import (
    BoundaryCrossing,
    DisconnectedPath,
    InvalidStrip,
    StartOnEdge,
    ZeroDirection,
)
from affine_flips.surface import (
    IDENTITY,
    CornerRef,
    HalfEdgeRef,
    Surface,
    Transition,
    cross,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CrossEdge:
    half_edge: HalfEdgeRef
    t: float


@dataclass(frozen=True)
class HitVertex:
    vertex: int


@dataclass(frozen=True)
class ExitBoundary:
    half_edge: HalfEdgeRef
    t: float


@dataclass(frozen=True)
class LimitCycle:
    word: Tuple[HalfEdgeRef, ...]
    factor: float


@dataclass(frozen=True)
class BudgetExhausted:
    pass


TrajectoryEvent = Union[CrossEdge, HitVertex, ExitBoundary, LimitCycle, BudgetExhausted]


def _limit_cycle(
    surface: Surface, crossings: List[Tuple[HalfEdgeRef, float]]
) -> Optional[LimitCycle]:
    """Returns a LimitCycle when the last crossings repeat one word with converging parameters."""
    repeats = LIMIT_CYCLE_REPEATS
    for period in range(1, min(MAX_CYCLE_PERIOD, len(crossings) // repeats) + 1):
        tail = crossings[-repeats * period :]
        words = [
            tuple(half for half, _ in tail[copy * period : (copy + 1) * period])
            for copy in range(repeats)
        ]
        if any(word != words[0] for word in words[1:]):
            continue

        derivative = 1 + 0j
        for half_edge in words[0]:
            derivative *= surface.transition(half_edge).a
        if abs(derivative.imag) > ANGLE_TOLERANCE or derivative.real <= 0:
            continue
        if abs(derivative.real - 1) <= ANGLE_TOLERANCE:
            continue

        converging = True
        for position in range(period):
            values = [tail[copy * period + position][1] for copy in range(repeats)]
            gaps = [later - earlier for earlier, later in zip(values, values[1:])]
            if any(gap == 0 for gap in gaps):
                converging = False
                break
            same_sign = all((gap > 0) == (gaps[0] > 0) for gap in gaps)
            shrinking = all(abs(later) < abs(earlier) for earlier, later in zip(gaps, gaps[1:]))
            if not (same_sign and shrinking):
                converging = False
                break
        if converging:
            ratio = derivative.real
            return LimitCycle(words[0], min(ratio, 1 / ratio))
    return None


def trace(
    surface: Surface,
    triangle_id: int,
    point: complex,
    direction: complex,
    max_crossings: int = DEFAULT_BUDGET,
) -> List[TrajectoryEvent]:
    """Follows the straight ray from `point` in `direction` across glued edges."""
    if direction == 0:
        raise ZeroDirection("A trajectory needs a nonzero direction.")
    triangle = surface.triangle(triangle_id)
    if min(triangle.barycentric(point)) <= VERTEX_HIT_TOLERANCE:
        raise StartOnEdge(f"{point} is not strictly inside triangle {triangle_id}.")

    heading = direction / abs(direction)
    entry: Optional[int] = None
    crossings: List[Tuple[HalfEdgeRef, float]] = []
    events: List[TrajectoryEvent] = []
    for _ in range(max_crossings):
        best = None
        for edge in range(3):
            if edge == entry:
                continue
            start, end = triangle.point(edge), triangle.point(edge + 1)
            denominator = cross(heading, end - start)
            if denominator <= 0:
                continue
            distance = cross(start - point, end - start) / denominator
            if best is None or distance < best[0]:
                best = (distance, edge, cross(start - point, heading) / denominator)
        if best is None:
            raise StartOnEdge(f"Trajectory is stuck in triangle {triangle.id}.")
        _, edge, parameter = best

        if parameter <= VERTEX_HIT_TOLERANCE or parameter >= 1 - VERTEX_HIT_TOLERANCE:
            corner = edge if parameter <= VERTEX_HIT_TOLERANCE else (edge + 1) % 3
            events.append(HitVertex(surface.vertex_of(CornerRef(triangle.id, corner))))
            return events

        half_edge = HalfEdgeRef(triangle.id, edge)
        partner = surface.opposite(half_edge)
        if partner is None:
            events.append(ExitBoundary(half_edge, parameter))
            return events

        events.append(CrossEdge(half_edge, parameter))
        crossings.append((half_edge, parameter))
        transition = surface.transition(half_edge)
        triangle = surface.triangle(partner.triangle)
        start, end = triangle.point(partner.edge), triangle.point(partner.edge + 1)
        point = start + (1 - parameter) * (end - start)
        heading *= transition.a / abs(transition.a)
        entry = partner.edge

        cycle = _limit_cycle(surface, crossings)
        if cycle is not None:
            logger.debug("limit cycle of period %d found", len(cycle.word))
            events.append(cycle)
            return events
    events.append(BudgetExhausted())
    return events


@dataclass(frozen=True)
class SaddleConnection:
    """A segment between two vertices, given in the chart of its starting triangle."""

    start: int
    end: int
    word: Tuple[HalfEdgeRef, ...]
    vector: complex
    start_corner: CornerRef
    end_corner: CornerRef


def _reversed_word(surface: Surface, word: Sequence[HalfEdgeRef]) -> Tuple[HalfEdgeRef, ...]:
    return tuple(surface.opposite(half_edge) for half_edge in reversed(word))


def _right_of(ray: complex, target: complex) -> bool:
    """Checks whether `target` is clockwise of `ray` or within tolerance of it."""
    return cross(ray, target) <= VERTEX_HIT_TOLERANCE * abs(ray) * abs(target)


def _left_of(ray: complex, target: complex) -> bool:
    return cross(target, ray) <= VERTEX_HIT_TOLERANCE * abs(ray) * abs(target)


def enumerate_saddle_connections(surface: Surface, depth: int) -> List[SaddleConnection]:
    """Finds saddle connections crossing at most `depth` edges, one per word up to reversal.

    From every corner the visibility wedge is pushed across the opposite edge; a developed vertex
    strictly inside the wedge is a saddle connection and splits the wedge in two.
    """
    found: Dict[object, SaddleConnection] = {}

    def emit(connection: SaddleConnection) -> None:
        if connection.word:
            key: object = min(connection.word, _reversed_word(surface, connection.word))
        else:
            triangle_id = connection.start_corner.triangle
            corner = connection.start_corner.corner
            edge = corner if connection.end_corner.corner == (corner + 1) % 3 else (corner - 1) % 3
            key = ("edge", surface.edge_id(HalfEdgeRef(triangle_id, edge)))
        found.setdefault(key, connection)

    for corner_ref in (CornerRef(t, k) for t in range(len(surface.triangles)) for k in range(3)):
        triangle = surface.triangle(corner_ref.triangle)
        origin = triangle.point(corner_ref.corner)
        start_vertex = surface.vertex_of(corner_ref)
        for neighbour in (corner_ref.corner + 1, corner_ref.corner - 1):
            end_corner = CornerRef(corner_ref.triangle, neighbour % 3)
            emit(
                SaddleConnection(
                    start_vertex,
                    surface.vertex_of(end_corner),
                    (),
                    triangle.point(neighbour) - origin,
                    corner_ref,
                    end_corner,
                )
            )

        stack = [
            (
                HalfEdgeRef(corner_ref.triangle, (corner_ref.corner + 1) % 3),
                IDENTITY,
                triangle.point(corner_ref.corner + 1) - origin,
                triangle.point(corner_ref.corner + 2) - origin,
                (),
            )
        ]
        while stack:
            half_edge, placement, right, left, word = stack.pop()
            if len(word) >= depth:
                continue
            partner = surface.opposite(half_edge)
            if partner is None:
                continue
            placement = placement.compose(surface.transition(half_edge).inverse())
            word = word + (half_edge,)
            beyond = surface.triangle(partner.triangle)
            far_corner = CornerRef(partner.triangle, (partner.edge + 2) % 3)
            far = placement(beyond.point(far_corner.corner)) - origin
            to_right = HalfEdgeRef(partner.triangle, (partner.edge + 1) % 3)
            to_left = HalfEdgeRef(partner.triangle, (partner.edge + 2) % 3)

            if _right_of(right, far):
                stack.append((to_left, placement, right, left, word))
            elif _left_of(left, far):
                stack.append((to_right, placement, right, left, word))
            else:
                emit(
                    SaddleConnection(
                        start_vertex,
                        surface.vertex_of(far_corner),
                        word,
                        far,
                        corner_ref,
                        far_corner,
                    )
                )
                stack.append((to_left, placement, far, left, word))
                stack.append((to_right, placement, right, far, word))
    connections = list(found.values())
    logger.debug("found %d saddle connections up to depth %d", len(connections), depth)
    return connections


@dataclass(frozen=True)
class Straightened:
    """Holds the geodesic representative of an arc, a polyline turning only at vertices."""

    points: Tuple[complex, ...]
    vertices: Tuple[int, ...]
    saddle_connection: Optional[SaddleConnection] = None

    @property
    def segments(self) -> int:
        return len(self.points) - 1


def _funnel(portals: Sequence[Tuple[complex, complex]], tolerance: float) -> List[int]:
    """Runs the simple stupid funnel over (right, left) portals. Each turn is reported as
    2 * portal index + side, side 0 for a right point and 1 for a left one.
    """
    turns: List[int] = []
    apex_index = left_index = right_index = 0
    apex = portal_left = portal_right = portals[0][0]
    index = 1
    while index < len(portals):
        right, left = portals[index]

        if cross(portal_right - apex, right - apex) >= -tolerance:
            if portal_right == apex or cross(portal_left - apex, right - apex) < -tolerance:
                portal_right, right_index = right, index
            else:
                turns.append(2 * left_index + 1)
                apex = portal_right = portal_left
                apex_index = right_index = left_index
                index = apex_index + 1
                continue

        if cross(portal_left - apex, left - apex) <= tolerance:
            if portal_left == apex or cross(portal_right - apex, left - apex) > tolerance:
                portal_left, left_index = left, index
            else:
                turns.append(2 * right_index)
                apex = portal_left = portal_right
                apex_index = left_index = right_index
                index = apex_index + 1
                continue
        index += 1
    return turns


def straighten(
    surface: Surface,
    start_corner: CornerRef,
    word: Sequence[HalfEdgeRef],
    end_corner: int,
) -> Straightened:
    """Returns the shortest path in the developed strip of `word` from the start corner to corner
    `end_corner` of the last triangle, found with the funnel algorithm.
    """
    start_corner = CornerRef(*start_corner)
    word = tuple(HalfEdgeRef(*half_edge) for half_edge in word)
    if word and word[0].triangle != start_corner.triangle:
        raise InvalidStrip(f"Arc starts at {start_corner} but first crosses {word[0]}.")
    try:
        chain = develop_strip(surface, start_corner.triangle, word)
    except (DisconnectedPath, BoundaryCrossing) as error:
        raise InvalidStrip(str(error)) from error

    if word and start_corner.corner != (word[0].edge + 2) % 3:
        raise InvalidStrip(f"Start corner {start_corner} lies on the first crossed edge.")
    last_triangle = chain.end
    if word:
        entry = surface.opposite(word[-1]).edge
        if end_corner % 3 != (entry + 2) % 3:
            raise InvalidStrip(f"End corner {end_corner} lies on the last crossed edge.")
    elif end_corner % 3 == start_corner.corner:
        raise InvalidStrip("Arc starts and ends at the same corner without crossing an edge.")

    exact = chain.normalization.inverse()
    first = surface.triangle(start_corner.triangle).point(start_corner.corner)
    portals: List[Tuple[complex, complex]] = [(first, first)]
    portal_vertices: List[Tuple[int, int]] = [(surface.vertex_of(start_corner),) * 2]
    for (triangle_id, placement), half_edge in zip(chain.placements, word):
        placement = exact.compose(placement)
        triangle = surface.triangle(triangle_id)
        right, left = triangle.point(half_edge.edge), triangle.point(half_edge.edge + 1)
        portals.append((placement(right), placement(left)))
        portal_vertices.append(
            (
                surface.vertex_of(CornerRef(triangle_id, half_edge.edge)),
                surface.vertex_of(CornerRef(triangle_id, (half_edge.edge + 1) % 3)),
            )
        )
    last_corner = CornerRef(last_triangle, end_corner % 3)
    last_placement = exact.compose(chain.placements[-1][1])
    last = last_placement(surface.triangle(last_triangle).point(last_corner.corner))
    portals.append((last, last))
    portal_vertices.append((surface.vertex_of(last_corner),) * 2)

    scale = max(abs(point - first) for portal in portals for point in portal) or 1.0
    turns = _funnel(portals, ANGLE_TOLERANCE * scale * scale)
    points = [first]
    vertices = [portal_vertices[0][0]]
    for turn in turns:
        portal_index, side = divmod(turn, 2)
        points.append(portals[portal_index][side])
        vertices.append(portal_vertices[portal_index][side])
    points.append(last)
    vertices.append(portal_vertices[-1][0])

    connection = None
    if len(points) == 2:
        connection = SaddleConnection(
            vertices[0], vertices[1], word, last - first, start_corner, last_corner
        )
    return Straightened(tuple(points), tuple(vertices), connection)


def redevelop(surface: Surface, connection: SaddleConnection) -> Tuple[complex, complex]:
    """Recomputes the developed endpoints of a saddle connection from its crossing word."""
    chain = develop_strip(surface, connection.start_corner.triangle, connection.word)
    placement: Transition = chain.normalization.inverse().compose(chain.placements[-1][1])
    start = surface.triangle(connection.start_corner.triangle).point(connection.start_corner.corner)
    end_triangle = surface.triangle(connection.end_corner.triangle)
    return start, placement(end_triangle.point(connection.end_corner.corner))


def turning_of(points: Sequence[complex]) -> float:
    """Returns the total absolute turning of an open polyline."""
    segments = [later - earlier for earlier, later in zip(points, points[1:])]
    return sum(
        abs(math.atan2(cross(first, second), (first.conjugate() * second).real))
        for first, second in zip(segments, segments[1:])
    )
