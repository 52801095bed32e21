"""Defines the surface data model: positively oriented affine triangles whose half-edges are glued
by complex-affine maps z -> a*z + b. A Surface is the single source of geometric truth for every
other module and is immutable once built.
"""
import cmath
import logging
import math
import warnings
from dataclasses import dataclass
from types import MappingProxyType
from typing import Dict, FrozenSet, Iterable, List, Mapping, NamedTuple, Optional, Sequence, Tuple

from affine_flips.config import ANGLE_TOLERANCE, AREA_EPSILON
from affine_flips.exceptions import (
    BadAuxiliary,
    BoundaryEdge,
    DegenerateTriangle,
    DoubleGluing,
    HasBoundary,
    NonOrientable,
    SurfaceError,
)

logger = logging.getLogger(__name__)

TWO_PI = 2 * math.pi


def cross(u: complex, v: complex) -> float:
    """Returns the signed area of the parallelogram (u, v), positive when v is ccw of u."""
    return (u.conjugate() * v).imag


def wrap_angle(angle: float) -> float:
    """Reduces an angle into (-pi, pi]."""
    wrapped = math.remainder(angle, TWO_PI)
    return math.pi if wrapped == -math.pi else wrapped


@dataclass(frozen=True)
class Transition:
    """The complex-affine map z -> a*z + b. `a` is the linear holonomy of one chart change."""

    a: complex
    b: complex = 0j

    def __post_init__(self):
        if self.a == 0:
            raise SurfaceError("A transition must have a nonzero derivative.")

    def __call__(self, z: complex) -> complex:
        return self.a * z + self.b

    def compose(self, inner: "Transition") -> "Transition":
        """Returns self ∘ inner."""
        return Transition(self.a * inner.a, self.a * inner.b + self.b)

    def inverse(self) -> "Transition":
        return Transition(1 / self.a, -self.b / self.a)

    def is_close(self, other: "Transition", tolerance: float = 1e-12) -> bool:
        return abs(self.a - other.a) <= tolerance and abs(self.b - other.b) <= tolerance * max(
            1.0, abs(self.b), abs(other.b)
        )

    @property
    def fixed_point(self) -> Optional[complex]:
        if self.a == 1:
            return None
        return self.b / (1 - self.a)

    @classmethod
    def from_points(
        cls, source: Tuple[complex, complex], target: Tuple[complex, complex]
    ) -> "Transition":
        """Returns the unique map sending source[0] -> target[0] and source[1] -> target[1]."""
        a = (target[1] - target[0]) / (source[1] - source[0])
        return cls(a, target[0] - a * source[0])


IDENTITY = Transition(1 + 0j, 0j)


class HalfEdgeRef(NamedTuple):
    """Edge `edge` of a triangle runs from its vertex `edge` to vertex `edge + 1 mod 3`."""

    triangle: int
    edge: int

    def __str__(self) -> str:
        return f"{self.triangle}:{self.edge}"


class CornerRef(NamedTuple):
    triangle: int
    corner: int

    def __str__(self) -> str:
        return f"{self.triangle}:{self.corner}"


@dataclass(frozen=True)
class Triangle:
    id: int
    p0: complex
    p1: complex
    p2: complex

    @property
    def points(self) -> Tuple[complex, complex, complex]:
        return (self.p0, self.p1, self.p2)

    def point(self, index: int) -> complex:
        return self.points[index % 3]

    def edge_vector(self, edge: int) -> complex:
        return self.point(edge + 1) - self.point(edge)

    @property
    def signed_area(self) -> float:
        return cross(self.p1 - self.p0, self.p2 - self.p0) / 2

    @property
    def diameter(self) -> float:
        return max(abs(self.edge_vector(edge)) for edge in range(3))

    def corner_angle(self, corner: int) -> float:
        here = self.point(corner)
        return cmath.phase((self.point(corner - 1) - here) / (self.point(corner + 1) - here))

    @property
    def angles(self) -> Tuple[float, float, float]:
        return (self.corner_angle(0), self.corner_angle(1), self.corner_angle(2))

    @property
    def centroid(self) -> complex:
        return (self.p0 + self.p1 + self.p2) / 3

    def barycentric(self, z: complex) -> Tuple[float, float, float]:
        area = cross(self.p1 - self.p0, self.p2 - self.p0)
        weight0 = cross(self.p2 - self.p1, z - self.p1) / area
        weight1 = cross(self.p0 - self.p2, z - self.p2) / area
        return (weight0, weight1, 1 - weight0 - weight1)

    def mapped(self, transition: Transition, new_id: Optional[int] = None) -> "Triangle":
        return Triangle(
            self.id if new_id is None else new_id,
            transition(self.p0),
            transition(self.p1),
            transition(self.p2),
        )


@dataclass(frozen=True)
class ConeSummary:
    vertex: int
    angle: float
    dilation: float
    holonomy_arg: float
    is_boundary: bool
    is_auxiliary: bool
    corners: Tuple[CornerRef, ...]


@dataclass(frozen=True)
class SurfaceInfo:
    vertices: int
    edges: int
    faces: int
    euler_characteristic: int
    genus: int
    marked_points: int  # non-auxiliary vertices
    auxiliary_points: int
    boundary_components: int


@dataclass(frozen=True)
class GaussBonnetReport:
    r_angle: float
    r_log: float

    @property
    def ok(self) -> bool:
        return self.r_angle < ANGLE_TOLERANCE and self.r_log < ANGLE_TOLERANCE


class Surface:
    """Immutable complex of positively oriented planar triangles with half-edge gluings.

    Build instances with `build_surface`, which validates every structural invariant.
    Auxiliary marked points are given by a representative corner, since vertex ids only exist
    once the gluing is known.
    """

    def __init__(
        self,
        triangles: Sequence[Triangle],
        gluings: Mapping[HalfEdgeRef, HalfEdgeRef],
        auxiliary_corners: Iterable[CornerRef] = (),
        name: str = "surface",
    ):
        self.name = name
        self._triangles = tuple(triangles)
        self._gluings = MappingProxyType(dict(gluings))
        self._transitions = MappingProxyType(
            {half_edge: self._solve_transition(half_edge) for half_edge in self._gluings}
        )
        self._edges, self._edge_of = self._enumerate_edges()
        self._vertex_of, self._vertex_corners = self._corner_orbits()
        self._auxiliary_corners = frozenset(auxiliary_corners)
        self._auxiliary = frozenset(self._vertex_of[corner] for corner in self._auxiliary_corners)
        self._cones = tuple(self._cone(vertex) for vertex in range(len(self._vertex_corners)))

    def __repr__(self) -> str:
        return f"<Surface {self.name}: F={len(self._triangles)} V={self.vertex_count}>"

    @property
    def triangles(self) -> Tuple[Triangle, ...]:
        return self._triangles

    def triangle(self, triangle_id: int) -> Triangle:
        return self._triangles[triangle_id]

    @property
    def gluings(self) -> Mapping[HalfEdgeRef, HalfEdgeRef]:
        return self._gluings

    def half_edges(self) -> List[HalfEdgeRef]:
        return [HalfEdgeRef(t, e) for t in range(len(self._triangles)) for e in range(3)]

    def opposite(self, half_edge: HalfEdgeRef) -> Optional[HalfEdgeRef]:
        return self._gluings.get(half_edge)

    def is_glued(self, half_edge: HalfEdgeRef) -> bool:
        return half_edge in self._gluings

    def transition(self, half_edge: HalfEdgeRef) -> Transition:
        try:
            return self._transitions[half_edge]
        except KeyError:
            raise BoundaryEdge(f"Half-edge {half_edge} is on the boundary.") from None

    @property
    def edges(self) -> Tuple[Tuple[HalfEdgeRef, Optional[HalfEdgeRef]], ...]:
        """Returns edges in canonical order, smaller half-edge first, boundary edges unpaired."""
        return self._edges

    def edge_id(self, half_edge: HalfEdgeRef) -> int:
        return self._edge_of[half_edge]

    def edge_half(self, edge_id: int) -> HalfEdgeRef:
        return self._edges[edge_id][0]

    def interior_edges(self) -> List[int]:
        return [index for index, (_, twin) in enumerate(self._edges) if twin is not None]

    def boundary_half_edges(self) -> List[HalfEdgeRef]:
        return [half for half in self.half_edges() if half not in self._gluings]

    @property
    def is_closed(self) -> bool:
        return len(self._gluings) == 3 * len(self._triangles)

    def vertex_of(self, corner: CornerRef) -> int:
        return self._vertex_of[CornerRef(*corner)]

    def vertex_corners(self, vertex: int) -> Tuple[CornerRef, ...]:
        return self._vertex_corners[vertex]

    @property
    def vertex_count(self) -> int:
        return len(self._vertex_corners)

    @property
    def auxiliary_corners(self) -> FrozenSet[CornerRef]:
        return self._auxiliary_corners

    @property
    def auxiliary_vertices(self) -> FrozenSet[int]:
        return self._auxiliary

    @property
    def cones(self) -> Tuple[ConeSummary, ...]:
        return self._cones

    def next_corner_ccw(self, corner: CornerRef) -> Optional[CornerRef]:
        """Returns the corner across the incoming edge of `corner`, ccw around its vertex."""
        partner = self._gluings.get(HalfEdgeRef(corner.triangle, (corner.corner - 1) % 3))
        if partner is None:
            return None
        return CornerRef(partner.triangle, partner.edge)

    def next_corner_cw(self, corner: CornerRef) -> Optional[CornerRef]:
        partner = self._gluings.get(HalfEdgeRef(corner.triangle, corner.corner))
        if partner is None:
            return None
        return CornerRef(partner.triangle, (partner.edge + 1) % 3)

    def _solve_transition(self, half_edge: HalfEdgeRef) -> Transition:
        partner = self._gluings[half_edge]
        source = self._triangles[half_edge.triangle]
        target = self._triangles[partner.triangle]
        return Transition.from_points(
            (source.point(half_edge.edge), source.point(half_edge.edge + 1)),
            (target.point(partner.edge + 1), target.point(partner.edge)),
        )

    def _enumerate_edges(self):
        edges = []
        edge_of: Dict[HalfEdgeRef, int] = {}
        for half_edge in self.half_edges():
            twin = self._gluings.get(half_edge)
            if twin is not None and twin < half_edge:
                continue
            edge_of[half_edge] = len(edges)
            if twin is not None:
                edge_of[twin] = len(edges)
            edges.append((half_edge, twin))
        return tuple(edges), MappingProxyType(edge_of)

    def _corner_orbits(self):
        vertex_of: Dict[CornerRef, int] = {}
        orbits: List[Tuple[CornerRef, ...]] = []
        for triangle_id in range(len(self._triangles)):
            for index in range(3):
                corner = CornerRef(triangle_id, index)
                if corner in vertex_of:
                    continue

                start = corner
                walker = self.next_corner_cw(corner)
                while walker is not None and walker != corner:
                    start = walker
                    walker = self.next_corner_cw(walker)
                if walker == corner:
                    start = corner

                orbit = [start]
                walker = self.next_corner_ccw(start)
                while walker is not None and walker != start:
                    orbit.append(walker)
                    walker = self.next_corner_ccw(walker)

                for member in orbit:
                    vertex_of[member] = len(orbits)
                orbits.append(tuple(orbit))
        return MappingProxyType(vertex_of), tuple(orbits)

    def _cone(self, vertex: int) -> ConeSummary:
        corners = self._vertex_corners[vertex]
        is_boundary = self.next_corner_cw(corners[0]) is None
        angle = 0.0
        placement = IDENTITY
        for position, corner in enumerate(corners):
            angle += self._triangles[corner.triangle].corner_angle(corner.corner)
            if is_boundary and position == len(corners) - 1:
                break
            incoming = HalfEdgeRef(corner.triangle, (corner.corner - 1) % 3)
            placement = placement.compose(self._transitions[incoming].inverse())

        if is_boundary:
            holonomy_arg = angle
        else:
            holonomy_arg = angle + wrap_angle(cmath.phase(placement.a) - angle)
        return ConeSummary(
            vertex=vertex,
            angle=angle,
            dilation=abs(placement.a),
            holonomy_arg=holonomy_arg,
            is_boundary=is_boundary,
            is_auxiliary=vertex in self._auxiliary,
            corners=corners,
        )


def check_triangle(triangle: Triangle) -> None:
    """Raises DegenerateTriangle unless the triangle is positively oriented with a real area."""
    diameter = triangle.diameter
    if not triangle.signed_area > AREA_EPSILON * diameter * diameter:
        raise DegenerateTriangle(
            f"Triangle {triangle.id} is degenerate or negatively oriented "
            f"(signed area {triangle.signed_area!r})."
        )


def build_surface(
    triangles: Sequence[Triangle],
    gluings: Iterable[Tuple[HalfEdgeRef, HalfEdgeRef]],
    auxiliary: Iterable[CornerRef] = (),
    name: str = "surface",
) -> Surface:
    """Validates the given triangles and gluings and returns the resulting Surface."""
    triangles = tuple(triangles)
    for index, triangle in enumerate(triangles):
        if triangle.id != index:
            raise SurfaceError(f"Triangle ids must be 0..{len(triangles) - 1} in order.")
        check_triangle(triangle)

    pairing: Dict[HalfEdgeRef, HalfEdgeRef] = {}
    for first, second in gluings:
        first, second = HalfEdgeRef(*first), HalfEdgeRef(*second)
        for half_edge in (first, second):
            if not (0 <= half_edge.triangle < len(triangles) and 0 <= half_edge.edge < 3):
                raise SurfaceError(f"Half-edge {half_edge} does not exist.")
        if first == second:
            raise DoubleGluing(f"Half-edge {first} cannot be glued to itself.")
        for half_edge in (first, second):
            if half_edge in pairing:
                raise DoubleGluing(f"Half-edge {half_edge} is glued twice.")
        pairing[first] = second
        pairing[second] = first

    auxiliary = tuple(CornerRef(*corner) for corner in auxiliary)
    for corner in auxiliary:
        if not (0 <= corner.triangle < len(triangles) and 0 <= corner.corner < 3):
            raise BadAuxiliary(f"Auxiliary corner {corner} does not exist.")

    surface = Surface(triangles, pairing, auxiliary, name)
    for cone in surface.cones:
        if not cone.is_auxiliary:
            continue
        if (
            cone.is_boundary
            or abs(cone.angle - TWO_PI) > ANGLE_TOLERANCE
            or abs(cone.dilation - 1) > ANGLE_TOLERANCE
        ):
            raise BadAuxiliary(
                f"Vertex {cone.vertex} is flagged auxiliary but is not a regular point "
                f"(angle {cone.angle!r}, dilation {cone.dilation!r})."
            )

    if surface.is_closed:
        info = euler_info(surface)
        if info.genus == 0 and info.marked_points < 3:
            raise SurfaceError("A closed surface of genus zero needs at least three singularities.")
        report = check_gauss_bonnet(surface)
        if not report.ok:
            warnings.warn(
                f"Gauss-Bonnet residuals ({report.r_angle}, {report.r_log}) exceed tolerance "
                f"on {name}."
            )
    logger.debug("built %r", surface)
    return surface


def transition_of(surface: Surface, half_edge: HalfEdgeRef) -> Transition:
    """Returns the chart change from the triangle of `half_edge` into the one across it."""
    return surface.transition(HalfEdgeRef(*half_edge))


def analyze_vertices(surface: Surface) -> List[ConeSummary]:
    return list(surface.cones)


def boundary_cycles(surface: Surface) -> List[List[HalfEdgeRef]]:
    """Groups boundary half-edges into cycles, each in the order the boundary is traversed."""
    cycles = []
    seen = set()
    for half_edge in surface.boundary_half_edges():
        if half_edge in seen:
            continue
        cycle = []
        walker = half_edge
        while walker not in seen:
            seen.add(walker)
            cycle.append(walker)
            corner = CornerRef(walker.triangle, (walker.edge + 1) % 3)
            while surface.is_glued(HalfEdgeRef(corner.triangle, corner.corner)):
                corner = surface.next_corner_cw(corner)
            walker = HalfEdgeRef(corner.triangle, corner.corner)
        cycles.append(cycle)
    return cycles


def euler_info(surface: Surface) -> SurfaceInfo:
    vertices = surface.vertex_count
    edges = len(surface.edges)
    faces = len(surface.triangles)
    chi = vertices - edges + faces
    boundary = len(boundary_cycles(surface))
    doubled_genus = 2 - boundary - chi
    if doubled_genus % 2 or doubled_genus < 0:
        raise NonOrientable(f"Euler characteristic {chi} with {boundary} boundary circles.")
    genus = doubled_genus // 2
    auxiliary = len(surface.auxiliary_vertices)
    if boundary == 0 and faces != 4 * genus - 4 + 2 * vertices:
        warnings.warn(f"{surface.name}: F={faces} but 4g-4+2n={4 * genus - 4 + 2 * vertices}.")
    return SurfaceInfo(
        vertices=vertices,
        edges=edges,
        faces=faces,
        euler_characteristic=chi,
        genus=genus,
        marked_points=vertices - auxiliary,
        auxiliary_points=auxiliary,
        boundary_components=boundary,
    )


def check_gauss_bonnet(surface: Surface) -> GaussBonnetReport:
    """Returns the residuals of sum(theta_i - 2pi) = 2pi(2g - 2) and sum(log lambda_i) = 0."""
    if not surface.is_closed:
        raise HasBoundary(f"{surface.name} has boundary; Gauss-Bonnet needs a closed surface.")
    chi = surface.vertex_count - len(surface.edges) + len(surface.triangles)
    genus = (2 - chi) // 2
    angle_excess = sum(cone.angle - TWO_PI for cone in surface.cones)
    log_sum = sum(math.log(cone.dilation) for cone in surface.cones)
    return GaussBonnetReport(
        r_angle=abs(angle_excess - TWO_PI * (2 * genus - 2)), r_log=abs(log_sum)
    )


def min_corner_angle(surface: Surface) -> float:
    return min(min(triangle.angles) for triangle in surface.triangles)
