"""Constructs the example families (flat tori, dilation tori, star spheres, big cylinders, the
two-cylinder fixture) and surfaces cut out of polygons with paired sides.
"""
import cmath
import logging
import math
from typing import Dict, List, Literal, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, ValidationError, field_validator, model_validator

from affine_flips.exceptions import BadPairing, BadParams, NonSimplePolygon
from affine_flips.surface import (
    CornerRef,
    HalfEdgeRef,
    Surface,
    Triangle,
    build_surface,
    cross,
)

logger = logging.getLogger(__name__)

FAMILIES = (
    "square_torus",
    "hex_torus",
    "dilation_torus",
    "star_sphere",
    "big_cylinder",
    "two_cylinder_fixture",
    "parallelogram_torus",
    "polygon",
)
EQUILATERAL_SHAPE = (0.5, math.sqrt(3) / 2)


class FamilyParams(BaseModel):
    """Parameters of one example family. Angles are in radians."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    family: Literal[
        "square_torus",
        "hex_torus",
        "dilation_torus",
        "star_sphere",
        "big_cylinder",
        "two_cylinder_fixture",
        "parallelogram_torus",
        "polygon",
    ]
    theta: float = math.pi / 3
    lam: float = 2.0
    sectors: int = 1
    thetas: Tuple[float, float, float] = (math.pi / 2, math.pi / 2, math.pi / 2)
    lams: Tuple[float, float, float] = (1.0, 1.0, 1.0)
    shape: Tuple[float, float] = EQUILATERAL_SHAPE
    u: Tuple[float, float] = (1.0, 0.0)
    v: Tuple[float, float] = (0.0, 1.0)
    vertices: Tuple[Tuple[float, float], ...] = ()
    pairing: Tuple[Tuple[int, int], ...] = ()

    @field_validator("lam")
    @classmethod
    def _positive_ratio(cls, value: float) -> float:
        if not value > 0:
            raise ValueError(f"dilation ratio must be positive, got {value}")
        return value

    @field_validator("lams")
    @classmethod
    def _positive_ratios(cls, value: Tuple[float, float, float]) -> Tuple[float, float, float]:
        if not all(ratio > 0 for ratio in value):
            raise ValueError(f"dilation ratios must be positive, got {value}")
        return value

    @field_validator("sectors")
    @classmethod
    def _some_sectors(cls, value: int) -> int:
        if value < 1:
            raise ValueError(f"need at least one sector, got {value}")
        return value

    @model_validator(mode="after")
    def _family_constraints(self) -> "FamilyParams":
        if self.family == "dilation_torus":
            _check_annulus(self.theta, self.lam, self.sectors, big=False)
        elif self.family == "big_cylinder":
            _check_annulus(self.theta, self.lam, self.sectors, big=True)
        elif self.family == "star_sphere":
            _check_star(self.thetas, complex(*self.shape))
        elif self.family == "two_cylinder_fixture":
            _check_annulus(self.theta, self.lam, 1, big=False)
        elif self.family == "parallelogram_torus":
            if not cross(complex(*self.u), complex(*self.v)) > 0:
                raise ValueError("u and v must form a positively oriented basis")
        return self


def _check_annulus(theta: float, lam: float, sectors: int, big: bool) -> None:
    if not lam > 0 or lam == 1:
        raise ValueError(f"dilation ratio must be positive and not 1, got {lam}")
    if big and not theta >= math.pi:
        raise ValueError(f"a big cylinder needs angle at least pi, got {theta}")
    if not big and not 0 < theta < math.pi:
        raise ValueError(f"a dilation torus needs angle in (0, pi), got {theta}")
    if not theta / sectors < math.pi:
        raise ValueError(f"{sectors} sectors leave a sector angle {theta / sectors} >= pi")


def _check_star(thetas: Sequence[float], shape: complex) -> None:
    if not all(0 < angle < math.pi for angle in thetas):
        raise ValueError(f"apex angles must lie in (0, pi), got {tuple(thetas)}")
    if not sum(thetas) < 3 * math.pi:
        raise ValueError("the fourth cone angle 4pi - sum(thetas) must exceed pi")
    if not shape.imag > 0:
        raise ValueError(f"central shape must have positive imaginary part, got {shape}")


def _validated(family: str, **params) -> FamilyParams:
    try:
        return FamilyParams(family=family, **params)
    except ValidationError as error:
        raise BadParams(f"{family}: {error.errors()[0]['msg']}") from error


def _torus_gluings() -> List[Tuple[HalfEdgeRef, HalfEdgeRef]]:
    return [
        (HalfEdgeRef(0, 2), HalfEdgeRef(1, 0)),
        (HalfEdgeRef(0, 0), HalfEdgeRef(1, 1)),
        (HalfEdgeRef(0, 1), HalfEdgeRef(1, 2)),
    ]


def build_parallelogram_torus(
    u: complex, v: complex, name: str = "parallelogram_torus"
) -> Surface:
    """Builds the flat torus C / (Zu + Zv) cut along the diagonal u + v."""
    if not cross(u, v) > 0:
        raise BadParams(f"{u} and {v} do not form a positively oriented basis.")
    triangles = [Triangle(0, 0j, u, u + v), Triangle(1, 0j, u + v, v)]
    return build_surface(triangles, _torus_gluings(), name=name)


def build_square_torus() -> Surface:
    return build_parallelogram_torus(1 + 0j, 1j, name="square_torus")


def build_hex_torus() -> Surface:
    omega = cmath.exp(1j * math.pi / 3)
    triangles = [Triangle(0, 0j, 1 + 0j, omega), Triangle(1, 1 + 0j, 1 + omega, omega)]
    gluings = [
        (HalfEdgeRef(0, 0), HalfEdgeRef(1, 1)),
        (HalfEdgeRef(0, 1), HalfEdgeRef(1, 2)),
        (HalfEdgeRef(0, 2), HalfEdgeRef(1, 0)),
    ]
    return build_surface(triangles, gluings, name="hex_torus")


def _annulus_sectors(theta: float, lam: float, sectors: int, name: str) -> Surface:
    """Builds the annulus sector of angle theta between radii 1 and lam as `sectors` trapezoids.

    Sector j has chord sides glued by the dilation lam and is joined to sector j + 1 along a
    radial side; the last radial side wraps onto the first by the rotation e^{-i theta}. The
    radial sides between sectors carry auxiliary marked points.
    """
    inner, outer = min(1.0, lam), max(1.0, lam)
    step = theta / sectors
    triangles = []
    gluings = []
    for sector in range(sectors):
        left = cmath.exp(1j * sector * step)
        right = cmath.exp(1j * (sector + 1) * step)
        low, high = 2 * sector, 2 * sector + 1
        triangles.append(Triangle(low, inner * left, outer * left, outer * right))
        triangles.append(Triangle(high, inner * left, outer * right, inner * right))
        gluings.append((HalfEdgeRef(low, 2), HalfEdgeRef(high, 0)))
        gluings.append((HalfEdgeRef(low, 1), HalfEdgeRef(high, 2)))
        gluings.append((HalfEdgeRef(high, 1), HalfEdgeRef(2 * ((sector + 1) % sectors), 0)))
    auxiliary = [CornerRef(2 * sector, 0) for sector in range(1, sectors)]
    return build_surface(triangles, gluings, auxiliary, name=name)


def build_dilation_torus(theta: float, lam: float, sectors: int = 1) -> Surface:
    """Builds the trapezoid with corners 1, lam, lam e^{i theta}, e^{i theta}. Radial sides are
    glued by a rotation, chord sides by the dilation lam. Its core curve is a hyperbolic cylinder
    of angle theta.
    """
    params = _validated("dilation_torus", theta=theta, lam=lam, sectors=sectors)
    return _annulus_sectors(params.theta, params.lam, params.sectors, "dilation_torus")


def build_big_cylinder(theta: float, lam: float, sectors: int) -> Surface:
    """Builds a cylinder of angle theta >= pi from `sectors` trapezoids of angle theta / sectors."""
    params = _validated("big_cylinder", theta=theta, lam=lam, sectors=sectors)
    return _annulus_sectors(params.theta, params.lam, params.sectors, "big_cylinder")


def build_star_sphere(
    thetas: Sequence[float],
    lams: Sequence[float],
    shape: complex = complex(*EQUILATERAL_SHAPE),
) -> Surface:
    """Builds a sphere from a central triangle (0, 1, shape) and three self-folded triangles.

    Self-folded triangle k hangs off central side k and has its apex at angle thetas[k] with
    dilation lams[k]. The remaining cone point has angle 4pi - sum(thetas) and dilation
    1 / prod(lams).
    """
    params = _validated(
        "star_sphere",
        thetas=tuple(thetas),
        lams=tuple(lams),
        shape=(shape.real, shape.imag),
    )
    central = (0j, 1 + 0j, shape)
    triangles = [Triangle(0, *central)]
    gluings = []
    for side, (angle, ratio) in enumerate(zip(params.thetas, params.lams)):
        start, end = central[side], central[(side + 1) % 3]
        similarity = ratio * cmath.exp(1j * angle)
        apex = (similarity * end - start) / (similarity - 1)
        folded = side + 1
        triangles.append(Triangle(folded, apex, end, start))
        gluings.append((HalfEdgeRef(folded, 0), HalfEdgeRef(folded, 2)))
        gluings.append((HalfEdgeRef(folded, 1), HalfEdgeRef(0, side)))
    return build_surface(triangles, gluings, name="star_sphere")


def _hexagon_cylinder(offset: int, phi: float, lam: float) -> Tuple[List[Triangle], List[tuple]]:
    middle = (1 + lam) / 2
    turn = cmath.exp(1j * phi)
    points = [
        (1 + 0j, middle, middle * turn),
        (1 + 0j, middle * turn, turn),
        (middle, lam + 0j, lam * turn),
        (middle, lam * turn, middle * turn),
    ]
    triangles = [Triangle(offset + index, *corners) for index, corners in enumerate(points)]

    def ref(triangle: int, edge: int) -> HalfEdgeRef:
        return HalfEdgeRef(offset + triangle, edge)

    gluings = [
        (ref(0, 1), ref(3, 2)),
        (ref(0, 2), ref(1, 0)),
        (ref(2, 2), ref(3, 0)),
        (ref(2, 1), ref(1, 2)),
    ]
    return triangles, gluings


def build_two_cylinder_fixture(phi: float = 0.6 * math.pi, lam: float = 2.0) -> Surface:
    """Builds a genus-2 surface from two hyperbolic cylinders of angle phi, each a trapezoid
    whose radial sides are split at their midpoints; the halves are glued across the two cylinders.
    """
    params = _validated("two_cylinder_fixture", theta=phi, lam=lam)
    first, first_gluings = _hexagon_cylinder(0, params.theta, params.lam)
    second, second_gluings = _hexagon_cylinder(4, params.theta, params.lam)
    cross_gluings = [
        (HalfEdgeRef(0, 0), HalfEdgeRef(7, 1)),
        (HalfEdgeRef(2, 0), HalfEdgeRef(3, 1)),
        (HalfEdgeRef(1, 1), HalfEdgeRef(4, 0)),
        (HalfEdgeRef(6, 0), HalfEdgeRef(5, 1)),
    ]
    return build_surface(
        first + second, first_gluings + second_gluings + cross_gluings, name="two_cylinder"
    )


def _segments_cross(p: complex, q: complex, r: complex, s: complex) -> bool:
    d1 = cross(q - p, r - p)
    d2 = cross(q - p, s - p)
    d3 = cross(s - r, p - r)
    d4 = cross(s - r, q - r)
    return ((d1 > 0) != (d2 > 0) or d1 == 0 or d2 == 0) and (
        (d3 > 0) != (d4 > 0) or d3 == 0 or d4 == 0
    )


def _check_simple(points: Sequence[complex]) -> None:
    count = len(points)
    if count < 3:
        raise NonSimplePolygon(f"A polygon needs at least 3 vertices, got {count}.")
    if len(set(points)) != count:
        raise NonSimplePolygon("Polygon repeats a vertex.")
    for first in range(count):
        for second in range(first + 1, count):
            if second == first + 1 or (first == 0 and second == count - 1):
                continue
            if _segments_cross(
                points[first],
                points[(first + 1) % count],
                points[second],
                points[(second + 1) % count],
            ):
                raise NonSimplePolygon(f"Polygon sides {first} and {second} intersect.")


def _clip_ears(points: Sequence[complex]) -> List[Tuple[int, int, int]]:
    remaining = list(range(len(points)))
    ears = []
    scale = max(abs(a - b) for a in points for b in points) ** 2
    while len(remaining) > 3:
        for position, current in enumerate(remaining):
            previous = remaining[position - 1]
            following = remaining[(position + 1) % len(remaining)]
            a, b, c = points[previous], points[current], points[following]
            if not cross(b - a, c - a) > 1e-12 * scale:
                continue
            inside = any(
                cross(b - a, points[other] - a) >= 0
                and cross(c - b, points[other] - b) >= 0
                and cross(a - c, points[other] - c) >= 0
                for other in remaining
                if other not in (previous, current, following)
            )
            if not inside:
                ears.append((previous, current, following))
                remaining.pop(position)
                break
        else:
            raise NonSimplePolygon("Polygon has no ear; it is not simple.")
    ears.append(tuple(remaining))
    return ears


def build_from_polygon(
    vertices: Sequence[complex], pairing: Sequence[Tuple[int, int]], name: str = "polygon"
) -> Surface:
    """Triangulates a simple polygon by ear clipping and glues side i (v_i -> v_i+1) to side j
    with the direction reversed, for each pair (i, j) of the perfect matching `pairing`.
    """
    points = [complex(point) for point in vertices]
    count = len(points)
    _check_simple(points)
    sides = [side for pair in pairing for side in pair]
    if sorted(sides) != list(range(count)):
        raise BadPairing(
            f"Side pairing {list(pairing)} is not a perfect matching of {count} sides."
        )

    area = sum(cross(points[index], points[(index + 1) % count]) for index in range(count))
    side_map: Dict[int, int] = {side: side for side in range(count)}
    if area < 0:
        points = points[::-1]
        side_map = {side: (count - 2 - side) % count for side in range(count)}

    triangles = []
    half_edge_of: Dict[Tuple[int, int], HalfEdgeRef] = {}
    for triangle_id, corners in enumerate(_clip_ears(points)):
        triangles.append(Triangle(triangle_id, *(points[corner] for corner in corners)))
        for edge in range(3):
            half_edge_of[(corners[edge], corners[(edge + 1) % 3])] = HalfEdgeRef(triangle_id, edge)

    gluings = []
    for (start, end), half_edge in half_edge_of.items():
        if (end - start) % count == 1:
            continue
        if start < end:
            gluings.append((half_edge, half_edge_of[(end, start)]))

    def side_half_edge(side: int) -> HalfEdgeRef:
        mapped = side_map[side]
        return half_edge_of[(mapped, (mapped + 1) % count)]

    for first, second in pairing:
        gluings.append((side_half_edge(first), side_half_edge(second)))
    logger.debug("polygon %s triangulated into %d triangles", name, len(triangles))
    return build_surface(triangles, gluings, name=name)


def build_family(params: FamilyParams) -> Surface:
    """Builds the surface described by validated family parameters."""
    family = params.family
    if family == "square_torus":
        return build_square_torus()
    if family == "hex_torus":
        return build_hex_torus()
    if family == "dilation_torus":
        return build_dilation_torus(params.theta, params.lam, params.sectors)
    if family == "big_cylinder":
        return build_big_cylinder(params.theta, params.lam, params.sectors)
    if family == "star_sphere":
        return build_star_sphere(params.thetas, params.lams, complex(*params.shape))
    if family == "two_cylinder_fixture":
        return build_two_cylinder_fixture(params.theta, params.lam)
    if family == "parallelogram_torus":
        return build_parallelogram_torus(complex(*params.u), complex(*params.v))
    return build_from_polygon([complex(*point) for point in params.vertices], params.pairing)


def parse_family(family: str, values: Optional[Dict[str, object]] = None) -> FamilyParams:
    """Validates raw (for example command-line) values for `family`, raising BadParams."""
    if family not in FAMILIES:
        raise BadParams(f"Unknown family {family!r}; choose one of {', '.join(FAMILIES)}.")
    return _validated(family, **(values or {}))
