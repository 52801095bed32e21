"""Reads and writes the line-oriented `.surface` text format.

    surface <name>
    triangle <id> <x0> <y0> <x1> <y1> <x2> <y2>
    glue <t>:<e> <t>:<e>
    aux <t>:<corner>

Blank lines and `#` comments are ignored; any other directive is rejected.
"""
import logging
import os
from typing import Dict, List, Tuple

from affine_flips.config import FILE_FORMAT_DIGITS
from affine_flips.exceptions import DegenerateTriangle, DoubleGluing, SurfaceSyntaxError
from affine_flips.surface import (
    CornerRef,
    HalfEdgeRef,
    Surface,
    Triangle,
    build_surface,
    check_triangle,
)

logger = logging.getLogger(__name__)

EXTENSION = ".surface"


def _number(token: str, line: int) -> float:
    try:
        return float(token)
    except ValueError:
        raise SurfaceSyntaxError(line, f"{token!r} is not a number.") from None


def _pair(token: str, line: int, what: str) -> Tuple[int, int]:
    first, sep, second = token.partition(":")
    if not sep or not first.isdigit() or not second.isdigit():
        raise SurfaceSyntaxError(line, f"Expected <triangle>:<{what}>, got {token!r}.")
    index = int(second)
    if index > 2:
        raise SurfaceSyntaxError(line, f"{what} index must be 0, 1 or 2, got {index}.")
    return int(first), index


def parse_surface(text: str) -> Surface:
    """Parses `.surface` text into a validated Surface."""
    name = "surface"
    triangles: Dict[int, Tuple[int, Triangle]] = {}
    gluings: List[Tuple[HalfEdgeRef, HalfEdgeRef]] = []
    glued: Dict[HalfEdgeRef, int] = {}
    auxiliary: List[CornerRef] = []

    for number, raw in enumerate(text.splitlines(), start=1):
        content = raw.split("#", 1)[0].strip()
        if not content:
            continue
        directive, *tokens = content.split()

        if directive == "surface":
            if not tokens:
                raise SurfaceSyntaxError(number, "surface needs a name.")
            name = " ".join(tokens)
        elif directive == "triangle":
            if len(tokens) != 7 or not tokens[0].isdigit():
                raise SurfaceSyntaxError(number, "triangle takes an id and six coordinates.")
            triangle_id = int(tokens[0])
            if triangle_id in triangles:
                raise SurfaceSyntaxError(number, f"Triangle {triangle_id} is defined twice.")
            x0, y0, x1, y1, x2, y2 = (_number(token, number) for token in tokens[1:])
            triangle = Triangle(triangle_id, complex(x0, y0), complex(x1, y1), complex(x2, y2))
            try:
                check_triangle(triangle)
            except DegenerateTriangle as error:
                raise DegenerateTriangle(f"line {number}: {error}") from None
            triangles[triangle_id] = (number, triangle)
        elif directive == "glue":
            if len(tokens) != 2:
                raise SurfaceSyntaxError(number, "glue takes two half-edges.")
            first = HalfEdgeRef(*_pair(tokens[0], number, "edge"))
            second = HalfEdgeRef(*_pair(tokens[1], number, "edge"))
            if first == second:
                raise DoubleGluing(f"line {number}: Half-edge {first} cannot be glued to itself.")
            for half_edge in (first, second):
                if half_edge in glued:
                    raise DoubleGluing(
                        f"line {number}: Half-edge {half_edge} is already glued "
                        f"on line {glued[half_edge]}."
                    )
                glued[half_edge] = number
            gluings.append((first, second))
        elif directive == "aux":
            if len(tokens) != 1:
                raise SurfaceSyntaxError(number, "aux takes one corner.")
            auxiliary.append(CornerRef(*_pair(tokens[0], number, "corner")))
        else:
            raise SurfaceSyntaxError(number, f"Unknown directive {directive!r}.")

    if sorted(triangles) != list(range(len(triangles))):
        raise SurfaceSyntaxError(None, f"Triangle ids must be 0..{len(triangles) - 1}.")
    ordered = [triangles[index][1] for index in range(len(triangles))]
    return build_surface(ordered, gluings, auxiliary, name=name)


def _format(value: float) -> str:
    text = format(value, f".{FILE_FORMAT_DIGITS}g")
    return "0" if text == "-0" else text


def dump_surface(surface: Surface) -> str:
    """Serializes a surface; numbers carry enough digits to read back the same doubles."""
    lines = [f"surface {surface.name}"]
    for triangle in surface.triangles:
        coordinates = " ".join(
            f"{_format(point.real)} {_format(point.imag)}" for point in triangle.points
        )
        lines.append(f"triangle {triangle.id} {coordinates}")
    for first, second in sorted(surface.gluings.items()):
        if first < second:
            lines.append(f"glue {first} {second}")
    for corner in sorted(surface.auxiliary_corners):
        lines.append(f"aux {corner}")
    return "\n".join(lines) + "\n"


def load_surface(path: str) -> Surface:
    with open(path, encoding="utf-8") as surface_file:
        return parse_surface(surface_file.read())


def save_surface(surface: Surface, path: str) -> None:
    """Writes atomically: a temporary file next to `path`, then a rename over it."""
    temporary = path + ".tmp"
    with open(temporary, "w", encoding="utf-8") as surface_file:
        surface_file.write(dump_surface(surface))
    os.replace(temporary, path)
    logger.debug("saved %s to %s", surface.name, path)
