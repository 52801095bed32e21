"""Draws developments of surfaces (SVG and PNG) and explored flip graphs (Graphviz DOT)."""
import logging
import math
from collections import deque
from typing import Dict, Iterable, List, Optional, Sequence, Tuple
from xml.sax.saxutils import escape

from PIL import Image, ImageDraw, ImageFont

from affine_flips.config import SVG_DECIMALS
from affine_flips.developing import develop_strip
from affine_flips.flip_graph import FlipGraphReport
from affine_flips.surface import IDENTITY, CornerRef, HalfEdgeRef, Surface, Transition

logger = logging.getLogger(__name__)

Layout = List[Tuple[int, Transition]]

TRIANGLE_FILL = "#ffffff"
CYLINDER_FILL = "#9ecae1"
STROKE = "#000000"
LABEL_COLOR = "#666666"
FONT_SIZE = 10

PREAMBLE = """\
<?xml version="1.0" standalone="no"?>
<!DOCTYPE svg PUBLIC "-//W3C//DTD SVG 1.1//EN"
"http://www.w3.org/Graphics/SVG/1.1/DTD/svg11.dtd">
<svg width="{width}" height="{height}" viewBox="{left} {top} {width} {height}" \
version="1.1" xmlns="http://www.w3.org/2000/svg">
<title>{title}</title>
"""
POSTAMBLE = "</svg>\n"


def development_layout(surface: Surface) -> Layout:
    """Places every triangle once, walking the dual graph breadth-first from triangle 0."""
    placements: Dict[int, Transition] = {0: IDENTITY}
    layout: Layout = [(0, IDENTITY)]
    queue = deque([0])
    while queue:
        triangle_id = queue.popleft()
        for edge in range(3):
            half_edge = HalfEdgeRef(triangle_id, edge)
            partner = surface.opposite(half_edge)
            if partner is None or partner.triangle in placements:
                continue
            placement = placements[triangle_id].compose(surface.transition(half_edge).inverse())
            placements[partner.triangle] = placement
            layout.append((partner.triangle, placement))
            queue.append(partner.triangle)
    return layout


def strip_layout(surface: Surface, start: int, crossings: Sequence[HalfEdgeRef]) -> Layout:
    """Lays out the triangles met along a dual path, each in the chart of the first one."""
    return list(develop_strip(surface, start, crossings).placements)


def _placed_points(surface: Surface, layout: Layout) -> List[Tuple[int, Tuple[complex, ...]]]:
    return [
        (triangle_id, tuple(placement(point) for point in surface.triangle(triangle_id).points))
        for triangle_id, placement in layout
    ]


def _vertex_labels(
    surface: Surface, placed: List[Tuple[int, Tuple[complex, ...]]]
) -> List[Tuple[complex, str]]:
    labels = []
    seen = set()
    for triangle_id, points in placed:
        for corner in range(3):
            vertex = surface.vertex_of(CornerRef(triangle_id, corner))
            if vertex in seen:
                continue
            seen.add(vertex)
            cone = surface.cones[vertex]
            text = f"v{vertex} ({cone.angle / math.pi:.3f}pi, {cone.dilation:.3f})"
            labels.append((points[corner], text))
    return labels


class SvgCanvas:
    """Collects elements and their extent; the y axis is flipped so that up is up."""

    def __init__(self, scale: float = 100.0):
        self.scale = scale
        self.min_x = self.max_x = self.min_y = self.max_y = None
        self.commands: List[str] = []

    def _xy(self, z: complex) -> Tuple[float, float]:
        return z.real * self.scale, -z.imag * self.scale

    def _number(self, value: float) -> str:
        text = f"{value:.{SVG_DECIMALS}f}"
        return text[1:] if text == f"-{0:.{SVG_DECIMALS}f}" else text

    def require(self, x: float, y: float) -> None:
        if self.min_x is None:
            self.min_x = self.max_x = x
            self.min_y = self.max_y = y
        else:
            self.min_x = min(self.min_x, x)
            self.max_x = max(self.max_x, x)
            self.min_y = min(self.min_y, y)
            self.max_y = max(self.max_y, y)

    def polygon(self, points: Iterable[complex], fill: str = TRIANGLE_FILL, tag: str = "") -> None:
        coordinates = []
        for point in points:
            x, y = self._xy(point)
            self.require(x, y)
            coordinates.append(f"{self._number(x)},{self._number(y)}")
        data = f' data-triangle="{tag}"' if tag else ""
        self.commands.append(
            f'<polygon points="{" ".join(coordinates)}"{data} '
            f'style="fill:{fill};stroke:{STROKE};stroke-width:1"/>'
        )

    def text(self, at: complex, text: str) -> None:
        x, y = self._xy(at)
        self.require(x, y)
        self.commands.append(
            f'<text x="{self._number(x)}" y="{self._number(y)}" fill="{LABEL_COLOR}" '
            f'font-size="{FONT_SIZE}" font-family="monospace">{escape(text)}</text>'
        )

    def render(self, title: str) -> str:
        if self.min_x is None:
            self.require(0.0, 0.0)
        pad = max(self.max_x - self.min_x, self.max_y - self.min_y, 1.0) * 0.1
        header = PREAMBLE.format(
            left=self._number(self.min_x - pad),
            top=self._number(self.min_y - pad),
            width=self._number(self.max_x - self.min_x + 2 * pad),
            height=self._number(self.max_y - self.min_y + 2 * pad),
            title=escape(title),
        )
        return header + "".join(command + "\n" for command in self.commands) + POSTAMBLE


def render_svg(
    surface: Surface,
    layout: Optional[Layout] = None,
    highlight: Iterable[int] = (),
    labels: bool = True,
) -> str:
    """Draws `layout` (the whole complex by default) as SVG 1.1, with `highlight` shaded.

    Vertices are labeled with their cone angle, in units of pi, and their dilation.
    """
    layout = development_layout(surface) if layout is None else layout
    shaded = frozenset(highlight)
    placed = _placed_points(surface, layout)
    canvas = SvgCanvas()
    for triangle_id, points in placed:
        fill = CYLINDER_FILL if triangle_id in shaded else TRIANGLE_FILL
        canvas.polygon(points, fill, tag=str(triangle_id))
    if labels:
        for at, text in _vertex_labels(surface, placed):
            canvas.text(at, text)
    logger.debug("rendered %d triangles of %s", len(placed), surface.name)
    return canvas.render(surface.name)


def render_development_png(
    surface: Surface,
    layout: Optional[Layout] = None,
    highlight: Iterable[int] = (),
    size: int = 512,
) -> Image.Image:
    """Rasterizes the drawing of render_svg into a `size` x `size` image."""
    layout = development_layout(surface) if layout is None else layout
    shaded = frozenset(highlight)
    placed = _placed_points(surface, layout)
    everything = [point for _, points in placed for point in points]
    left = min(point.real for point in everything)
    bottom = min(point.imag for point in everything)
    extent = max(
        max(point.real for point in everything) - left,
        max(point.imag for point in everything) - bottom,
        1e-12,
    )
    margin = size * 0.05
    scale = (size - 2 * margin) / extent

    def pixel(z: complex) -> Tuple[float, float]:
        return margin + (z.real - left) * scale, size - margin - (z.imag - bottom) * scale

    image = Image.new("RGB", (size, size), TRIANGLE_FILL)
    draw = ImageDraw.Draw(image)
    for triangle_id, points in placed:
        fill = CYLINDER_FILL if triangle_id in shaded else TRIANGLE_FILL
        draw.polygon([pixel(point) for point in points], fill=fill, outline=STROKE)
    font = ImageFont.load_default()
    for at, text in _vertex_labels(surface, placed):
        draw.text(pixel(at), text, font=font, fill=LABEL_COLOR)
    return image


def _dot_quote(text: str) -> str:
    return '"' + text.replace('"', '\\"') + '"'


def flip_graph_dot(report: FlipGraphReport) -> str:
    """Writes an exploration as a Graphviz digraph, nodes in discovery order."""
    graph = report.graph
    ordered = sorted(graph.nodes, key=report.label)
    lines = ["digraph flips {", "  node [shape=box];"]
    for key in ordered:
        data = graph.nodes[key]
        text = f"n{data['order']}\\nmin {data['min_angle']:.6f}\\ndepth {data['depth']}"
        style = ", style=bold" if key == report.witness else ""
        lines.append(f"  n{data['order']} [label={_dot_quote(text)}{style}];")
    edges = sorted(
        graph.edges(data=True),
        key=lambda item: (report.label(item[0]), item[2]["edge"], report.label(item[1])),
    )
    for parent, child, data in edges:
        lines.append(
            f"  n{report.label(parent)} -> n{report.label(child)} "
            f"[label={_dot_quote(str(data['edge']))}];"
        )
    lines.append("}")
    return "\n".join(lines) + "\n"
