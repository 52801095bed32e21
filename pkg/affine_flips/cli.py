"""Command-line interface: one subcommand per operation.

Results go to stdout and are deterministic; logging goes to stderr. Exits with 2 when a surface,
path or parameter is invalid and with 1 on usage errors.
"""
import argparse
import cmath
import logging
import math
import sys
from typing import Dict, List, Optional, Sequence, Tuple

from affine_flips import __version__
from affine_flips.builders import FAMILIES, build_family, parse_family
from affine_flips.config import DEFAULT_BUDGET, DEFAULT_WORKERS, LOG_LEVEL
from affine_flips.cylinders import (
    DEFAULT_MAX_PERIOD,
    canonical_decomposition,
    detect_cylinders,
    triangulability_verdict,
)
from affine_flips.developing import surface_kind
from affine_flips.exceptions import SurfaceError
from affine_flips.flip_graph import alpha_lower_bound, explore_flip_graph, min_angle
from affine_flips.flips import flip_move
from affine_flips.geodesics import (
    CrossEdge,
    ExitBoundary,
    HitVertex,
    LimitCycle,
    TrajectoryEvent,
    enumerate_saddle_connections,
    straighten,
    trace,
)
from affine_flips.render import flip_graph_dot, render_development_png, render_svg
from affine_flips.surface import CornerRef, HalfEdgeRef, Surface, check_gauss_bonnet, euler_info
from affine_flips.surface_file import dump_surface, load_surface, save_surface
from affine_flips.sweep import parse_angle, parse_grid, parse_value, run_sweep, sweep_csv

logger = logging.getLogger(__name__)

USAGE_ERROR = 1
INVALID = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}")


def _number(value: float) -> str:
    return format(value, ".12g")


def _point(z: complex) -> str:
    return f"{_number(z.real)},{_number(z.imag)}"


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as output:
        output.write(text)


def _ref(token: str) -> Tuple[int, int]:
    triangle, sep, index = token.strip().partition(":")
    if not sep or not triangle.isdigit() or not index.isdigit():
        raise UsageError(f"expected <triangle>:<index>, got {token!r}")
    return int(triangle), int(index)


def _word(text: str) -> List[HalfEdgeRef]:
    return [HalfEdgeRef(*_ref(token)) for token in text.split(",") if token.strip()]


def _family_values(pairs: Sequence[str]) -> Dict[str, object]:
    """Parses `name=value` pairs; `vertices` and `pairing` take comma separated `a|b` items."""
    values: Dict[str, object] = {}
    for pair in pairs:
        name, sep, text = pair.partition("=")
        if not sep:
            raise UsageError(f"expected name=value, got {pair!r}")
        if name in ("vertices", "pairing"):
            items = [tuple(float(part) for part in item.split("|")) for item in text.split(",")]
            if name == "pairing":
                items = [tuple(int(part) for part in item) for item in items]
            values[name] = tuple(items)
        else:
            values[name] = parse_value(name, text)
    return values


def cmd_validate(args) -> List[str]:
    surface = load_surface(args.surface)
    info = euler_info(surface)
    return [f"ok {surface.name}: V={info.vertices} E={info.edges} F={info.faces}"]


def cmd_info(args) -> List[str]:
    surface = load_surface(args.surface)
    info = euler_info(surface)
    lines = [
        f"name {surface.name}",
        f"kind {surface_kind(surface).value}",
        f"vertices {info.vertices} edges {info.edges} faces {info.faces}",
        f"euler_characteristic {info.euler_characteristic} genus {info.genus}",
        f"marked_points {info.marked_points} auxiliary_points {info.auxiliary_points}",
        f"boundary_components {info.boundary_components}",
        f"min_angle {_number(min_angle(surface))}",
    ]
    for cone in surface.cones:
        flags = "".join(
            (" boundary" if cone.is_boundary else "", " auxiliary" if cone.is_auxiliary else "")
        )
        lines.append(
            f"vertex {cone.vertex} angle {_number(cone.angle)} "
            f"({_number(cone.angle / math.pi)}pi) dilation {_number(cone.dilation)} "
            f"holonomy_arg {_number(cone.holonomy_arg)}{flags}"
        )
    if surface.is_closed:
        report = check_gauss_bonnet(surface)
        lines.append(
            f"gauss_bonnet r_angle {_number(report.r_angle)} r_log {_number(report.r_log)} "
            f"{'ok' if report.ok else 'FAILED'}"
        )
    return lines


def _emit_surface(surface: Surface, out: Optional[str]) -> List[str]:
    if out:
        save_surface(surface, out)
        return [f"wrote {out}"]
    return dump_surface(surface).splitlines()


def cmd_flip(args) -> List[str]:
    surface, move = flip_move(load_surface(args.surface), args.edge)
    logger.info("edge %d became edge %d", move.removed, move.inserted)
    return _emit_surface(surface, args.out)


def cmd_alpha(args) -> List[str]:
    bound = alpha_lower_bound(load_surface(args.surface), args.budget)
    return [f"alpha_hat {_number(bound.alpha_hat)} exact {str(bound.alpha_exact).lower()}"]


def cmd_explore(args) -> List[str]:
    report = explore_flip_graph(
        load_surface(args.surface), budget=args.budget, depth=args.depth, workers=args.workers
    )
    if args.dot:
        _write(args.dot, flip_graph_dot(report))
    lines = [
        f"states {len(report.nodes)} flips {report.graph.number_of_edges()}",
        f"frontier_exhausted {str(report.frontier_exhausted).lower()}",
        f"alpha_hat {_number(report.alpha_hat)} exact {str(report.alpha_exact).lower()} "
        f"witness n{report.label(report.witness)}",
    ]
    return lines + [f"note {note}" for note in report.notes]


def _describe_event(event: TrajectoryEvent) -> str:
    if isinstance(event, CrossEdge):
        return f"cross {event.half_edge} {_number(event.t)}"
    if isinstance(event, ExitBoundary):
        return f"exit {event.half_edge} {_number(event.t)}"
    if isinstance(event, HitVertex):
        return f"vertex {event.vertex}"
    if isinstance(event, LimitCycle):
        word = ",".join(str(half_edge) for half_edge in event.word)
        return f"limit_cycle {word} factor {_number(event.factor)}"
    return "budget_exhausted"


def cmd_trace(args) -> List[str]:
    surface = load_surface(args.surface)
    x, sep, y = args.at.partition(",")
    if not sep:
        raise UsageError(f"--at expects X,Y, got {args.at!r}")
    start = complex(float(x), float(y))
    direction = cmath.exp(1j * parse_angle(args.dir))
    events = trace(surface, args.tri, start, direction, args.max)
    return [_describe_event(event) for event in events]


def cmd_saddles(args) -> List[str]:
    connections = enumerate_saddle_connections(load_surface(args.surface), args.depth)
    return [
        f"{connection.start} -> {connection.end} vector {_point(connection.vector)} "
        f"word {','.join(str(half_edge) for half_edge in connection.word) or '-'}"
        for connection in connections
    ]


def cmd_cylinders(args) -> List[str]:
    surface = load_surface(args.surface)
    lines = []
    for record in detect_cylinders(surface, args.period):
        lines.append(
            f"{record.kind} word {','.join(str(half_edge) for half_edge in record.word)} "
            f"a {_point(record.a)} beta {_number(record.beta)} modulus {_number(record.modulus)} "
            f"triangles {','.join(str(triangle) for triangle in sorted(record.triangles))}"
        )
    return lines


def cmd_verdict(args) -> List[str]:
    surface = load_surface(args.surface)
    lines = [str(triangulability_verdict(surface, args.period))]
    decomposition = canonical_decomposition(surface, args.period)
    lines.append(
        "triangulable_triangles "
        + (",".join(str(t) for t in sorted(decomposition.triangulable_triangles)) or "-")
    )
    return lines


def cmd_straighten(args) -> List[str]:
    surface = load_surface(args.surface)
    result = straighten(surface, CornerRef(*_ref(args.start)), _word(args.word), args.end)
    lines = [
        f"point {_point(point)} vertex {vertex}"
        for point, vertex in zip(result.points, result.vertices)
    ]
    if result.saddle_connection is not None:
        lines.append("saddle_connection")
    return lines


def cmd_build(args) -> List[str]:
    surface = build_family(parse_family(args.family, _family_values(args.params)))
    return _emit_surface(surface, args.out)


def cmd_render(args) -> List[str]:
    surface = load_surface(args.surface)
    highlight = frozenset()
    if args.cylinders:
        for record in detect_cylinders(surface, args.period):
            highlight |= record.triangles
    written = []
    if args.svg:
        _write(args.svg, render_svg(surface, highlight=highlight))
        written.append(f"wrote {args.svg}")
    if args.png:
        render_development_png(surface, highlight=highlight).save(args.png, format="PNG")
        written.append(f"wrote {args.png}")
    if not written:
        raise UsageError("render needs --svg or --png")
    return written


def cmd_sweep(args) -> List[str]:
    rows = run_sweep(parse_grid(args.family, args.grid), budget=args.budget)
    text = sweep_csv(rows)
    if args.csv:
        _write(args.csv, text)
        return [f"wrote {args.csv} ({len(rows)} rows)"]
    return text.splitlines()


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="affine-flips", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="count", default=0)
    commands = parser.add_subparsers(dest="command", parser_class=_Parser)
    commands.required = True

    def command(name: str, handler, help_text: str, surface: bool = True):
        sub = commands.add_parser(name, help=help_text)
        if surface:
            sub.add_argument("surface", help="path to a .surface file")
        sub.set_defaults(handler=handler)
        return sub

    command("validate", cmd_validate, "check a surface file")
    command("info", cmd_info, "Euler data, cone angles and dilations")
    sub = command("flip", cmd_flip, "flip one edge")
    sub.add_argument("--edge", type=int, required=True)
    sub.add_argument("--out")
    sub = command("alpha", cmd_alpha, "lower bound for the best minimal angle")
    sub.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    sub = command("explore", cmd_explore, "explore the flip graph")
    sub.add_argument("--depth", type=int)
    sub.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    sub.add_argument("--workers", type=int, default=DEFAULT_WORKERS)
    sub.add_argument("--dot")
    sub = command("trace", cmd_trace, "follow a straight trajectory")
    sub.add_argument("--tri", type=int, required=True)
    sub.add_argument("--at", required=True, help="X,Y in the triangle's chart")
    sub.add_argument("--dir", required=True, help="angle in radians, or deg:<degrees>")
    sub.add_argument("--max", type=int, default=DEFAULT_BUDGET)
    sub = command("saddles", cmd_saddles, "enumerate saddle connections")
    sub.add_argument("--depth", type=int, default=4)
    sub = command("cylinders", cmd_cylinders, "detect maximal cylinders")
    sub.add_argument("--period", type=int, default=DEFAULT_MAX_PERIOD)
    sub = command("verdict", cmd_verdict, "triangulability at the true singularities")
    sub.add_argument("--period", type=int, default=DEFAULT_MAX_PERIOD)
    sub = command("straighten", cmd_straighten, "geodesic representative of an arc")
    sub.add_argument("--start", required=True, help="starting corner t:c")
    sub.add_argument("--word", default="", help="crossed half-edges t:e,t:e,...")
    sub.add_argument("--end", type=int, required=True, help="corner of the last triangle")
    sub = command("build", cmd_build, "build an example surface", surface=False)
    sub.add_argument("family", choices=FAMILIES)
    sub.add_argument("params", nargs="*", help="name=value, angles may use deg:")
    sub.add_argument("--out")
    sub = command("render", cmd_render, "draw the development")
    sub.add_argument("--svg")
    sub.add_argument("--png")
    sub.add_argument("--cylinders", action="store_true", help="shade detected cylinders")
    sub.add_argument("--period", type=int, default=DEFAULT_MAX_PERIOD)
    sub = command("sweep", cmd_sweep, "sweep a family over a parameter grid", surface=False)
    sub.add_argument("--family", required=True, choices=FAMILIES)
    sub.add_argument("--grid", required=True)
    sub.add_argument("--csv")
    sub.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    return parser


def _configure_logging(verbose: int) -> None:
    level = {0: LOG_LEVEL, 1: "INFO"}.get(verbose, "DEBUG")
    logging.basicConfig(
        level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s"
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as error:
        print(error, file=sys.stderr)
        return USAGE_ERROR
    _configure_logging(args.verbose)
    try:
        lines = args.handler(args)
    except UsageError as error:
        print(f"affine-flips: {error}", file=sys.stderr)
        return USAGE_ERROR
    except SurfaceError as error:
        print(f"affine-flips: {type(error).__name__}: {error}", file=sys.stderr)
        return INVALID
    except (OSError, ValueError) as error:
        print(f"affine-flips: {error}", file=sys.stderr)
        return USAGE_ERROR
    for line in lines:
        print(line)
    return 0


if __name__ == "__main__":
    sys.exit(main())
