"""Explores the graph of geometric triangulations under flips and bounds the largest achievable
minimal angle from below.
"""
import json
import logging
import math
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import networkx as nx

from affine_flips.config import ANGLE_TOLERANCE, DEFAULT_BUDGET, DEFAULT_WORKERS, KEY_QUANTUM
from affine_flips.cylinders import CylinderRecord
from affine_flips.developing import surface_kind
from affine_flips.exceptions import BudgetZero, IncompatibleTargets
from affine_flips.flips import FlipMove, flip_move, flippable_edges
from affine_flips.surface import CornerRef, HalfEdgeRef, Surface, min_corner_angle

logger = logging.getLogger(__name__)

EQUILATERAL_ANGLE = math.pi / 3
BOUND_SLACK = 1e-6
SHAPE_TIE = 1e-7

FOUND = "found"
NOT_FOUND_WITHIN_BUDGET = "not_found_within_budget"


def min_angle(surface: Surface) -> float:
    """Returns the smallest corner angle over all triangles."""
    return min_corner_angle(surface)


def _quantize(value: float) -> int:
    return int(round(value / KEY_QUANTUM))


def _normalized_shape(surface: Surface, triangle_id: int, shift: int) -> Tuple[int, complex]:
    """Returns the apex after the similarity sending the longest edge to [0, 1].

    Near-equal longest edges resolve to the first one counted from `shift`, so the apex stays
    within distance 1 of both ends of the unit segment.
    """
    triangle = surface.triangle(triangle_id)
    points = [triangle.point(shift + local) for local in range(3)]
    lengths = [abs(points[(local + 1) % 3] - points[local]) for local in range(3)]
    longest = max(lengths)
    rotation = next(local for local in range(3) if lengths[local] >= longest * (1 - SHAPE_TIE))
    base = points[rotation]
    apex = (points[(rotation + 2) % 3] - base) / (points[(rotation + 1) % 3] - base)
    return rotation, apex


def _labeling_from(surface: Surface, start: HalfEdgeRef) -> list:
    """Breadth-first relabeling that makes `start` local edge 0 of triangle 0."""
    label: Dict[int, int] = {start.triangle: 0}
    offset: Dict[int, int] = {start.triangle: start.edge}
    queue = deque([start.triangle])
    encoded = []
    while queue:
        triangle_id = queue.popleft()
        shift = offset[triangle_id]
        record = []
        for local in range(3):
            partner = surface.opposite(HalfEdgeRef(triangle_id, (shift + local) % 3))
            if partner is None:
                record.extend((-1, -1))
                continue
            if partner.triangle not in label:
                label[partner.triangle] = len(label)
                offset[partner.triangle] = partner.edge
                queue.append(partner.triangle)
            record.extend((label[partner.triangle], (partner.edge - offset[partner.triangle]) % 3))
        auxiliary = surface.auxiliary_corners
        for local in range(3):
            record.append(int(CornerRef(triangle_id, (shift + local) % 3) in auxiliary))
        rotation, shape = _normalized_shape(surface, triangle_id, shift)
        record.extend((rotation, _quantize(shape.real), _quantize(shape.imag)))
        encoded.append(record)
    return encoded


def triangulation_key(surface: Surface) -> bytes:
    """Returns a key equal for triangulations that agree up to relabeling and similarity."""
    best = min(_labeling_from(surface, half_edge) for half_edge in surface.half_edges())
    return json.dumps(best, separators=(",", ":")).encode("ascii")


@dataclass(frozen=True)
class FlipNode:
    min_angle: float
    surface: Surface
    depth: int


@dataclass
class FlipGraphReport:
    root: bytes
    nodes: Dict[bytes, FlipNode]
    graph: nx.DiGraph
    frontier_exhausted: bool
    alpha_hat: float
    alpha_exact: bool
    witness: bytes
    heuristic: bool = False
    notes: List[str] = field(default_factory=list)

    def label(self, key: bytes) -> int:
        """Returns the position of `key` in discovery order, its short name in reports."""
        return self.graph.nodes[key]["order"]


class AlphaBound(NamedTuple):
    alpha_hat: float
    alpha_exact: bool
    witness: bytes


def _children(surface: Surface) -> List[Tuple[int, Surface, FlipMove, bytes]]:
    children = []
    for edge in flippable_edges(surface):
        child, move = flip_move(surface, edge)
        children.append((edge, child, move, triangulation_key(child)))
    return children


def _expand(surfaces: Sequence[Surface], workers: int):
    if workers <= 1:
        return [_children(surface) for surface in surfaces]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_children, surfaces))


def explore_flip_graph(
    surface: Surface,
    budget: int = DEFAULT_BUDGET,
    depth: Optional[int] = None,
    workers: int = DEFAULT_WORKERS,
    min_angle_floor: Optional[float] = None,
) -> FlipGraphReport:
    """Breadth-first search over flips, expanding one level at a time.

    Children are generated in edge order and merged in frontier order, so the result does not
    depend on `workers`. `min_angle_floor` drops skinny states and marks the report heuristic.
    """
    if budget <= 0:
        raise BudgetZero(f"Exploration budget must be positive, got {budget}.")

    root = triangulation_key(surface)
    nodes = {root: FlipNode(min_angle(surface), surface, 0)}
    graph = nx.DiGraph()
    graph.add_node(root, min_angle=nodes[root].min_angle, depth=0, order=0)
    frontier = [root]
    level = 0
    truncated = pruned = False
    while frontier and (depth is None or level < depth):
        expansions = _expand([nodes[key].surface for key in frontier], workers)
        next_frontier = []
        for parent, children in zip(frontier, expansions):
            for edge, child, move, key in children:
                if key not in nodes:
                    child_angle = min_angle(child)
                    if min_angle_floor is not None and child_angle < min_angle_floor:
                        pruned = True
                        continue
                    if len(nodes) >= budget:
                        truncated = True
                        continue
                    nodes[key] = FlipNode(child_angle, child, level + 1)
                    graph.add_node(
                        key, min_angle=child_angle, depth=level + 1, order=len(nodes) - 1
                    )
                    next_frontier.append(key)
                graph.add_edge(parent, key, edge=edge, inserted=move.inserted)
        logger.debug("flip graph level %d: %d new nodes", level + 1, len(next_frontier))
        frontier = next_frontier
        level += 1

    exhausted = not frontier and not truncated
    witness = root
    for key, node in nodes.items():
        if node.min_angle > nodes[witness].min_angle:
            witness = key
    alpha_hat = nodes[witness].min_angle
    heuristic = pruned
    notes = []
    if heuristic:
        notes.append(f"states below min_angle {min_angle_floor} were pruned")
    if not exhausted:
        notes.append("shapes are keyed on a 1e-9 grid; drift beyond it can split states")
    return FlipGraphReport(
        root=root,
        nodes=nodes,
        graph=graph,
        frontier_exhausted=exhausted,
        alpha_hat=alpha_hat,
        alpha_exact=(exhausted and not heuristic)
        or alpha_hat >= EQUILATERAL_ANGLE - ANGLE_TOLERANCE,
        witness=witness,
        heuristic=heuristic,
        notes=notes,
    )


def alpha_lower_bound(surface: Surface, budget: int = DEFAULT_BUDGET) -> AlphaBound:
    """Returns the largest minimal angle met within `budget` states and whether it is exact."""
    if min_angle(surface) >= EQUILATERAL_ANGLE - ANGLE_TOLERANCE:
        return AlphaBound(min_angle(surface), True, triangulation_key(surface))
    report = explore_flip_graph(surface, budget=budget)
    return AlphaBound(report.alpha_hat, report.alpha_exact, report.witness)


@dataclass(frozen=True)
class ReachabilityResult:
    status: str
    chain: Tuple[int, ...] = ()
    explored: int = 0

    @property
    def found(self) -> bool:
        return self.status == FOUND


def _cone_signature(surface: Surface):
    return sorted(
        (round(cone.angle, 6), round(cone.dilation, 6), cone.is_boundary, cone.is_auxiliary)
        for cone in surface.cones
    )


def _check_compatible(surface: Surface, target: Surface) -> None:
    if len(surface.triangles) != len(target.triangles):
        raise IncompatibleTargets(
            f"{target.name} has {len(target.triangles)} triangles, not {len(surface.triangles)}."
        )
    if _cone_signature(surface) != _cone_signature(target):
        raise IncompatibleTargets(f"{target.name} has different cone data.")
    if surface_kind(surface) != surface_kind(target):
        raise IncompatibleTargets(f"{target.name} has a different holonomy type.")


def _meet_in_the_middle(
    source: Surface, target: Surface, budget: int
) -> Tuple[Optional[List[bytes]], int]:
    """Bidirectional breadth-first search; returns the key path from source to target."""
    source_key, target_key = triangulation_key(source), triangulation_key(target)
    if source_key == target_key:
        return [source_key], 1
    parents = [{source_key: None}, {target_key: None}]
    surfaces = [{source_key: source}, {target_key: target}]
    frontiers = [[source_key], [target_key]]
    while frontiers[0] and frontiers[1] and len(parents[0]) + len(parents[1]) < budget:
        side = 0 if len(frontiers[0]) <= len(frontiers[1]) else 1
        next_frontier = []
        for key in frontiers[side]:
            for _, child, _, child_key in _children(surfaces[side][key]):
                if child_key in parents[side]:
                    continue
                parents[side][child_key] = key
                surfaces[side][child_key] = child
                next_frontier.append(child_key)
                if child_key in parents[1 - side]:
                    return _join(parents, child_key), len(parents[0]) + len(parents[1])
        frontiers[side] = next_frontier
    return None, len(parents[0]) + len(parents[1])


def _join(parents: List[Dict[bytes, Optional[bytes]]], meeting: bytes) -> List[bytes]:
    forward: List[bytes] = []
    key: Optional[bytes] = meeting
    while key is not None:
        forward.append(key)
        key = parents[0][key]
    forward.reverse()
    key = parents[1][meeting]
    while key is not None:
        forward.append(key)
        key = parents[1][key]
    return forward


def _replay(source: Surface, path: List[bytes]) -> Tuple[int, ...]:
    chain = []
    current = source
    for wanted in path[1:]:
        for edge, child, _, key in _children(current):
            if key == wanted:
                chain.append(edge)
                current = child
                break
        else:
            raise RuntimeError("flip path could not be replayed")
    return tuple(chain)


def verify_reachability(
    surface: Surface, targets: Sequence[Surface], budget: int = DEFAULT_BUDGET
) -> List[ReachabilityResult]:
    """Finds, for each target, a chain of edge ids whose successive flips reach it.

    A target that is not met within `budget` states is reported as not found, never as
    unreachable.
    """
    if budget <= 0:
        raise BudgetZero(f"Search budget must be positive, got {budget}.")
    for target in targets:
        _check_compatible(surface, target)

    results = []
    for target in targets:
        path, explored = _meet_in_the_middle(surface, target, budget)
        if path is None:
            results.append(ReachabilityResult(NOT_FOUND_WITHIN_BUDGET, explored=explored))
            continue
        results.append(ReachabilityResult(FOUND, _replay(surface, path), explored))
    return results


@dataclass(frozen=True)
class CylinderBoundReport:
    alpha_hat: float
    bound: float
    applicable: bool
    violations: Tuple[CylinderRecord, ...]

    @property
    def ok(self) -> bool:
        return not self.applicable or not self.violations


def check_alpha_cylinder_bound(
    surface: Surface, cylinders: Sequence[CylinderRecord], alpha_hat: float
) -> CylinderBoundReport:
    """Checks that every hyperbolic cylinder angle is at most pi - alpha_hat.

    The bound concerns triangulations at true singularities, so it only applies when the
    surface has no auxiliary marked points.
    """
    bound = math.pi - alpha_hat
    violations = tuple(
        cylinder
        for cylinder in cylinders
        if cylinder.hyperbolic and cylinder.beta > bound + BOUND_SLACK
    )
    return CylinderBoundReport(
        alpha_hat=alpha_hat,
        bound=bound,
        applicable=not surface.auxiliary_vertices,
        violations=violations,
    )
