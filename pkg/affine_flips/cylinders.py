"""Detects flat and hyperbolic cylinders from closed crossing words, measures the angle of each
hyperbolic cylinder and decides whether the surface admits a geometric triangulation with
vertices at its true singularities.

A hyperbolic cylinder is studied in logarithmic coordinates around the fixed point p of its
return map: `along` is log|z - p| and `across` is a continuously lifted arg(z - p), so the deck
transformation is a translation along and an angle wider than 2pi stays representable. Flat
cylinders use the same machinery with `along` parallel to the translation part.
"""
import cmath
import logging
import math
import warnings
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, List, NamedTuple, Optional, Sequence, Set, Tuple, Union

import numpy as np

from affine_flips.config import ANGLE_TOLERANCE, MAX_FLOOD_PIECES
from affine_flips.developing import develop_strip
from affine_flips.surface import CornerRef, HalfEdgeRef, Surface, Transition, TWO_PI, cross

logger = logging.getLogger(__name__)

FLAT = "flat"
HYPERBOLIC = "hyperbolic"
DEFAULT_MAX_PERIOD = 6
DISJOINTNESS_GRID = 32
DISJOINTNESS_ANGLE = math.pi / 2
KEY_DIGITS = 6
INSIDE_MARGIN = 1e-7


def _lift(angle: float, near: float) -> float:
    return angle + TWO_PI * round((near - angle) / TWO_PI)


class LogFrame:
    """Coordinates log|z - center| (along) and a lifted arg(z - center) (across)."""

    def __init__(self, center: complex, a: float):
        self.center = center
        self.scale = max(a, 1 / a)
        self.period = math.log(self.scale)
        self.return_shift = -math.log(a)

    def along(self, z: complex) -> float:
        return math.log(abs(z - self.center))

    def across(self, z: complex, near: float) -> float:
        return _lift(cmath.phase(z - self.center), near)

    def point(self, along: float, across: float) -> complex:
        return self.center + cmath.exp(complex(along, across))

    def deck(self, steps: int) -> Transition:
        factor = self.scale ** steps
        return Transition(factor, self.center * (1 - factor))

    def crossing(self, across: float, right: complex, left: complex) -> Optional[float]:
        heading = cmath.exp(1j * across)
        denominator = cross(heading, left - right)
        if abs(denominator) <= ANGLE_TOLERANCE * abs(left - right):
            return None
        radius = cross(right - self.center, left - right) / denominator
        return math.log(radius) if radius > 0 else None


class FlatFrame:
    """Coordinates along the translation direction and the signed offset across it."""

    def __init__(self, origin: complex, step: complex):
        self.origin = origin
        self.unit = step / abs(step)
        self.period = abs(step)
        self.return_shift = abs(step)

    def along(self, z: complex) -> float:
        return ((z - self.origin) * self.unit.conjugate()).real

    def across(self, z: complex, near: float = 0.0) -> float:
        return cross(self.unit, z - self.origin)

    def point(self, along: float, across: float) -> complex:
        return self.origin + self.unit * complex(along, across)

    def deck(self, steps: int) -> Transition:
        return Transition(1 + 0j, steps * self.period * self.unit)

    def crossing(self, across: float, right: complex, left: complex) -> Optional[float]:
        base = self.point(0.0, across)
        denominator = cross(self.unit, left - right)
        if abs(denominator) <= ANGLE_TOLERANCE * abs(left - right):
            return None
        return cross(right - base, left - right) / denominator


Frame = Union[LogFrame, FlatFrame]


class Piece(NamedTuple):
    """One developed copy of a triangle inside a cylinder, with the lifted across value of its
    centroid identifying its sheet."""

    triangle: int
    placement: Transition
    ref: float


@dataclass(frozen=True)
class CylinderRecord:
    kind: str
    word: Tuple[HalfEdgeRef, ...]
    a: complex
    modulus: float
    beta: float
    width: float
    low_vertices: Tuple[int, ...]
    high_vertices: Tuple[int, ...]
    triangles: FrozenSet[int]
    fixed_point: Optional[complex]
    lo: float
    hi: float
    core: float
    pieces: Tuple[Piece, ...] = field(repr=False, compare=False)
    frame: Frame = field(repr=False, compare=False)
    along0: float = field(default=0.0, repr=False, compare=False)

    @property
    def hyperbolic(self) -> bool:
        return self.kind == HYPERBOLIC

    @property
    def boundary_vertices(self) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
        return (self.low_vertices, self.high_vertices)


def _is_canonical(word: Tuple[HalfEdgeRef, ...]) -> bool:
    """Checks the word is primitive and least among its rotations."""
    return all(word < word[shift:] + word[:shift] for shift in range(1, len(word)))


def closed_words(surface: Surface, max_period: int) -> List[Tuple[HalfEdgeRef, ...]]:
    """Returns primitive cyclic crossing words without backtracking, one per rotation class."""
    words: List[Tuple[HalfEdgeRef, ...]] = []
    stack = [
        (half_edge,) for half_edge in reversed(surface.half_edges()) if surface.is_glued(half_edge)
    ]
    while stack:
        word = stack.pop()
        arrival = surface.opposite(word[-1])
        if arrival.triangle == word[0].triangle and arrival.edge != word[0].edge:
            if _is_canonical(word):
                words.append(word)
        if len(word) == max_period:
            continue
        for edge in (2, 1, 0):
            following = HalfEdgeRef(arrival.triangle, edge)
            if edge != arrival.edge and surface.is_glued(following):
                stack.append(word + (following,))
    return words


def _frame_for(cumulative: Transition) -> Optional[Frame]:
    a = cumulative.a
    if abs(a - 1) <= ANGLE_TOLERANCE:
        if abs(cumulative.b) <= ANGLE_TOLERANCE:
            return None
        return FlatFrame(0j, -cumulative.b)
    if abs(a.imag) > ANGLE_TOLERANCE * abs(a) or a.real <= 0:
        return None
    return LogFrame(cumulative.fixed_point, a.real)


def _is_auxiliary(surface: Surface, triangle: int, corner: int) -> bool:
    return surface.vertex_of(CornerRef(triangle, corner)) in surface.auxiliary_vertices


class _Flood:
    """Develops every triangle meeting the open band lo < across < hi, shrinking the band to the
    nearest true singularities met on either side of the core."""

    def __init__(self, surface: Surface, frame: Frame, core: float, along0: float):
        self.surface = surface
        self.frame = frame
        self.core = core
        self.along0 = along0
        self.lo = -math.inf
        self.hi = math.inf
        self.pieces: List[Piece] = []
        self.seen: Set[tuple] = set()
        self.truncated = False

    def acrosses(self, triangle: int, placement: Transition, ref: float) -> List[float]:
        points = self.surface.triangle(triangle).points
        return [self.frame.across(placement(point), ref) for point in points]

    def add(self, triangle: int, placement: Transition, ref: float) -> bool:
        centroid = placement(self.surface.triangle(triangle).centroid)
        steps = math.floor((self.frame.along(centroid) - self.along0) / self.frame.period)
        placement = self.frame.deck(-steps).compose(placement)
        centroid = placement(self.surface.triangle(triangle).centroid)
        key = (
            triangle,
            round((self.frame.along(centroid) - self.along0) / self.frame.period, KEY_DIGITS),
            round(ref, KEY_DIGITS),
        )
        if key in self.seen:
            return False
        if len(self.pieces) >= MAX_FLOOD_PIECES:
            self.truncated = True
            return False
        self.seen.add(key)
        self.pieces.append(Piece(triangle, placement, ref))
        for corner, value in enumerate(self.acrosses(triangle, placement, ref)):
            if _is_auxiliary(self.surface, triangle, corner):
                continue
            if value < self.core:
                self.lo = max(self.lo, value)
            else:
                self.hi = min(self.hi, value)
        return True

    def meets_band(self, values: Sequence[float]) -> bool:
        return max(values) > self.lo + INSIDE_MARGIN and min(values) < self.hi - INSIDE_MARGIN

    def run(self) -> None:
        queue = deque(self.pieces)
        while queue and not self.truncated:
            piece = queue.popleft()
            for edge in range(3):
                half_edge = HalfEdgeRef(piece.triangle, edge)
                partner = self.surface.opposite(half_edge)
                if partner is None:
                    continue
                placement = piece.placement.compose(self.surface.transition(half_edge).inverse())
                centroid = placement(self.surface.triangle(partner.triangle).centroid)
                ref = self.frame.across(centroid, piece.ref)
                if not self.meets_band(self.acrosses(partner.triangle, placement, ref)):
                    continue
                if self.add(partner.triangle, placement, ref):
                    queue.append(self.pieces[-1])
        if self.truncated:
            warnings.warn(f"Cylinder flood stopped at {MAX_FLOOD_PIECES} pieces.")


def _chords_meet(first: Tuple[complex, complex], second: Tuple[complex, complex]) -> bool:
    (p, q), (r, s) = first, second
    return cross(q - p, r - p) * cross(q - p, s - p) <= 0 and (
        cross(s - r, p - r) * cross(s - r, q - r) <= 0
    )


def _core_is_simple(
    placements: Sequence[Tuple[int, Transition]], crossings: Sequence[complex]
) -> bool:
    """Returns False when two passes of the core through one triangle meet.

    `crossings[i]` is where the developed core leaves through portal i. Each pass is pulled back
    into its triangle's own chart, so passes of the same triangle can be compared directly.
    """
    count = len(crossings)
    chords: Dict[int, List[Tuple[complex, complex]]] = {}
    for index in range(count):
        triangle_id, placement = placements[index]
        back = placement.inverse()
        if index:
            entry = back(crossings[index - 1])
        else:
            entry = placements[count][1].inverse()(crossings[count - 1])
        chord = (entry, back(crossings[index]))
        passes = chords.setdefault(triangle_id, [])
        if any(_chords_meet(chord, other) for other in passes):
            return False
        passes.append(chord)
    return True


def _cylinder_for_word(surface: Surface, word: Tuple[HalfEdgeRef, ...]) -> Optional[CylinderRecord]:
    chain = develop_strip(surface, word[0].triangle, word)
    cumulative = chain.cumulative
    frame = _frame_for(cumulative)
    if frame is None:
        return None
    exact = chain.normalization.inverse()
    placements = [(tid, exact.compose(placement)) for tid, placement in chain.placements]

    portals = []
    for (triangle_id, placement), half_edge in zip(placements, word):
        triangle = surface.triangle(triangle_id)
        right, left = triangle.point(half_edge.edge), triangle.point(half_edge.edge + 1)
        portals.append((placement(right), placement(left)))

    ref = frame.across((portals[0][0] + portals[0][1]) / 2, 0.0)
    refs = []
    low, high = -math.inf, math.inf
    for right, left in portals:
        ref = frame.across((right + left) / 2, ref)
        refs.append(ref)
        ends = sorted((frame.across(right, ref), frame.across(left, ref)))
        low, high = max(low, ends[0]), min(high, ends[1])
    if not high - low > ANGLE_TOLERANCE:
        return None
    core = (low + high) / 2

    alongs = [frame.crossing(core, right, left) for right, left in portals]
    if any(value is None for value in alongs):
        return None
    alongs.append(alongs[0] + frame.return_shift)
    steps = [later - earlier for earlier, later in zip(alongs, alongs[1:])]
    if not (all(step > 0 for step in steps) or all(step < 0 for step in steps)):
        return None
    crossings = [frame.point(along, core) for along in alongs[:-1]]
    if not _core_is_simple(placements, crossings):
        logger.debug("word %s has a self-crossing core", word)
        return None

    along0 = min(
        frame.along(placement(surface.triangle(tid).centroid)) for tid, placement in placements[:-1]
    )
    flood = _Flood(surface, frame, core, along0)
    for (triangle_id, placement), ref in zip(placements[:-1], refs):
        centroid = placement(surface.triangle(triangle_id).centroid)
        flood.add(triangle_id, placement, frame.across(centroid, ref))
    flood.run()
    if flood.truncated:
        return None
    if math.isinf(flood.lo) or math.isinf(flood.hi):
        warnings.warn(f"Cylinder of word {word} reaches no true singularity on one side.")
        return None

    low_vertices, high_vertices, triangles = set(), set(), set()
    for piece in flood.pieces:
        values = flood.acrosses(piece.triangle, piece.placement, piece.ref)
        if flood.meets_band(values):
            triangles.add(piece.triangle)
        for corner, value in enumerate(values):
            if _is_auxiliary(surface, piece.triangle, corner):
                continue
            vertex = surface.vertex_of(CornerRef(piece.triangle, corner))
            if abs(value - flood.lo) <= INSIDE_MARGIN:
                low_vertices.add(vertex)
            if abs(value - flood.hi) <= INSIDE_MARGIN:
                high_vertices.add(vertex)

    hyperbolic = isinstance(frame, LogFrame)
    modulus = frame.scale if isinstance(frame, LogFrame) else 1.0
    logger.debug("word %s floods %d pieces", word, len(flood.pieces))
    return CylinderRecord(
        kind=HYPERBOLIC if hyperbolic else FLAT,
        word=word,
        a=cumulative.a,
        modulus=modulus,
        beta=flood.hi - flood.lo if hyperbolic else 0.0,
        width=flood.hi - flood.lo,
        low_vertices=tuple(sorted(low_vertices)),
        high_vertices=tuple(sorted(high_vertices)),
        triangles=frozenset(triangles),
        fixed_point=frame.center if isinstance(frame, LogFrame) else None,
        lo=flood.lo,
        hi=flood.hi,
        core=core,
        pieces=tuple(flood.pieces),
        frame=frame,
        along0=along0,
    )


def _direction_class(unit: complex, placement: Transition) -> float:
    """Returns the angle modulo pi of `unit` seen in a piece's own chart."""
    angle = round(cmath.phase(unit * abs(placement.a) / placement.a) % math.pi, KEY_DIGITS)
    return 0.0 if angle >= round(math.pi, KEY_DIGITS) else angle


def _dedupe_key(record: CylinderRecord) -> tuple:
    key: tuple = (
        record.kind,
        record.triangles,
        round(record.width, KEY_DIGITS),
        round(record.modulus, KEY_DIGITS),
        record.low_vertices + record.high_vertices,
    )
    if isinstance(record.frame, FlatFrame):
        unit = record.frame.unit
        key += (
            frozenset(
                (piece.triangle, _direction_class(unit, piece.placement)) for piece in record.pieces
            ),
        )
    return key


def detect_cylinders(
    surface: Surface, max_period: int = DEFAULT_MAX_PERIOD
) -> List[CylinderRecord]:
    """Finds maximal cylinders whose core curve crosses at most `max_period` edges."""
    records: Dict[tuple, CylinderRecord] = {}
    for word in closed_words(surface, max_period):
        record = _cylinder_for_word(surface, word)
        if record is not None:
            records.setdefault(_dedupe_key(record), record)
    return list(records.values())


class Verdict(str, Enum):
    TRIANGULABLE_WITNESSED = "TRIANGULABLE_WITNESSED"
    TRIANGULABLE_LIKELY = "TRIANGULABLE_LIKELY"
    NOT_TRIANGULABLE_AT_SINGULARITIES = "NOT_TRIANGULABLE_AT_SINGULARITIES"


@dataclass(frozen=True)
class VerdictReport:
    verdict: Verdict
    max_period: int
    wide_cylinders: Tuple[CylinderRecord, ...]

    def __str__(self) -> str:
        if self.verdict == Verdict.TRIANGULABLE_LIKELY:
            return f"{self.verdict.value}(max_period={self.max_period})"
        return self.verdict.value


def triangulability_verdict(
    surface: Surface, max_period: int = DEFAULT_MAX_PERIOD
) -> VerdictReport:
    """Decides triangulability. A geometric triangulation at the true singularities exists
    exactly when no hyperbolic cylinder has angle at least pi."""
    records = detect_cylinders(surface, max_period)
    wide = tuple(
        record
        for record in records
        if record.hyperbolic and record.beta >= math.pi - ANGLE_TOLERANCE
    )
    if wide:
        verdict = Verdict.NOT_TRIANGULABLE_AT_SINGULARITIES
    elif not surface.auxiliary_vertices:
        verdict = Verdict.TRIANGULABLE_WITNESSED
    else:
        verdict = Verdict.TRIANGULABLE_LIKELY
    return VerdictReport(verdict, max_period, wide)


def _strictly_inside(record: CylinderRecord, triangle: int, local: complex) -> bool:
    for piece in record.pieces:
        if piece.triangle != triangle:
            continue
        value = record.frame.across(piece.placement(local), piece.ref)
        if record.lo + INSIDE_MARGIN < value < record.hi - INSIDE_MARGIN:
            return True
    return False


@dataclass(frozen=True)
class DisjointnessReport:
    pairs_checked: int
    violations: Tuple[Tuple[int, int, int], ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def cylinder_disjointness_check(
    surface: Surface, records: Sequence[CylinderRecord]
) -> DisjointnessReport:
    """Samples a grid inside every wide hyperbolic cylinder and counts samples that lie strictly
    inside another wide cylinder. Returns (first, second, count) for each offending pair."""
    wide = [
        index
        for index, record in enumerate(records)
        if record.hyperbolic and record.beta >= DISJOINTNESS_ANGLE - ANGLE_TOLERANCE
    ]
    fractions = (np.arange(DISJOINTNESS_GRID) + 0.5) / DISJOINTNESS_GRID
    violations = []
    pairs = 0
    for first in wide:
        for second in wide:
            if first >= second:
                continue
            pairs += 1
            count = 0
            for source, target in ((first, second), (second, first)):
                sample = records[source]
                alongs = sample.along0 + fractions * sample.frame.period
                acrosses = sample.lo + fractions * (sample.hi - sample.lo)
                for along, across in np.array(np.meshgrid(alongs, acrosses)).reshape(2, -1).T:
                    z = sample.frame.point(float(along), float(across))
                    located = _locate_in(surface, sample, z, float(across))
                    if located is not None and _strictly_inside(records[target], *located):
                        count += 1
            if count:
                violations.append((first, second, count))
    return DisjointnessReport(pairs, tuple(violations))


def _locate_in(
    surface: Surface, record: CylinderRecord, z: complex, across: float
) -> Optional[Tuple[int, complex]]:
    for steps in (0, -1, 1):
        moved = record.frame.deck(steps)(z)
        for piece in record.pieces:
            if abs(record.frame.across(moved, piece.ref) - across) > INSIDE_MARGIN:
                continue
            local = piece.placement.inverse()(moved)
            if min(surface.triangle(piece.triangle).barycentric(local)) >= -INSIDE_MARGIN:
                return piece.triangle, local
    return None


@dataclass(frozen=True)
class Decomposition:
    wide_cylinders: Tuple[CylinderRecord, ...]
    cylinder_triangles: FrozenSet[int]
    triangulable_triangles: FrozenSet[int]


def canonical_decomposition(
    surface: Surface, max_period: int = DEFAULT_MAX_PERIOD
) -> Decomposition:
    """Splits the triangles into those meeting a hyperbolic cylinder of angle at least pi and the
    rest, the part that triangulates at true singularities."""
    wide = triangulability_verdict(surface, max_period).wide_cylinders
    covered = frozenset(triangle for record in wide for triangle in record.triangles)
    rest = frozenset(range(len(surface.triangles))) - covered
    return Decomposition(wide, covered, rest)
