import cmath
import math
import random

import pytest

from affine_flips.exceptions import InvalidStrip, StartOnEdge, ZeroDirection
from affine_flips.geodesics import (
    BudgetExhausted,
    CrossEdge,
    HitVertex,
    LimitCycle,
    enumerate_saddle_connections,
    redevelop,
    straighten,
    trace,
    turning_of,
)
from affine_flips.surface import CornerRef, HalfEdgeRef


def _is_primitive(vector: complex) -> bool:
    x, y = round(vector.real), round(vector.imag)
    return abs(vector - complex(x, y)) < 1e-9 and math.gcd(x, y) == 1


def test_horizontal_ray_on_the_square_torus_never_settles(square):
    events = trace(square, 0, 0.7 + 0.2j, 1 + 0j, max_crossings=20)
    assert isinstance(events[-1], BudgetExhausted)
    assert all(isinstance(event, CrossEdge) for event in events[:-1])
    assert len(events) == 21
    assert events[0].half_edge == HalfEdgeRef(0, 1)
    assert events[0].t == pytest.approx(0.2)


def test_ray_into_a_corner_hits_the_vertex(square):
    assert trace(square, 0, 0.75 + 0.25j, -(0.75 + 0.25j)) == [HitVertex(0)]


def test_dilation_torus_ray_falls_into_the_core_cylinder(dilation):
    centroid = sum(dilation.triangle(0).points) / 3
    events = trace(dilation, 0, centroid, cmath.exp(1j * math.pi / 6))
    cycle = events[-1]
    assert isinstance(cycle, LimitCycle)
    assert cycle.factor == pytest.approx(0.5)
    assert len(cycle.word) == 2


def test_random_starts_in_the_cylinder_sector_all_converge(dilation):
    chooser = random.Random(20)
    corners = dilation.triangle(0).points
    for _ in range(20):
        weights = [chooser.uniform(0.1, 1.0) for _ in corners]
        start = sum(weight * corner for weight, corner in zip(weights, corners)) / sum(weights)
        heading = cmath.exp(1j * chooser.uniform(0.15, math.pi / 3 - 0.15))
        cycle = trace(dilation, 0, start, heading)[-1]
        assert isinstance(cycle, LimitCycle)
        assert cycle.factor == pytest.approx(0.5, abs=1e-6)


def test_trace_errors(square):
    with pytest.raises(ZeroDirection):
        trace(square, 0, 0.7 + 0.2j, 0j)
    with pytest.raises(StartOnEdge):
        trace(square, 0, 0.5 + 0j, 1j)


def test_triangle_sides_are_saddle_connections(square):
    connections = enumerate_saddle_connections(square, 0)
    assert len(connections) == 3
    assert sorted(abs(connection.vector) for connection in connections) == pytest.approx(
        [1, 1, math.sqrt(2)]
    )


def test_square_torus_saddle_connections(square):
    connections = enumerate_saddle_connections(square, 2)
    assert len(connections) > 3
    for connection in connections:
        assert _is_primitive(connection.vector)
        start, end = redevelop(square, connection)
        assert end - start == pytest.approx(connection.vector)
    for expected in (1, 1j, 1 + 1j):
        assert any(
            abs(connection.vector - expected) < 1e-9 or abs(connection.vector + expected) < 1e-9
            for connection in connections
        )


def test_straighten_through_a_vertex(square):
    arc = straighten(square, CornerRef(0, 0), [HalfEdgeRef(0, 1), HalfEdgeRef(1, 1)], 2)
    assert list(arc.points) == pytest.approx([0, 1 + 1j, 2 + 2j])
    assert arc.vertices == (0, 0, 0)
    assert arc.saddle_connection is None
    assert turning_of(arc.points) == pytest.approx(0, abs=1e-9)


def test_straighten_to_a_saddle_connection(square):
    arc = straighten(square, CornerRef(0, 0), [HalfEdgeRef(0, 1)], 1)
    assert arc.segments == 1
    assert list(arc.points) == pytest.approx([0, 2 + 1j])
    assert arc.saddle_connection.vector == pytest.approx(2 + 1j)


def test_straighten_errors(square):
    with pytest.raises(InvalidStrip):
        straighten(square, CornerRef(0, 1), [HalfEdgeRef(0, 1)], 1)
    with pytest.raises(InvalidStrip):
        straighten(square, CornerRef(0, 0), [HalfEdgeRef(1, 0)], 1)
    with pytest.raises(InvalidStrip):
        straighten(square, CornerRef(0, 0), [HalfEdgeRef(0, 1)], 0)
    with pytest.raises(InvalidStrip):
        straighten(square, CornerRef(0, 0), [], 0)
