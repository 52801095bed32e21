import math
import random

import pytest

from affine_flips.exceptions import BoundaryEdge, NotFlippable
from affine_flips.flip_graph import min_angle, triangulation_key
from affine_flips.flips import flip, flip_move, flippable_edges, quad_of_edge, self_folded_scan
from affine_flips.surface import (
    HalfEdgeRef,
    Triangle,
    build_surface,
    check_gauss_bonnet,
    euler_info,
)

DIAGONAL = 2


def _cone_data(surface):
    return sorted((round(cone.angle, 9), round(cone.dilation, 9)) for cone in surface.cones)


def _kite(fourth: complex):
    triangles = [Triangle(0, 0j, 2 + 0j, 1 + 2j), Triangle(1, 1 + 2j, 2 + 0j, fourth)]
    surface = build_surface(triangles, [((0, 1), (1, 0))])
    return surface, surface.edge_id(HalfEdgeRef(0, 1))


def test_square_diagonal_is_convex(square):
    quad = quad_of_edge(square, DIAGONAL)
    assert quad.distinct_triangles
    assert quad.strictly_convex
    assert quad.embedded
    assert quad.flippable
    assert DIAGONAL in flippable_edges(square)


def test_flipping_the_square_diagonal(square):
    flipped, move = flip_move(square, DIAGONAL)
    assert move.removed == DIAGONAL
    assert min_angle(flipped) == pytest.approx(math.pi / 4)
    assert triangulation_key(flipped) == triangulation_key(square)
    assert _cone_data(flipped) == _cone_data(square)


def test_flip_back_restores_the_triangulation(dilation):
    for edge in flippable_edges(dilation):
        flipped, move = flip_move(dilation, edge)
        restored = flip(flipped, move.inserted)
        assert triangulation_key(restored) == triangulation_key(dilation)


def test_flips_preserve_cone_data(dilation, star, big):
    for surface in (dilation, star, big):
        for edge in flippable_edges(surface):
            flipped = flip(surface, edge)
            assert _cone_data(flipped) == _cone_data(surface)
            assert len(flipped.auxiliary_vertices) == len(surface.auxiliary_vertices)
            report = check_gauss_bonnet(flipped)
            assert report.r_angle < 1e-9
            assert report.r_log < 1e-9


def test_self_folded_edge_is_not_flippable(star):
    folded = star.edge_id(HalfEdgeRef(1, 0))
    assert not quad_of_edge(star, folded).distinct_triangles
    assert folded not in flippable_edges(star)
    with pytest.raises(NotFlippable) as caught:
        flip(star, folded)
    assert caught.value.predicate == "distinct_triangles"


def test_reflex_quadrilateral_is_not_convex():
    surface, edge = _kite(2.5 - 0.5j)
    quad = quad_of_edge(surface, edge)
    assert quad.distinct_triangles
    assert not quad.strictly_convex
    with pytest.raises(NotFlippable) as caught:
        flip(surface, edge)
    assert caught.value.predicate == "strictly_convex"


def test_convex_kite_flips():
    surface, edge = _kite(1.6 + 1.3j)
    assert quad_of_edge(surface, edge).flippable
    flipped = flip(surface, edge)
    assert len(flipped.boundary_half_edges()) == 4


def test_boundary_edge_bounds_no_quadrilateral():
    surface, _ = _kite(1.6 + 1.3j)
    with pytest.raises(BoundaryEdge):
        quad_of_edge(surface, surface.edge_id(HalfEdgeRef(0, 0)))


def test_self_folded_scan(square, star):
    assert self_folded_scan(square) == []
    found = self_folded_scan(star)
    assert [folded.triangle for folded in found] == [1, 2, 3]
    for folded in found:
        assert star.cones[folded.apex].angle == pytest.approx(0.8 * math.pi)


def _cone_lists(surface):
    cones = sorted((cone.angle, cone.dilation) for cone in surface.cones)
    return [angle for angle, _ in cones], [dilation for _, dilation in cones]


@pytest.mark.parametrize("fixture", ["dilation", "star", "two_cylinders", "big"])
def test_random_flip_walk_keeps_invariants(request, fixture):
    surface = request.getfixturevalue(fixture)
    angles, dilations = _cone_lists(surface)
    chooser = random.Random(3)
    for _ in range(250):
        edges = flippable_edges(surface)
        if not edges:
            break
        child, move = flip_move(surface, chooser.choice(edges))
        assert move.inserted in flippable_edges(child)
        back = flip(child, move.inserted)
        assert triangulation_key(back) == triangulation_key(surface)
        info = euler_info(child)
        assert info.faces == 4 * info.genus - 4 + 2 * info.vertices
        child_angles, child_dilations = _cone_lists(child)
        assert child_angles == pytest.approx(angles, abs=1e-7)
        assert child_dilations == pytest.approx(dilations, rel=1e-7)
        surface = child
