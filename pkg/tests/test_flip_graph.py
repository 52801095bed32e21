import cmath
import math

import pytest

from affine_flips.builders import (
    build_dilation_torus,
    build_parallelogram_torus,
    build_star_sphere,
)
from affine_flips.cylinders import detect_cylinders
from affine_flips.exceptions import BudgetZero, IncompatibleTargets
from affine_flips.flip_graph import (
    FOUND,
    alpha_lower_bound,
    check_alpha_cylinder_bound,
    explore_flip_graph,
    min_angle,
    triangulation_key,
    verify_reachability,
)
from affine_flips.flips import flip, flippable_edges
from affine_flips.geodesics import enumerate_saddle_connections
from affine_flips.surface import Transition, build_surface


def test_depth_zero_is_the_root(dilation):
    report = explore_flip_graph(dilation, depth=0)
    assert len(report.nodes) == 1
    assert report.witness == report.root
    assert report.alpha_hat == pytest.approx(min_angle(dilation))
    assert report.label(report.root) == 0


def test_hexagonal_torus_is_already_optimal(hexagonal):
    bound = alpha_lower_bound(hexagonal)
    assert bound.alpha_hat == pytest.approx(math.pi / 3)
    assert bound.alpha_exact


def test_square_torus_alpha(square):
    report = explore_flip_graph(square, budget=1000)
    assert report.alpha_hat == pytest.approx(math.pi / 4)
    assert report.alpha_hat >= min_angle(square)


def test_slanted_torus_reaches_the_square(fixture_surface):
    slanted = fixture_surface("slanted_torus.surface")
    assert min_angle(slanted) < math.pi / 4
    assert alpha_lower_bound(slanted, budget=500).alpha_hat == pytest.approx(math.pi / 4)


def test_exploration_does_not_depend_on_workers(dilation):
    serial = explore_flip_graph(dilation, budget=60)
    threaded = explore_flip_graph(dilation, budget=60, workers=4)
    assert list(serial.nodes) == list(threaded.nodes)
    assert sorted(serial.graph.edges(data="edge")) == sorted(threaded.graph.edges(data="edge"))
    assert serial.alpha_hat == threaded.alpha_hat
    assert serial.witness == threaded.witness


def test_budget_limits_the_search(dilation):
    report = explore_flip_graph(dilation, budget=5)
    assert len(report.nodes) <= 5
    assert not report.frontier_exhausted
    assert report.notes
    with pytest.raises(BudgetZero):
        explore_flip_graph(dilation, budget=0)


def test_min_angle_floor_marks_the_report_heuristic(dilation):
    report = explore_flip_graph(dilation, budget=50, min_angle_floor=min_angle(dilation))
    assert all(node.min_angle >= min_angle(dilation) for node in report.nodes.values())
    if report.heuristic:
        assert not report.alpha_exact or report.alpha_hat >= math.pi / 3 - 1e-9


def test_reachability_of_the_surface_itself(dilation):
    (result,) = verify_reachability(dilation, [dilation])
    assert result.status == FOUND
    assert result.chain == ()


def test_reachability_of_a_single_flip(dilation):
    edge = flippable_edges(dilation)[0]
    target = flip(dilation, edge)
    (result,) = verify_reachability(dilation, [target])
    assert result.found
    assert len(result.chain) == 1
    current = dilation
    for step in result.chain:
        current = flip(current, step)
    assert triangulation_key(current) == triangulation_key(target)


def test_incompatible_targets(dilation, square, star):
    with pytest.raises(IncompatibleTargets):
        verify_reachability(dilation, [star])
    with pytest.raises(IncompatibleTargets):
        verify_reachability(dilation, [square])
    with pytest.raises(BudgetZero):
        verify_reachability(dilation, [dilation], budget=0)


def test_cylinder_bound_holds_on_the_dilation_torus(dilation):
    bound = alpha_lower_bound(dilation, budget=200)
    report = check_alpha_cylinder_bound(dilation, detect_cylinders(dilation), bound.alpha_hat)
    assert report.applicable
    assert report.ok
    assert report.bound == pytest.approx(math.pi - bound.alpha_hat)


def test_cylinder_bound_does_not_apply_with_auxiliary_points(big):
    report = check_alpha_cylinder_bound(big, detect_cylinders(big), math.pi / 3)
    assert not report.applicable
    assert report.violations
    assert report.ok


def test_star_sphere_alpha_is_bounded_by_the_equilateral_angle():
    bound = alpha_lower_bound(build_star_sphere((math.pi / 2,) * 3, (1.0,) * 3), budget=200)
    assert 0 < bound.alpha_hat <= math.pi / 3 + 1e-9


def test_key_ignores_similarity_on_skinny_triangles():
    surface = build_dilation_torus(math.pi / 2, 1.0001)
    assert min_angle(surface) < 1e-3
    similarity = Transition(cmath.rect(3.7, 1.1), 0.4 - 2j)
    pairs = [(first, second) for first, second in surface.gluings.items() if first < second]
    moved = build_surface([triangle.mapped(similarity) for triangle in surface.triangles], pairs)
    assert triangulation_key(moved) == triangulation_key(surface)


@pytest.mark.parametrize("u, v", [(1, 1 + 1j), (1, 2 + 1j), (1, 3 + 1j), (2 + 1j, 1 + 1j)])
def test_lattice_triangulations_are_reachable(square, u, v):
    vectors = [connection.vector for connection in enumerate_saddle_connections(square, 4)]
    for expected in (u, v):
        assert any(min(abs(vector - expected), abs(vector + expected)) < 1e-9 for vector in vectors)
    target = build_parallelogram_torus(complex(u), complex(v))
    (result,) = verify_reachability(square, [target], budget=500)
    assert result.status == FOUND
    current = square
    for step in result.chain:
        current = flip(current, step)
    assert triangulation_key(current) == triangulation_key(target)


def test_alpha_never_drops_as_the_budget_grows(dilation):
    alphas = [alpha_lower_bound(dilation, budget=budget).alpha_hat for budget in (1, 10, 50, 200)]
    assert alphas == sorted(alphas)


@pytest.mark.parametrize("fixture", ["star", "two_cylinders", "wide_dilation"])
def test_cylinder_bound_holds_across_fixtures(request, fixture):
    surface = request.getfixturevalue(fixture)
    bound = alpha_lower_bound(surface, budget=200)
    report = check_alpha_cylinder_bound(surface, detect_cylinders(surface), bound.alpha_hat)
    assert report.applicable
    assert report.ok
