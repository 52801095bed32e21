import math

import pytest

from affine_flips.builders import build_big_cylinder, build_dilation_torus
from affine_flips.cylinders import (
    FLAT,
    HYPERBOLIC,
    Verdict,
    canonical_decomposition,
    closed_words,
    cylinder_disjointness_check,
    detect_cylinders,
    triangulability_verdict,
)
from affine_flips.surface import CornerRef, build_surface


def _hyperbolic(records):
    return [record for record in records if record.kind == HYPERBOLIC]


def test_dilation_torus_has_one_hyperbolic_cylinder(dilation):
    (record,) = _hyperbolic(detect_cylinders(dilation))
    assert max(abs(record.a), 1 / abs(record.a)) == pytest.approx(2)
    assert record.beta == pytest.approx(math.pi / 3)
    assert record.triangles == frozenset({0, 1})
    assert record.boundary_vertices == ((0,), (0,))
    assert record.modulus > 0


def test_inverse_dilation_gives_the_same_cylinder():
    (forward,) = _hyperbolic(detect_cylinders(build_dilation_torus(1.0, 2.0)))
    (backward,) = _hyperbolic(detect_cylinders(build_dilation_torus(1.0, 0.5)))
    assert forward.beta == pytest.approx(backward.beta)
    assert forward.modulus == pytest.approx(backward.modulus)


def test_sectors_do_not_change_the_cylinder_angle():
    records = _hyperbolic(detect_cylinders(build_dilation_torus(2.0, 3.0, sectors=3)))
    assert len(records) == 1
    assert records[0].beta == pytest.approx(2.0)


def test_square_torus_has_only_flat_cylinders(square):
    records = detect_cylinders(square)
    assert records
    assert all(record.kind == FLAT for record in records)
    assert all(record.beta == 0 for record in records)
    report = triangulability_verdict(square)
    assert report.verdict == Verdict.TRIANGULABLE_WITNESSED
    assert str(report) == "TRIANGULABLE_WITNESSED"


def test_closed_words_are_listed_once(square):
    words = closed_words(square, 4)
    assert len(words) == len(set(words))
    assert all(1 <= len(word) <= 4 for word in words)


def test_big_cylinder_is_not_triangulable(big):
    (record,) = _hyperbolic(detect_cylinders(big))
    assert record.beta == pytest.approx(1.2 * math.pi)
    report = triangulability_verdict(big)
    assert report.verdict == Verdict.NOT_TRIANGULABLE_AT_SINGULARITIES
    assert report.wide_cylinders == (record,)


def test_canonical_decomposition(big, dilation):
    split = canonical_decomposition(big)
    assert split.cylinder_triangles == frozenset(range(len(big.triangles)))
    assert not split.triangulable_triangles
    split = canonical_decomposition(dilation)
    assert not split.wide_cylinders
    assert split.triangulable_triangles == frozenset({0, 1})


def test_auxiliary_points_weaken_the_verdict(square):
    pairs = [(first, second) for first, second in square.gluings.items() if first < second]
    marked = build_surface(square.triangles, pairs, auxiliary=[CornerRef(0, 0)])
    report = triangulability_verdict(marked, max_period=4)
    assert report.verdict == Verdict.TRIANGULABLE_LIKELY
    assert str(report) == "TRIANGULABLE_LIKELY(max_period=4)"


def test_wide_cylinders_are_disjoint(two_cylinders):
    records = detect_cylinders(two_cylinders)
    hyperbolic = _hyperbolic(records)
    assert len(hyperbolic) == 2
    assert all(record.beta == pytest.approx(0.6 * math.pi) for record in hyperbolic)
    report = cylinder_disjointness_check(two_cylinders, records)
    assert report.pairs_checked == 1
    assert report.ok


def test_wide_but_narrower_than_pi_is_triangulable():
    surface = build_dilation_torus(0.9 * math.pi, 2.0)
    (record,) = _hyperbolic(detect_cylinders(surface))
    assert record.beta == pytest.approx(0.9 * math.pi)
    assert triangulability_verdict(surface).verdict == Verdict.TRIANGULABLE_WITNESSED


def test_star_sphere_has_no_hyperbolic_cylinders(star):
    assert not _hyperbolic(detect_cylinders(star))
    assert canonical_decomposition(star).triangulable_triangles == frozenset(
        range(len(star.triangles))
    )


def test_truncated_flood_gives_no_cylinder(mocker, dilation):
    mocker.patch("affine_flips.cylinders.MAX_FLOOD_PIECES", 1)
    with pytest.warns(UserWarning, match="flood stopped"):
        records = detect_cylinders(dilation)
    assert records == []


def test_cylinder_angle_beyond_a_full_turn():
    (record,) = _hyperbolic(detect_cylinders(build_big_cylinder(2.5 * math.pi, 1.5, 4)))
    assert record.beta == pytest.approx(2.5 * math.pi)


def test_cylinder_of_angle_exactly_pi_is_not_triangulable():
    report = triangulability_verdict(build_big_cylinder(math.pi, 2.0, 2))
    assert report.verdict == Verdict.NOT_TRIANGULABLE_AT_SINGULARITIES
