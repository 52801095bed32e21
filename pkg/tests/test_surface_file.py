import os

import pytest

from affine_flips.exceptions import DegenerateTriangle, DoubleGluing, SurfaceSyntaxError
from affine_flips.flip_graph import triangulation_key
from affine_flips.surface import CornerRef, build_surface, check_gauss_bonnet
from affine_flips.surface_file import dump_surface, load_surface, parse_surface, save_surface

from .conftest import FIXTURE_FILES

HEADER = "surface broken\ntriangle 0 0 0 1 0 1 1\ntriangle 1 0 0 1 1 0 1\n"


def test_square_fixture(square_file, square):
    surface = load_surface(square_file)
    assert surface.name == "square_torus"
    assert surface.is_closed
    assert triangulation_key(surface) == triangulation_key(square)


@pytest.mark.parametrize("path", FIXTURE_FILES)
def test_fixtures_survive_a_round_trip(path):
    surface = load_surface(path)
    again = parse_surface(dump_surface(surface))
    assert dump_surface(again) == dump_surface(surface)


def test_dump_is_normalised(square_file, square):
    assert dump_surface(load_surface(square_file)) == dump_surface(square)
    text = dump_surface(square)
    assert text.endswith("\n")
    assert "#" not in text
    assert "-0 " not in text


def test_auxiliary_corners_are_written(square):
    pairs = [(first, second) for first, second in square.gluings.items() if first < second]
    marked = build_surface(square.triangles, pairs, auxiliary=[CornerRef(1, 2)], name="marked")
    text = dump_surface(marked)
    assert "aux 1:2\n" in text
    assert parse_surface(text).auxiliary_vertices == marked.auxiliary_vertices


def test_inexact_coordinates_read_back_exactly(dilation, star):
    for surface in (dilation, star):
        again = parse_surface(dump_surface(surface))
        for original, parsed in zip(surface.triangles, again.triangles):
            assert original.points == parsed.points


@pytest.mark.parametrize(
    "text, line",
    [
        ("surface\n", 1),
        ("triangle 0 0 0 1 0\n", 1),
        ("triangle 0 0 0 1 zero 1 1\n", 1),
        (HEADER + "glue 0:0\n", 4),
        (HEADER + "glue 0:3 1:1\n", 4),
        (HEADER + "glue 0-0 1:1\n", 4),
        (HEADER + "aux 0:0 1:1\n", 4),
        (HEADER + "\n# fine\nstitch 0:0 1:1\n", 6),
        (HEADER + "triangle 1 0 0 1 0 1 1\n", 4),
    ],
)
def test_syntax_errors_name_the_line(text, line):
    with pytest.raises(SurfaceSyntaxError) as caught:
        parse_surface(text)
    assert caught.value.line == line
    assert str(caught.value).startswith(f"line {line}: ")


def test_triangle_ids_must_be_contiguous():
    with pytest.raises(SurfaceSyntaxError) as caught:
        parse_surface("triangle 1 0 0 1 0 1 1\n")
    assert caught.value.line is None


def test_degenerate_triangle_names_the_line():
    with pytest.raises(DegenerateTriangle, match="^line 2: "):
        parse_surface("surface flat\ntriangle 0 0 0 1 0 2 0\n")


def test_double_gluing_names_both_lines():
    with pytest.raises(DoubleGluing, match="already glued on line 4"):
        parse_surface(HEADER + "glue 0:0 1:1\nglue 0:0 1:2\n")
    with pytest.raises(DoubleGluing, match="^line 4: "):
        parse_surface(HEADER + "glue 0:0 0:0\n")


def test_save_and_load(tmp_path, dilation):
    path = os.path.join(str(tmp_path), "dilation.surface")
    save_surface(dilation, path)
    assert not os.path.exists(path + ".tmp")
    assert dump_surface(load_surface(path)) == dump_surface(dilation)


@pytest.mark.parametrize("path", FIXTURE_FILES)
def test_fixtures_pass_gauss_bonnet(path):
    report = check_gauss_bonnet(load_surface(path))
    assert report.ok
    assert report.r_angle < 1e-9
    assert report.r_log < 1e-9
