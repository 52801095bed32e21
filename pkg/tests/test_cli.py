import os

from affine_flips.cli import INVALID, USAGE_ERROR, main
from affine_flips.surface import HalfEdgeRef
from affine_flips.surface_file import load_surface


def _run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out.splitlines(), captured.err


def test_validate(capsys, square_file):
    code, out, _ = _run(capsys, "validate", square_file)
    assert code == 0
    assert out == ["ok square_torus: V=1 E=3 F=2"]


def test_info(capsys, square_file):
    code, out, _ = _run(capsys, "info", square_file)
    assert code == 0
    assert "kind translation" in out
    assert any(line.startswith("vertex 0 angle 6.28318530718 (2pi)") for line in out)
    assert out[-1].endswith(" ok")


def test_invalid_surface_exits_with_two(capsys, tmp_path):
    path = os.path.join(str(tmp_path), "flat.surface")
    with open(path, "w") as surface_file:
        surface_file.write("triangle 0 0 0 1 0 2 0\n")
    code, out, err = _run(capsys, "validate", path)
    assert code == INVALID
    assert out == []
    assert "DegenerateTriangle: line 1: " in err


def test_usage_errors_exit_with_one(capsys, square_file):
    assert _run(capsys, "teleport", square_file)[0] == USAGE_ERROR
    assert _run(capsys, "flip", square_file)[0] == USAGE_ERROR
    assert _run(capsys, "render", square_file)[0] == USAGE_ERROR
    assert _run(capsys, "validate", "missing.surface")[0] == USAGE_ERROR


def test_unflippable_edge_is_invalid(capsys, tmp_path):
    path = os.path.join(str(tmp_path), "star.surface")
    assert _run(capsys, "build", "star_sphere", "--out", path)[0] == 0
    folded = load_surface(path).edge_id(HalfEdgeRef(1, 0))
    code, _, err = _run(capsys, "flip", path, "--edge", str(folded))
    assert code == INVALID
    assert "NotFlippable" in err


def test_build_prints_a_surface(capsys):
    code, out, _ = _run(capsys, "build", "dilation_torus", "theta=deg:60", "lam=2")
    assert code == 0
    assert out[0] == "surface dilation_torus"
    assert sum(line.startswith("triangle ") for line in out) == 2
    assert _run(capsys, "build", "dilation_torus", "theta=deg:180", "lam=2")[0] == INVALID


def test_build_from_a_polygon(capsys):
    code, out, _ = _run(
        capsys, "build", "polygon", "vertices=0|0,1|0,1|1,0|1", "pairing=0|2,1|3"
    )
    assert code == 0
    assert sum(line.startswith("glue ") for line in out) == 3


def test_flip_writes_the_result(capsys, square_file, tmp_path):
    path = os.path.join(str(tmp_path), "flipped.surface")
    code, out, _ = _run(capsys, "flip", square_file, "--edge", "2", "--out", path)
    assert code == 0
    assert out == [f"wrote {path}"]
    assert load_surface(path).is_closed


def test_trace(capsys, square_file):
    code, out, _ = _run(capsys, "trace", square_file, "--tri", "0", "--at", "0.7,0.2", "--dir", "0")
    assert code == 0
    assert out[0] == "cross 0:1 0.2"
    assert out[-1] == "budget_exhausted"


def test_straighten(capsys, square_file):
    code, out, _ = _run(
        capsys, "straighten", square_file, "--start", "0:0", "--word", "0:1", "--end", "1"
    )
    assert code == 0
    assert out == ["point 0,0 vertex 0", "point 2,1 vertex 0", "saddle_connection"]


def test_verdict_and_cylinders(capsys, tmp_path):
    path = os.path.join(str(tmp_path), "big.surface")
    _run(capsys, "build", "big_cylinder", "theta=deg:216", "lam=2", "sectors=3", "--out", path)
    code, out, _ = _run(capsys, "verdict", path)
    assert code == 0
    assert out == ["NOT_TRIANGULABLE_AT_SINGULARITIES", "triangulable_triangles -"]
    code, out, _ = _run(capsys, "cylinders", path)
    assert any(line.startswith("hyperbolic word ") for line in out)


def test_explore_and_render(capsys, square_file, tmp_path):
    dot = os.path.join(str(tmp_path), "flips.dot")
    code, out, _ = _run(capsys, "explore", square_file, "--budget", "30", "--dot", dot)
    assert code == 0
    assert out[0].startswith("states ")
    assert os.path.exists(dot)
    svg = os.path.join(str(tmp_path), "square.svg")
    png = os.path.join(str(tmp_path), "square.png")
    code, out, _ = _run(capsys, "render", square_file, "--svg", svg, "--png", png, "--cylinders")
    assert code == 0
    assert out == [f"wrote {svg}", f"wrote {png}"]


def test_sweep(capsys, tmp_path):
    path = os.path.join(str(tmp_path), "sweep.csv")
    code, out, _ = _run(
        capsys,
        "sweep",
        "--family",
        "dilation_torus",
        "--grid",
        "theta=deg:60;lam=2,10",
        "--budget",
        "20",
        "--csv",
        path,
    )
    assert code == 0
    assert out == [f"wrote {path} (2 rows)"]
    with open(path, newline="") as csv_file:
        assert csv_file.read().startswith("family,params,status")


def test_unwritable_output_is_a_usage_error(capsys, mocker, square_file):
    mocker.patch("affine_flips.cli.save_surface", side_effect=PermissionError("read-only"))
    code, out, err = _run(capsys, "flip", square_file, "--edge", "2", "--out", "flipped.surface")
    assert code == USAGE_ERROR
    assert out == []
    assert "read-only" in err
