import json
import os
import subprocess
import sys

import pytest

from normtile import io
from normtile.cli import EXIT_FAIL, EXIT_INPUT, EXIT_OK, main


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def brick_file(tmp_path):
    path = tmp_path / "brick.json"
    assert main(["generate", "brick", "--rows", "4", "--cols", "4", "--out", str(path)]) == EXIT_OK
    return path


def test_analyze_brick(capsys, brick_file, tmp_path):
    code, out, _ = run(capsys, "analyze", brick_file, "--symbolic", tmp_path / "pts.csv")
    assert code == EXIT_OK
    rep = json.loads(out)
    assert (rep["n_bar"], rep["v_bar"], rep["n_star_bar"], rep["v_star_bar"], rep["rho"]) == (3, 6, 2, 4, 0.5)
    assert rep["bound_holds"] and rep["normality"]["ok"]
    assert len(rep["nodes"]) == rep["V"] and len(rep["cells"]) == rep["F"]
    assert [p.kind for p in io.read_symbolic_csv(tmp_path / "pts.csv")] == ["combinatorial", "corner"]


def test_analyze_csv_tables(capsys, brick_file, tmp_path):
    prefix = tmp_path / "tab"
    code, out, _ = run(capsys, "analyze", brick_file, "--format", "csv", "--out", prefix)
    assert code == EXIT_OK
    assert json.loads(out)["rho"] == 0.5
    cells = (tmp_path / "tab.cells.csv").read_text().splitlines()
    assert cells[0] == "id,v,q,v_star" and set(cells[1:]) == {f"{k},6,2,4" for k in range(len(cells) - 1)}


def test_env_tolerance_reaches_analyze(capsys, brick_file, monkeypatch):
    monkeypatch.setenv("TILING_ANGLE_TOL", "0.25")
    _, out, _ = run(capsys, "analyze", brick_file)
    assert json.loads(out)["angle_tol"] == 0.25
    _, out, _ = run(capsys, "analyze", brick_file, "--angle-tol", "1e-5")
    assert json.loads(out)["angle_tol"] == 1e-5


def test_missing_file_is_input_error(capsys, tmp_path):
    code, _, err = run(capsys, "analyze", tmp_path / "nope.json")
    assert code == EXIT_INPUT and "error" in err


def test_bad_center(capsys, tmp_path):
    path = tmp_path / "patch.json"
    main(["generate", "honeycomb", "--rows", "6", "--cols", "6", "--manifold", "plane", "--out", str(path)])
    code, _, _ = run(capsys, "ball-sweep", path, "--center", "1", "--radii", "1,2")
    assert code == EXIT_INPUT
    code, out, _ = run(capsys, "ball-sweep", path, "--center", "4.33,3.75", "--radii", "1,2")
    assert code == EXIT_OK
    assert out.splitlines()[0] == "radius,n_bar,v_bar,V,E,F" and len(out.splitlines()) == 3


def test_deregularize_and_infeasible(capsys, tmp_path):
    src = tmp_path / "hc.json"
    main(["generate", "honeycomb", "--out", str(src)])
    out = tmp_path / "hc0.json"
    code, _, _ = run(capsys, "deregularize", src, "--target-rho", "0", "--seed", "3", "--out", out)
    assert code == EXIT_OK
    _, rep, _ = run(capsys, "analyze", out)
    rep = json.loads(rep)
    assert (rep["n_star_bar"], rep["v_star_bar"], rep["rho"]) == (1, 2, 0)
    patch = tmp_path / "patch.json"
    main(["generate", "honeycomb", "--rows", "2", "--cols", "2", "--manifold", "plane", "--out", str(patch)])
    code, _, _ = run(capsys, "deregularize", patch, "--target-rho", "0", "--out", tmp_path / "x.json")
    assert code == EXIT_INPUT


def test_monohedral_check(capsys, tmp_path):
    roof = tmp_path / "roof.json"
    main(["generate", "monohedral_demo", "--kind", "rooftile_curved", "--out", str(roof)])
    code, out, _ = run(capsys, "monohedral-check", roof)
    rep = json.loads(out)
    assert code == EXIT_OK and rep["min_v_star"] == 2 and rep["max_turning_error"] <= 1e-3
    vor = tmp_path / "vor.json"
    main(["generate", "voronoi_torus", "--n-seeds", "20", "--out", str(vor)])
    code, out, _ = run(capsys, "monohedral-check", vor)
    assert code == EXIT_FAIL and json.loads(out)["monohedral"] is False


def test_verify_3d(capsys):
    code, out, _ = run(capsys, "verify-3d")
    assert code == EXIT_OK and json.loads(out)["pass"]
    code, _, _ = run(capsys, "verify-3d", "--grid", "3")
    assert code == EXIT_INPUT


def test_plot(capsys, brick_file, tmp_path):
    pts = tmp_path / "pts.csv"
    run(capsys, "analyze", brick_file, "--symbolic", pts, "--label", "brick")
    svg = tmp_path / "fig.svg"
    code, _, _ = run(capsys, "plot", pts, "--out", svg, "--overlay", "h2", "--overlay", "rays")
    assert code == EXIT_OK
    text = svg.read_text()
    assert 'class="h2"' in text and 'class="ray"' in text


def test_sphere_analysis_and_usage(capsys, tmp_path):
    cube = tmp_path / "cube.json"
    main(["generate", "platonic", "--kind", "cube", "--out", str(cube)])
    code, out, _ = run(capsys, "analyze", cube)
    assert code == EXIT_OK and json.loads(out)["bound_rhs"] == pytest.approx(4 / 3)
    with pytest.raises(SystemExit) as e:
        main(["generate", "penrose", "--out", str(cube)])
    assert e.value.code == 2


def _cli(args, cwd, hash_seed):
    env = dict(os.environ, PYTHONHASHSEED=str(hash_seed))
    return subprocess.run([sys.executable, "-m", "normtile", *args], cwd=cwd, env=env,
                          capture_output=True, check=True).stdout


def test_repeated_invocations_are_identical(tmp_path):
    outputs = []
    for k, hash_seed in enumerate((1, 2)):
        d = tmp_path / str(k)
        d.mkdir()
        _cli(["generate", "voronoi_torus", "--n-seeds", "30", "--seed", "7", "--out", "v.json"], d, hash_seed)
        _cli(["deregularize", "v.json", "--target-rho", "0.5", "--seed", "2", "--out", "d.json"], d, hash_seed)
        report = _cli(["analyze", "d.json", "--symbolic", "p.csv"], d, hash_seed)
        _cli(["plot", "p.csv", "--out", "p.svg", "--overlay", "rays"], d, hash_seed)
        outputs.append([report] + [(d / f).read_bytes() for f in ("v.json", "d.json", "p.csv", "p.svg")])
    assert outputs[0] == outputs[1]
