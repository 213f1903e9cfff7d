import csv
import json
import subprocess
import sys

import pytest

from crsf.cli import ExperimentConfig, main, parse_ints, parse_model, parse_vertices, validate
from crsf.graph import c4_chord, grid_graph, theta_graph
from crsf.io import graph_to_dict, save_json


@pytest.fixture
def files(tmp_path):
    save_json(graph_to_dict(theta_graph()), tmp_path / "theta.json")
    save_json(graph_to_dict(grid_graph(2, 3)), tmp_path / "grid.json")
    save_json(graph_to_dict(c4_chord()), tmp_path / "c4.json")
    save_json({"family": "length_decay", "params": {"kappa": 0.0}}, tmp_path / "const.json")
    save_json({"family": "explicit_table", "params": {"table": [[[0, 1, 4, 3], 3.0],
                                                                [[1, 2, 5, 4], 0.5]]}},
              tmp_path / "heavy.json")
    return tmp_path


def _rows(path):
    with open(path) as fh:
        return list(csv.reader(fh))


def test_enumerate_theta(files):
    out = files / "t.csv"
    assert main(["enumerate", "--graph", str(files / "theta.json"),
                 "--model", str(files / "const.json"), "--out", str(out)]) == 0
    rows = _rows(out)
    assert len(rows) == 4
    assert all(float(r[4]) == pytest.approx(1 / 3) for r in rows[1:])
    man = json.loads((files / "t.csv.manifest.json").read_text())
    assert man["notes"]["configurations"] == 3
    assert {"config_hash", "seed", "versions", "wall_time", "steps", "exhausted"} <= set(man)


def test_enumerate_exact_and_wired(files):
    out = files / "w.csv"
    assert main(["enumerate", "--graph", str(files / "grid.json"), "--model", "zero",
                 "--boundary", "0", "--exact", "--out", str(out)]) == 0
    rows = [r for r in _rows(out)[1:] if r[4] != "0"]
    assert len(rows) == 15  # spanning trees of the 2x3 grid
    assert {r[4] for r in rows} == {"1/15"}


def test_verify_conditioning(files):
    assert main(["verify-conditioning", "--graph", str(files / "grid.json"),
                 "--model", str(files / "heavy.json"), "--out", str(files / "v.csv")]) == 0
    assert float(_rows(files / "v.csv")[1][0]) <= 1e-12


def test_sample_is_reproducible(files):
    args = ["sample", "--lattice", "z2", "--model", "plaquette:0.5", "--window", "(0,0),(1,0)",
            "--replicas", "20000", "--seed", "7"]
    assert main(args + ["--out", str(files / "a.csv")]) == 0
    assert main(args + ["--out", str(files / "b.csv"), "--workers", "2"]) == 0
    assert (files / "a.csv").read_bytes() == (files / "b.csv").read_bytes()
    rows = _rows(files / "a.csv")
    assert rows[0] == ["edge", "count", "frequency", "lo", "hi"]
    assert 0.45 < float(rows[1][2]) < 0.55


def test_sample_per_replica_rows(files):
    s = files / "s.csv"
    assert main(["sample", "--graph", str(files / "grid.json"), "--model", "zero",
                 "--boundary", "0", "--replicas", "500", "--samples", str(s),
                 "--out", str(files / "f.csv"), "--plotdata", str(files / "p.json")]) == 0
    assert len(_rows(s)) == 1 + 500
    assert json.loads((files / "p.json").read_text())["series"][0]["name"] == "edge frequency"


def test_sample_conditioned(files):
    assert main(["sample", "--graph", str(files / "grid.json"), "--model",
                 str(files / "heavy.json"), "--condition", "[[0,1,4,3]]", "--replicas", "200",
                 "--out", str(files / "c.csv")]) == 0
    rows = {r[0]: int(r[1]) for r in _rows(files / "c.csv")[1:]}
    assert rows["0"] == 200  # the heavy square's edges are always present


def test_validation_messages(files, capsys):
    g = str(files / "grid.json")
    assert main(["sample", "--graph", g, "--model", "zero"]) == 2
    assert "sampler cannot terminate" in capsys.readouterr().err
    assert main(["sample", "--graph", g, "--model", str(files / "heavy.json")]) == 2
    assert "w_minus" in capsys.readouterr().err
    assert main(["sample", "--graph", g, "--model", "zero", "--boundary", "0",
                 "--replicas", "10", "--out", str(files / "x.csv")]) == 0
    assert main(["sample", "--graph", str(files / "missing.json"), "--model", "zero"]) == 2
    assert "graph: file not found" in capsys.readouterr().err
    assert main(["sample", "--graph", g, "--model", "zero", "--boundary", "99"]) == 2
    assert "boundary: not vertices" in capsys.readouterr().err
    assert main(["stats", "tail", "--lattice", "z2", "--model", "zero"]) == 2
    assert "loop assumption" in capsys.readouterr().err


def test_validate_lists_every_problem():
    errs = validate(ExperimentConfig("stats", lattice="z2", model="plaquette:2",
                                     estimator="correlation", replicas=0))
    joined = " | ".join(errs)
    assert "replicas" in joined and "weights above 1" in joined and "distances" in joined


def test_config_file_and_override(files):
    cfg = files / "run.json"
    save_json({"graph": str(files / "grid.json"), "model": "zero", "boundary": [0],
               "replicas": 50, "seed": 3}, cfg)
    assert main(["sample", "--config", str(cfg), "--replicas", "70",
                 "--samples", str(files / "r.csv"), "--out", str(files / "o.csv")]) == 0
    assert len(_rows(files / "r.csv")) == 71
    man = json.loads((files / "o.csv.manifest.json").read_text())
    assert man["config"]["replicas"] == 70 and man["seed"] == 3
    save_json({"graph": "x", "bogus": 1}, cfg)
    assert main(["sample", "--config", str(cfg)]) == 2


def test_exhaustion_exit_code(files):
    assert main(["sample", "--graph", str(files / "grid.json"), "--model", "zero", "--boundary",
                 "0", "--replicas", "50", "--cap", "1", "--out", str(files / "e.csv")]) == 3
    man = json.loads((files / "e.csv.manifest.json").read_text())
    assert man["exhausted"] > 0


def test_check_assumptions(files, capsys):
    assert main(["check-assumptions", "--lattice", "z2", "--model", "plaquette:0.2",
                 "--out", str(files / "a.csv")]) == 0
    row = dict(zip(*_rows(files / "a.csv")))
    assert float(row["beta"]) == pytest.approx(4.0 ** -5)
    assert main(["check-assumptions", "--lattice", "z2", "--model", "zero"]) == 4


@pytest.mark.parametrize("extra,header", [
    (["tail", "--n-max", "4"], "n"),
    (["connect", "--target", "(1,0),(3,0)"], "x"),
    (["correlation", "--distances", "2:3"], "m"),
    (["components"], "size"),
    (["converge", "--window", "(0,0),(1,0)", "--half-widths", "2,3"], "half_width"),
])
def test_stats_subcommands(files, extra, header):
    out, plot = files / "s.csv", files / "s.json"
    assert main(["stats"] + extra[:1] + ["--lattice", "z2", "--model", "plaquette:0.5",
                                         "--replicas", "2000", "--out", str(out),
                                         "--plotdata", str(plot)] + extra[1:]) == 0
    assert _rows(out)[0][0] == header
    series = json.loads(plot.read_text())["series"]
    assert all(len(s["x"]) == len(s["y"]) == len(s["lo"]) == len(s["hi"]) for s in series)


def test_converge_alias(files):
    assert main(["converge", "--lattice", "z2", "--model", "plaquette:0.5", "--window", "(0,0)",
                 "--half-widths", "1", "--replicas", "500", "--out", str(files / "c.csv")]) == 0


def test_parsers():
    assert parse_vertices("(0,0),(1,0)", lattice=True) == [(0, 0), (1, 0)]
    assert parse_vertices("(0,0)", lattice=True) == [(0, 0)]
    g = grid_graph(2, 2)
    assert parse_vertices("0,3", g) == [0, 3]
    assert parse_vertices("2", g) == [2]
    assert parse_ints("2:5") == [2, 3, 4, 5]
    assert parse_ints("[2, 4]") == [2, 4]
    assert parse_model("plaquette:0.5").params["alpha"] == 0.5
    assert parse_model('{"family": "zero"}').family == "zero"
    with pytest.raises(ValueError):
        parse_model("nonsense")


def test_console_entry_point():
    r = subprocess.run([sys.executable, "-m", "crsf.cli", "--help"], capture_output=True, text=True)
    assert r.returncode == 0
    for cmd in ("enumerate", "verify-conditioning", "sample", "stats", "converge",
                "check-assumptions"):
        assert cmd in r.stdout
