import json

import pytest

from rcmodel.cli import ConfigError, main, parse_config_text, parse_graph, validate_config
from rcmodel.graph import write_edge_list, build_box_lattice
from rcmodel.samplers import hex_to_config


def _data_lines(path):
    return [ln for ln in path.read_text().splitlines() if ln and not ln.startswith("#")]


def test_config_parsing():
    raw = parse_config_text("# comment\ngraph = triangle\np_grid = 0.1, 0.5  # trailing\nq_grid=2\n")
    cfg = validate_config("exact", raw)
    assert cfg["p_grid"] == [0.1, 0.5] and cfg["q_grid"] == [2.0] and cfg["method"] == "enumerate"
    with pytest.raises(ConfigError):
        validate_config("exact", {"graph": "triangle", "p_grid": "0.1"})
    with pytest.raises(ConfigError):
        validate_config("exact", {"graph": "triangle", "p_grid": "0.1", "q_grid": "1", "colour": "red"})
    with pytest.raises(ConfigError):
        parse_config_text("just words")


def test_graph_specs(tmp_path):
    assert parse_graph("triangle").n_edges == 3
    assert parse_graph("box:3x3").n_edges == 12
    assert parse_graph("box:3x3:wired").vertex_count == 2
    assert parse_graph("ball:1:wired").n_edges == 12
    assert parse_graph("tree:3:2").vertex_count == 13
    f = tmp_path / "g.txt"
    f.write_text(write_edge_list(build_box_lattice(2, [2, 3])))
    assert parse_graph(f"file:{f}").n_edges == 7
    with pytest.raises(ConfigError):
        parse_graph("moebius:4")


def test_missing_seed_is_an_error(tmp_path, capsys):
    rc = main(["exact", "--set", "graph=triangle", "--set", "p_grid=0.5", "--set", "q_grid=2", "--out-dir", str(tmp_path)])
    assert rc == 2 and "seed" in capsys.readouterr().err


def test_exact_grid(tmp_path):
    ps = "0.1,0.3,0.5,0.7,0.9"
    rc = main(["exact", "--seed", "1", "--set", "graph=triangle", "--set", f"p_grid={ps}",
               "--set", "q_grid=0.5,1,2,3,4", "--out-dir", str(tmp_path)])
    assert rc == 0
    rows = _data_lines(tmp_path / "exact.csv")
    assert rows[0] == "p,q,value" and len(rows) == 26
    q1 = [float(r.split(",")[2]) for r in rows[1:] if float(r.split(",")[1]) == 1.0]
    assert q1 == pytest.approx([1.0] * 5, rel=1e-14)
    tri = [float(r.split(",")[2]) for r in rows[1:] if r.startswith("0.5,2.0,")]
    assert tri == pytest.approx([3.5])
    text = (tmp_path / "exact.csv").read_text()
    assert "# tool=rcmodel" in text and "# seed=1" in text and "# config_hash=" in text
    meta = json.loads((tmp_path / "exact.json").read_text())
    assert len(meta["records"]) == 25


def test_exact_empty_grid(tmp_path):
    rc = main(["exact", "--seed", "1", "--set", "graph=triangle", "--set", "p_grid=", "--set", "q_grid=2",
               "--out-dir", str(tmp_path)])
    assert rc == 0 and _data_lines(tmp_path / "exact.csv") == ["p,q,value"]


def test_exact_cap(tmp_path, capsys):
    rc = main(["exact", "--seed", "1", "--set", "graph=box:4x4", "--set", "p_grid=0.5", "--set", "q_grid=2",
               "--cap-edges", "20", "--out-dir", str(tmp_path)])
    assert rc == 2 and "cap" in capsys.readouterr().err


def test_sample_cftp_reproducible(tmp_path):
    args = ["sample", "--seed", "4", "--set", "graph=box:3x3", "--set", "p=0.6", "--set", "q=2",
            "--set", "samples=1000"]
    assert main(args + ["--out-dir", str(tmp_path / "a")]) == 0
    assert main(args + ["--out-dir", str(tmp_path / "b")]) == 0
    a, b = (tmp_path / "a" / "samples.txt").read_bytes(), (tmp_path / "b" / "samples.txt").read_bytes()
    assert a == b
    lines = _data_lines(tmp_path / "a" / "samples.txt")
    assert len(lines) == 1000
    assert hex_to_config(lines[0], 12).shape == (12,)


def test_sample_refusals(tmp_path, capsys):
    rc = main(["sample", "--seed", "1", "--set", "graph=triangle", "--set", "p=0.5", "--set", "q=0.5",
               "--out-dir", str(tmp_path)])
    assert rc == 2 and "q < 1" in capsys.readouterr().err
    rc = main(["sample", "--seed", "1", "--set", "graph=triangle", "--set", "p=0.5", "--set", "q=2.5",
               "--set", "sampler=sw", "--out-dir", str(tmp_path)])
    assert rc == 2 and "integer q" in capsys.readouterr().err


def test_sample_edwards_sokal(tmp_path):
    rc = main(["sample", "--seed", "2", "--set", "graph=triangle", "--set", "p=0.5", "--set", "q=3",
               "--set", "sampler=es", "--set", "samples=5", "--out-dir", str(tmp_path)])
    assert rc == 0
    for line in _data_lines(tmp_path / "samples.txt"):
        bonds, spins = line.split()
        assert len(spins.split(",")) == 3


def test_scan_single_row(tmp_path, monkeypatch):
    monkeypatch.setenv("RCMODEL_OUT_DIR", str(tmp_path))
    rc = main(["scan", "--seed", "3", "--set", "q=2", "--set", "p_grid=0.5", "--set", "sides=4",
               "--set", "samples=64", "--set", "burn_in=5"])
    assert rc == 0
    assert len(_data_lines(tmp_path / "scan.csv")) == 2


def test_meanfield_prediction_column(tmp_path):
    rc = main(["meanfield", "--seed", "5", "--set", "q=1", "--set", "lambdas=2", "--set", "n=2000",
               "--set", "samples=3", "--out-dir", str(tmp_path)])
    assert rc == 0
    header, row = _data_lines(tmp_path / "meanfield.csv")
    assert header.split(",")[-1] == "theta_prediction"
    assert float(row.split(",")[-1]) == pytest.approx(0.796812, abs=1e-6)


def test_dual_triangle(tmp_path, capsys):
    rc = main(["dual", "--seed", "1", "--set", "graph=triangle", "--set", "p=0.3", "--set", "q=2",
               "--out-dir", str(tmp_path)])
    assert rc == 0
    v = json.loads((tmp_path / "dual_verdicts.json").read_text())
    assert v["duality_identity"] is True and v["involution"] is True
    assert "[bijection]" in (tmp_path / "dual_pair.txt").read_text()
    assert len(_data_lines(tmp_path / "dual_parameters.csv")) == 22


def test_check_exit_codes(tmp_path):
    assert main(["check", "--seed", "1", "--set", "checks=duality,meanfield", "--out-dir", str(tmp_path)]) == 0
    summary = json.loads((tmp_path / "check_summary.json").read_text())
    assert summary["all_passed"] and len(summary["checks"]) == 2
    assert main(["check", "--seed", "1", "--set", "checks=outer_circuit", "--out-dir", str(tmp_path)]) == 1
    assert main(["check", "--seed", "1", "--set", "checks=nonsense", "--out-dir", str(tmp_path)]) == 2


def test_config_file(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("seed = 9\ngraph = cycle:4\np = 0.5\nq = 2\nsamples = 10\n")
    assert main(["sample", "--config", str(cfg), "--out-dir", str(tmp_path)]) == 0
    assert "# seed=9" in (tmp_path / "samples.txt").read_text()
