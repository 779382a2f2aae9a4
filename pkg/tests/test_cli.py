import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from scarlett import cli
from scarlett import fock_basis as fb


def run(tmp_path, *argv):
    out = tmp_path / "out"
    code = cli.main(["--out-dir", str(out), *argv])
    return code, out


def _json_stdout(capsys):
    return json.loads(capsys.readouterr().out)


def test_basis_dump(tmp_path, capsys):
    code, out = run(tmp_path, "basis", "dump", "--L", "3")
    assert code == 0
    assert _json_stdout(capsys)["dimension"] == 10
    rows = list(csv.reader(open(out / "basis.csv")))
    assert rows[0] == ["rank", "n_1", "n_2", "n_3"]
    assert rows[1] == ["0", "3", "0", "0"] and len(rows) == 11
    man = json.load(open(out / "manifest.json"))
    assert set(man) >= {"config_hash", "versions", "wall_time_s", "outputs"}
    assert "basis.csv" in man["outputs"]


def test_sector_info(tmp_path, capsys):
    assert run(tmp_path, "sector", "info", "--L", "12", "--k", "0")[0] == 0
    assert _json_stdout(capsys)["dimension"] == 112720
    assert run(tmp_path, "sector", "info", "--L", "10", "--I", "0", "--component", "h3")[0] == 0
    info = _json_stdout(capsys)
    assert info["dimension"] > 0


def test_ham_dump_real_and_complex(tmp_path, capsys):
    code, out = run(tmp_path, "ham", "dump", "--model", "H1", "--L", "3")
    assert code == 0
    rows = list(csv.reader(open(out / "ham.csv")))
    assert rows[0] == ["row", "col", "value"]
    H = np.zeros((10, 10))
    for r, c, v in rows[1:]:
        H[int(r), int(c)] = float(v)
    assert np.allclose(H, H.T)
    capsys.readouterr()
    code, out = run(tmp_path, "ham", "dump", "--model", "H1", "--L", "4", "--k", "1")
    assert code == 0
    assert list(csv.reader(open(out / "ham.csv")))[0] == ["row", "col", "re", "im"]


def test_graph_subcommands(tmp_path, capsys):
    assert run(tmp_path, "graph", "census", "--L", "12")[0] == 0
    assert _json_stdout(capsys)["diff"] == 462
    assert run(tmp_path, "graph", "census", "--L", "12", "--sector", "k0")[0] == 0
    assert _json_stdout(capsys)["diff"] == 80
    code, out = run(tmp_path, "graph", "components", "--model", "H3", "--L", "3")
    assert code == 0
    info = _json_stdout(capsys)
    assert info["components"] == 7 and info["frozen"] == 4
    code, out = run(tmp_path, "graph", "export", "--model", "H1", "--L", "3")
    assert code == 0 and (out / "graph.dot").read_text().startswith("graph")


def test_spec_subcommands(tmp_path, capsys):
    code, out = run(tmp_path, "spec", "levels", "--model", "H1", "--L", "6", "--k", "0")
    assert code == 0
    E = np.loadtxt(out / "levels.csv", skiprows=1)
    assert np.allclose(np.sort(E), np.sort(-E), atol=1e-9)
    capsys.readouterr()
    code, out = run(tmp_path, "spec", "rstat", "--model", "H2", "--L", "8", "--k", "1")
    assert code == 0
    info = _json_stdout(capsys)
    assert 0 < info["mean_r"] < 1 and info["n_levels"] > 10
    code, out = run(tmp_path, "spec", "entropy-scatter", "--model", "H1", "--L", "6", "--k", "0", "--cut", "3")
    assert code == 0
    assert open(out / "entropy_scatter.csv").readline().strip() == "E,S"
    capsys.readouterr()
    assert run(tmp_path, "spec", "zeromodes", "--model", "H1", "--L", "6")[0] == 0
    assert _json_stdout(capsys)["counts"] == [2, 3, 0, 4, 0, 3]


def test_evolve(tmp_path, capsys):
    code, out = run(tmp_path, "evolve", "--model", "H3", "--init", "210x2", "--tmax", "2", "--dt", "0.01",
                    "--observables", "fidelity,entropy", "--cluster", "minimal")
    assert code == 0
    info = _json_stdout(capsys)
    assert info["first_peak_time"] == pytest.approx(np.pi / 2, abs=1e-3)
    head = open(out / "evolve.csv").readline().strip().split(",")
    assert head == ["t", "fidelity", "entropy", "cluster_overlap"]


def test_cluster(tmp_path, capsys):
    code, out = run(tmp_path, "cluster", "fidelity", "--family", "extended", "--n", "4", "--tmax", "2")
    assert code == 0
    info = _json_stdout(capsys)
    assert info["period"] == pytest.approx(0.7722413, abs=1e-6)
    code, _ = run(tmp_path, "cluster", "fidelity", "--family", "h3", "--n", "2", "--symmetrized", "--tmax", "2")
    assert _json_stdout(capsys)["first_peak"]["t"] == pytest.approx(np.pi / 4, abs=1e-3)


def test_zeromodes(tmp_path, capsys):
    assert run(tmp_path, "zeromodes", "--model", "H2", "--Lmax", "6")[0] == 0
    rows = _json_stdout(capsys)["rows"]
    assert [r["total"] for r in rows] == [1, 0, 3, 0, 10]


def test_reproduce(tmp_path, capsys):
    code, out = run(tmp_path, "reproduce", "fig1")
    assert code == 0 and (out / "fig1_H3.dot").exists()
    capsys.readouterr()
    assert run(tmp_path, "reproduce", "figX")[0] == 2


def test_run_config(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"experiment": "census", "L": 8, "out_dir": str(tmp_path / "cfgout")}))
    assert cli.main(["run", "--config", str(cfg)]) == 0
    assert _json_stdout(capsys)["diff"] == 35
    assert (tmp_path / "cfgout" / "manifest.json").exists()
    cfg.write_text(json.dumps({"experiment": "zeromodes", "model": "H1", "L": 5, "zero_tol": 1e-6}))
    assert run(tmp_path, "run", "--config", str(cfg))[0] == 0
    assert _json_stdout(capsys)["rows"][0]["counts"] == [2, 1, 1, 1, 1]


@pytest.mark.parametrize("body", ["", "{}", '{"experiment": "census", "bogus": 1}', "[1]", "{bad json"])
def test_bad_configs_exit_2(tmp_path, body):
    cfg = tmp_path / "c.json"
    cfg.write_text(body)
    assert run(tmp_path, "run", "--config", str(cfg))[0] == 2


def test_error_exit_codes(tmp_path):
    assert cli.main(["--capacity", "100", "--out-dir", str(tmp_path), "basis", "dump", "--L", "8"]) == 3
    assert cli.main(["basis", "dump"]) == 2
    assert cli.main(["nonsense"]) == 2
    assert run(tmp_path, "evolve", "--init", "21a")[0] == 2


def test_capacity_flag_does_not_leak(tmp_path):
    before = fb.MATERIALIZED_LIMIT
    cli.main(["--capacity", "100", "--out-dir", str(tmp_path), "basis", "dump", "--L", "8"])
    assert fb.MATERIALIZED_LIMIT == before


def test_module_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "scarlett.cli", "--out-dir", str(tmp_path), "graph", "census", "--L", "4"],
                         capture_output=True, text=True, check=True)
    assert json.loads(res.stdout)["diff"] == 3
