import json

import numpy as np
import pytest

from gaussclone import cli
from gaussclone import gaussian as gc
from gaussclone.errors import ParseError


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def read_csv(text):
    lines = text.splitlines()
    assert lines[0].startswith("# gaussclone v1; config-hash=")
    columns = lines[1].split(",")
    rows = np.array([[float(v) for v in line.split(",")] for line in lines[2:]])
    return columns, rows


def test_parse_state():
    assert cli.parse_state("vacuum").allclose(gc.vacuum(), atol=0)
    assert cli.parse_state("coherent:1+0.5i").allclose(gc.coherent(1 + 0.5j), atol=0)
    assert cli.parse_state("squeezed:0.2,0.4").allclose(gc.squeezed_coherent(0.2, 0.4), atol=0)
    assert cli.parse_state("thermal_sq:0.5,-0.3").allclose(gc.squeezed_thermal(0.5, -0.3), atol=0)
    for bad in ("coherent", "squeezed:1", "foo:1", "coherent:x", "vacuum:1"):
        with pytest.raises(ParseError):
            cli.parse_state(bad)


def test_parse_grid():
    np.testing.assert_allclose(cli.parse_grid("0:1:0.25"), [0, 0.25, 0.5, 0.75, 1.0])
    np.testing.assert_allclose(cli.parse_grid("0:1.5:0.05")[-1], 1.5)
    assert len(cli.parse_grid("0:3:0.1")) == 31
    np.testing.assert_allclose(cli.parse_grid("0.1,0.2,1"), [0.1, 0.2, 1.0])
    for bad in ("1:0:0.1", "0:1:0", "0.5,0.1", "a:b:c", ""):
        with pytest.raises(ParseError):
            cli.parse_grid(bad)


def test_parse_gain():
    assert cli.parse_gain("auto1", 0.25) == pytest.approx(np.sqrt(3))
    assert cli.parse_gain("auto2", 0.25) == pytest.approx(-1 / np.sqrt(3))
    assert cli.parse_gain("-0.5", 0.5) == -0.5
    with pytest.raises(ParseError):
        cli.parse_gain("big", 0.5)


def test_fig2_csv(capsys):
    code, out, _ = run(capsys, "fig2", "--r-grid", "0:1.5:0.05")
    assert code == 0
    columns, rows = read_csv(out)
    assert columns == ["r", "f_opt_ancilla", "f_vacuum_ancilla"]
    assert rows.shape == (31, 3)
    np.testing.assert_allclose(rows[:, 2], 1 / np.sqrt(1.25 + np.cosh(2 * rows[:, 0])), atol=1e-12)
    assert np.all(rows[1:, 1] > rows[1:, 2])


def test_fig3_columns(capsys):
    code, out, _ = run(capsys, "fig3", "--r-grid", "0:1:0.5")
    assert code == 0
    columns, rows = read_csv(out)
    assert columns == ["r", "g_1", "g_0.75", "g_0.5"]
    assert np.all(rows[0, 1:] == 0)
    assert np.all(rows[1:, 1] > rows[1:, 2]) and np.all(rows[1:, 2] > rows[1:, 3])


def test_fig4_fig5(capsys):
    code, out, _ = run(capsys, "fig4", "--alpha-grid", "0:2:0.5")
    assert code == 0
    columns, rows = read_csv(out)
    assert columns[:3] == ["alpha", "h_e_eta1", "abs_error_eta1"]
    assert len(columns) == 7
    np.testing.assert_allclose(rows[:, 1], [0.5, 0.2398, 0.0786, 0.0170, 0.0023], atol=1e-4)
    code, out, _ = run(capsys, "fig5", "--alpha-grid", "0,1", "--format", "json")
    doc = json.loads(out)
    assert code == 0
    assert doc["columns"][1] == "h_e_eps1"
    assert doc["config"]["settings"][0] == [0.75, 1.0]
    assert len(doc["rows"]) == 2


def test_config_hash_tracks_config(capsys):
    _, a, _ = run(capsys, "fig2", "--r-grid", "0,1")
    _, b, _ = run(capsys, "fig2", "--r-grid", "0,1", "--eta", "0.5")
    assert a.splitlines()[0] != b.splitlines()[0]


def test_clone_json(capsys):
    code, out, _ = run(capsys, "clone", "coherent:1", "vacuum", "--g", "auto1")
    assert code == 0
    doc = json.loads(out)
    assert doc["fidelity"]["clone1_rho1"] == pytest.approx(2 / 3, abs=1e-12)
    np.testing.assert_allclose(doc["clone1"]["mean"], [np.sqrt(2), 0], atol=1e-14)
    code, out, _ = run(capsys, "clone", "vacuum", "coherent:1", "--g", "auto2", "--flip")
    doc = json.loads(out)
    assert doc["fidelity"]["clone2_rho2"] == pytest.approx(2 / 3, abs=1e-12)
    code, out, _ = run(capsys, "clone", "coherent:1", "vacuum", "--single-shot", "0.5+0.1i")
    assert json.loads(out)["single_shot"]["density"] > 0


def test_optimize_ancilla(capsys):
    code, out, _ = run(capsys, "optimize-ancilla", "squeezed:0,0.5")
    doc = json.loads(out)
    assert code == 0
    assert abs(doc["s_bar"] - doc["s_numeric"]) <= 1e-4
    assert doc["f_opt_ancilla"] >= doc["f_vacuum_ancilla"]


def test_exit_codes(capsys, tmp_path):
    code, _, err = run(capsys, "clone", "foo", "vacuum")
    assert code == 2 and err.startswith("gaussclone: error:")
    code, _, err = run(capsys, "fig2", "--eta", "0")
    assert code == 2
    code, _, err = run(capsys, "fig4", "--alpha-grid", "1", "--method", "mc", "--budget", "100", "--tol", "1e-9")
    assert code == 3 and "budget" in err
    code, _, _ = run(capsys, "fig2", "--out", str(tmp_path / "missing" / "x.csv"))
    assert code == 2
    with pytest.raises(SystemExit) as exc:
        cli.main(["nope"])
    assert exc.value.code == 2


def test_out_file_written(capsys, tmp_path):
    path = tmp_path / "f.csv"
    code, out, _ = run(capsys, "fig2", "--r-grid", "0,1", "--out", str(path))
    assert code == 0 and out == ""
    assert path.read_text().startswith("# gaussclone v1")
    assert [p.name for p in tmp_path.iterdir()] == ["f.csv"]


def test_mc_output_deterministic(tmp_path, monkeypatch):
    args = ["fig4", "--alpha-grid", "0:1:0.5", "--method", "mc", "--budget", "2000"]
    paths = []
    for i, threads in enumerate(("1", "1", "3")):
        monkeypatch.setenv("GAUSSCLONE_THREADS", threads)
        paths.append(tmp_path / f"run{i}.csv")
        assert cli.main(args + ["--out", str(paths[-1])]) == 0
    blobs = [p.read_bytes() for p in paths]
    assert blobs[0] == blobs[1] == blobs[2]
    assert cli.main(args + ["--seed", "7", "--out", str(tmp_path / "other.csv")]) == 0
    assert (tmp_path / "other.csv").read_bytes() != blobs[0]
