import json

import pytest

from critdimer.cli import main
from critdimer.permutations import top_cell
from critdimer.plabic import le_graph


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_perm_info(capsys):
    code, out = run(capsys, "perm", "info", "--f", "3,4,5,6")
    assert code == 0
    data = json.loads(out)
    assert data["k"] == 2 and data["necklace"][0] == "1,2"


def test_perm_dsh(capsys):
    code, out = run(capsys, "perm", "dsh", "--f", "3,4,5,6")
    assert json.loads(out)["window"] == [2, 3, 4, 5]


def test_strand_components(capsys):
    code, out = run(capsys, "strand", "components", "--f", "3,4,5,6")
    data = json.loads(out)
    assert data["c_f"] == 1 and data["d_f"] == 3


def test_strand_admissible(capsys):
    code, out = run(capsys, "strand", "admissible", "--f", "3,4,5,6",
                    "--theta", "0,0.5,1.0,1.5")
    assert json.loads(out)["admissible"] is True


def test_graph_and_measure_files(tmp_path, capsys):
    code, out = run(capsys, "graph", "le", "--f", "3,4,5,6")
    assert code == 0
    data = json.loads(out)
    assert data["reduced"] is True
    gfile = tmp_path / "g.json"
    gfile.write_text(json.dumps({k: data[k] for k in
                                 ("n", "vertices", "boundary", "edges", "rotations")}))
    code, out = run(capsys, "measure", "--graph", str(gfile), "--symbolic")
    assert code == 0
    coords = json.loads(out)
    assert coords["1,3"] == "t2^-1*t4 - t2*t4^-1"


def test_verify_laurent_golden(capsys):
    code, out = run(capsys, "verify", "laurent", "--f", "3,4,5,6")
    assert code == 0
    rep = json.loads(out)
    assert rep["pass"] is True
    coords = rep["cases"][0]["coords"]
    assert coords["2,4"] == "t1^-1*t3 - t1*t3^-1"   # the Ptolemy coordinate [13]


def test_verify_curve_and_twist(capsys):
    code, out = run(capsys, "verify", "curve", "--f", "3,4,5,6,7", "--trials", "3")
    assert code == 0 and json.loads(out)["pass"]
    code, out = run(capsys, "verify", "twist", "--f", "3,4,5,6", "--trials", "3")
    assert code == 0 and json.loads(out)["pass"]


def test_verify_squaremove(capsys):
    code, out = run(capsys, "verify", "squaremove", "--f", "3,4,5,6", "--trials", "5")
    assert code == 0 and json.loads(out)["pass"]


def test_elec_regular(capsys):
    code, out = run(capsys, "elec", "regular", "--N", "3")
    assert code == 0
    rep = json.loads(out)
    vals = [rep["Lambda"][0][f"L{q}"] for q in (1, 2, 3)]
    assert abs(vals[1] - 0.57735) < 1e-4
    assert abs(vals[0] + 1.1547) < 1e-4


def test_elec_region(capsys):
    code, out = run(capsys, "elec", "region", "--tau", "3,4,1,2", "--seed", "1")
    assert code == 0 and json.loads(out)["pass"]


def test_dual_and_shift_verify(capsys):
    code, out = run(capsys, "dual", "verify", "--f", "3,4,5,6", "--trials", "3")
    assert code == 0 and json.loads(out)["pass"]
    code, out = run(capsys, "shift", "verify", "--pair", "bundled:f24", "--trials", "3")
    assert code == 0 and json.loads(out)["pass"]


def test_reconstruct_cli(tmp_path, capsys):
    from critdimer.measurement import meas_f_theta
    from critdimer.strands import theta_sample

    f = top_cell(2, 4)
    th = theta_sample(f, 3)
    X = meas_f_theta(f, th)
    pfile = tmp_path / "p.json"
    pfile.write_text(json.dumps({",".join(map(str, sorted(I))): str(X[I])
                                 for I in X.subsets()}))
    code, out = run(capsys, "reconstruct", "--pluckers", str(pfile),
                    "--k", "2", "--n", "4")
    assert code == 0
    rec = json.loads(out)["theta"]
    assert max(abs(a - b) for a, b in zip(rec, th.values)) < 1e-8


def test_usage_errors(capsys):
    # invalid window -> exit 2 (the spec's example window 2,4,5,7 is actually
    # a valid bounded affine permutation; 5,4,5,6 is not)
    code, _ = run(capsys, "verify", "curve", "--f", "5,4,5,6", "--trials", "2")
    assert code == 2
    code, _ = run(capsys, "perm", "info", "--f", "1,2,x")
    assert code == 2
    code, _ = run(capsys, "measure", "--graph", "/nonexistent.json")
    assert code == 2


def test_deterministic_reports(capsys):
    code, out1 = run(capsys, "verify", "curve", "--f", "3,4,5,6", "--trials", "4",
                     "--seed", "9")
    code, out2 = run(capsys, "verify", "curve", "--f", "3,4,5,6", "--trials", "4",
                     "--seed", "9")
    assert out1 == out2


def test_move_cli(tmp_path, capsys):
    G = le_graph(top_cell(2, 4))
    gfile = tmp_path / "g.json"
    gfile.write_text(json.dumps(G.to_json()))
    code, out = run(capsys, "move", "--graph", str(gfile), "--face", "2,4")
    assert code == 0
    assert json.loads(out)["measurement_deviation"] < 1e-12
