import csv
import json
import subprocess
import sys

import pytest

from hyperentropy import __version__
from hyperentropy.cli import main


@pytest.fixture
def er_file(tmp_path):
    path = tmp_path / "er.json"
    assert main(["example", "--name", "er", "--out", str(path)]) == 0
    return path


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_exact_entropy(capsys, er_file):
    assert run(capsys, "entropy", "--hypergraphon", str(er_file), "--n", "4") == (0, "6.0\n", "")


def test_entropy_curve_csv(capsys, er_file, tmp_path):
    out = tmp_path / "h.csv"
    code, _, _ = run(capsys, "entropy", "--hypergraphon", str(er_file), "--n", "5", "--n-min", "2", "--csv", str(out))
    rows = list(csv.reader(out.open()))
    assert code == 0 and rows[0] == ["n", "h_bits", "method", "stderr"]
    assert [(r[0], float(r[1])) for r in rows[1:]] == [("2", 1.0), ("3", 3.0), ("4", 6.0), ("5", 10.0)]


def test_mc_entropy(capsys, er_file):
    code, out, _ = run(capsys, "entropy", "--hypergraphon", str(er_file), "--n", "3", "--method", "mc", "--samples", "5000", "--seed", "1")
    est, se = map(float, out.split())
    assert code == 0 and abs(est - 3) < 0.1 and se > 0


def test_mc_requires_seed(capsys, er_file):
    code, _, err = run(capsys, "entropy", "--hypergraphon", str(er_file), "--n", "3", "--method", "mc")
    assert code == 1 and "--seed" in err


def test_resource_limit_exit_code(capsys, er_file):
    code, _, err = run(capsys, "entropy", "--hypergraphon", str(er_file), "--n", "30")
    assert code == 2 and "resource limit" in err


def test_sample_is_reproducible(capsys, er_file):
    a = run(capsys, "sample", "--hypergraphon", str(er_file), "--n", "5", "--seed", "3")[1]
    b = run(capsys, "sample", "--hypergraphon", str(er_file), "--n", "5", "--seed", "3")[1]
    data = json.loads(a)
    assert a == b and data["n"] == 5


def test_uniform_entropy(capsys):
    assert run(capsys, "uniform-entropy", "--profile", "2:1", "--n", "3")[:2] == (0, "6\n")
    assert run(capsys, "uniform-entropy", "--profile", "2x1", "--n", "3")[0] == 1


def test_validate_ok(capsys, er_file):
    assert run(capsys, "validate", "--hypergraphon", str(er_file))[:2] == (0, "ok\n")


def test_validate_reports_violations(capsys, tmp_path):
    from hyperentropy import core
    from hyperentropy import hypergraphon as H

    top, bot = H.delta_top(2), H.delta_bottom(2)
    W = H.from_function(core.Signature.hypergraph(2), H.Grid.uniform(2), lambda c: top if c == (0, 0, 1) else bot)
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(W.to_json()))
    code, out, _ = run(capsys, "validate", "--hypergraphon", str(path))
    assert code == 1 and out.startswith("violation sigma=")
    assert run(capsys, "sample", "--hypergraphon", str(path), "--n", "3", "--seed", "0")[0] == 1


def test_rado_listing(capsys):
    code, out, _ = run(capsys, "rado", "--k", "2", "--gens", "1")
    assert code == 0 and [g["size"] for g in json.loads(out)["generations"]] == [1, 2]


def test_blowup_schedule_and_sample(capsys, tmp_path):
    gamma = tmp_path / "gamma.csv"
    gamma.write_text("n,gamma\n" + "".join(f"{n},1/{2**n}\n" for n in range(1, 30)))
    sched = tmp_path / "sched.json"
    assert run(capsys, "blowup-schedule", "--k", "2", "--gamma", str(gamma), "--rmax", "4", "--out", str(sched))[0] == 0
    assert json.loads(sched.read_text())["g"] == [32, 64, 128, 256]
    code, out, _ = run(capsys, "blowup-sample", "--sched", str(sched), "--n", "6", "--seed", "2")
    assert code == 0 and json.loads(out)["n"] == 6


def test_blowup_schedule_constant_tail_fails(capsys, tmp_path):
    gamma = tmp_path / "gamma.csv"
    gamma.write_text("n,gamma\n3,0.5\n")
    code, _, err = run(capsys, "blowup-schedule", "--k", "2", "--gamma", str(gamma), "--rmax", "2", "--tail", "constant")
    assert code == 1 and "error" in err


def test_interdef_round_trip(capsys, tmp_path):
    from hyperentropy.core import RedundantStructure, Signature

    M = RedundantStructure(Signature([("R", 2)]), 3, {"R": [(0, 0), (1, 2)]})
    src = tmp_path / "m.json"
    src.write_text(json.dumps(M.to_json()))
    mid = tmp_path / "n.json"
    back = tmp_path / "back.json"
    assert run(capsys, "interdef", "--kind", "redundancy", "--in", str(src), "--out", str(mid))[0] == 0
    assert run(capsys, "interdef", "--kind", "redundancy", "--in", str(mid), "--inverse", "--out", str(back))[0] == 0
    assert json.loads(back.read_text()) == json.loads(src.read_text())


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == 1
    with pytest.raises(SystemExit) as info:
        main(["--version"])
    assert info.value.code == 0 and __version__ in capsys.readouterr().out


def test_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "validate", "--hypergraphon", str(tmp_path / "nope.json"))
    assert code == 1 and "cannot read" in err


def test_module_entry_point(er_file):
    proc = subprocess.run(
        [sys.executable, "-m", "hyperentropy.cli", "entropy", "--hypergraphon", str(er_file), "--n", "3"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0 and proc.stdout == "3.0\n"
