import json
import math
from pathlib import Path

import pytest

from flowlab import acceptance, ergodic, maps
from flowlab.cli import main

CONFIGS = Path(__file__).resolve().parents[1] / "scripts" / "configs"


def _run(tmp_path, name, **over):
    cfg = json.loads((CONFIGS / f"{name}.json").read_text())
    cfg["params"].update(over)
    path = tmp_path / f"{name}.json"
    path.write_text(json.dumps(cfg))
    out = tmp_path / "out"
    code = main(["run", str(path), "--output", str(out)])
    return code, json.loads((out / name / "report.json").read_text()), out / name


def test_rotation_report_matches_library(tmp_path):
    code, rep, _ = _run(tmp_path, "rotation", n_max=3000)
    assert code == 0 and rep["passed"]
    theta = rep["config"]["params"]["theta"]
    assert rep["summary"]["convergents"] == [[c.p, c.q] for c in maps.convergents(theta, 20)]
    times = maps.return_times(maps.RotationSystem(theta), maps.CircleState(0.0), 0.01, 3000)
    assert rep["summary"]["return_times"] == times[:50]


def test_logistic_l1_matches_library(tmp_path):
    code, rep, out = _run(tmp_path, "logistic", bins=[64, 128], birkhoff_n=10**5, ensemble=2000)
    rows = (out / "ulam_l1.csv").read_text().splitlines()[1:]
    got = {int(r.split(",")[0]): float(r.split(",")[1]) for r in rows}
    for n in (64, 128):
        lib = ergodic.ulam_invariant_density("logistic", ergodic.UlamPartition(n), 1000, 0).l1_distance()
        assert got[n] == lib
    assert sorted(rep["artifacts"]) == sorted(str(p) for p in out.iterdir())


def test_runs_are_byte_identical(tmp_path):
    (tmp_path / "a").mkdir()
    (tmp_path / "b").mkdir()
    _, _, a = _run(tmp_path / "a", "catmap")
    _, _, b = _run(tmp_path / "b", "catmap")
    assert list(a.glob("*.csv"))
    for f in sorted(a.glob("*.csv")):
        assert f.read_bytes() == (b / f.name).read_bytes()


@pytest.mark.parametrize("doc", [
    "{not json",
    json.dumps([1, 2]),
    json.dumps({"experiment": "nope"}),
    json.dumps({"experiment": "picard", "seed": -1}),
    json.dumps({"experiment": "picard", "params": {"bogus": 1}}),
    json.dumps({"experiment": "picard", "colour": "red"}),
])
def test_bad_configs_exit_2(tmp_path, doc, capsys):
    path = tmp_path / "c.json"
    path.write_text(doc)
    assert main(["run", str(path), "--output", str(tmp_path)]) == 2
    assert "error" in capsys.readouterr().err


def test_usage_errors(capsys):
    assert main([]) == 2
    assert main(["gl"]) == 2
    assert main(["gl", "decide", "box (p"]) == 2
    assert main(["frobnicate"]) == 2


def test_gl_commands(capsys):
    assert main(["gl", "decide", "box p -> box box p"]) == 0
    assert json.loads(capsys.readouterr().out)["valid"] is True
    assert main(["gl", "decide", "!box false"]) == 0
    d = json.loads(capsys.readouterr().out)
    assert d["valid"] is False and len(d["countermodel"]["worlds"]) == 1
    assert main(["gl", "lob", "p & q"]) == 0
    assert json.loads(capsys.readouterr().out)["valid"] is True
    assert main(["gl", "lambda"]) == 0
    lam = json.loads(capsys.readouterr().out)
    assert lam["lambda"] == "true" and all(c["valid"] for c in lam["certificates"])
    assert main(["gl", "hierarchy", "--depth", "3"]) == 0
    h = json.loads(capsys.readouterr().out)
    assert [r["level"] for r in h] == [0, 1, 2]
    assert all(r["next_level_derives_con"] and not r["derives_con"] for r in h)
    assert main(["gl", "hierarchy", "--depth", "20"]) == 2


def test_logic_eval(capsys):
    s = str(CONFIGS / "sin_structure.json")
    assert main(["logic", "eval", "--structure", s, "--formula", "forall t . exists s . X(t,s)"]) == 0
    assert json.loads(capsys.readouterr().out)["value"] is True
    assert main(["logic", "eval", "--structure", s, "--formula", "forall t . forall s . (X(t,s) -> P(s))"]) == 0
    r = json.loads(capsys.readouterr().out)
    assert r["value"] is False and math.sin(r["bindings"]["t"]) <= 0
    assert r["semantics"] == "sampled semantics"
    assert main(["logic", "eval", "--structure", s, "--formula", "X(s,t)"]) == 2


def test_output_env(tmp_path, monkeypatch):
    monkeypatch.setenv("FLOWLAB_OUTPUT_DIR", str(tmp_path / "env"))
    assert main(["run", str(CONFIGS / "gl.json")]) == 0
    assert (tmp_path / "env" / "gl" / "report.json").exists()


def test_verify_all_subset(tmp_path, capsys):
    assert main(["verify-all", "--only", "1,12", "--output", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "[PASS]  1." in out and "[PASS] 12." in out
    assert len(json.loads((tmp_path / "acceptance.json").read_text())) == 2
    assert main(["verify-all", "--only", "x"]) == 2


def test_broken_preimage_is_caught(monkeypatch):
    good = ergodic.logistic_preimages

    def shifted(x):
        a, b = good(x)
        return a + 1e-3, b

    monkeypatch.setattr(ergodic, "logistic_preimages", shifted)
    res = acceptance.run_criterion(3)
    assert not res.passed
    assert res.failures()
    assert "Transfer-operator fixed point" in res.line()
