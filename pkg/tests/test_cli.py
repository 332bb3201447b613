import json
import subprocess
import sys

import pytest

from npg import io
from npg.cli import main, run

ORD2 = "(1,0)^2+(0,1)^2"
MID2 = "(1,0)^1+(1,1)^1+(0,1)^1"
SS2 = "(1,1)^2"


def test_np_dim():
    res = run(["np", "dim", "(1,0)^1+(0,1)^2"])
    assert (res.code, res.stdout) == (0, "2\n")
    res = run(["np", "dim", SS2, "--symmetric", "--json"])
    assert json.loads(res.stdout)["dim"] == 1


@pytest.mark.parametrize("a,b,rel", [(SS2, ORD2, "above"), (ORD2, MID2, "below"), (SS2, SS2, "equal"),
                                     ("(1,0)^1+(1,2)^1", "(2,1)^1+(0,1)^1", "incomparable")])
def test_np_cmp(a, b, rel):
    res = run(["np", "cmp", a, b])
    assert res.code == 0 and res.stdout.strip() == rel


def test_np_cmp_different_endpoints_is_a_usage_error():
    res = run(["np", "cmp", "(1,1)^1", "(1,0)^1"])
    assert res.code == 2
    assert "incomparable endpoints" in res.stderr


def test_np_enum_and_poset():
    res = run(["np", "enum", "--h", "4", "--d", "2", "--json"])
    assert len(json.loads(res.stdout)) == 5
    res = run(["np", "enum", "--h", "4", "--d", "2", "--symmetric"])
    assert res.stdout.split() == [ORD2, MID2, SS2]
    res = run(["np", "poset", "--g", "2", "--symmetric", "--dot"])
    assert res.stdout.startswith("digraph") and res.stdout.count("->") == 2
    res = run(["np", "poset", "--h", "3", "--d", "1", "--json"])
    assert len(json.loads(res.stdout)["covers"]) == 2
    assert run(["np", "poset"]).code == 2


def test_bad_arguments():
    assert run(["np", "dim", "(1,1"]).code == 2
    assert run(["frobnicate"]).code == 2
    assert run([]).code == 2


def test_display_workflow(tmp_path):
    seed = tmp_path / "seed.json"
    res = run(["display", "seed", "--np", MID2, "--p", "3", "--N", "8", "--out", str(seed)])
    assert res.code == 0 and seed.exists()
    for method in ("oracle", "cayley", "hull"):
        res = run(["display", "np", "--in", str(seed), "--method", method])
        assert res.stdout.strip() == MID2
    res = run(["display", "invariants", "--in", str(seed), "--json"])
    inv = json.loads(res.stdout)
    assert inv["p_rank"] == 1 and inv["a_number"] == 1 and inv["formal"] is False
    res = run(["display", "seed", "--np", SS2, "--p", "3", "--N", "8", "--out", str(seed)])
    nf = tmp_path / "nf.json"
    res = run(["display", "normalform", "--in", str(seed), "--out", str(nf)])
    assert res.code == 0, res.stderr
    assert run(["display", "np", "--in", str(nf), "--method", "cayley"]).stdout.strip() == SS2
    res = run(["display", "normalform", "--in", str(seed), "--symplectic", "--out", str(nf)])
    assert res.code == 0, res.stderr


def test_normalform_of_etale_part_is_a_usage_error(tmp_path):
    seed = tmp_path / "seed.json"
    run(["display", "seed", "--np", MID2, "--p", "2", "--N", "8", "--out", str(seed)])
    res = run(["display", "normalform", "--in", str(seed)])
    assert res.code == 2 and "p-rank" in res.stderr


def test_realize_and_verify(tmp_path):
    seed, out = tmp_path / "seed.json", tmp_path / "w.json"
    run(["display", "seed", "--np", SS2, "--p", "2", "--out", str(seed)])
    res = run(["realize", "--from", str(seed), "--target", ORD2, "--symmetric", "--out", str(out)])
    assert res.code == 0, res.stderr
    assert f"generic: {ORD2}" in res.stdout
    res = run(["verify", "--in", str(out)])
    assert res.code == 0 and res.stdout.strip().endswith("verified")
    res = run(["realize", "--from", str(seed), "--target", "(1,1)^1", "--out", str(out)])
    assert res.code == 2


def test_verify_detects_tampering(tmp_path):
    res = run(["manin", "--g", "2", "--xi", MID2, "--p", "3"])
    assert res.code == 0
    data = json.loads(res.stdout)
    data["generic_np"] = ORD2
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(data))
    res = run(["verify", "--in", str(bad)])
    assert res.code == 1 and "VERIFICATION FAILED" in res.stdout


def test_verify_missing_or_truncated(tmp_path):
    assert run(["verify", "--in", str(tmp_path / "none.json")]).code == 2
    path = tmp_path / "cut.json"
    path.write_text(run(["manin", "--g", "1", "--xi", SS2[:-2] + "1", "--p", "2"]).stdout[:50])
    assert run(["verify", "--in", str(path)]).code == 2


def test_manin_checks_height():
    res = run(["manin", "--g", "3", "--xi", SS2, "--p", "2"])
    assert res.code == 2


def test_chain_accepts_both_orders(tmp_path):
    forward = f"{SS2};{MID2};{ORD2}"
    backward = f"{ORD2};{MID2};{SS2}"
    a = run(["chain", "--nps", forward, "--p", "2", "--out-dir", str(tmp_path)])
    b = run(["chain", "--nps", backward, "--p", "2", "--json"])
    assert a.code == b.code == 0
    assert len(json.loads(b.stdout)) == 2
    assert sorted(p.name for p in tmp_path.iterdir()) == ["link_1.json", "link_2.json"]
    assert io.verify_witness(io.load(tmp_path / "link_2.json"))[0]


def test_selftest_subset():
    res = run(["selftest", "--quick", "--only", "2,5"])
    assert res.code == 0
    assert res.stdout.count("[PASS]") == 2
    assert run(["selftest", "--only", "x"]).code == 2


def test_selftest_threads(monkeypatch):
    monkeypatch.setenv("NPG_THREADS", "2")
    res = run(["selftest", "--quick", "--only", "4,5"])
    assert res.code == 0
    lines = [ln for ln in res.stdout.splitlines() if ln.startswith("[")]
    assert [ln.split()[1] for ln in lines] == ["4.", "5."]
    monkeypatch.setenv("NPG_THREADS", "many")
    assert run(["selftest", "--quick", "--only", "5"]).code == 2


def test_main_and_module_entry_point(capsys):
    assert main(["np", "dim", SS2]) == 0
    assert capsys.readouterr().out == "1\n"
    proc = subprocess.run([sys.executable, "-m", "npg", "np", "dim", "(1,0)^1+(0,1)^2"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout == "2\n"
