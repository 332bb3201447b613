import json
from pathlib import Path

import pytest

from npg import io
from npg.deform import chain, manin
from npg.display import normal_form_display, standard_gram, supersingular_pqp
from npg.errors import MalformedFile, SchemaVersionMismatch
from npg.newton import parse_np, symmetric_nps
from npg.witt import make_ring

GOLDEN = Path(__file__).parent / "golden"


def test_golden_display_is_reproduced_exactly():
    D, _ = supersingular_pqp(1, make_ring(2, 1, 3))
    assert io.dumps(D) == (GOLDEN / "display_ss1_p2.json").read_text()
    data = json.loads((GOLDEN / "display_ss1_p2.json").read_text())
    # -1 in W_3(F_2) has Witt coordinates (1, 1, 1)
    assert data["entries"][0][1] == [[1], [1], [1]]
    assert data["ring"] == {"p": 2, "m": 1, "N": 3, "modulus": [0, 1]}


def test_golden_gram_over_extension():
    S = standard_gram(make_ring(3, 2, 2), 1)
    assert io.dumps(S) == (GOLDEN / "gram_g1_p3m2.json").read_text()
    # -1 in W_2(F_9) is the Teichmueller lift of 2
    assert json.loads(io.dumps(S))["entries"][1][0] == [[2, 0], [0, 0]]


@pytest.mark.parametrize("name", ["display_ss1_p2", "gram_g1_p3m2", "witness_ordinary_g1_p3", "family_g1_p3"])
def test_golden_files_round_trip(name):
    text = (GOLDEN / f"{name}.json").read_text()
    assert io.dumps(io.loads(text)) == text


def test_golden_witness_still_verifies():
    w = io.load(GOLDEN / "witness_ordinary_g1_p3.json", "witness")
    ok, report = io.verify_witness(w)
    assert ok, report


def test_random_display_round_trip(rng):
    R = make_ring(5, 2, 4)
    D = normal_form_display(R, 2, 2, {(0, 3): R.random_unit(rng), (1, 2): R.random(rng)})
    assert io.loads(io.dumps(D), "display") == D


def test_witness_round_trips_and_verifies(tmp_path):
    for w in chain(list(reversed(symmetric_nps(2))), 2):
        path = tmp_path / "w.json"
        io.save(w, path)
        back = io.load(path)
        assert back.display == w.display and back.special_np == w.special_np
        assert io.dumps(back) == io.dumps(w)
        assert io.verify_witness(back)[0]


def test_tampered_witness_fails_verification():
    w = manin(parse_np("(1,0)^2+(0,1)^2"), 3)
    data = json.loads(io.dumps(w))
    data["generic_np"] = "(1,1)^2"
    ok, report = io.verify_witness(io.witness_from_json(data))
    assert not ok
    assert any(line.startswith("FAIL") for line in report)


def test_schema_errors():
    text = (GOLDEN / "display_ss1_p2.json").read_text()
    data = json.loads(text)
    data["schema"] = "npg/display/2"
    with pytest.raises(SchemaVersionMismatch):
        io.loads(json.dumps(data), "display")
    data["schema"] = "npg/gram/1"
    with pytest.raises(MalformedFile):
        io.loads(json.dumps(data), "display")
    with pytest.raises(MalformedFile):
        io.loads(text[: len(text) // 2])
    with pytest.raises(MalformedFile):
        io.loads("[]")


def test_malformed_contents():
    data = json.loads((GOLDEN / "display_ss1_p2.json").read_text())
    bad = dict(data, entries=[[data["entries"][0][0]]])
    with pytest.raises(MalformedFile):
        io.display_from_json(bad)
    bad = dict(data, ring=dict(data["ring"], modulus=[1, 1]))
    with pytest.raises(MalformedFile):
        io.display_from_json(bad)
    bad = dict(data, ring=dict(data["ring"], N=0))
    with pytest.raises(MalformedFile):
        io.display_from_json(bad)
    with pytest.raises(MalformedFile):
        io.load("/nonexistent/file.json")
