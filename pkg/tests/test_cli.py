import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import PAIR_FILES
from torman.cli import ParseError, parse_element, run
from torman.exactalg import IntPoly, LaurentPoly
from torman.kfacering import RestrictionTuple
from torman.presentation import Presentation


def call(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_validate(capsys):
    code, out, _ = call(capsys, "validate", "examples/cp2.pair.json")
    assert code == 0 and out.strip() == "valid, 3 vertices, χ=3"


def test_validate_failure_is_structured(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"n": 2, "lambda": [[2, 0], [0, 1]], "nerve_maximal": [[1, 2]]}))
    code, out, _ = call(capsys, "--format", "json", "validate", str(bad))
    assert code == 1
    rep = json.loads(out)
    assert rep["valid"] is False
    assert rep["bad_vertices"] == [{"vertex": [1, 2], "det": 2}]
    code, _, _ = call(capsys, "cohomology", str(bad))
    assert code == 1


def test_betti(capsys):
    code, out, _ = call(capsys, "betti", "examples/hirzebruch1.fan.json")
    assert code == 0 and out.strip() == "1,0,2,0,1"
    assert call(capsys, "betti", "cp2.pair.json")[1].strip() == "1,0,1,0,1"


def test_s4_bundle_cohomology(capsys):
    code, out, _ = call(capsys, "bundle-cohomology", "examples/s4.poset.json", "--base", "examples/cp1.base.json", "--reduce", "x_a")
    assert code == 0
    for line in ["x_G*x_H - x_a - x_b", "x_a*x_b", "x_G", "x_H - t", "graded ranks: 1,0,1,0,1,0,1", "Z-rank: 4", "x_a  ->  -x_b"]:
        assert line in out
    assert "2*codim(F)" in out


def test_bundle_cohomology_pair(capsys):
    code, out, _ = call(capsys, "bundle-cohomology", "cp1.pair.json", "--base", "cp1.rank1.base.json", "--reduce", "x1")
    assert code == 0
    assert "x1 - x2 - t" in out and "Z-rank 4 (expected 4)" in out
    assert "x1  ->  (t)*1 + (1)*x2" in out


def test_bundle_kring(capsys):
    code, out, _ = call(capsys, "bundle-kring", "cp1.pair.json", "--base", "cp1.rank1.kbase.json", "--reduce", "y1*y2^-1")
    assert code == 0
    assert "-s + y1*y2^-1 - 1" in out
    assert "y1*y2^-1  ->  (s + 1)*1" in out


def test_base_rank_mismatch(capsys):
    code, out, _ = call(capsys, "bundle-cohomology", "cp1.pair.json", "--base", "cp1.base.json")
    assert code == 1 and "rank" in out
    code, _, _ = call(capsys, "bundle-kring", "cp1.pair.json", "--base", "cp1.rank1.base.json")
    assert code == 1


def test_kring_variants(capsys):
    _, out_y, _ = call(capsys, "kring", "cp1.pair.json")
    _, out_x, _ = call(capsys, "kring", "cp1.pair.json", "--variant", "x")
    assert "y1*y2^-1 - 1" in out_y
    assert "-x1 + x2" in out_x
    code, out, _ = call(capsys, "kring", "cp1.pair.json", "--reduce", "y1*y2^-1 - 1")
    assert code == 0 and out.rstrip().endswith("->  0")


def test_restrict_and_interpolate_round_trip(capsys):
    code, out, _ = call(capsys, "--format", "json", "restrict", "cp2.pair.json", "y1*y2^-1 + y3")
    assert code == 0
    t = RestrictionTuple.from_json(json.loads(out))
    code, out, _ = call(capsys, "--format", "json", "interpolate", "cp2.pair.json", json.dumps(t.to_json()))
    assert code == 0
    p = LaurentPoly.from_json(json.loads(out))
    code, out2, _ = call(capsys, "--format", "json", "restrict", "cp2.pair.json", str(p))
    assert RestrictionTuple.from_json(json.loads(out2)) == t


def test_interpolate_incompatible(capsys):
    tup = '{"vertices": [[1, 2], [1, 3], [2, 3]], "values": ["z1", "z3", "1"]}'
    code, out, _ = call(capsys, "interpolate", "cp2.pair.json", tup)
    assert code == 1 and "incompatible" in out
    code, out, _ = call(capsys, "interpolate", "cp1.pair.json", '{"vertices": [[1], [2]], "values": ["z1", "1"]}')
    assert code == 0 and out.strip() == "y1"


def test_emit_conjecture(capsys):
    code, out, _ = call(capsys, "emit-conjecture", "s4.poset.json")
    assert code == 0 and "CONJECTURAL" in out
    code, out, _ = call(capsys, "--format", "json", "emit-conjecture", "s4.poset.json", "--base", "cp1.kbase.json")
    assert json.loads(out)["extras"]["status"] == "CONJECTURAL"


def test_face_acyclic_over_point(capsys):
    code, out, _ = call(capsys, "face-acyclic", "s4.poset.json")
    assert code == 0 and "graded ranks: 1,0,0,0,1" in out


def test_parse_errors_exit_2(capsys):
    code, _, err = call(capsys, "cohomology", "cp1.pair.json", "--reduce", "x1^(1/2)")
    assert code == 2 and "position 5" in err
    assert call(capsys, "validate", "does-not-exist.json")[0] == 2
    assert call(capsys, "bogus")[0] == 2
    assert call(capsys, "cohomology", "cp1.pair.json", "--reduce", "x1^-1")[0] == 2


def test_fuel_exhaustion_is_reported(capsys, monkeypatch):
    monkeypatch.setenv("TORMAN_FUEL", "0")
    code, out, _ = call(capsys, "bundle-cohomology", "cp1.pair.json", "--base", "cp1.rank1.base.json", "--reduce", "x1")
    assert code == 1 and "fuel" in out


@pytest.mark.parametrize("name", PAIR_FILES)
def test_presentation_json_round_trip(capsys, name):
    for cmd in (["cohomology"], ["kring"], ["kring", "--variant", "x"]):
        code, out, _ = call(capsys, "--format", "json", *cmd, name)
        assert code == 0
        data = json.loads(out)["presentation"]
        assert Presentation.from_json(data).to_json() == data


@pytest.mark.parametrize("argv", [["betti", "cp1xcp1.pair.json"], ["--format", "latex", "cohomology", "cp2.pair.json"],
                                  ["bundle-kring", "cp2.pair.json", "--base", "cp1.kbase.json", "--reduce", "y1^-1"]])
def test_deterministic(capsys, argv):
    assert call(capsys, *argv) == call(capsys, *argv)


def test_parse_element_examples():
    p = parse_element("x1*x2 - x3^2")
    assert type(p) is IntPoly and str(p) == "x1*x2 - x3^2"
    q = parse_element("y1*y2^-1 - 1")
    assert isinstance(q, LaurentPoly) and str(q) == "y1*y2^-1 - 1"
    with pytest.raises(ParseError) as exc:
        parse_element("y1^(1/2)")
    assert exc.value.position == 5


def test_parse_element_rejects_garbage():
    for bad, pos in [("x1 +", 4), ("(x1", 3), ("x1 ** 2", 4), ("2 x1", 2)]:
        with pytest.raises(ParseError) as exc:
            parse_element(bad, ("x1",), laurent=False)
        assert exc.value.position == pos
    with pytest.raises(ParseError):
        parse_element("x9", ("x1",))
    with pytest.raises(ParseError):
        parse_element("(1 + y1)^-1", ("y1",), laurent=True)


@given(st.dictionaries(st.tuples(st.integers(-3, 3), st.integers(-3, 3)), st.integers(-9, 9), max_size=5))
def test_rendered_laurent_parses_back(terms):
    p = LaurentPoly(("y1", "y2"), terms)
    assert parse_element(str(p), ("y1", "y2"), laurent=True) == p
