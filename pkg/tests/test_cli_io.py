import json
import random
import subprocess
import sys

import pytest

from weightlab.cli_io import (
    FIXTURES,
    ParseError,
    ValidationError,
    dumps_complex,
    emit_complex,
    main,
    parse_complex,
    parse_document,
    run_command,
)
from weightlab.complexes import X2, Complex
from weightlab.generators import random_complex


def _doc(**kw):
    d = {"format": "weightlab/1", "ring": "Z", "ranks": [], "differentials": []}
    d.update(kw)
    return json.dumps(d)


# --- documents


def test_round_trip_fixtures():
    for name, make in FIXTURES.items():
        for p in (0, 3):
            X = make(p)
            assert parse_complex(dumps_complex(X)) == X
            assert parse_complex("@" + name, p) == X


def test_round_trip_random():
    rng = random.Random(51)
    for _ in range(100):
        X = random_complex(rng, rng.choice([0, 0, 2, 3]))
        assert parse_complex(dumps_complex(X)) == X


def test_round_trip_from_file(tmp_path):
    path = tmp_path / "x2.json"
    path.write_text(dumps_complex(X2(), name="X2"))
    X, levels = parse_document(str(path))
    assert X == X2() and X.name == "X2" and levels is None


def test_levels_round_trip():
    doc = emit_complex(X2(), levels={0: [0], 1: [1]})
    X, levels = parse_document(doc)
    assert X == X2() and levels == {0: [0], 1: [1]}


def test_d_squared_error_names_degree():
    text = _doc(ranks=[[0, 1], [1, 1], [2, 1]], differentials=[[0, [[1]]], [1, [[1]]]])
    with pytest.raises(ValidationError, match="degree 0") as e:
        parse_complex(text)
    assert e.value.degree == 0


def test_empty_support_is_zero():
    assert parse_complex(_doc()) == Complex.zero()


def test_parse_errors_have_locations():
    with pytest.raises(ParseError, match="line 1"):
        parse_complex("{\"ranks\": [}")
    with pytest.raises(ParseError, match=r"ranks\[0\]\[1\]"):
        parse_complex(_doc(ranks=[[0, "two"]]))
    with pytest.raises(ParseError, match="shape"):
        parse_complex(_doc(ranks=[[0, 1], [1, 1]], differentials=[[0, [[1, 2]]]]))
    with pytest.raises(ParseError, match="format"):
        parse_complex(_doc(format="other/2"))
    with pytest.raises(ParseError, match="fixture"):
        parse_complex("@NOPE")


def test_ring_handling():
    X = parse_complex(_doc(ring="Fp:3", ranks=[[0, 1], [1, 1]], differentials=[[0, [[4]]]]))
    assert X.p == 3 and X.d(0) == [[1]]
    with pytest.raises(ValidationError):
        parse_complex(dumps_complex(X2(3)), 2)


# --- commands


def test_wss_running_example():
    code, rep, _ = run_command(["wss", "--rep", "@Z0", "@X2", "--r", "3"])
    assert code == 0
    pages = {r: {x: str(g) for x, g in t.items()} for lab, r, t in rep.pages}
    assert pages[2] == pages[3] == {(0, 0): "Z/2"}


def test_wss_with_files(tmp_path):
    (tmp_path / "Z0.cx").write_text(dumps_complex(FIXTURES["Z0"]()))
    (tmp_path / "X2.cx").write_text(dumps_complex(X2()))
    code, rep, _ = run_command(["wss", "--rep", str(tmp_path / "Z0.cx"), str(tmp_path / "X2.cx")])
    assert code == 0
    assert {x: str(g) for x, g in rep.pages[1][2].items()} == {(0, 0): "Z/2"}


def test_compare_running_example():
    code, rep, text = run_command(["compare", "--rep", "@Z0", "@X2"])
    assert code == 0
    assert "pages equal r=2..3, filtration equal" in text


def test_other_commands_succeed():
    for argv in (["truncate", "@X2", "--k", "0", "--side", "le"],
                 ["tower", "@X2"],
                 ["tss", "--rep", "@Z0", "@X2", "--format", "csv"],
                 ["virtual", "--rep", "@Z0", "@X2", "--k", "0"],
                 ["check-axioms", "@X2", "@Z0"],
                 ["oracle", "--rep", "@Z0", "@X2"]):
        code, rep, text = run_command(argv)
        assert code == 0, (argv, text)


def test_csv_pages():
    _, _, text = run_command(["tss", "--rep", "@Z0", "@X2", "--format", "csv"])
    lines = text.splitlines()
    assert lines[0] == "sequence,r,p,q,invariant_factors"
    assert any(line.endswith(",0,0,2") for line in lines[1:])


def test_selftest_deterministic():
    a = run_command(["selftest", "--seed", "42", "--format", "json"])
    b = run_command(["selftest", "--seed", "42", "--format", "json"])
    assert a[0] == b[0] == 0
    assert a[2] == b[2]
    assert json.loads(a[2])["ok"] is True


def test_json_report_deterministic():
    argv = ["wss", "--rep", "@Z0", "@X2", "--format", "json"]
    assert run_command(argv)[2] == run_command(argv)[2]


def test_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.cx"
    bad.write_text(_doc(ranks=[[0, 1], [1, 1], [2, 1]], differentials=[[0, [[1]]], [1, [[1]]]]))
    assert main(["tower", str(bad)]) == 1
    assert "degree 0" in capsys.readouterr().out
    assert main(["tower", "@X2"]) == 0
    assert main(["frobnicate"]) == 2
    assert main(["tower", "@X2", "--bogus"]) == 2
    assert main(["wss", "@X2"]) == 2


def test_out_writes_report_and_heatmap(tmp_path, capsys):
    out = tmp_path / "report.json"
    assert main(["wss", "--rep", "@Z0", "@X2", "--format", "json", "--out", str(out)]) == 0
    assert capsys.readouterr().out == ""
    doc = json.loads(out.read_text())
    assert doc["format"] == "weightlab/1" and doc["ok"]
    png = tmp_path / "report.pages.png"
    assert png.exists() and png.read_bytes()[:4] == b"\x89PNG"


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "weightlab", "wss", "--rep", "@Z0", "@X2"],
                         capture_output=True, text=True, timeout=60)
    assert res.returncode == 0
    assert "(0, 0): Z/2" in res.stdout
