import json
import subprocess
import sys
from fractions import Fraction

import pytest

from involute.cli import ParseError, ShapeError, UnknownGenerator, analyze, parse_spec, render
from involute.cli.main import main
from involute.exact_core import format_rational
from involute.field_equations import Metric, ricci_symbol

EINSTEIN = {"n": 4, "order": 2, "generator": {"name": "einstein_vacuum", "metric": "minkowski"},
            "truncation": 5, "seed": 42}


def spec_of(doc):
    return parse_spec(json.dumps(doc))


@pytest.fixture(scope="module")
def einstein_report():
    return analyze(spec_of(EINSTEIN))


# -- parsing ----------------------------------------------------------------------

def test_parse_valid():
    s = spec_of(EINSTEIN)
    assert (s.n, s.order, s.truncation, s.seed, s.generator) == (4, 2, 5, 42, "einstein_vacuum")


def test_parse_defaults():
    s = spec_of({"n": 4, "generator": {"name": "maxwell_source_free"}})
    assert (s.order, s.truncation, s.seed, s.metric, s.format) == (2, 7, 0, "minkowski", "text")


def test_parse_bad_json_reports_line():
    with pytest.raises(ParseError, match="line 2"):
        parse_spec('{"n": 4,\n ]')


@pytest.mark.parametrize("doc,match", [
    ({"n": 4, "generator": {"name": "einstein_vacuum"}, "colour": 1}, "unknown field"),
    ({"n": 4, "generator": {"name": "einstein_vacuum", "extra": 1}}, r"\$\.generator: unknown"),
    ({"n": 4}, "exactly one"),
    ({"n": "4", "generator": {"name": "free"}}, r"\$\.n"),
    ({"n": 4, "generator": {"name": "einstein_vacuum", "metric": "lorentzian"}}, "unknown metric"),
    ({"n": 4, "generator": {"name": "einstein_vacuum"}, "format": "xml"}, r"\$\.format"),
    ({"n": 4, "generator": {"name": "free", "parameters": {"colour": 2}}, "order": 2}, "parameters"),
    ({"n": 2, "order": 1, "explicit": {"source_fiber_dim": 1, "target_fiber_dim": 1, "matrix": [["1/0", "1"]]}},
     "zero denominator"),
    ({"n": 2, "order": 1, "explicit": {"source_fiber_dim": 1, "target_fiber_dim": 1, "matrix": [[0.5, 1]]}},
     "floats"),
    ({"n": 4, "schema": "involute/0", "generator": {"name": "free"}, "order": 2}, "schema"),
])
def test_parse_errors(doc, match):
    with pytest.raises(ParseError, match=match):
        spec_of(doc)


def test_unknown_generator():
    with pytest.raises(UnknownGenerator):
        spec_of({"n": 4, "generator": {"name": "yang_mills"}})


def test_explicit_matrix_shape():
    m = ricci_symbol(Metric.minkowski(4)).matrix
    rows = [[format_rational(x) for x in r] for r in m.rows()]
    good = {"n": 4, "order": 2, "explicit": {"source_fiber_dim": 10, "target_fiber_dim": 10, "matrix": rows}}
    assert spec_of(good).matrix[0][0] == m[0, 0]
    bad = json.loads(json.dumps(good))
    bad["explicit"]["matrix"] = [r[:99] for r in rows]
    with pytest.raises(ShapeError):
        spec_of(bad)


@pytest.mark.parametrize("doc", [
    {"n": 4, "order": 1, "generator": {"name": "einstein_vacuum"}},
    {"n": 2, "generator": {"name": "einstein_vacuum"}},
    {"n": 3, "generator": {"name": "einstein_vacuum", "metric": [[1, 0], [0, 1]]}},
    {"n": 2, "generator": {"name": "scalar_wave", "metric": [[1, 1], [1, 1]]}},
])
def test_shape_errors(doc):
    with pytest.raises(ShapeError):
        spec_of(doc)


def test_rational_metric():
    s = spec_of({"n": 3, "generator": {"name": "einstein_vacuum", "metric": [["-1/2", 0, 0], [0, 1, 0], [0, 0, "3"]]},
                 "truncation": 3})
    assert s.metric[0][0] == Fraction(-1, 2)


# -- analysis ------------------------------------------------------------------------

def test_einstein_report(einstein_report):
    r = einstein_report
    assert r.dims == (10, 40, 90, 164, 266, 400)
    assert r.h == [10, 10, 4, 0, 0]
    assert r.cartan.characters == (40, 30, 16, 4)
    assert r.cartan_pass and r.verdict.involutive
    assert [format_rational(c) for c in r.hilbert.cumulative.coeffs] == ["10", "22", "89/6", "3", "1/6"]
    assert not r.failed
    assert "asserted by source" in r.obstruction


def test_einstein_text(einstein_report):
    text = render(einstein_report, "text").decode()
    assert "Cartan test: 40 + 2·30 + 3·16 + 4·4 = 164 = dim g_3" in text.splitlines()
    assert "H(z) = 10 + 22z + (89/6)z^2 + 3z^3 + (1/6)z^4" in text


def test_json_roundtrip_and_determinism(einstein_report):
    a = render(einstein_report, "json")
    b = render(analyze(spec_of(EINSTEIN)), "json")
    assert a == b
    doc = json.loads(a)
    assert doc["schema"] == "involute/1"
    assert parse_spec(json.dumps(doc["spec"])) == einstein_report.spec
    assert doc["hilbert"]["cumulative"] == ["10", "22", "89/6", "3", "1/6"]
    assert list(doc) == sorted(doc)


@pytest.mark.parametrize("name,h", [("maxwell_source_free", [4, 4, 1, 0, 0]), ("einstein_maxwell", [14, 14, 5, 0, 0]),
                                    ("einstein_scalar", [11, 11, 4, 0, 0]), ("scalar_wave", [1, 1, 0, 0, 0])])
def test_generators(name, h):
    r = analyze(spec_of({"n": 4, "generator": {"name": name}, "truncation": 5}))
    assert r.h == h and r.verdict.involutive and not r.failed


def test_free_generator():
    r = analyze(spec_of({"n": 3, "order": 2, "generator": {"name": "free", "parameters": {"fiber_dim": 2}}}))
    assert r.h == [2, 0, 0, 0] and r.cartan.characters == (6, 4, 2)


def test_non_involutive_explicit_reports_skips():
    # order 1, n = 2, m = 2 with a one-dimensional g_1
    doc = {"n": 2, "order": 1, "truncation": 4,
           "explicit": {"source_fiber_dim": 2, "target_fiber_dim": 3,
                        "matrix": [[-2, 1, 0, 0], [-3, 0, 1, 0], [-5, 0, 0, 1]]}}
    r = analyze(spec_of(doc))
    statuses = dict((n, s) for n, s, _ in r.checks)
    assert not r.failed
    assert r.dims == (2, 1, 0, 0, 0) and r.cartan.characters == (1, 0)
    assert not r.cartan_pass and not r.verdict.involutive
    assert r.verdict.offending == ((1, 2),)
    assert statuses["characters from cohomology"] == "skipped"
    assert r.obstruction == "not assessed"
    assert "Cartan test: 1 + 2·0 = 1 ≠ 0 = dim g_2" in render(r).decode()


def test_characters_only():
    r = analyze(spec_of({"n": 4, "generator": {"name": "maxwell_source_free"}}), characters_only=True)
    assert r.cartan.characters == (16, 12, 7, 1)
    assert "Cartan test: 16 + 2·12 + 3·7 + 4·1 = 65 = dim g_3" in render(r).decode()


# -- command line ------------------------------------------------------------------------

def test_main_list(capsys):
    assert main(["list"]) == 0
    assert "einstein_vacuum" in capsys.readouterr().out


def test_main_check(tmp_path):
    f = tmp_path / "spec.json"
    f.write_text(json.dumps(EINSTEIN))
    out = tmp_path / "out.txt"
    assert main(["check", "--spec", str(f), "--out", str(out)]) == 0
    assert out.read_text().startswith("ok: einstein_vacuum")


def test_main_usage_errors(tmp_path):
    assert main(["check"]) == 1
    assert main(["check", "--system", "nope"]) == 1
    assert main(["check", "--spec", str(tmp_path / "missing.json")]) == 1
    with pytest.raises(SystemExit) as err:
        main(["frobnicate"])
    assert err.value.code == 1


def test_main_internal_failure(monkeypatch, tmp_path):
    from involute.cli import main as cli_main
    from involute.spencer_analysis import GenericityFailure

    def boom(*a, **k):
        raise GenericityFailure([(1,), (2,)])

    monkeypatch.setattr(cli_main, "analyze", boom)
    assert main(["analyze", "--system", "scalar_wave", "--truncation", "4"]) == 2


def test_main_failed_check_exit_code(monkeypatch):
    from involute.cli import main as cli_main
    from involute.cli import report

    real = report.analyze

    def tampered(spec, characters_only=False):
        r = real(spec, characters_only)
        r.checks.append(("tampered", "fail", ""))
        return r

    monkeypatch.setattr(cli_main, "analyze", tampered)
    assert main(["characters", "--system", "scalar_wave", "--out", "/dev/null"]) == 2


def test_seed_precedence(monkeypatch, tmp_path):
    out = tmp_path / "o.json"
    monkeypatch.setenv("INVOLUTE_SEED", "9")
    assert main(["check", "--system", "scalar_wave", "--format", "json", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["spec"]["seed"] == 9
    assert main(["check", "--system", "scalar_wave", "--seed", "3", "--format", "json", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["spec"]["seed"] == 3
    monkeypatch.setenv("INVOLUTE_SEED", "x")
    assert main(["check", "--system", "scalar_wave"]) == 1


def test_stdin_spec():
    proc = subprocess.run([sys.executable, "-m", "involute", "check", "--spec", "-"],
                          input=json.dumps(EINSTEIN).encode(), capture_output=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith(b"ok: einstein_vacuum")
    proc = subprocess.run([sys.executable, "-m", "involute", "check", "--spec", "-"], input=b"{", capture_output=True)
    assert proc.returncode == 1 and b"ParseError" in proc.stderr


def test_metric_file(tmp_path):
    mf = tmp_path / "g.json"
    mf.write_text(json.dumps([[1, 0, 0], [0, 1, 0], [0, 0, "-1"]]))
    out = tmp_path / "o.json"
    assert main(["check", "--system", "einstein_vacuum", "--metric", str(mf), "--format", "json", "--out", str(out)]) == 0
    spec = json.loads(out.read_text())["spec"]
    assert spec["n"] == 3 and spec["generator"]["metric"][2][2] == "-1"
