import json
import math

import jsonschema
import pytest

from polyreg import cli
from polyreg.config import ENV_VAR, ConfigError, RunConfig, load_config
from polyreg.edge_pencil import RootFindingError
from polyreg.geometry import load_schema
from polyreg.report import AnalysisReport, number, render

from conftest import DATA, reentrant_root


def run_json(capsys, *argv):
    code = cli.run(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() and "--format" not in argv else out)


# report container ---------------------------------------------------------------

def test_empty_report_round_trip():
    rep = AnalysisReport("mu")
    doc = json.loads(render(rep))
    assert AnalysisReport.from_dict(doc) == rep
    jsonschema.validate(doc, load_schema("report"))


def test_unknown_report_field_rejected():
    with pytest.raises(ValueError):
        AnalysisReport.from_dict({"command": "mu", "extra": 1})


def test_number_rounding():
    assert number(math.pi) == 3.14159265359
    with pytest.raises(ValueError):
        number(float("nan"))


def test_unknown_format():
    with pytest.raises(ValueError):
        render(AnalysisReport("mu"), "yaml")


# config ------------------------------------------------------------------------

def test_config_layers(tmp_path, monkeypatch):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"tol": 1e-12, "im_cap": 30, "default_box": [0, 4, -10, 10]}))
    cfg = load_config(str(path), {"im_cap": 40.0, "tol": None})
    assert cfg.tol == 1e-12 and cfg.im_cap == 40.0 and cfg.default_box == (0.0, 4.0, -10.0, 10.0)
    monkeypatch.setenv(ENV_VAR, str(path))
    assert load_config().im_cap == 30.0


@pytest.mark.parametrize("doc", [{"bogus": 1}, {"literal": "yes"}, {"default_box": [1, 2]}, [1, 2]])
def test_config_rejects_bad_documents(tmp_path, doc):
    path = tmp_path / "c.json"
    path.write_text(json.dumps(doc))
    with pytest.raises(ConfigError):
        load_config(str(path))


def test_config_to_pencil_settings():
    s = RunConfig(im_cap=25.0).pencil_settings()
    assert s.im_cap == 25.0 and s.default_box == (0.0, 5.0, -20.0, 20.0)


# command line -------------------------------------------------------------------

@pytest.mark.parametrize("text,value", [("3pi/2", 1.5 * math.pi), ("pi", math.pi),
                                        ("0.99pi", 0.99 * math.pi), ("2.5", 2.5), ("pi/4", math.pi / 4)])
def test_parse_angle(text, value):
    assert cli.parse_angle(text) == pytest.approx(value, abs=1e-15)


def test_mu_command(capsys):
    code, doc = run_json(capsys, "mu", "--pair", "0,0", "--theta", "3pi/2", "pi/2")
    assert code == 0
    first, second = doc["mu_table"]
    assert first["value"] == pytest.approx(reentrant_root(), abs=1e-11)
    assert first["source"] == "root_finder" and second["value"] == 2


def test_roots_command(capsys):
    code, doc = run_json(capsys, "roots", "--pair", "0,0", "--theta", "3pi/2", "--box", "0,1,-1,1")
    assert code == 0
    reals = [r["value"][0] for r in doc["results"]["roots"]]
    assert reals == pytest.approx([reentrant_root(), 2 / 3, 0.908529, 1.0], abs=1e-6)
    assert doc["results"]["excluded"][0]["multiplicity"] == 3


def test_analyze_cube_admissible(capsys):
    code, doc = run_json(capsys, "analyze", str(DATA / "cube.json"), "--query", "weak", "--s", "2.5")
    assert code == 0
    assert doc["verdicts"][0]["admissible"]
    jsonschema.validate(doc, load_schema("report"))


def test_analyze_neumann_text_cites_certificate(capsys):
    code, text = run_json(capsys, "analyze", str(DATA / "neumann_cube.json"), "--query", "weak",
                          "--s", "3", "--format", "text")
    assert code == 0
    assert "not admissible" in text and "contains only the eigenvalues" in text
    assert "theta" in text and "source" in text


def test_analyze_default_ranges(capsys):
    code, doc = run_json(capsys, "analyze", str(DATA / "cube_convex.json"))
    texts = {r["theorem"]: r["text"] for r in doc["s_ranges"]}
    assert texts == {"weak_bounded": "(2, inf) plus s in {2}", "lift_bounded": "(1, 3)"}
    assert doc["checklist"]


def test_analyze_neumann_ranges(capsys):
    _, doc = run_json(capsys, "analyze", str(DATA / "neumann_cube.json"))
    texts = {r["theorem"]: r["text"] for r in doc["s_ranges"]}
    assert texts["weak_bounded"] == "(2, 3) plus s in {2}"
    assert texts["lift_bounded"] == "(1, 3/2)"


def test_analyze_mixed_needs_overrides(capsys):
    _, doc = run_json(capsys, "analyze", str(DATA / "mixed_cube.json"))
    assert any("error" in v for v in doc["vertices"])
    _, doc = run_json(capsys, "analyze", str(DATA / "mixed_cube.json"),
                      "--overrides", str(DATA / "mixed_overrides.json"))
    assert not any(v.get("error") for v in doc["vertices"])
    assert {r["theorem"]: r["text"] for r in doc["s_ranges"]}["lift_bounded"] == "(1, 6/5]"


def test_analyze_queries_file(tmp_path, capsys):
    path = tmp_path / "q.json"
    path.write_text(json.dumps([{"theorem": "weak_bounded", "l": 1, "s": "5/2"},
                                {"theorem": "lift_bounded", "l": 2, "s": 3}]))
    code, doc = run_json(capsys, "analyze", str(DATA / "cube_convex.json"), "--queries", str(path))
    assert code == 0
    assert [v["admissible"] for v in doc["verdicts"]] == [True, False]


def test_analyze_is_deterministic(tmp_path):
    outs = []
    for k in range(2):
        path = tmp_path / f"r{k}.json"
        assert cli.run(["analyze", str(DATA / "cube.json"), "--out", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_windows_command(capsys):
    code, doc = run_json(capsys, "windows")
    assert code == 0
    keys = {r["key"]: r["text"] for r in doc["s_ranges"]}
    assert keys["mixed_dn_lift"] == "(1, 8/7]"


def test_checklist_command(capsys):
    code, doc = run_json(capsys, "checklist", str(DATA / "neumann_cube.json"))
    assert code == 0 and doc["checklist"]


@pytest.mark.parametrize("argv", [
    ["analyze", "missing.json"],
    ["analyze", "--bogus"],
    ["mu", "--pair", "0,7", "--theta", "1"],
    ["mu", "--pair", "0,0", "--theta", "seven"],
    ["roots", "--pair", "0,0", "--theta", "1", "--box", "0,1"],
    ["analyze", str(DATA / "cube.json"), "--query", "weak"],
])
def test_input_errors_exit_2(argv, capsys):
    assert cli.run(argv) == 2
    assert capsys.readouterr().err


def test_bad_domain_file_exits_2(tmp_path, capsys):
    path = tmp_path / "d.json"
    path.write_text('{"faces": []')
    assert cli.run(["analyze", str(path)]) == 2


def test_numerical_failure_exits_3(monkeypatch, capsys):
    def fail(*args, **kwargs):
        raise RootFindingError("contour kept hitting zeros")
    monkeypatch.setattr(cli, "find_roots", fail)
    assert cli.run(["roots", "--pair", "0,0", "--theta", "1"]) == 3
    assert "numerical failure" in capsys.readouterr().err


def test_quick_verify(capsys, tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"membership_cases": 10}))
    code, doc = run_json(capsys, "verify", "--quick", "--config", str(path))
    assert code == 0 and doc["results"]["equivalence_ok"]
    assert doc["results"]["membership"] == {"cases": 10, "misclassified": 0, "margin": 0.05}
