import json
from pathlib import Path

import pytest

from ccrkit import __version__
from ccrkit.citations import CITATIONS, render_markdown, resolve
from ccrkit.cli import main
from ccrkit.model import ModelError, load_model, parse_model
from ccrkit.report import FAIL, CheckRecord, Report, UnknownSuite, emit_report, run_suite

ROOT = Path(__file__).resolve().parents[1]
MODELS = ROOT / "examples_models"

BROKEN = {"lambda": {"jv": [[1, {"terms": [{"modes": [[2, 2]], "re": 1}]}]]}, "suites": ["ccr"]}


def write(tmp_path, data, name="m.json"):
    p = tmp_path / name
    p.write_text(json.dumps(data) if not isinstance(data, str) else data)
    return p


# -- model loading ------------------------------------------------------------------

def test_load_quadratic():
    m = load_model(MODELS / "quadratic.json")
    assert m.lam.degree == 2
    assert m.truncation.cutoff == 60


def test_nonconstant_v_rejected():
    data = {"lambda": {"v": [[1, {"terms": [{"modes": [[1, 1]], "re": 1}]}]]}}
    with pytest.raises(ModelError) as e:
        parse_model(json.dumps(data))
    assert e.value.kind == "invariant"
    assert "constant on V" in str(e.value) and "lambda.ccr-characterization" in str(e.value)


def test_parse_error_byte_offset():
    raw = '{"lambda": {"jv": [}'.encode()
    with pytest.raises(ModelError) as e:
        parse_model(raw)
    assert e.value.kind == "parse" and e.value.location == "byte 19"


def test_parse_error_offset_counts_bytes():
    raw = '{"lambda": {}, "x": "éé", }'.encode()
    with pytest.raises(ModelError) as e:
        parse_model(raw)
    # the offending '}' sits after two 2-byte characters
    assert e.value.location == f"byte {raw.rindex(b'}')}"


def test_schema_error_path():
    with pytest.raises(ModelError) as e:
        parse_model(json.dumps({"lambda": {"degree": -1}}))
    assert e.value.kind == "schema" and e.value.location == "/lambda/degree"
    with pytest.raises(ModelError) as e:
        parse_model(json.dumps({"lambda": {}, "surprise": 1}))
    assert e.value.kind == "schema"


def test_truncation_guard_at_load():
    with pytest.raises(ModelError) as e:
        parse_model(json.dumps({"lambda": {}, "truncation": {"cutoff": 8, "probe_level": 5}}))
    assert e.value.location == "/truncation"


# -- reports ------------------------------------------------------------------------

def test_unknown_suite():
    with pytest.raises(UnknownSuite):
        run_suite(load_model(MODELS / "quadratic.json"), "nonsense")


def test_empty_report():
    d = json.loads(emit_report(Report("ccr")))
    assert d["summary"] == {"total": 0, "passed": 0, "failed": 0, "info": 0}
    assert d["records"] == [] and d["meta"]["version"] == __version__


def test_failure_first_and_exit_code():
    r = run_suite(parse_model(json.dumps(BROKEN)))
    assert r.exit_code != 0
    d = r.to_json()
    assert d["records"][0]["status"] == FAIL
    assert d["records"][0]["check_id"] == "ccr.validate"


def test_record_rejects_unknown_citation():
    with pytest.raises(KeyError):
        CheckRecord("x", "no.such.citation", "pass")


def test_suite_ccr_on_symmetric_model_passes():
    r = run_suite(load_model(MODELS / "quadratic.json"), "ccr")
    assert r.records and not r.failed


def test_equivalence_power_law_tail():
    r = run_suite(load_model(MODELS / "power_law_tail.json"), "equivalence")
    rec = next(x for x in r.records if x.check_id == "equivalence.vs-fock")
    assert rec.citation == "equivalence.fock-hilbert-schmidt"
    assert rec.value == "not_quasi_equivalent"
    assert rec.evidence["hs_value"] == "divergent" and "diverges" in rec.evidence["reason"]


def test_weyl_rows():
    r = run_suite(load_model(MODELS / "quadratic.json"), "weyl", cutoff=60)
    ids = {x.check_id for x in r.records}
    assert any(i.startswith("weyl.vacuum") for i in ids)
    assert any(i.startswith("weyl.relation") for i in ids)
    assert not r.failed


@pytest.mark.parametrize("name", ["quadratic.json", "power_law_tail.json",
                                  "linear_quasifree.json"])
def test_citations_resolve(name):
    d = run_suite(load_model(MODELS / name)).to_json()
    for rec in d["records"]:
        assert resolve(rec["citation"])
        assert rec["backend"]


def test_citation_doc_is_current():
    assert (ROOT / "docs" / "citations.md").read_text() == render_markdown()
    assert len(CITATIONS) == len(set(CITATIONS))


def test_timings_only_on_request():
    m = load_model(MODELS / "linear_quasifree.json")
    assert all("runtime_ms" not in r for r in run_suite(m, "symplectic").to_json()["records"])
    assert all("runtime_ms" in r
               for r in run_suite(m, "symplectic", timings=True).to_json()["records"])


# -- command line --------------------------------------------------------------------

def test_cli_byte_identical_reruns(tmp_path):
    outs = []
    for i in range(2):
        out = tmp_path / f"r{i}.json"
        assert main(["check", str(MODELS / "quadratic.json"), "--out", str(out)]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_cli_seed_changes_randomized_checks(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    model = str(MODELS / "linear_quasifree.json")
    main(["check", model, "--suite", "symplectic", "--seed", "1", "--out", str(a)])
    main(["check", model, "--suite", "symplectic", "--seed", "2", "--out", str(b)])
    assert json.loads(a.read_text())["meta"]["seed"] == 1
    assert a.read_bytes() != b.read_bytes()


def test_cli_failure_exit(tmp_path, capsys):
    assert main(["check", str(write(tmp_path, BROKEN)), "--format", "text"]) == 1
    out = capsys.readouterr().out
    assert out.splitlines()[3].startswith("[FAIL] ccr.validate")


def test_cli_bad_model_exit(tmp_path, capsys):
    assert main(["check", str(write(tmp_path, "{not json"))]) == 2
    assert "parse error at byte" in capsys.readouterr().err
    assert main(["check", str(tmp_path / "missing.json")]) == 2


def test_cli_write_failure(tmp_path):
    out = tmp_path / "no" / "such" / "dir" / "r.json"
    assert main(["check", str(MODELS / "power_law_tail.json"), "--out", str(out)]) == 2


def test_cli_unknown_suite_rejected():
    with pytest.raises(SystemExit):
        main(["check", str(MODELS / "quadratic.json"), "--suite", "nonsense"])


def test_cli_version(capsys):
    with pytest.raises(SystemExit):
        main(["--version"])
    assert __version__ in capsys.readouterr().out
