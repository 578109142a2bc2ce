import json
import shutil
import subprocess
import sys

import pytest

from pdl.bench import CORPUS_DIR, load_corpus
from pdl.cli import main


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def kb(tmp_path, text, name="kb.bdl"):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_reason_row_one_text(capsys):
    code, out, err = run(capsys, "reason", CORPUS_DIR / "01_basic.bdl")
    assert code == 0
    assert out.startswith("1 extension(s) [credulous, joint]")
    assert "-flies(tweety)" in out and err == ""


def test_reason_json_is_machine_readable(capsys):
    code, out, _ = run(capsys, "reason", CORPUS_DIR / "01_basic.bdl", "--json")
    data = json.loads(out)
    assert [f["literal"] for f in data["extensions"][0]["facts"]] == \
        ["bird(tweety)", "-flies(tweety)", "penguin(tweety)"]


def test_reason_empty_kb(capsys, tmp_path):
    code, out, _ = run(capsys, "reason", kb(tmp_path, ""), "--json")
    assert code == 0
    assert json.loads(out)["extensions"] == [{"facts": [], "trace": []}]


def test_reason_skeptical_nixon(capsys):
    code, out, _ = run(capsys, "reason", CORPUS_DIR / "03_nixon.bdl", "--mode=skeptical", "--json")
    core = json.loads(out)["skeptical_core"]
    assert "pacifist(nixon)" not in core and "-pacifist(nixon)" not in core


def test_parse_error_exit_and_span(capsys, tmp_path):
    code, out, err = run(capsys, "reason", kb(tmp_path, "p(a).\nq(X)."))
    assert code == 2 and out == ""
    assert "kb.bdl:2:1: parse error" in err


def test_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "reason", tmp_path / "nope.bdl")
    assert code == 2 and "cannot read" in err


def test_unresolvable_exit(capsys, tmp_path):
    code, _, err = run(capsys, "reason", kb(tmp_path, "p(a). q(a). -p(X) :- q(X)."))
    assert code == 3 and "unresolvable" in err


def test_limit_exit(capsys):
    code, _, err = run(capsys, "reason", CORPUS_DIR / "02_transitivity.bdl", "--max-steps=1")
    assert code == 4 and "limit" in err
    code, _, _ = run(capsys, "reason", CORPUS_DIR / "03_nixon.bdl", "--max-branches=1")
    assert code == 4


LATE_STRICT = """
bird(t). hasWound(t).
-flies(X) :- injured(X).
default d0 [order=1]: bird(X) : flies(X) / flies(X).
default inj [order=2]: hasWound(X) : injured(X) / injured(X).
"""


def test_dump_conflicts_goes_to_stderr(capsys, tmp_path):
    code, out, err = run(capsys, "reason", kb(tmp_path, LATE_STRICT), "--json", "--dump-conflicts")
    assert "-flies(t)" in [f["literal"] for f in json.loads(out)["extensions"][0]["facts"]]
    (tree,) = json.loads(err)
    assert tree["kind"] == "conflict"
    assert {c["literal"]: c["cost"] for c in tree["children"]} == {"flies(t)": "1", "-flies(t)": "2"}


def test_unknown_option_rejected(capsys):
    with pytest.raises(SystemExit) as err:
        main(["reason", str(CORPUS_DIR / "01_basic.bdl"), "--fast"])
    assert err.value.code == 2


def test_reiter_flag(capsys):
    code, out, _ = run(capsys, "reason", CORPUS_DIR / "07_broken_arms.bdl", "--semantics=reiter")
    assert code == 0 and out.startswith("1 extension(s) [credulous, reiter]")


def test_explain_commands(capsys):
    code, out, _ = run(capsys, "explain", CORPUS_DIR / "01_basic.bdl", "-flies(tweety)")
    assert code == 0
    assert out == ("extension 1:\n  -flies(tweety)\n    <- strict s#2\n"
                   "      penguin(tweety) (asserted)\n")
    code, out, _ = run(capsys, "explain", CORPUS_DIR / "08_football.bdl", "takesPlace(a)")
    assert code == 0 and "removed" in out and "snow(b)" in out
    code, out, _ = run(capsys, "explain", CORPUS_DIR / "01_basic.bdl", "unicorn(tweety)")
    assert code == 0 and "not present" in out
    code, out, _ = run(capsys, "explain", CORPUS_DIR / "03_nixon.bdl", "pacifist(nixon)", "--json")
    assert [e["explanation"]["present"] for e in json.loads(out)] == [True, False]


def test_explain_bad_fact(capsys):
    code, _, err = run(capsys, "explain", CORPUS_DIR / "01_basic.bdl", "flies(X)")
    assert code == 2 and "cannot parse" in err


def test_check(capsys):
    code, out, _ = run(capsys, "check", CORPUS_DIR / "01_basic.bdl")
    assert code == 0
    assert "1 facts, 0 disjunctive facts, 2 strict rules, 1 defaults" in out


def test_bench_passes(capsys):
    code, out, _ = run(capsys, "bench")
    assert code == 0
    assert out.strip().splitlines()[-1] == "11/11 cases passed"


def test_bench_json_has_no_timing(capsys):
    code, out, _ = run(capsys, "bench", "--json")
    data = json.loads(out)
    assert data["passed"] == data["total"] == 11
    assert "seconds" not in out


def test_bench_detects_broken_expectation(capsys, tmp_path):
    corpus = tmp_path / "corpus"
    shutil.copytree(CORPUS_DIR, corpus)
    sidecar = corpus / "01_basic.expected.json"
    data = json.loads(sidecar.read_text())
    data["contains"].append("flies(tweety)")
    sidecar.write_text(json.dumps(data))
    code, out, _ = run(capsys, "bench", corpus)
    assert code == 1
    assert "FAIL  01_basic" in out and "10/11 cases passed" in out


def test_bench_empty_dir(capsys, tmp_path):
    code, _, err = run(capsys, "bench", tmp_path)
    assert code == 1 and "no cases" in err


def test_corpus_sidecars_are_complete():
    cases = load_corpus()
    assert [c.id for c in cases] == list(range(1, 12))


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "pdl", "check", str(CORPUS_DIR / "07_broken_arms.bdl")],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "1 disjunctive facts" in proc.stdout


def test_help_exits_cleanly(capsys):
    with pytest.raises(SystemExit) as err:
        main(["--help"])
    assert err.value.code == 0
