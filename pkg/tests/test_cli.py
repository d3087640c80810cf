"""Command line surface: rendering, JSON records, catalogs, exit codes."""

import json

import pytest

from koszulspec.cli import main

GOLDEN_INVARIANTS_XYZ = """\
f: x*y*z
n: 3  d: 3  k_max: 12
seed: 0
tau: 3  type: I
k     | 0 1 2 3 4 5 6 7 8 9 10
gamma |       1 3 3 1
mu'   |
mu''  |       1 3 3 3 3 3 3  3
mu    |       1 3 3 3 3 3 3  3
nu    |             2 3 3 3  3
defect sides nonnegative: yes
"""

GOLDEN_SPECTRUM_XYZ = """\
f: x*y*z
n: 3  d: 3  k_max: 12
seed: 0
tau: 3  type: I
k     | 0 1 2 3 4 5 6 7 8 9
gamma |       1 3 3 1
mu'   |
mu''  |       1 3 3 3 3 3 3
mu    |       1 3 3 3 3 3 3
nu    |             2 3 3 3
mu(2) |       1
nu(2) |             2
stabilization stage: 2
truncated: no
E2: degenerate
torsion profile: none
Sp_P:
3 1 +1
6 2 -2
"""

RECORD_KEYS = {
    "engine_version",
    "command",
    "input",
    "variables",
    "binary_form",
    "n",
    "d",
    "seed",
    "k_max",
    "tau",
    "type",
    "gamma",
    "mu",
    "mu_torsion",
    "mu_free",
    "nu",
    "mu_stage2",
    "nu_stage2",
    "pole_spectrum",
    "torsion_profile",
    "verdicts",
}


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_invariants_golden(capsys):
    code, out, _ = run(capsys, "invariants", "x*y*z")
    assert code == 0
    assert out == GOLDEN_INVARIANTS_XYZ


def test_spectrum_golden(capsys):
    code, out, _ = run(capsys, "spectrum", "x*y*z")
    assert code == 0
    assert out == GOLDEN_SPECTRUM_XYZ


def test_spectrum_binary_form_lines(capsys):
    code, out, _ = run(capsys, "spectrum", "--binary-form", "x:2,y:2")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "binary form: x:2,y:2"
    assert lines[2] == "seed: -"
    assert "2 1/2 +1" in lines
    assert "4 1 +1" in lines
    assert "6 3/2 -1" in lines


def test_spectrum_engine_agrees_with_closed_form(capsys):
    """Same surface, two routes: everything below the header must agree."""
    _, closed, _ = run(capsys, "spectrum", "--binary-form", "x:2,y:2")
    _, engine, _ = run(capsys, "spectrum", "x^2*y^2", "-v", "x,y")
    assert closed.splitlines()[3:] == engine.splitlines()[3:]


def test_byte_determinism(capsys):
    # stderr carries wall-clock timings and is allowed to vary
    code1, out1, _ = run(capsys, "spectrum", "x^2*y^2 + z^4")
    code2, out2, _ = run(capsys, "spectrum", "x^2*y^2 + z^4")
    assert (code1, out1) == (code2, out2)
    assert code1 == 0


def test_json_record_schema(capsys):
    code, out, _ = run(capsys, "invariants", "x*y*z", "--json")
    assert code == 0
    rec = json.loads(out)
    assert set(rec) == RECORD_KEYS
    assert rec["command"] == "invariants"
    assert rec["tau"] == 3
    assert rec["mu"][3] == 1
    assert rec["gamma"][3:7] == [1, 3, 3, 1]
    assert rec["verdicts"]["identities"] is True
    assert rec["verdicts"]["assumptions"] is True
    # the invariants command carries no tower data
    assert rec["mu_stage2"] is None
    assert rec["pole_spectrum"] is None


def test_json_spectrum_record(capsys):
    code, out, _ = run(capsys, "spectrum", "x*y*z", "--json")
    rec = json.loads(out)
    assert code == 0
    assert rec["pole_spectrum"]["support"] == [["1", 1], ["2", -2]]
    assert rec["pole_spectrum"]["stabilization_stage"] == 2
    assert rec["pole_spectrum"]["truncated"] is False
    assert rec["torsion_profile"] == {
        "entries": [],
        "degenerate": True,
        "truncated": False,
    }
    assert rec["verdicts"]["e2_degenerate"] is True


def test_seed_changes_only_seed_field(capsys):
    _, a, _ = run(capsys, "invariants", "x^2*y^2 + z^4", "--json")
    _, b, _ = run(capsys, "invariants", "x^2*y^2 + z^4", "--json", "--seed", "9")
    ra, rb = json.loads(a), json.loads(b)
    assert ra["seed"] == 0 and rb["seed"] == 9
    assert ra["mu_torsion"] == rb["mu_torsion"]
    assert ra["mu_free"] == rb["mu_free"]
    ra["seed"] = rb["seed"]
    assert ra == rb


def test_check_single_input(capsys):
    code, out, _ = run(capsys, "check", "x*y*z", "--nodal")
    assert code == 0
    assert "identities: ok" in out
    assert "nodal vanishing: ok" in out


def test_check_closed_form_oracle(capsys):
    code, out, _ = run(
        capsys, "check", "x^2*y^2", "-v", "x,y", "--binary-form", "x:2,y:2"
    )
    assert code == 0
    assert "closed-form oracle: ok" in out


def test_check_oracle_mismatch_fails(capsys):
    # multiplicities that belong to a different polynomial
    code, out, err = run(
        capsys, "check", "x^2*y^2", "-v", "x,y", "--binary-form", "x:3,y:1"
    )
    assert code == 4


def test_check_bounds_with_exponent_file(tmp_path, capsys):
    payload = {"alpha_min": "3/4", "local_exponents": ["3/4", "1", "5/4", "3/4", "1", "5/4"]}
    path = tmp_path / "exponents.json"
    path.write_text(json.dumps(payload))
    code, out, _ = run(capsys, "check", "x^2*y^2 + z^4", "--exponents", str(path))
    assert code == 0
    assert out.count("bound:") == 3


def test_check_bound_violation_exit(capsys):
    code, _, err = run(capsys, "check", "x*y*z", "--alpha-min", "2")
    assert code == 4
    assert "error:" in err


def test_check_corpus(tmp_path, capsys):
    entries = [
        {"input": "x*y*z", "vars": "x,y,z", "nodal": True},
        {"input": "x^2*y^2", "vars": "x,y", "binary_form": "x:2,y:2"},
        {"input": "x^3 + y^3 + z^3", "vars": "x,y,z"},
    ]
    path = tmp_path / "corpus.jsonl"
    path.write_text("".join(json.dumps(e) + "\n" for e in entries))
    code, out, _ = run(capsys, "check", "--corpus", str(path))
    assert code == 0
    assert out.count("PASS") == 3
    assert "FAIL" not in out


def test_check_corpus_reports_failures(tmp_path, capsys):
    entries = [
        {"input": "x*y*z", "vars": "x,y,z"},
        {"input": "x^2*y^2", "vars": "x,y", "binary_form": "x:3,y:1"},
    ]
    path = tmp_path / "corpus.jsonl"
    path.write_text("".join(json.dumps(e) + "\n" for e in entries))
    code, out, _ = run(capsys, "check", "--corpus", str(path))
    assert code == 4
    assert out.count("PASS") == 1
    assert out.count("FAIL") == 1


def test_catalog_append_and_verify(tmp_path, capsys):
    cat = tmp_path / "catalog.jsonl"
    run(capsys, "invariants", "x*y*z", "--catalog", str(cat))
    run(capsys, "spectrum", "x^2*y^2", "-v", "x,y", "--catalog", str(cat))
    run(capsys, "spectrum", "--binary-form", "x:2,y:2", "--catalog", str(cat))
    lines = cat.read_text().splitlines()
    assert len(lines) == 3
    assert all(json.loads(line)["engine_version"] for line in lines)
    code, out, _ = run(capsys, "check", "--catalog", str(cat))
    assert code == 0
    assert "3 records, 3 verified, 0 skipped" in out


def test_catalog_detects_corruption(tmp_path, capsys):
    cat = tmp_path / "catalog.jsonl"
    run(capsys, "invariants", "x*y*z", "--catalog", str(cat))
    rec = json.loads(cat.read_text())
    rec["mu"][3] = 99
    cat.write_text(json.dumps(rec, sort_keys=True, separators=(",", ":")) + "\n")
    code, out, _ = run(capsys, "check", "--catalog", str(cat))
    assert code == 4
    assert "mismatch" in out and "mu" in out


def test_catalog_skips_other_versions(tmp_path, capsys):
    cat = tmp_path / "catalog.jsonl"
    run(capsys, "invariants", "x*y*z", "--catalog", str(cat))
    rec = json.loads(cat.read_text())
    rec["engine_version"] = "0.0.0-other"
    with cat.open("a") as fh:
        fh.write(json.dumps(rec, sort_keys=True, separators=(",", ":")) + "\n")
    code, out, _ = run(capsys, "check", "--catalog", str(cat))
    assert code == 0
    assert "2 records, 1 verified, 1 skipped" in out


def test_exit_parse_error(capsys):
    code, _, err = run(capsys, "invariants", "x*(y+z)")
    assert code == 2
    assert "error:" in err


def test_exit_bad_window(capsys):
    code, _, _ = run(capsys, "invariants", "x*y*z", "--kmax", "2")
    assert code == 2


def test_exit_assumption_failure(capsys):
    code, _, err = run(capsys, "invariants", "x^2")
    assert code == 3


def test_exit_unwritable_catalog(capsys):
    code, _, _ = run(
        capsys, "invariants", "x*y*z", "--catalog", "/nonexistent/dir/cat.jsonl"
    )
    assert code == 5


def test_exit_missing_corpus(capsys):
    code, _, _ = run(capsys, "check", "--corpus", "/nonexistent/corpus.jsonl")
    assert code == 5


def test_exit_usage_error(capsys):
    assert run(capsys, "invariants")[0] == 2
    assert run(capsys, "no-such-command")[0] == 2


def test_version_flag(capsys):
    code, out, _ = run(capsys, "--version")
    assert code == 0
    assert "0.1.0" in out
