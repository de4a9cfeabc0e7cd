"""Command line behaviour: verbs, exit codes, report shapes, reproducibility."""

import json

import pytest

from shiftent import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    return code, json.loads(out)


# ---------------------------------------------------------------------------
# Happy paths and report shapes.
# ---------------------------------------------------------------------------


def test_classify_unbounded_preset(capsys):
    code, report = run_json(capsys, "classify", "--map", "lambda1", "--group", "z2")
    assert code == 0
    assert report == {"verdict": "infinite", "witness": {"kind": "orbit", "lemma": "orbit"}}


def test_classify_string_preset_names_its_witness(capsys):
    code, report = run_json(capsys, "classify", "--map", "lambda3")
    assert code == 0
    assert report["verdict"] == "infinite"
    assert report["witness"] == {"kind": "string", "lemma": "string"}


def test_classify_bounded_map_reports_quasi_period(capsys, tmp_path):
    path = tmp_path / "cycle.json"
    path.write_text(json.dumps({"core": {"size": 3, "next": [1, 2, 0]}, "attachments": []}))
    code, report = run_json(capsys, "classify", "--map", str(path))
    assert code == 0
    assert report["verdict"] == "zero"
    n, m = report["qp"]
    assert n < m


def test_invariants_shape(capsys):
    code, report = run_json(capsys, "invariants", "--map", "lambda3")
    assert code == 0
    assert report == {"s": 1, "o": 0, "l": 0, "p": 0}


def test_invariants_omega_serializes_as_string(capsys):
    code, report = run_json(capsys, "invariants", "--map", "ladder")
    assert code == 0
    assert report["l"] == "omega"


def test_entropy_sum_zero_case(capsys):
    code, report = run_json(capsys, "entropy-sum", "--map", "lambda1", "--group", "z2")
    assert code == 0
    assert report == {"value": {"k": 0}}


def test_entropy_sum_canonical_form(capsys):
    code, report = run_json(capsys, "entropy-sum", "--map", "lambda3", "--group", "2x2")
    assert code == 0
    assert report == {"value": {"k": 2, "base": 2}}


def test_trajectory_report(capsys):
    code, report = run_json(
        capsys, "trajectory", "--map", "lambda3", "--group", "2", "--depth", "32", "--steps", "6"
    )
    assert code == 0
    assert report["sizes"] == ["4", "8", "16", "32", "64", "128"]
    assert report["slope"] == {"k": 1, "base": 2}
    assert report["stabilized"] is True


def test_witness_report(capsys):
    code, report = run_json(capsys, "witness", "--map", "lambda2", "--group", "3", "--horizon", "5")
    assert code == 0
    assert report["pairwise_distinct"] is True
    assert len(report["iterates"]) == 6


def test_verify_lemmas_ok(capsys):
    code, report = run_json(
        capsys, "verify-lemmas", "--group", "2", "--t", "2", "--k", "1", "--bound", "1000"
    )
    assert code == 0
    assert report["ok"] is True
    names = [c["check"] for c in report["checks"]]
    assert "independence-level1" in names
    assert "growth-string" in names and "growth-orbit" in names


def test_verify_lemmas_factorial_bound_token(capsys):
    code, report = run_json(
        capsys,
        "verify-lemmas", "--group", "2", "--t", "2", "--k", "1",
        "--bound", "6!", "--sign", "+", "--kind", "string",
    )
    assert code == 0
    assert report["params"]["bound"] == "720"


def test_verify_laws_ok(capsys):
    code, report = run_json(
        capsys, "verify-laws", "--group", "2", "--seed", "11", "--count", "15"
    )
    assert code == 0
    assert report["ok"] is True
    assert report["samples"] == 15


def test_truncate_report_and_dot(capsys, tmp_path):
    dot = tmp_path / "window.dot"
    code, report = run_json(
        capsys, "truncate", "--map", "lambda3", "--depth", "4", "--dot", str(dot)
    )
    assert code == 0
    assert report["map"]["size"] == len(report["labels"])
    text = dot.read_text()
    assert text.startswith("digraph window {")
    assert '"core/0" -> "core/0";' in text


def test_truncate_embeds_eventual_image(capsys):
    code, report = run_json(capsys, "truncate", "--map", "tail-ladder", "--depth", "3")
    assert code == 0
    ev = report["eventual_image"]
    assert ev["core_vertices"] == [0, 1]
    assert ev["image_core"] == [1]
    assert ev["restriction_surjective"] is False


# ---------------------------------------------------------------------------
# Reproducibility.
# ---------------------------------------------------------------------------


def test_runs_are_byte_identical(capsys):
    _, out1, _ = run(capsys, "verify-lemmas", "--group", "3", "--t", "2", "--k", "1", "--bound", "1000")
    _, out2, _ = run(capsys, "verify-lemmas", "--group", "3", "--t", "2", "--k", "1", "--bound", "1000")
    assert out1 == out2


def test_output_file_matches_stdout(capsys, tmp_path):
    path = tmp_path / "report.json"
    code, out, _ = run(capsys, "invariants", "--map", "lambda2", "--output", str(path))
    assert code == 0
    assert path.read_text() == out


def test_progress_goes_to_stderr_only(capsys):
    code, out, err = run(capsys, "trajectory", "--map", "lambda3", "--group", "2")
    assert code == 0
    json.loads(out)  # stdout is pure JSON
    assert "trajectory" in err


# ---------------------------------------------------------------------------
# Validation diagnostics (exit 2).
# ---------------------------------------------------------------------------


def test_constant_ladder_heights_rejected(capsys, tmp_path):
    path = tmp_path / "flat.json"
    path.write_text(
        json.dumps(
            {
                "core": {"size": 1, "next": [0]},
                "attachments": [
                    {"kind": "ladder", "anchor": 0, "height": {"a": 0, "b": 1}}
                ],
            }
        )
    )
    code, report = run_json(capsys, "invariants", "--map", str(path))
    assert code == 2
    diags = report["diagnostics"]
    assert any(d["message"] == "heights not strictly increasing" for d in diags)
    assert any(d["path"] == "attachments[0].height.a" for d in diags)


def test_anchor_out_of_range_names_path(capsys, tmp_path):
    path = tmp_path / "anchor.json"
    path.write_text(
        json.dumps(
            {
                "core": {"size": 2, "next": [0, 0]},
                "attachments": [{"kind": "string", "anchor": 5}],
            }
        )
    )
    code, report = run_json(capsys, "invariants", "--map", str(path))
    assert code == 2
    assert report["diagnostics"][0]["path"] == "attachments[0].anchor"


def test_bad_core_target_names_index(capsys, tmp_path):
    path = tmp_path / "core.json"
    path.write_text(json.dumps({"core": {"size": 2, "next": [0, 7]}, "attachments": []}))
    code, report = run_json(capsys, "invariants", "--map", str(path))
    assert code == 2
    assert report["diagnostics"][0]["path"] == "core.next[1]"


def test_unparseable_json_is_a_diagnostic(capsys, tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    code, report = run_json(capsys, "invariants", "--map", str(path))
    assert code == 2
    assert report["diagnostics"][0]["path"] == "$"


def test_orbit_with_anchor_rejected(capsys, tmp_path):
    path = tmp_path / "orbit.json"
    path.write_text(
        json.dumps(
            {
                "core": {"size": 1, "next": [0]},
                "attachments": [{"kind": "orbit", "anchor": 0}],
            }
        )
    )
    code, report = run_json(capsys, "invariants", "--map", str(path))
    assert code == 2
    assert "self-contained" in report["diagnostics"][0]["message"]


def test_bad_group_file_diagnostic(capsys, tmp_path):
    path = tmp_path / "group.json"
    path.write_text(json.dumps({"orders": []}))
    code, report = run_json(capsys, "entropy-sum", "--map", "lambda3", "--group", str(path))
    assert code == 2
    assert report["diagnostics"][0]["path"] == "orders"


# ---------------------------------------------------------------------------
# Usage and resource errors (64, 65, 66).
# ---------------------------------------------------------------------------


def test_unknown_verb(capsys):
    code, _, err = run(capsys, "frobnicate")
    assert code == 64
    assert "unknown verb" in err


def test_no_verb(capsys):
    code, _, _ = run(capsys)
    assert code == 64


def test_missing_seed_is_usage_error(capsys):
    code, _, _ = run(capsys, "verify-laws", "--group", "2")
    assert code == 64


def test_help_exits_zero(capsys):
    code, _, _ = run(capsys, "classify", "--help")
    assert code == 0


def test_infeasible_bound(capsys):
    code, _, err = run(capsys, "verify-lemmas", "--group", "2", "--bound", "1000000!")
    assert code == 65
    assert "cap is" in err


def test_digit_cap_env_override(capsys, monkeypatch):
    monkeypatch.setenv("SHIFTENT_DIGIT_CAP", "100")
    code, _, err = run(capsys, "verify-lemmas", "--group", "2", "--bound", "720!")
    assert code == 65
    assert "cap is 100" in err


def test_unreadable_map_file(capsys):
    code, _, err = run(capsys, "invariants", "--map", "no_such_file.json")
    assert code == 66
    assert "cannot read" in err


def test_unreadable_group_token(capsys):
    code, _, err = run(capsys, "entropy-sum", "--map", "lambda3", "--group", "notagroup")
    assert code == 66


def test_preset_name_with_json_suffix_falls_back(capsys):
    code, report = run_json(capsys, "invariants", "--map", "lambda1.json")
    assert code == 0
    assert report["o"] == 1


# ---------------------------------------------------------------------------
# Bound token parsing.
# ---------------------------------------------------------------------------


def test_parse_bound_tokens():
    assert cli.parse_bound("1000", 10000) == 1000
    assert cli.parse_bound("6!", 10000) == 720
    assert cli.parse_bound("3!!", 10000) == 720


def test_parse_bound_rejects_garbage():
    with pytest.raises(cli.SpecError):
        cli.parse_bound("12x", 10000)
    with pytest.raises(cli.SpecError):
        cli.parse_bound("0", 10000)
