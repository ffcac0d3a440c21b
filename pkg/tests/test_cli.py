"""Pipeline wiring: stage ordering, artifact determinism, and report shape."""

import json
from pathlib import Path

import pytest

from revaudit.cli import main


def run(capsys, *args) -> tuple[int, str, str]:
    code = main(list(args))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture
def simulated(tmp_path, capsys):
    config = tmp_path / "gen.json"
    config.write_text(json.dumps({"n_submissions": 400, "citation_bias": 0.3}))
    code, _, err = run(
        capsys, "simulate", "--workdir", str(tmp_path),
        "--policy", "EC_LIKE", "--seed", "3", "--config", str(config),
    )
    assert code == 0, err
    return tmp_path


def test_pipeline_recovers_planted_effect(simulated, capsys):
    wd = str(simulated)
    assert run(capsys, "extract-citations", "--workdir", wd)[0] == 0
    assert run(capsys, "filter", "--workdir", wd)[0] == 0
    code, out, err = run(capsys, "analyze", "--parametric", "--workdir", wd)
    assert code == 0, err
    fit = json.loads((simulated / "fit.json").read_text())
    lo, hi = fit["ci95"]
    assert lo <= 0.3 <= hi
    assert "citation effect" in out


def test_analyze_without_filter_is_missing_artifact(simulated, capsys):
    code, _, err = run(capsys, "analyze", "--parametric", "--workdir", str(simulated))
    assert code == 1
    payload = json.loads(err)
    assert payload["error"]["type"] == "MissingArtifactError"
    assert "filter" in payload["error"]["message"]


def test_unknown_flag_reports_usage_error_json(tmp_path, capsys):
    code, _, err = run(capsys, "ingest", "--workdir", str(tmp_path), "--bogus")
    assert code == 2
    payload = json.loads(err)
    assert payload["error"]["type"] == "UsageError"


def test_missing_input_files_reported(tmp_path, capsys):
    code, _, err = run(capsys, "ingest", "--workdir", str(tmp_path))
    assert code == 1
    assert json.loads(err)["error"]["type"] == "MissingArtifactError"


def test_artifacts_are_byte_identical_across_reruns(tmp_path, capsys):
    def run_all(workdir: Path):
        config = workdir / "gen.json"
        config.write_text(json.dumps({"n_submissions": 120, "citation_bias": 0.2}))
        for args in (
            ("simulate", "--policy", "EC_LIKE", "--seed", "11", "--config", str(config)),
            ("ingest",),
            ("extract-citations",),
            ("filter",),
            ("analyze", "--parametric"),
            ("diagnostics",),
            ("effect-size",),
            ("report",),
        ):
            code, _, err = run(capsys, *args, "--workdir", str(workdir))
            assert code == 0, (args, err)

    first = tmp_path / "one"
    second = tmp_path / "two"
    first.mkdir()
    second.mkdir()
    run_all(first)
    run_all(second)
    names = [
        "venue.json", "reviewers.jsonl", "submissions.jsonl", "reviews.jsonl",
        "references.jsonl", "ground_truth.json", "relation.json",
        "analysis.jsonl", "filter_report.json", "exclusions.csv",
        "missingness.json", "fit.json", "residuals.csv", "qq.csv",
        "ranking.json", "ranking.csv", "report.json", "report.txt",
    ]
    for name in names:
        assert (first / name).read_bytes() == (second / name).read_bytes(), name


def test_report_shape_and_totals(simulated, capsys):
    wd = str(simulated)
    run(capsys, "extract-citations", "--workdir", wd)
    run(capsys, "filter", "--workdir", wd)
    run(capsys, "analyze", "--parametric", "--workdir", wd)
    code, out, err = run(capsys, "report", "--workdir", wd)
    assert code == 0, err
    for label in (
        "Analysis", "# Submissions", "# Reviewers", "# (S, R)-pairs",
        "Test Statistic", "Test Statistic (95% CI)", "P value",
    ):
        assert label in out
    report = json.loads((simulated / "report.json").read_text())
    filt = json.loads((simulated / "filter_report.json").read_text())
    block = report["reports"][0]
    assert block["n_submissions"] == filt["eligible_submissions"]
    assert block["n_pairs"] == filt["retained_pairs"]
    assert block["analysis"] == "parametric"
    assert "on 5-point scale" in out


def test_nonparametric_cli_path(tmp_path, capsys):
    config = tmp_path / "gen.json"
    config.write_text(json.dumps({
        "n_submissions": 400, "reviewers_per_paper": 5, "citation_bias": 0.4,
        "citation_prevalence": 0.45,
        "expertise_weights": [0.05, 0.15, 0.4, 0.4],
        "confidence_weights": [0.1, 0.2, 0.4, 0.3],
        "text_overlap_sd": 0.06, "bid_weights": [0.15, 0.55, 0.3],
        "seniority_rate": 0.75,
    }))
    wd = str(tmp_path)
    assert run(capsys, "simulate", "--workdir", wd, "--policy", "ICML_LIKE",
               "--seed", "21", "--config", str(config))[0] == 0
    assert run(capsys, "extract-citations", "--workdir", wd)[0] == 0
    assert run(capsys, "filter", "--workdir", wd)[0] == 0
    code, out, err = run(capsys, "analyze", "--nonparametric", "--seed", "5",
                         "--workdir", wd)
    assert code == 0, err
    result = json.loads((tmp_path / "permutation.json").read_text())
    assert result["n_triples"] >= 1
    assert 0.0 < result["p_two_sided"] <= 1.0
    assert (tmp_path / "triples.csv").exists()
    code, out, _ = run(capsys, "report", "--workdir", wd)
    assert code == 0
    assert "Nonparametric" in out


def test_nonparametric_requires_seed(simulated, capsys):
    wd = str(simulated)
    run(capsys, "extract-citations", "--workdir", wd)
    run(capsys, "filter", "--workdir", wd)
    code, _, err = run(capsys, "analyze", "--nonparametric", "--workdir", wd)
    assert code == 1
    assert "seed" in json.loads(err)["error"]["message"]


def test_assign_cli_with_similarity(tmp_path, capsys):
    config = tmp_path / "gen.json"
    config.write_text(json.dumps({"n_submissions": 12, "n_reviewers": 8}))
    wd = str(tmp_path)
    run(capsys, "simulate", "--workdir", wd, "--policy", "EC_LIKE",
        "--seed", "2", "--config", str(config))
    run(capsys, "extract-citations", "--workdir", wd, "--pairs", "all")
    # similarity over every submission x reviewer pair
    import itertools
    lines = ["submission_id,reviewer_id,sim"]
    for i, j in itertools.product(range(1, 13), range(1, 9)):
        lines.append(f"s{i:04d},r{j:04d},{((i * 7 + j * 3) % 10) / 10}")
    (tmp_path / "similarity.csv").write_text("\n".join(lines) + "\n")
    code, out, err = run(
        capsys, "assign", "--workdir", wd, "--lambda", "0.5",
        "--paper-load", "2", "--reviewer-cap", "4",
        "--sweep", "0,0.5,1.0",
    )
    assert code == 0, err
    assignment = (tmp_path / "assignment.csv").read_text().splitlines()
    assert assignment[0] == "submission_id,reviewer_id"
    assert len(assignment) == 1 + 12 * 2
    sweep = (tmp_path / "sweep.csv").read_text().splitlines()
    assert sweep[0] == "lambda,objective_quality,cited_count"
    assert len(sweep) == 4


def test_venue_config_flag_overrides_default_location(simulated, capsys):
    moved = simulated / "custom_venue.json"
    moved.write_text((simulated / "venue.json").read_text())
    (simulated / "venue.json").unlink()
    code, _, err = run(capsys, "ingest", "--workdir", str(simulated))
    assert code == 1  # default location is gone
    code, _, err = run(
        capsys, "ingest", "--workdir", str(simulated), "--venue-config", str(moved)
    )
    assert code == 0, err


def test_audit_sampling_writes_csvs(simulated, capsys):
    wd = str(simulated)
    code, _, err = run(
        capsys, "extract-citations", "--workdir", wd,
        "--audit-cited", "10", "--audit-uncited", "10", "--seed", "1",
    )
    assert code == 0, err
    cited_rows = (simulated / "audit_cited.csv").read_text().splitlines()
    assert cited_rows[0] == "submission_id,reviewer_id"
    assert len(cited_rows) == 11
