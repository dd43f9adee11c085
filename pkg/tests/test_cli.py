from __future__ import annotations

import json
import os

import pytest
from click.testing import CliRunner

from tutorkit.cli import main

from .conftest import EXPERT_FILE, FIXTURE_CORPUS


@pytest.fixture
def runner():
    return CliRunner()


def _summary(result):
    assert result.exit_code == 0, result.output
    return json.loads(result.output.strip().splitlines()[-1])


def test_parse_summary(runner):
    result = runner.invoke(main, ["parse", FIXTURE_CORPUS])
    summary = _summary(result)
    assert summary["sessions"] == 4
    assert summary["act_utterances"] == 576
    assert summary["session_ids"] == ["fx-001", "fx-002", "fx-003", "fx-004"]


def test_stats_summary(runner):
    result = runner.invoke(main, ["stats", FIXTURE_CORPUS, "--distribution"])
    summary = _summary(result)
    assert summary["n_sessions"] == 4
    assert abs(sum(summary["act_distribution"].values()) - 1.0) < 1e-9


def test_split_deterministic(runner, tmp_path):
    args = [
        "split", FIXTURE_CORPUS, "--n-test", "1", "--seed", "5",
        "--out-train", str(tmp_path / "train.txt"), "--out-test", str(tmp_path / "test.txt"),
    ]
    first = _summary(runner.invoke(main, args))
    test_bytes = (tmp_path / "test.txt").read_bytes()
    second = _summary(runner.invoke(main, args))
    assert first["test_sessions"] == second["test_sessions"] == 1
    assert (tmp_path / "test.txt").read_bytes() == test_bytes


def test_build_instructions_counts(runner, tmp_path):
    out_dir = str(tmp_path / "datasets")
    result = runner.invoke(
        main,
        ["build-instructions", FIXTURE_CORPUS, "--out-dir", out_dir, "--expert-file", EXPERT_FILE],
    )
    summary = _summary(result)
    # 388 tutor act-level utterances in the fixture (576 total, 188 student)
    assert summary["act_prediction"] == summary["utterance_generation"] == summary["joint_baseline"] == 388
    for name in ("tasks-1.jsonl", "tasks-2.jsonl", "tasks-3.jsonl", "tasks-4.jsonl", "tasks-baseline.jsonl"):
        path = os.path.join(out_dir, name)
        assert os.path.exists(path)
        with open(path, encoding="utf-8") as fh:
            rows = [json.loads(line) for line in fh if line.strip()]
        assert rows and all({"task", "instruction", "input", "response", "meta"} <= set(r) for r in rows)


def test_build_scenarios_and_eval_report_pipeline(runner, tmp_path):
    scenarios_path = str(tmp_path / "scenarios.jsonl")
    result = runner.invoke(
        main,
        ["build-scenarios", FIXTURE_CORPUS, "--per-act", "1", "--seed", "3", "--out", scenarios_path],
    )
    assert _summary(result)["scenarios"] == 22

    run_dir = str(tmp_path / "run")
    result = runner.invoke(
        main,
        ["eval", "--scenarios", scenarios_path, "--provider", "gold-replay",
         "--mode", "zero-shot", "--run-dir", run_dir],
    )
    summary = _summary(result)
    assert summary == {
        "scenarios": 22, "selection_failures": 0, "mode": "zero-shot",
        "provider": "gold-replay", "run_dir": run_dir,
    }

    report_path = str(tmp_path / "report.json")
    result = runner.invoke(
        main,
        ["report", "--predictions", os.path.join(run_dir, "predictions.jsonl"),
         "--out", report_path, "--target", "1"],
    )
    summary = _summary(result)
    assert summary["accuracy"] == 1.0
    assert summary["invariability"] == 0.0
    assert summary["corpus_bleu"] == pytest.approx(100.0)
    with open(report_path, encoding="utf-8") as fh:
        assert json.load(fh)["n"] == 22


def test_eval_one_shot_requires_train(runner, tmp_path):
    scenarios_path = str(tmp_path / "scenarios.jsonl")
    runner.invoke(
        main,
        ["build-scenarios", FIXTURE_CORPUS, "--per-act", "1", "--seed", "3", "--out", scenarios_path],
    )
    result = runner.invoke(
        main,
        ["eval", "--scenarios", scenarios_path, "--provider", "gold-replay",
         "--mode", "one-shot", "--run-dir", str(tmp_path / "r")],
    )
    assert result.exit_code != 0
    assert "--train" in result.output

    result = runner.invoke(
        main,
        ["eval", "--scenarios", scenarios_path, "--provider", "gold-replay",
         "--mode", "one-shot", "--train", FIXTURE_CORPUS, "--run-dir", str(tmp_path / "r2")],
    )
    assert _summary(result)["selection_failures"] == 0


def test_taxonomy_override(runner, tmp_path):
    bad = tmp_path / "tax.txt"
    bad.write_text("id: t.general\ncategory: General\ndescription: d\n", encoding="utf-8")
    result = runner.invoke(main, ["parse", FIXTURE_CORPUS, "--taxonomy", str(bad)])
    assert result.exit_code != 0
