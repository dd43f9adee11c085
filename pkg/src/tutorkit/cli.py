"""Command-line interface driving the whole pipeline.

Subcommands: parse, stats, split, build-instructions, build-scenarios, eval,
report, serve. Every command prints a machine-readable JSON summary; commands
that sample take --seed.
"""
from __future__ import annotations

import json
import os
import sys

import click

from . import __version__
from .acts import Taxonomy, load_taxonomy_file
from .corpus import act_distribution, corpus_stats, load_corpus, save_corpus, split_corpus
from .engine import MODE_ONE_SHOT, MODE_ZERO_SHOT, MODES, build_example_index
from .evalrun import gold_replay_factory, run_eval, shared_provider_factory
from .instruct import (
    TASK_FILE_NAMES,
    TASK_ACT_PREDICTION,
    TASK_JOINT_BASELINE,
    TASK_MINORITY_ACT,
    TASK_MISSING_CONTEXT,
    TASK_UTTERANCE_GENERATION,
    build_act_prediction,
    build_joint_baseline,
    build_minority_act,
    build_missing_context,
    build_utterance_generation,
    read_expert_file,
    write_samples,
)
from .metrics import build_report, format_report_table, read_predictions, write_predictions
from .providers import (
    HttpChatProvider,
    ProviderConfig,
    ScriptedChatProvider,
    make_embedding_provider,
)
from .scenario import build_scenarios, read_scenarios, write_scenarios
from .service import EventStore, SessionService, create_app


def _echo_summary(summary: dict) -> None:
    click.echo(json.dumps(summary, ensure_ascii=False, sort_keys=True))


def _load_taxonomy(path: str | None) -> Taxonomy:
    return load_taxonomy_file(path)


taxonomy_option = click.option(
    "--taxonomy", "taxonomy_path", type=click.Path(exists=True), default=None,
    help="Taxonomy definition file (defaults to the bundled vocabulary).",
)


@click.group()
@click.version_option(__version__, prog_name="tutorkit")
def main():
    """Tooling for act-annotated bilingual tutoring dialogues."""


@main.command("parse")
@click.argument("paths", nargs=-1, required=True, type=click.Path(exists=True))
@taxonomy_option
def parse_cmd(paths, taxonomy_path):
    """Parse transcripts and report their shape."""
    taxonomy = _load_taxonomy(taxonomy_path)
    sessions = [s for p in paths for s in load_corpus(p, taxonomy)]
    n_turns = sum(len(s.turns) for s in sessions)
    n_utts = sum(len(s.act_utterances()) for s in sessions)
    _echo_summary(
        {
            "sessions": len(sessions),
            "turns": n_turns,
            "act_utterances": n_utts,
            "session_ids": [s.id for s in sessions],
        }
    )


@main.command("stats")
@click.argument("paths", nargs=-1, required=True, type=click.Path(exists=True))
@taxonomy_option
@click.option("--distribution", is_flag=True, help="Include the tutor-act distribution.")
def stats_cmd(paths, taxonomy_path, distribution):
    """Corpus summary statistics."""
    taxonomy = _load_taxonomy(taxonomy_path)
    sessions = [s for p in paths for s in load_corpus(p, taxonomy)]
    summary = corpus_stats(sessions).to_dict()
    if distribution:
        summary["act_distribution"] = act_distribution(sessions)
    _echo_summary(summary)


@main.command("split")
@click.argument("paths", nargs=-1, required=True, type=click.Path(exists=True))
@click.option("--n-test", type=int, required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out-train", type=click.Path(), required=True)
@click.option("--out-test", type=click.Path(), required=True)
@taxonomy_option
def split_cmd(paths, n_test, seed, out_train, out_test, taxonomy_path):
    """Session-granular train/test split."""
    taxonomy = _load_taxonomy(taxonomy_path)
    sessions = [s for p in paths for s in load_corpus(p, taxonomy)]
    train, test = split_corpus(sessions, n_test, seed)
    save_corpus(train, out_train)
    save_corpus(test, out_test)
    _echo_summary(
        {
            "train_sessions": len(train),
            "test_sessions": len(test),
            "seed": seed,
            "out_train": out_train,
            "out_test": out_test,
        }
    )


@main.command("build-instructions")
@click.argument("paths", nargs=-1, required=True, type=click.Path(exists=True))
@click.option("--out-dir", type=click.Path(), required=True)
@click.option("--expert-file", type=click.Path(exists=True), default=None,
              help="JSONL rows (content/act/utterance) for the minority-act task.")
@click.option("--task3-rate", type=float, default=1.0, show_default=True,
              help="Sampling rate for missing-context cut points.")
@click.option("--seed", type=int, default=0, show_default=True)
@taxonomy_option
def build_instructions_cmd(paths, out_dir, expert_file, task3_rate, seed, taxonomy_path):
    """Compile the instruction-tuning datasets (tasks 1-4 + joint baseline)."""
    taxonomy = _load_taxonomy(taxonomy_path)
    sessions = [s for p in paths for s in load_corpus(p, taxonomy)]
    os.makedirs(out_dir, exist_ok=True)
    built = {
        TASK_ACT_PREDICTION: build_act_prediction(sessions, taxonomy),
        TASK_UTTERANCE_GENERATION: build_utterance_generation(sessions, taxonomy),
        TASK_MISSING_CONTEXT: build_missing_context(sessions, task3_rate, seed),
        TASK_JOINT_BASELINE: build_joint_baseline(sessions),
    }
    if expert_file:
        built[TASK_MINORITY_ACT] = build_minority_act(read_expert_file(expert_file), taxonomy)
    summary = {"out_dir": out_dir}
    for task, samples in built.items():
        path = os.path.join(out_dir, TASK_FILE_NAMES[task])
        write_samples(samples, path)
        summary[task] = len(samples)
    _echo_summary(summary)


@main.command("build-scenarios")
@click.argument("paths", nargs=-1, required=True, type=click.Path(exists=True))
@click.option("--per-act", type=int, default=10, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--max-context-turns", type=int, default=None)
@click.option("--out", "out_path", type=click.Path(), required=True)
@taxonomy_option
def build_scenarios_cmd(paths, per_act, seed, max_context_turns, out_path, taxonomy_path):
    """Build the per-Teaching-act evaluation scenario set."""
    taxonomy = _load_taxonomy(taxonomy_path)
    sessions = [s for p in paths for s in load_corpus(p, taxonomy)]
    scenarios = build_scenarios(sessions, taxonomy, per_act, seed, max_context_turns)
    write_scenarios(scenarios, out_path)
    _echo_summary(
        {"scenarios": len(scenarios), "per_act": per_act, "seed": seed, "out": out_path}
    )


def _chat_provider_factory(spec: str, model: str, temperature: float, max_tokens: int):
    if spec == "gold-replay":
        return gold_replay_factory
    if spec == "http":
        config = ProviderConfig.from_env(
            model=model, temperature=temperature, max_tokens=max_tokens
        )
        return shared_provider_factory(HttpChatProvider(config))
    if spec.startswith("script:"):
        return shared_provider_factory(ScriptedChatProvider.from_file(spec.split(":", 1)[1]))
    raise click.BadParameter(f"unknown provider spec {spec!r}")


@main.command("eval")
@click.option("--scenarios", "scenarios_path", type=click.Path(exists=True), required=True)
@click.option("--provider", "provider_spec", default="http", show_default=True,
              help="http | gold-replay | script:<replies.jsonl>")
@click.option("--mode", type=click.Choice(MODES), default=MODE_ZERO_SHOT, show_default=True)
@click.option("--train", "train_paths", type=click.Path(exists=True), multiple=True,
              help="Training transcripts for one-shot exemplar retrieval.")
@click.option("--exemplar-by-predicted", is_flag=True,
              help="Retrieve one-shot exemplars by the predicted act instead of the gold act.")
@click.option("--model", default="gpt-4", show_default=True)
@click.option("--temperature", type=float, default=0.0, show_default=True)
@click.option("--max-tokens", type=int, default=512, show_default=True)
@click.option("--parallelism", type=int, default=4, show_default=True)
@click.option("--run-dir", type=click.Path(), required=True,
              help="Audit directory for prompts.jsonl and predictions.jsonl.")
@taxonomy_option
def eval_cmd(
    scenarios_path, provider_spec, mode, train_paths, exemplar_by_predicted,
    model, temperature, max_tokens, parallelism, run_dir, taxonomy_path,
):
    """Run the engine over a scenario set and record predictions."""
    taxonomy = _load_taxonomy(taxonomy_path)
    scenarios = read_scenarios(scenarios_path, taxonomy)
    example_index = None
    if mode == MODE_ONE_SHOT:
        if not train_paths:
            raise click.UsageError("--mode one-shot requires --train transcripts")
        train_sessions = [s for p in train_paths for s in load_corpus(p, taxonomy)]
        example_index = build_example_index(train_sessions)
    factory = _chat_provider_factory(provider_spec, model, temperature, max_tokens)
    if provider_spec.startswith("script:"):
        parallelism = 1  # scripted replies are ordered; keep calls sequential
    records = run_eval(
        scenarios,
        taxonomy,
        factory,
        mode,
        example_index=example_index,
        retrieve_by_gold=not exemplar_by_predicted,
        parallelism=parallelism,
        run_dir=run_dir,
    )
    failures = sum(1 for r in records if r.predicted_act is None)
    _echo_summary(
        {
            "scenarios": len(records),
            "selection_failures": failures,
            "mode": mode,
            "provider": provider_spec,
            "run_dir": run_dir,
        }
    )


@main.command("report")
@click.option("--predictions", "predictions_path", type=click.Path(exists=True), required=True)
@click.option("--out", "out_path", type=click.Path(), required=True)
@click.option("--embedding-provider", "embedding_spec", default="hash", show_default=True,
              help="hash | file:<vectors.jsonl> | http")
@click.option("--target", type=int, default=10, show_default=True,
              help="Per-Teaching-act target count for invariability.")
@click.option("--name", default="run", show_default=True, help="Row label in the text table.")
@click.option("--table/--no-table", default=True, show_default=True)
@taxonomy_option
def report_cmd(predictions_path, out_path, embedding_spec, target, name, table, taxonomy_path):
    """Build the metric report from recorded predictions."""
    taxonomy = _load_taxonomy(taxonomy_path)
    records = read_predictions(predictions_path)
    provider = make_embedding_provider(embedding_spec)
    teaching = [d.id for d in taxonomy.teaching_acts()]
    report = build_report(records, provider, teaching, target)
    with open(out_path, "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, ensure_ascii=False, indent=2)
        fh.write("\n")
    if table:
        click.echo(format_report_table({name: report}), err=True)
    _echo_summary(report.to_dict() | {"out": out_path})


@main.command("serve")
@click.option("--bind", default=None, help="host:port (defaults to BIND_ADDR or 127.0.0.1:8080)")
@click.option("--event-dir", type=click.Path(), default="./sessions", show_default=True)
@click.option("--provider", "provider_spec", default="http", show_default=True,
              help="http | script:<replies.jsonl>")
@click.option("--train", "train_paths", type=click.Path(exists=True), multiple=True,
              help="Training transcripts for one-shot exemplar retrieval.")
@click.option("--model", default="gpt-4", show_default=True)
@click.option("--temperature", type=float, default=0.0, show_default=True)
@click.option("--max-tokens", type=int, default=512, show_default=True)
@taxonomy_option
def serve_cmd(bind, event_dir, provider_spec, train_paths, model, temperature, max_tokens, taxonomy_path):
    """Run the live tutoring session service."""
    import uvicorn

    taxonomy = _load_taxonomy(taxonomy_path)
    if provider_spec == "http":
        config = ProviderConfig.from_env(model=model, temperature=temperature, max_tokens=max_tokens)
        provider = HttpChatProvider(config)
    elif provider_spec.startswith("script:"):
        provider = ScriptedChatProvider.from_file(provider_spec.split(":", 1)[1])
    else:
        raise click.BadParameter(f"unknown provider spec {provider_spec!r}")
    example_index = None
    if train_paths:
        train_sessions = [s for p in train_paths for s in load_corpus(p, taxonomy)]
        example_index = build_example_index(train_sessions)
    service = SessionService(taxonomy, provider, EventStore(event_dir), example_index)
    app = create_app(service)
    addr = bind or os.environ.get("BIND_ADDR", "127.0.0.1:8080")
    host, _, port = addr.rpartition(":")
    _echo_summary({"bind": addr, "event_dir": event_dir, "provider": provider_spec})
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port))


if __name__ == "__main__":
    sys.exit(main())
