"""Scenario evaluation runner: drives the engine over a scenario set.

Provider calls may overlap across scenarios (bounded thread pool); results
are merged deterministically by scenario id. Every prompt/reply exchange is
written to the run directory for audit.
"""
from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Optional, Sequence

from .acts import Taxonomy
from .engine import (
    MODE_BASELINE,
    MODES,
    ActSelectionError,
    ChatExchange,
    EngineError,
    ExampleIndex,
    run_baseline,
    run_two_step,
)
from .metrics import PredictionRecord, write_predictions
from .providers import ChatProvider, GoldReplayProvider, ProviderError
from .scenario import TestScenario
from .transcript import last_utterance_text

ProviderFactory = Callable[[TestScenario], ChatProvider]


def gold_replay_factory(scenario: TestScenario) -> ChatProvider:
    return GoldReplayProvider(str(scenario.target_act), scenario.gold_utterance)


def shared_provider_factory(provider: ChatProvider) -> ProviderFactory:
    return lambda scenario: provider


def _eval_one(
    scenario: TestScenario,
    taxonomy: Taxonomy,
    provider_factory: ProviderFactory,
    mode: str,
    example_index: Optional[ExampleIndex],
    retrieve_by_gold: bool,
) -> tuple[PredictionRecord, list[ChatExchange], Optional[str]]:
    provider = provider_factory(scenario)
    log: list[ChatExchange] = []
    predicted, generated, error = None, "", None
    try:
        if mode == MODE_BASELINE:
            generated = run_baseline(provider, scenario.context, scenario.content, log=log)
        else:
            step = run_two_step(
                provider,
                taxonomy,
                scenario.context,
                scenario.content,
                mode,
                example_index=example_index,
                gold_act=scenario.target_act,
                retrieve_by_gold=retrieve_by_gold,
                log=log,
            )
            predicted, generated = str(step.act), step.utterance
    except ActSelectionError as exc:
        error = f"act selection failed after {exc.attempts} attempts"
    except (EngineError, ProviderError) as exc:
        error = str(exc)
    record = PredictionRecord(
        scenario_id=scenario.id,
        predicted_act=predicted,
        generated=generated,
        gold_act=str(scenario.target_act),
        gold_utterance=scenario.gold_utterance,
        prev_utterance=last_utterance_text(scenario.context),
    )
    return record, log, error


def run_eval(
    scenarios: Sequence[TestScenario],
    taxonomy: Taxonomy,
    provider_factory: ProviderFactory,
    mode: str,
    example_index: Optional[ExampleIndex] = None,
    retrieve_by_gold: bool = True,
    parallelism: int = 4,
    run_dir: Optional[str] = None,
) -> list[PredictionRecord]:
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
    ids = [s.id for s in scenarios]
    if len(set(ids)) != len(ids):
        raise ValueError("scenario ids must be unique within a run")

    with ThreadPoolExecutor(max_workers=max(1, parallelism)) as pool:
        results = list(
            pool.map(
                lambda s: _eval_one(s, taxonomy, provider_factory, mode, example_index, retrieve_by_gold),
                scenarios,
            )
        )

    order = {sid: i for i, sid in enumerate(sorted(ids))}
    results.sort(key=lambda item: order[item[0].scenario_id])
    records = [record for record, _, _ in results]

    if run_dir is not None:
        os.makedirs(run_dir, exist_ok=True)
        with open(os.path.join(run_dir, "prompts.jsonl"), "w", encoding="utf-8") as fh:
            for record, log, error in results:
                for exchange in log:
                    fh.write(
                        json.dumps(
                            {
                                "scenario_id": record.scenario_id,
                                "messages": list(exchange.messages),
                                "reply": exchange.reply,
                            },
                            ensure_ascii=False,
                        )
                        + "\n"
                    )
                if error:
                    fh.write(
                        json.dumps(
                            {"scenario_id": record.scenario_id, "error": error},
                            ensure_ascii=False,
                        )
                        + "\n"
                    )
        write_predictions(records, os.path.join(run_dir, "predictions.jsonl"))
    return records
