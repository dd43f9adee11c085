"""Instruction-tuning dataset builders.

Compiles an annotated corpus into five JSON-lines datasets: next-act
prediction, act-conditioned utterance generation, missing-context inference,
minority-act utterance generation from an expert file, and the joint
(act+utterance in one shot, no instruction) baseline format.

Act-prediction samples are emitted per act-level utterance, not per turn: a
tutor turn carrying three acts yields three cut points, which is exactly the
granularity the two-step engine predicts at.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .acts import TUTOR, Taxonomy, UnknownActError
from .prompts import (
    ACT_PREDICTION_INSTRUCTION,
    MINORITY_ACT_INSTRUCTION,
    MISSING_CONTEXT_INSTRUCTION,
    UTTERANCE_GENERATION_INSTRUCTION,
    act_candidates_block,
)
from .transcript import (
    Session,
    context_entries,
    drop_last_utterance,
    flatten_entries,
    render_entries,
)

TASK_ACT_PREDICTION = "act_prediction"
TASK_UTTERANCE_GENERATION = "utterance_generation"
TASK_MISSING_CONTEXT = "missing_context"
TASK_MINORITY_ACT = "minority_act"
TASK_JOINT_BASELINE = "joint_baseline"

TASK_FILE_NAMES = {
    TASK_ACT_PREDICTION: "tasks-1.jsonl",
    TASK_UTTERANCE_GENERATION: "tasks-2.jsonl",
    TASK_MISSING_CONTEXT: "tasks-3.jsonl",
    TASK_MINORITY_ACT: "tasks-4.jsonl",
    TASK_JOINT_BASELINE: "tasks-baseline.jsonl",
}


@dataclass(frozen=True)
class InstructionSample:
    task: str
    instruction: str
    input: str
    response: str
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.task != TASK_JOINT_BASELINE and not self.instruction:
            raise ValueError(f"{self.task} sample requires an instruction")
        if self.task == TASK_JOINT_BASELINE and self.instruction:
            raise ValueError("joint-baseline samples carry no instruction")
        if not self.response:
            raise ValueError("sample response must be non-empty")


def _tutor_cut_points(corpus: Sequence[Session]):
    for session in corpus:
        for ti, ui, utt in session.act_utterances():
            if utt.act.role == TUTOR:
                yield session, ti, ui, utt


def _meta(session: Session, ti: int, ui: int, act) -> dict:
    return {
        "session_id": session.id,
        "turn_index": ti,
        "utterance_index": ui,
        "act": str(act) if act is not None else None,
    }


def build_act_prediction(corpus: Sequence[Session], taxonomy: Taxonomy) -> list[InstructionSample]:
    """One sample per tutor act-level utterance: context + candidates -> act id."""
    candidates = act_candidates_block(taxonomy)
    samples = []
    for session, ti, ui, utt in _tutor_cut_points(corpus):
        context = render_entries(context_entries(session, ti, ui))
        samples.append(
            InstructionSample(
                task=TASK_ACT_PREDICTION,
                instruction=ACT_PREDICTION_INSTRUCTION,
                input=f"- Context: {context},\n- Act candidates:\n{candidates}",
                response=str(utt.act),
                meta=_meta(session, ti, ui, utt.act),
            )
        )
    return samples


def build_utterance_generation(corpus: Sequence[Session], taxonomy: Taxonomy) -> list[InstructionSample]:
    """One sample per tutor act-level utterance: context + act + description -> text."""
    samples = []
    for session, ti, ui, utt in _tutor_cut_points(corpus):
        description = taxonomy.get(utt.act).description
        if not description.strip():
            raise ValueError(f"act {utt.act} has an empty description")
        context = render_entries(context_entries(session, ti, ui))
        samples.append(
            InstructionSample(
                task=TASK_UTTERANCE_GENERATION,
                instruction=UTTERANCE_GENERATION_INSTRUCTION,
                input=f"- Context: {context},\n- Act: {utt.act}, {description}",
                response=utt.text,
                meta=_meta(session, ti, ui, utt.act),
            )
        )
    return samples


def build_missing_context(
    corpus: Sequence[Session], sample_rate: float = 1.0, seed: int = 0
) -> list[InstructionSample]:
    """Context-minus-last-utterance + target utterance -> '<speaker>, <removed text>'.

    Cut points whose context holds fewer than two act-level utterances are
    skipped (nothing would remain after removal). ``sample_rate`` < 1 keeps a
    seeded random subset of the eligible cut points.
    """
    if not 0.0 <= sample_rate <= 1.0:
        raise ValueError("sample_rate must be within [0, 1]")
    rng = random.Random(seed)
    samples = []
    for session, ti, ui, utt in _tutor_cut_points(corpus):
        entries = context_entries(session, ti, ui)
        if len(flatten_entries(entries)) < 2:
            continue
        if sample_rate < 1.0 and rng.random() >= sample_rate:
            continue
        partial, speaker, removed = drop_last_utterance(entries)
        samples.append(
            InstructionSample(
                task=TASK_MISSING_CONTEXT,
                instruction=MISSING_CONTEXT_INSTRUCTION,
                input=f"- Context: {render_entries(partial)},\n- Utterance: {utt.text}",
                response=f"{speaker}, {removed.text}",
                meta=_meta(session, ti, ui, utt.act),
            )
        )
    return samples


def build_minority_act(expert_rows: Iterable[dict], taxonomy: Taxonomy) -> list[InstructionSample]:
    """One sample per expert row (content/act/utterance); no dialogue context."""
    samples = []
    for i, row in enumerate(expert_rows):
        for key in ("content", "act", "utterance"):
            if not row.get(key):
                raise ValueError(f"expert row {i}: missing field {key!r}")
        try:
            act = taxonomy.validate_act(row["act"])
        except UnknownActError:
            raise ValueError(f"expert row {i}: unregistered act {row['act']!r}") from None
        description = taxonomy.get(act).description
        samples.append(
            InstructionSample(
                task=TASK_MINORITY_ACT,
                instruction=MINORITY_ACT_INSTRUCTION,
                input=f"- Content: {row['content']}\n- Act: {act}, {description}",
                response=row["utterance"],
                meta={"session_id": "expert", "turn_index": i, "utterance_index": 0, "act": str(act)},
            )
        )
    return samples


def build_joint_baseline(corpus: Sequence[Session]) -> list[InstructionSample]:
    """Context only -> '[act]utterance', with an empty instruction."""
    samples = []
    for session, ti, ui, utt in _tutor_cut_points(corpus):
        context = render_entries(context_entries(session, ti, ui))
        samples.append(
            InstructionSample(
                task=TASK_JOINT_BASELINE,
                instruction="",
                input=context,
                response=f"[{utt.act}]{utt.text}",
                meta=_meta(session, ti, ui, utt.act),
            )
        )
    return samples


def render_sample(sample: InstructionSample) -> str:
    """Three-section training layout; the joint baseline omits the instruction."""
    if sample.task == TASK_JOINT_BASELINE:
        return f"### Input:\n{sample.input}\n### Response:\n{sample.response}"
    return (
        f"### Instruction:\n{sample.instruction}\n"
        f"### Input:\n{sample.input}\n"
        f"### Response:\n{sample.response}"
    )


def write_samples(samples: Sequence[InstructionSample], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for s in samples:
            fh.write(
                json.dumps(
                    {
                        "task": s.task,
                        "instruction": s.instruction,
                        "input": s.input,
                        "response": s.response,
                        "meta": s.meta,
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )


def read_samples(path: str) -> list[InstructionSample]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                d = json.loads(line)
                out.append(InstructionSample(**d))
    return out


def read_expert_file(path: str) -> list[dict]:
    """Expert rows for the minority-act task: JSONL with content/act/utterance."""
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                rows.append(json.loads(line))
    return rows
