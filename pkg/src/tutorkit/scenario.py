"""Evaluation-scenario construction from test sessions.

A scenario anchors at a human tutor act-level utterance of a Teaching act:
the dialogue prefix becomes the context, the nearest content tags the learning
content, and the human utterance the gold reference. A fixed number of
scenarios is sampled per Teaching act, without replacement, seeded.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass
from typing import Optional, Sequence

from .acts import ActId, Taxonomy
from .transcript import (
    Session,
    content_for_cut,
    context_entries,
    flatten_entries,
    render_context,
)

Anchor = tuple[str, int, int]  # session id, turn index, utterance index


class ScenarioDeficitError(ValueError):
    """Some Teaching act has fewer anchor candidates than requested."""

    def __init__(self, deficits: dict[str, int], per_act: int):
        lines = ", ".join(f"{act} has {n}" for act, n in sorted(deficits.items()))
        super().__init__(f"not enough anchors for per_act={per_act}: {lines}")
        self.deficits = deficits


@dataclass(frozen=True)
class TestScenario:
    id: str
    target_act: ActId
    context: str
    content: str
    gold_utterance: str
    # Anchor position, carried in memory only (not part of scenarios.jsonl).
    anchor: Optional[Anchor] = None


def anchor_candidates(
    test_corpus: Sequence[Session], act: ActId, taxonomy: Taxonomy
) -> list[tuple[Session, int, int]]:
    """All positions carrying ``act`` whose context is non-empty.

    Non-empty means at least one act-level utterance strictly precedes the
    anchor; positions are returned in (session, turn, utterance) order.
    """
    if taxonomy.get(act).category != "Teaching":
        raise ValueError(f"{act} is not a Teaching act")
    out = []
    for session in test_corpus:
        seen = 0
        for ti, ui, utt in session.act_utterances():
            if utt.act == act and seen > 0:
                out.append((session, ti, ui))
            seen += 1
    return out


def build_scenarios(
    test_corpus: Sequence[Session],
    taxonomy: Taxonomy,
    per_act: int,
    seed: int,
    max_context_turns: Optional[int] = None,
) -> list[TestScenario]:
    """Exactly ``per_act`` scenarios per Teaching act, deterministic for a seed."""
    if per_act < 1:
        raise ValueError("per_act must be >= 1")
    teaching = [d.id for d in taxonomy.teaching_acts()]
    candidates = {str(act): anchor_candidates(test_corpus, act, taxonomy) for act in teaching}
    deficits = {act: len(c) for act, c in candidates.items() if len(c) < per_act}
    if deficits:
        raise ScenarioDeficitError(deficits, per_act)

    rng = random.Random(seed)
    scenarios = []
    for act in teaching:
        pool = candidates[str(act)]
        chosen = sorted(rng.sample(range(len(pool)), per_act))
        for k, idx in enumerate(chosen):
            session, ti, ui = pool[idx]
            utt = session.turns[ti].utterances[ui]
            scenarios.append(
                TestScenario(
                    id=f"{act}#{k:03d}",
                    target_act=act,
                    context=render_context(session, ti, ui, max_context_turns),
                    content=content_for_cut(session, ti),
                    gold_utterance=utt.text,
                    anchor=(session.id, ti, ui),
                )
            )
    return scenarios


def write_scenarios(scenarios: Sequence[TestScenario], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for s in scenarios:
            fh.write(
                json.dumps(
                    {
                        "id": s.id,
                        "target_act": str(s.target_act),
                        "context": s.context,
                        "content": s.content,
                        "gold_utterance": s.gold_utterance,
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )


def read_scenarios(path: str, taxonomy: Taxonomy) -> list[TestScenario]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            d = json.loads(line)
            out.append(
                TestScenario(
                    id=d["id"],
                    target_act=taxonomy.validate_act(d["target_act"]),
                    context=d["context"],
                    content=d["content"],
                    gold_utterance=d["gold_utterance"],
                )
            )
    return out
