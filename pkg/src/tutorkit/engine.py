"""Two-step tutoring engine: act selection, then act-conditioned generation.

Act replies are parsed by taking the first substring matching the act-id
grammar and validating it against the taxonomy; an invalid reply is retried
up to two more times with an appended correction note, after which the
selection fails loudly (callers count the failure as an incorrect prediction
instead of substituting a default act). In one-shot mode an exemplar sharing
the target act is prepended to the generation prompt only; for live use the
exemplar follows the selected act, for scenario evaluation a flag switches to
gold-act retrieval.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .acts import ACT_ID_SCAN_RE, TUTOR, ActId, Taxonomy, TaxonomyError
from .prompts import (
    ACT_RETRY_NOTE,
    act_selection_prompt,
    baseline_prompt,
    exemplar_block,
    generation_prompt,
)
from .providers import ChatProvider, Message
from .transcript import Session, content_for_cut, context_entries, render_entries

MODE_BASELINE = "baseline"
MODE_ZERO_SHOT = "zero-shot"
MODE_ONE_SHOT = "one-shot"
MODES = (MODE_BASELINE, MODE_ZERO_SHOT, MODE_ONE_SHOT)

ACT_SELECTION_MAX_ATTEMPTS = 3  # first try plus two corrections


class EngineError(RuntimeError):
    pass


class ActSelectionError(EngineError):
    """The provider failed to name a registered act within the retry budget."""

    def __init__(self, replies: Sequence[str]):
        super().__init__(
            f"no registered act id in {len(replies)} replies; last: {replies[-1]!r}"
        )
        self.replies = list(replies)
        self.attempts = len(replies)


class EmptyReplyError(EngineError):
    pass


@dataclass(frozen=True)
class ChatExchange:
    """One provider call: outgoing messages and the verbatim reply."""

    messages: tuple[Message, ...]
    reply: str


@dataclass(frozen=True)
class TutorStep:
    act: ActId
    utterance: str
    raw_act_reply: str
    attempts: int


@dataclass(frozen=True)
class Exemplar:
    context: str
    content: str
    act: str
    utterance: str


class ExampleIndex:
    """Exemplars from a training split, grouped by act, in corpus order."""

    def __init__(self, by_act: dict[str, list[Exemplar]]):
        for act, exemplars in by_act.items():
            for ex in exemplars:
                if ex.act != act:
                    raise ValueError(f"exemplar act {ex.act} filed under {act}")
        self._by_act = by_act

    def get(self, act: "ActId | str", rotation: int = 0) -> Optional[Exemplar]:
        """The rotation-th exemplar for an act (modulo pool size), or None."""
        pool = self._by_act.get(str(act), [])
        if not pool:
            return None
        return pool[rotation % len(pool)]

    def counts(self) -> dict[str, int]:
        return {act: len(pool) for act, pool in sorted(self._by_act.items())}


def build_example_index(train_corpus: Sequence[Session]) -> ExampleIndex:
    """Index every tutor act-level utterance that has a non-empty context."""
    by_act: dict[str, list[Exemplar]] = {}
    for session in train_corpus:
        seen = 0
        for ti, ui, utt in session.act_utterances():
            if utt.act.role == TUTOR and seen > 0:
                by_act.setdefault(str(utt.act), []).append(
                    Exemplar(
                        context=render_entries(context_entries(session, ti, ui)),
                        content=content_for_cut(session, ti),
                        act=str(utt.act),
                        utterance=utt.text,
                    )
                )
            seen += 1
    return ExampleIndex(by_act)


def _call(provider: ChatProvider, messages: list[Message], log: Optional[list[ChatExchange]]) -> str:
    reply = provider.complete(messages)
    if log is not None:
        log.append(ChatExchange(messages=tuple(dict(m) for m in messages), reply=reply))
    return reply


def select_act(
    provider: ChatProvider,
    taxonomy: Taxonomy,
    context: str,
    content: str,
    mode: str = MODE_ZERO_SHOT,
    log: Optional[list[ChatExchange]] = None,
) -> tuple[ActId, str, int]:
    """Choose the next tutor act; returns (act, raw reply, attempts used)."""
    if mode not in (MODE_ZERO_SHOT, MODE_ONE_SHOT):
        raise ValueError(f"act selection requires a two-step mode, got {mode!r}")
    prompt = act_selection_prompt(context, content, taxonomy)
    messages: list[Message] = [{"role": "user", "content": prompt}]
    replies: list[str] = []
    for attempt in range(1, ACT_SELECTION_MAX_ATTEMPTS + 1):
        reply = _call(provider, messages, log)
        replies.append(reply)
        match = ACT_ID_SCAN_RE.search(reply)
        if match:
            try:
                act = taxonomy.validate_act(match.group(0))
                return act, reply, attempt
            except TaxonomyError:
                pass
        messages = messages + [
            {"role": "assistant", "content": reply},
            {"role": "user", "content": ACT_RETRY_NOTE},
        ]
    raise ActSelectionError(replies)


def generate_utterance(
    provider: ChatProvider,
    context: str,
    content: str,
    act: ActId,
    act_description: str,
    exemplar: Optional[Exemplar] = None,
    log: Optional[list[ChatExchange]] = None,
) -> str:
    """Generate the utterance for a chosen act; exemplar prepends a worked example."""
    block = None
    if exemplar is not None:
        block = exemplar_block(
            exemplar.context, exemplar.content, exemplar.act, act_description, exemplar.utterance
        )
    prompt = generation_prompt(context, content, str(act), act_description, block)
    reply = _call(provider, [{"role": "user", "content": prompt}], log).strip()
    if not reply:
        raise EmptyReplyError(f"empty generation reply for act {act}")
    return reply


def run_two_step(
    provider: ChatProvider,
    taxonomy: Taxonomy,
    context: str,
    content: str,
    mode: str = MODE_ZERO_SHOT,
    example_index: Optional[ExampleIndex] = None,
    gold_act: Optional[ActId] = None,
    retrieve_by_gold: bool = False,
    exemplar_rotation: int = 0,
    log: Optional[list[ChatExchange]] = None,
) -> TutorStep:
    """Select an act, then generate its utterance.

    One-shot exemplars follow the selected act unless ``retrieve_by_gold`` is
    set (scenario evaluation with a known gold act). Selection failure
    propagates before any generation call is issued.
    """
    act, raw_reply, attempts = select_act(provider, taxonomy, context, content, mode, log)
    exemplar = None
    if mode == MODE_ONE_SHOT and example_index is not None:
        key = gold_act if (retrieve_by_gold and gold_act is not None) else act
        exemplar = example_index.get(key, exemplar_rotation)
    utterance = generate_utterance(
        provider, context, content, act, taxonomy.get(act).description, exemplar, log
    )
    return TutorStep(act=act, utterance=utterance, raw_act_reply=raw_reply, attempts=attempts)


def run_baseline(
    provider: ChatProvider,
    context: str,
    content: str,
    student_name: str = "<user>",
    log: Optional[list[ChatExchange]] = None,
) -> str:
    """Single-call tutoring without an act step."""
    prompt = baseline_prompt(context, content, student_name)
    reply = _call(provider, [{"role": "user", "content": prompt}], log).strip()
    if not reply:
        raise EmptyReplyError("empty baseline reply")
    return reply
