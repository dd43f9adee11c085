"""Corpus-level operations: loading, splitting, and summary statistics."""
from __future__ import annotations

import os
import random
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .acts import TUTOR, STUDENT, Taxonomy
from .transcript import Session, parse_corpus_text, render_corpus


def load_corpus(path: str, taxonomy: Taxonomy) -> list[Session]:
    """Load sessions from a transcript file or a directory of transcript files."""
    if os.path.isdir(path):
        sessions: list[Session] = []
        for name in sorted(os.listdir(path)):
            if name.startswith("."):
                continue
            sessions.extend(load_corpus(os.path.join(path, name), taxonomy))
        if not sessions:
            raise ValueError(f"no transcript files under {path!r}")
        return sessions
    with open(path, encoding="utf-8") as fh:
        return parse_corpus_text(fh.read(), taxonomy)


def save_corpus(sessions: Sequence[Session], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(render_corpus(sessions))


def split_corpus(
    corpus: Sequence[Session], n_test: int, seed: int
) -> tuple[list[Session], list[Session]]:
    """Deterministic session-granular train/test split.

    When tutor ids are present and ``n_test == number_of_tutors + 1`` (one
    tutor contributing two test sessions, every other tutor one), the split
    follows that shape; otherwise it falls back to uniform sampling over
    sessions. Same seed, same partition.
    """
    if not 0 <= n_test <= len(corpus):
        raise ValueError(f"n_test={n_test} out of range for corpus of {len(corpus)}")
    rng = random.Random(seed)
    by_tutor: dict[str, list[int]] = {}
    for i, session in enumerate(corpus):
        by_tutor.setdefault(session.tutor_id, []).append(i)

    test_idx: set[int] = set()
    if n_test == len(by_tutor) + 1 and all(len(v) >= 1 for v in by_tutor.values()):
        doubled_candidates = sorted(t for t, v in by_tutor.items() if len(v) >= 2)
        if doubled_candidates:
            doubled = rng.choice(doubled_candidates)
            for tutor_id in sorted(by_tutor):
                take = 2 if tutor_id == doubled else 1
                test_idx.update(rng.sample(by_tutor[tutor_id], take))
    if not test_idx and n_test > 0:
        test_idx = set(rng.sample(range(len(corpus)), n_test))

    train = [s for i, s in enumerate(corpus) if i not in test_idx]
    test = [s for i, s in enumerate(corpus) if i in test_idx]
    return train, test


@dataclass
class CorpusStats:
    n_sessions: int
    avg_turns_per_session: float
    avg_words_per_turn: dict[str, float]
    avg_act_utterances_per_session: dict[str, float]
    act_histogram: dict[str, int] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "n_sessions": self.n_sessions,
            "avg_turns_per_session": self.avg_turns_per_session,
            "avg_words_per_turn": self.avg_words_per_turn,
            "avg_act_utterances_per_session": self.avg_act_utterances_per_session,
            "act_histogram": dict(sorted(self.act_histogram.items())),
        }


def corpus_stats(corpus: Sequence[Session]) -> CorpusStats:
    """Summary statistics; words are whitespace tokens of utterance text."""
    if not corpus:
        raise ValueError("empty corpus")
    n_turns = 0
    words = {TUTOR: 0, STUDENT: 0}
    turns = {TUTOR: 0, STUDENT: 0}
    act_utts = {TUTOR: 0, STUDENT: 0}
    histogram: Counter[str] = Counter()
    for session in corpus:
        n_turns += len(session.turns)
        for turn in session.turns:
            turns[turn.speaker] += 1
            for utt in turn.utterances:
                words[turn.speaker] += len(utt.text.split())
                act_utts[turn.speaker] += 1
                histogram[str(utt.act)] += 1
    n = len(corpus)
    return CorpusStats(
        n_sessions=n,
        avg_turns_per_session=n_turns / n,
        avg_words_per_turn={
            role: (words[role] / turns[role]) if turns[role] else 0.0
            for role in (TUTOR, STUDENT)
        },
        avg_act_utterances_per_session={role: act_utts[role] / n for role in (TUTOR, STUDENT)},
        act_histogram=dict(histogram),
    )


def act_distribution(corpus: Sequence[Session], role: str = TUTOR) -> dict[str, float]:
    """Relative frequency of each act of ``role``; values sum to 1."""
    if not corpus:
        raise ValueError("empty corpus")
    counts: Counter[str] = Counter()
    for session in corpus:
        for turn in session.turns:
            if turn.speaker != role:
                continue
            for utt in turn.utterances:
                counts[str(utt.act)] += 1
    total = sum(counts.values())
    if total == 0:
        raise ValueError(f"corpus contains no {role} act-level utterances")
    return {act: counts[act] / total for act in sorted(counts)}
