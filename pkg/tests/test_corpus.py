from __future__ import annotations

import pytest

from tutorkit.corpus import act_distribution, corpus_stats, load_corpus, save_corpus, split_corpus
from tutorkit.transcript import parse_corpus_text

# Two sessions with hand-counted 12 and 8 turns (6 and 4 tutor/student pairs).
def _two_session_doc() -> str:
    def session(sid: str, pairs: int) -> str:
        lines = [f"=== session {sid} tutor=t-{sid} student=s-{sid} ==="]
        for i in range(pairs):
            lines.append(f"tutor: [t.assess.display_question]질문 {i} 입니다")
            lines.append(f"student: [s.answer.answer][high]답 {i}")
        return "\n".join(lines)

    return session("a", 6) + "\n" + session("b", 4) + "\n"


def test_avg_turns_hand_counted(taxonomy):
    corpus = parse_corpus_text(_two_session_doc(), taxonomy)
    assert [len(s.turns) for s in corpus] == [12, 8]
    stats = corpus_stats(corpus)
    assert stats.avg_turns_per_session == pytest.approx(10.0)


def test_avg_words_single_turn(taxonomy):
    corpus = parse_corpus_text("tutor: [t.general]a b c", taxonomy)
    stats = corpus_stats(corpus)
    assert stats.avg_words_per_turn["tutor"] == pytest.approx(3.0)
    assert stats.avg_words_per_turn["student"] == 0.0
    assert stats.avg_act_utterances_per_session == {"tutor": 1.0, "student": 0.0}


def test_stats_hand_tallied(taxonomy):
    corpus = parse_corpus_text(_two_session_doc(), taxonomy)
    stats = corpus_stats(corpus)
    # 10 tutor turns x 2 words... tutor lines are "질문 {i} 입니다" = 3 words
    assert stats.avg_words_per_turn["tutor"] == pytest.approx(3.0)
    assert stats.avg_words_per_turn["student"] == pytest.approx(2.0)
    assert stats.avg_act_utterances_per_session == {"tutor": 5.0, "student": 5.0}
    assert stats.act_histogram == {
        "t.assess.display_question": 10,
        "s.answer.answer": 10,
    }


def test_stats_rejects_empty():
    with pytest.raises(ValueError):
        corpus_stats([])


def test_act_distribution_single_class(taxonomy):
    corpus = parse_corpus_text("tutor: [t.general]안녕하세요", taxonomy)
    assert act_distribution(corpus) == {"t.general": 1.0}


def test_act_distribution_hand_tally(taxonomy):
    doc = (
        "tutor: [t.general]하나[t.general]둘\n"
        "student: [s.general]네\n"
        "tutor: [t.teach.direct_answer]셋[t.general]넷"
    )
    corpus = parse_corpus_text(doc, taxonomy)
    dist = act_distribution(corpus)
    assert dist == {"t.general": pytest.approx(0.75), "t.teach.direct_answer": pytest.approx(0.25)}
    # student acts are a separate distribution
    assert act_distribution(corpus, "student") == {"s.general": 1.0}


def test_act_distribution_sums_to_one(fixture_corpus):
    dist = act_distribution(fixture_corpus)
    assert abs(sum(dist.values()) - 1.0) < 1e-9
    assert all(v >= 0 for v in dist.values())


def test_split_partition_and_determinism(fixture_corpus):
    train1, test1 = split_corpus(fixture_corpus, 2, seed=7)
    train2, test2 = split_corpus(fixture_corpus, 2, seed=7)
    assert [s.id for s in train1] == [s.id for s in train2]
    assert [s.id for s in test1] == [s.id for s in test2]
    assert len(test1) == 2
    ids = sorted(s.id for s in train1 + test1)
    assert ids == sorted(s.id for s in fixture_corpus)
    assert not {s.id for s in train1} & {s.id for s in test1}


def test_split_degenerate_cases(fixture_corpus):
    train, test = split_corpus(fixture_corpus, 0, seed=1)
    assert len(train) == len(fixture_corpus) and test == []
    with pytest.raises(ValueError):
        split_corpus(fixture_corpus, len(fixture_corpus) + 1, seed=1)


def test_split_tutor_shape(fixture_corpus):
    # fixture has tutors alpha (2 sessions), beta (1), gamma (1): n_test == 3+1
    # triggers the one-tutor-contributes-two shape, which forces alpha's pair.
    train, test = split_corpus(fixture_corpus, 4, seed=3)
    by_tutor = {}
    for s in test:
        by_tutor[s.tutor_id] = by_tutor.get(s.tutor_id, 0) + 1
    assert by_tutor == {"tutor-alpha": 2, "tutor-beta": 1, "tutor-gamma": 1}
    assert len(train) == 0


def test_split_uniform_fallback_when_shape_impossible(fixture_corpus):
    # n_test != n_tutors + 1, so uniform sampling decides; partition still holds.
    train, test = split_corpus(fixture_corpus, 1, seed=11)
    assert len(test) == 1 and len(train) == 3


def test_split_different_seeds_differ(fixture_corpus):
    picks = {tuple(s.id for s in split_corpus(fixture_corpus, 1, seed=k)[1]) for k in range(8)}
    assert len(picks) > 1


def test_load_corpus_directory(tmp_path, taxonomy, fixture_corpus):
    save_corpus(fixture_corpus[:2], str(tmp_path / "a.txt"))
    save_corpus(fixture_corpus[2:], str(tmp_path / "b.txt"))
    loaded = load_corpus(str(tmp_path), taxonomy)
    assert [s.id for s in loaded] == [s.id for s in fixture_corpus]
    assert loaded == list(fixture_corpus)
