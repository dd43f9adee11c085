from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tutorkit.acts import load_taxonomy_file
from tutorkit.transcript import (
    ActUtterance,
    ContentTag,
    ParseError,
    Session,
    Turn,
    content_for_cut,
    context_entries,
    drop_last_utterance,
    flatten_entries,
    last_utterance_text,
    parse_corpus_text,
    parse_transcript,
    render_context,
    render_corpus,
    render_entries,
    render_transcript,
    render_turn,
)

from .strategies import sessions_for

EXAMPLE_DOC = """\
=== session ex1 tutor=tutor-a student=student-b ===
tutor: [Activity3-9][Gap Fills: a therapist can help you ___ these issues 1) Vent 2) Navigate][t.assess.display_question]좋아요. 그럼 Activity3-9로 넘어가 볼까요? 답이 몇번일까요?
student: [s.answer.answer][high]navigate?
tutor: [t.teach.direct_answer]맞아요. "navigate" 도 우리가 잘 쓸 수 있는 영어 표현이죠.[t.assess.follow_up_question]여기에서 "introspective"는 어떤 뜻일까요?
student: [s.answer.answer][high]내면을 바라보는?
tutor: [t.engage.encourage]너무 좋아요.[t.teach.method.vocab_expression.etymology]intro는 안을 보는 것을 의미하고, spect 는 spectrum 할 때 spect 거든요.
"""


@pytest.fixture
def example_session(taxonomy):
    return parse_transcript(EXAMPLE_DOC, taxonomy)


def test_parse_structure(example_session):
    s = example_session
    assert s.id == "ex1" and s.tutor_id == "tutor-a" and s.student_id == "student-b"
    assert [t.speaker for t in s.turns] == ["tutor", "student", "tutor", "student", "tutor"]
    assert len(s.act_utterances()) == 7


def test_parse_student_line_with_correctness(example_session):
    turn = example_session.turns[1]
    assert turn.speaker == "student"
    (utt,) = turn.utterances
    assert str(utt.act) == "s.answer.answer"
    assert utt.correctness == "high"
    assert utt.text == "navigate?"


def test_parse_multi_act_tutor_turn(example_session):
    turn = example_session.turns[4]
    assert [str(u.act) for u in turn.utterances] == [
        "t.engage.encourage",
        "t.teach.method.vocab_expression.etymology",
    ]
    assert turn.utterances[0].text == "너무 좋아요."


def test_parse_content_tags(example_session):
    turn = example_session.turns[0]
    assert len(turn.content_tags) == 1
    tag = turn.content_tags[0]
    assert tag.activity_id == "Activity3-9"
    assert tag.content_text.startswith("Gap Fills:")


def test_round_trip_fixture(example_session, taxonomy):
    assert parse_transcript(render_transcript(example_session), taxonomy) == example_session


def test_parse_without_header_defaults_ids(taxonomy):
    session = parse_transcript("tutor: [t.general]안녕하세요", taxonomy)
    assert (session.id, session.tutor_id, session.student_id) == ("session", "tutor", "student")


def test_multiline_turn_text_round_trips(taxonomy):
    doc = "tutor: [t.general]first line\nsecond line"
    session = parse_transcript(doc, taxonomy)
    assert session.turns[0].utterances[0].text == "first line\nsecond line"
    assert parse_transcript(render_transcript(session), taxonomy) == session


@pytest.mark.parametrize(
    "doc,message",
    [
        ("tutor: hello with no act tag", "text before any act tag"),
        ("tutor:   ", "contains no act tag"),
        ("tutor: stray text [t.general]hi", "text before any act tag"),
        ("tutor: [t.bogus.act]hi", "unknown act id"),
        ("tutor: [s.general]hi", "does not match speaker"),
        ("student: [high][s.answer.answer]ok", "illegal position"),
        ("student: [s.general][high]ok", "illegal position"),
        ("student: [s.answer.answer]text[high]more", "illegal position"),
        ("tutor: [t.general][high]ok", "illegal position"),
        ("student: [s.answer.answer][high][middle]ok", "illegal position"),
        ("tutor: [t.general]hi [oops] there", "after act-level utterances"),
        ("tutor: [t.general]hi ] there", "stray"),
        ("tutor: [t.general]unclosed [ bracket", "unclosed"),
        ("tutor: [t.general][t.general]", "no utterance text"),
        ("hello\n", "expected a session header"),
    ],
)
def test_parse_errors(taxonomy, doc, message):
    with pytest.raises(ParseError, match=message):
        parse_transcript(doc, taxonomy)


def test_parse_error_carries_line_number(taxonomy):
    doc = "tutor: [t.general]ok\nstudent: [s.general]fine\ntutor: broken line"
    with pytest.raises(ParseError) as err:
        parse_transcript(doc, taxonomy)
    assert err.value.line == 3


def test_corpus_text_with_multiple_sessions(taxonomy, fixture_text):
    sessions = parse_corpus_text(fixture_text, taxonomy)
    assert [s.id for s in sessions] == ["fx-001", "fx-002", "fx-003", "fx-004"]
    assert {s.tutor_id for s in sessions} == {"tutor-alpha", "tutor-beta", "tutor-gamma"}


def test_fixture_round_trips(taxonomy, fixture_corpus):
    for session in fixture_corpus:
        assert parse_transcript(render_transcript(session), taxonomy) == session


def test_render_rejects_brackets_in_text(taxonomy):
    act = taxonomy.validate_act("t.general")
    turn = Turn("tutor", (ActUtterance(act, "has [brackets]"),))
    session = Session("x", "t", "s", (turn,))
    with pytest.raises(ValueError, match="bracket"):
        render_transcript(session)


def test_render_rejects_turn_marker_in_text(taxonomy):
    act = taxonomy.validate_act("t.general")
    turn = Turn("tutor", (ActUtterance(act, "line one\ntutor: fake"),))
    with pytest.raises(ValueError, match="new turn"):
        render_transcript(Session("x", "t", "s", (turn,)))


def test_render_rejects_dangling_content_pair(taxonomy):
    act = taxonomy.validate_act("t.general")
    turn = Turn(
        "tutor",
        (ActUtterance(act, "hi"),),
        content_tags=(ContentTag("A1"), ContentTag("A2", "body")),
    )
    with pytest.raises(ValueError, match="body-less content tag"):
        render_turn(turn)


def test_correctness_levels_round_trip(taxonomy):
    for level in ("high", "middle", "low"):
        doc = f"student: [s.answer.answer][{level}]응답입니다"
        session = parse_transcript(doc, taxonomy)
        assert session.turns[0].utterances[0].correctness == level
        assert f"[{level}]" in render_transcript(session)


_TAXONOMY = load_taxonomy_file()


@settings(max_examples=150, deadline=None)
@given(sessions_for(_TAXONOMY))
def test_round_trip_property(session):
    assert parse_transcript(render_transcript(session), _TAXONOMY) == session


@settings(max_examples=50, deadline=None)
@given(st.lists(sessions_for(_TAXONOMY), min_size=1, max_size=3))
def test_corpus_round_trip_property(sessions):
    assert parse_corpus_text(render_corpus(sessions), _TAXONOMY) == sessions


# --- context excerpts ------------------------------------------------------

def test_context_before_first_utterance_is_content_only(example_session):
    text = render_context(example_session, 0, 0)
    assert text == "tutor: [Activity3-9][Gap Fills: a therapist can help you ___ these issues 1) Vent 2) Navigate]"


def test_context_midturn_includes_earlier_acts(example_session):
    text = render_context(example_session, 4, 1)
    assert text.endswith("tutor: [t.engage.encourage]너무 좋아요.")
    assert "etymology" not in text


def test_context_max_turns_truncates(example_session):
    text = render_context(example_session, 4, 1, max_turns=2)
    assert text.splitlines()[0].startswith("student: ")
    assert len(text.splitlines()) == 2


def test_drop_last_utterance_midturn(example_session):
    entries = context_entries(example_session, 4, 1)
    partial, speaker, removed = drop_last_utterance(entries)
    assert speaker == "tutor"
    assert removed.text == "너무 좋아요."
    assert render_entries(partial).splitlines()[-1].startswith("student: ")


def test_drop_last_utterance_keeps_content_only_line(taxonomy):
    doc = (
        "tutor: [Activity1-1][body text][t.assess.display_question]질문입니다\n"
        "tutor: [t.teach.direct_answer]답입니다"
    )
    session = parse_transcript(doc, taxonomy)
    entries = context_entries(session, 1, 0)
    partial, speaker, removed = drop_last_utterance(entries)
    assert removed.text == "질문입니다"
    assert render_entries(partial) == "tutor: [Activity1-1][body text]"


def test_flatten_entries_counts(example_session):
    entries = context_entries(example_session, 4, 1)
    flat = flatten_entries(entries)
    assert len(flat) == 6
    assert [spk for spk, _ in flat] == ["tutor", "student", "tutor", "tutor", "student", "tutor"]


def test_content_for_cut_falls_back_to_earlier_turn(example_session):
    assert content_for_cut(example_session, 4).startswith("[Activity3-9]")


def test_last_utterance_text(example_session):
    assert last_utterance_text(render_context(example_session, 4, 1)) == "너무 좋아요."
    assert last_utterance_text(render_context(example_session, 0, 0)) == ""


def test_last_utterance_text_skips_trailing_content_line(taxonomy):
    doc = "tutor: [t.general]인사말\ntutor: [Activity1-1][b][t.assess.display_question]질문"
    session = parse_transcript(doc, taxonomy)
    context = render_context(session, 1, 0)
    assert context.splitlines()[-1] == "tutor: [Activity1-1][b]"
    assert last_utterance_text(context) == "인사말"
