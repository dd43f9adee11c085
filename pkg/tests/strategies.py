"""Hypothesis strategies (and a plain seeded generator) for random sessions."""
from __future__ import annotations

import random

from hypothesis import strategies as st

from tutorkit.acts import ACT_ID_RE, STUDENT, TUTOR, Taxonomy
from tutorkit.transcript import ActUtterance, ContentTag, Session, Turn

# No brackets, newlines, or colons: keeps every generated string representable
# under the transcript grammar.
_TEXT_CHARS = list("가나다라마바사아자차카타파하안녕세요 abcdefghxyzABC0123456789 ?!.'\"-~")


def _clean_text(min_size=1):
    return (
        st.text(alphabet=st.sampled_from(_TEXT_CHARS), min_size=min_size, max_size=40)
        .map(str.strip)
        .filter(bool)
    )


def _activity_ids():
    return st.from_regex(r"Activity[0-9]{1,2}-[0-9]{1,2}", fullmatch=True)


def _content_bodies():
    return _clean_text().filter(
        lambda s: s not in ("high", "middle", "low") and not ACT_ID_RE.match(s)
    )


def content_tag_lists():
    # All but the last tag must carry a body (a body-less tag followed by
    # another content tag is not representable).
    paired = st.lists(
        st.builds(ContentTag, _activity_ids(), _content_bodies()), min_size=0, max_size=2
    )
    trailing = st.one_of(st.none(), st.builds(ContentTag, _activity_ids(), st.none()))
    return st.tuples(paired, trailing).map(
        lambda pair: tuple(pair[0] + ([pair[1]] if pair[1] else []))
    )


def utterances_for(taxonomy: Taxonomy, speaker: str):
    defs = taxonomy.acts_by(speaker)
    answer_acts = [d.id for d in defs if d.category == "Answer"]

    def build(draw_act, correctness, text):
        return ActUtterance(act=draw_act, text=text, correctness=correctness)

    act_ids = st.sampled_from([d.id for d in defs])
    if speaker == STUDENT and answer_acts:
        return st.one_of(
            st.builds(build, act_ids, st.none(), _clean_text()),
            st.builds(
                build,
                st.sampled_from(answer_acts),
                st.sampled_from(["high", "middle", "low"]),
                _clean_text(),
            ),
        )
    return st.builds(build, act_ids, st.none(), _clean_text())


def turns_for(taxonomy: Taxonomy):
    def make(speaker, tags, utts):
        return Turn(speaker=speaker, utterances=tuple(utts), content_tags=tags)

    speaker = st.sampled_from([TUTOR, STUDENT])
    return speaker.flatmap(
        lambda sp: st.builds(
            make,
            st.just(sp),
            content_tag_lists(),
            st.lists(utterances_for(taxonomy, sp), min_size=1, max_size=3),
        )
    )


def sessions_for(taxonomy: Taxonomy):
    return st.builds(
        lambda sid, turns: Session(
            id=sid, tutor_id=f"t-{sid}", student_id=f"s-{sid}", turns=tuple(turns)
        ),
        st.from_regex(r"[a-z0-9]{1,8}", fullmatch=True),
        st.lists(turns_for(taxonomy), min_size=1, max_size=6),
    )


# --------------------------------------------------------------------------
# plain seeded generator (fast bulk generation for the acceptance suite)

def random_sessions(taxonomy: Taxonomy, count: int, seed: int = 0) -> list[Session]:
    rng = random.Random(seed)
    tutor_defs = taxonomy.acts_by(TUTOR)
    student_defs = taxonomy.acts_by(STUDENT)
    words = ["안녕하세요", "네", "그렇군요", "intro", "spect", "navigate", "뜻이", "문장을", "volume", "좋아요"]

    def text() -> str:
        return " ".join(rng.choice(words) for _ in range(rng.randint(1, 6)))

    sessions = []
    for i in range(count):
        turns = []
        for _ in range(rng.randint(1, 6)):
            speaker = rng.choice([TUTOR, STUDENT])
            defs = tutor_defs if speaker == TUTOR else student_defs
            utts = []
            for _ in range(rng.randint(1, 3)):
                d = rng.choice(defs)
                correctness = None
                if d.category == "Answer" and rng.random() < 0.5:
                    correctness = rng.choice(["high", "middle", "low"])
                utts.append(ActUtterance(act=d.id, text=text(), correctness=correctness))
            tags = ()
            if rng.random() < 0.4:
                tags = (ContentTag(f"Activity{rng.randint(1, 9)}-{rng.randint(1, 20)}", text()),)
            turns.append(Turn(speaker=speaker, utterances=tuple(utts), content_tags=tags))
        sessions.append(
            Session(id=f"gen-{i:04d}", tutor_id=f"t{i % 3}", student_id=f"s{i}", turns=tuple(turns))
        )
    return sessions
