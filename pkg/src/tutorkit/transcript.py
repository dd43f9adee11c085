"""Bracket-annotated tutoring transcripts: parse, render, and context excerpts.

Grammar (frozen, bit-exact):

- A corpus document holds one or more sessions. Each session opens with a
  header line ``=== session <id> tutor=<tutor_id> student=<student_id> ===``.
- A turn starts at a line beginning ``tutor: `` or ``student: `` and extends
  to the next such line, the next header, or end of document.
- Within a turn, square-bracket groups ``[...]`` are tags:
    * a tag matching the act-id grammar opens a new act-level utterance
      (its act role must match the speaker);
    * ``[high]`` / ``[middle]`` / ``[low]`` immediately after a student
      Answer-category act tag records the answer's correctness;
    * any other tag before the first act tag is a content tag; content tags
      pair up as activity id followed by its body (a trailing id may stand
      alone).
- Text between act tags belongs to the preceding act tag. Bracket characters
  inside utterance text are not representable (no escape; the parser errors,
  and the renderer refuses to emit them).

``parse_transcript(render_transcript(s))`` reproduces ``s`` exactly for every
representable session; the renderer raises ValueError for the few
unrepresentable shapes (brackets/newline-marker collisions in text, a
body-less content tag followed by another content tag).
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional, Sequence

from .acts import ACT_ID_RE, STUDENT, TUTOR, ActId, Taxonomy, TaxonomyError, UnknownActError

CORRECTNESS_LEVELS = ("high", "middle", "low")

HEADER_RE = re.compile(r"^=== session (\S+) tutor=(\S+) student=(\S+) ===$")
_TURN_PREFIXES = {"tutor: ": TUTOR, "student: ": STUDENT}


class ParseError(ValueError):
    """Transcript grammar violation, with the offending line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class ContentTag:
    """A learning-content reference bound to a turn: activity id + optional body."""

    activity_id: str
    content_text: Optional[str] = None

    def __post_init__(self):
        if not self.activity_id.strip():
            raise ValueError("content tag activity_id must be non-empty")


@dataclass(frozen=True)
class ActUtterance:
    """The segment of a turn carrying exactly one dialogue act."""

    act: ActId
    text: str
    correctness: Optional[str] = None

    def __post_init__(self):
        if not self.text.strip():
            raise ValueError(f"empty utterance text for act {self.act}")
        if self.correctness is not None:
            if self.correctness not in CORRECTNESS_LEVELS:
                raise ValueError(f"invalid correctness {self.correctness!r}")
            if self.act.role != STUDENT:
                raise ValueError("correctness is only valid on student acts")


@dataclass(frozen=True)
class Turn:
    speaker: str
    utterances: tuple[ActUtterance, ...]
    content_tags: tuple[ContentTag, ...] = ()

    def __post_init__(self):
        if not self.utterances:
            raise ValueError("turn must contain at least one act-level utterance")
        for utt in self.utterances:
            if utt.act.role != self.speaker:
                raise ValueError(f"act {utt.act} does not match speaker {self.speaker}")


@dataclass(frozen=True)
class Session:
    id: str
    tutor_id: str
    student_id: str
    turns: tuple[Turn, ...]

    def __post_init__(self):
        if not (self.id and self.tutor_id and self.student_id):
            raise ValueError("session ids must be non-empty")
        if not self.turns:
            raise ValueError("session must contain at least one turn")

    def act_utterances(self) -> list[tuple[int, int, ActUtterance]]:
        """All act-level utterances as (turn_index, utterance_index, utterance)."""
        out = []
        for ti, turn in enumerate(self.turns):
            for ui, utt in enumerate(turn.utterances):
                out.append((ti, ui, utt))
        return out


# --------------------------------------------------------------------------
# parsing

def _split_turn_body(body: str, start_line: int):
    """Yield ("tag", value, line) and ("text", value, line) tokens."""
    pos, line = 0, start_line
    while pos < len(body):
        open_idx = body.find("[", pos)
        if open_idx == -1:
            segment = body[pos:]
            if "]" in segment:
                raise ParseError("stray ']' in utterance text", line + segment[: segment.index("]")].count("\n"))
            yield "text", segment, line
            break
        segment = body[pos:open_idx]
        if "]" in segment:
            raise ParseError("stray ']' in utterance text", line + segment[: segment.index("]")].count("\n"))
        if segment:
            yield "text", segment, line
        line += segment.count("\n")
        close_idx = body.find("]", open_idx)
        if close_idx == -1:
            raise ParseError("unclosed '[' tag", line)
        inner = body[open_idx + 1 : close_idx]
        if "[" in inner:
            raise ParseError("nested '[' inside tag", line)
        yield "tag", inner, line
        line += inner.count("\n")
        pos = close_idx + 1


def _parse_turn(speaker: str, body: str, start_line: int, taxonomy: Taxonomy) -> Turn:
    content_tags: list[ContentTag] = []
    pending_content: Optional[str] = None
    utterances: list[ActUtterance] = []
    current_act: Optional[ActId] = None
    current_correctness: Optional[str] = None
    buffer: list[str] = []
    prev_was_act_tag = False

    def close_current(line: int) -> None:
        nonlocal current_act, current_correctness, buffer
        if current_act is None:
            return
        text = "".join(buffer).strip()
        if not text:
            raise ParseError(f"act tag [{current_act}] carries no utterance text", line)
        utterances.append(ActUtterance(act=current_act, text=text, correctness=current_correctness))
        current_act, current_correctness, buffer = None, None, []

    for kind, value, line in _split_turn_body(body, start_line):
        if kind == "text":
            if current_act is None:
                if value.strip():
                    raise ParseError("text before any act tag in turn", line)
            else:
                buffer.append(value)
                if value.strip():
                    prev_was_act_tag = False
            continue
        # tag token
        if ACT_ID_RE.match(value):
            try:
                act = taxonomy.validate_act(value)
            except UnknownActError:
                raise ParseError(f"unknown act id [{value}]", line) from None
            if act.role != speaker:
                raise ParseError(f"act [{value}] does not match speaker {speaker!r}", line)
            close_current(line)
            if pending_content is not None:
                content_tags.append(ContentTag(pending_content))
                pending_content = None
            current_act = act
            prev_was_act_tag = True
        elif value in CORRECTNESS_LEVELS:
            legal = (
                current_act is not None
                and prev_was_act_tag
                and current_correctness is None
                and current_act.role == STUDENT
                and taxonomy.get(current_act).category == "Answer"
            )
            if not legal:
                raise ParseError(f"correctness tag [{value}] in illegal position", line)
            current_correctness = value
        else:
            if current_act is not None:
                raise ParseError(
                    f"unexpected tag [{value}] after act-level utterances "
                    "(brackets inside utterance text are not supported)",
                    line,
                )
            if pending_content is None:
                pending_content = value
            else:
                content_tags.append(ContentTag(pending_content, value))
                pending_content = None
            prev_was_act_tag = False

    if pending_content is not None:
        content_tags.append(ContentTag(pending_content))
    close_current(start_line + body.count("\n"))
    if not utterances:
        raise ParseError(f"{speaker} turn contains no act tag", start_line)
    return Turn(speaker=speaker, utterances=tuple(utterances), content_tags=tuple(content_tags))


def parse_corpus_text(text: str, taxonomy: Taxonomy) -> list[Session]:
    """Parse a corpus document (one or more header-separated sessions)."""
    sessions: list[Session] = []
    header: Optional[tuple[str, str, str]] = None
    turns: list[Turn] = []
    current: Optional[tuple[str, int, list[str]]] = None  # speaker, line, body lines

    def flush_turn() -> None:
        nonlocal current
        if current is None:
            return
        speaker, line, body_lines = current
        turns.append(_parse_turn(speaker, "\n".join(body_lines), line, taxonomy))
        current = None

    def flush_session(line: int) -> None:
        nonlocal turns, header
        flush_turn()
        if header is None and not turns:
            return
        ident = header or ("session", "tutor", "student")
        if not turns:
            raise ParseError(f"session {ident[0]!r} contains no turns", line)
        sessions.append(Session(id=ident[0], tutor_id=ident[1], student_id=ident[2], turns=tuple(turns)))
        turns, header = [], None

    for lineno, line in enumerate(text.splitlines(), start=1):
        m = HEADER_RE.match(line)
        if m:
            flush_session(lineno)
            header = (m.group(1), m.group(2), m.group(3))
            continue
        for prefix, speaker in _TURN_PREFIXES.items():
            if line.startswith(prefix):
                flush_turn()
                current = (speaker, lineno, [line[len(prefix):]])
                break
        else:
            if current is not None:
                current[2].append(line)
            elif line.strip():
                raise ParseError(
                    "expected a session header or a line starting with 'tutor: ' or 'student: '",
                    lineno,
                )
    flush_session(text.count("\n") + 1)
    if not sessions:
        raise ParseError("document contains no sessions", 1)
    return sessions


def parse_transcript(text: str, taxonomy: Taxonomy) -> Session:
    """Parse a single-session document (header optional for excerpts)."""
    sessions = parse_corpus_text(text, taxonomy)
    if len(sessions) != 1:
        raise ParseError(f"expected one session, found {len(sessions)}", 1)
    return sessions[0]


# --------------------------------------------------------------------------
# rendering

def _check_representable_text(text: str, what: str) -> None:
    if "[" in text or "]" in text:
        raise ValueError(f"{what} contains bracket characters and cannot be rendered: {text!r}")
    for piece in text.split("\n"):
        if piece.startswith(("tutor: ", "student: ")) or HEADER_RE.match(piece):
            raise ValueError(f"{what} contains a line that would start a new turn: {piece!r}")


def _check_representable_tag(value: str, what: str) -> None:
    _check_representable_text(value, what)
    if "\n" in value:
        raise ValueError(f"{what} may not contain newlines: {value!r}")
    if ACT_ID_RE.match(value) or value in CORRECTNESS_LEVELS:
        raise ValueError(f"{what} collides with an act/correctness tag: {value!r}")


def render_turn_line(speaker: str, content_tags: Sequence[ContentTag], utterances: Sequence[ActUtterance]) -> str:
    parts = [f"{speaker}: "]
    for i, tag in enumerate(content_tags):
        _check_representable_tag(tag.activity_id, "content activity id")
        if tag.content_text is None:
            if i != len(content_tags) - 1:
                raise ValueError(
                    "a body-less content tag may only appear last "
                    f"(tag {tag.activity_id!r} would merge with its successor)"
                )
            parts.append(f"[{tag.activity_id}]")
        else:
            _check_representable_tag(tag.content_text, "content body")
            parts.append(f"[{tag.activity_id}][{tag.content_text}]")
    for utt in utterances:
        _check_representable_text(utt.text, "utterance text")
        if utt.text != utt.text.strip():
            raise ValueError("utterance text must be stripped for exact round-trips")
        parts.append(f"[{utt.act}]")
        if utt.correctness:
            parts.append(f"[{utt.correctness}]")
        parts.append(utt.text)
    return "".join(parts)


def render_turn(turn: Turn) -> str:
    return render_turn_line(turn.speaker, turn.content_tags, turn.utterances)


def render_transcript(session: Session) -> str:
    """Emit the transcript grammar; parse_transcript() inverts this exactly."""
    lines = [f"=== session {session.id} tutor={session.tutor_id} student={session.student_id} ==="]
    lines.extend(render_turn(turn) for turn in session.turns)
    return "\n".join(lines) + "\n"


def render_corpus(sessions: Sequence[Session]) -> str:
    return "\n".join(render_transcript(s) for s in sessions)


# --------------------------------------------------------------------------
# context excerpts (dialogue prefixes used in prompts and datasets)

@dataclass
class ContextEntry:
    """One (possibly partial) turn inside a rendered dialogue prefix."""

    speaker: str
    content_tags: tuple[ContentTag, ...]
    utterances: list[ActUtterance]


def context_entries(session: Session, turn_index: int, utterance_index: int) -> list[ContextEntry]:
    """Everything strictly before the act-level utterance at the cut point.

    Full prior turns are included as-is; the cut turn contributes its content
    tags plus any earlier act-level utterances, and is omitted entirely when
    it would be empty.
    """
    if not (0 <= turn_index < len(session.turns)):
        raise IndexError(f"turn index {turn_index} out of range")
    turn = session.turns[turn_index]
    if not (0 <= utterance_index < len(turn.utterances)):
        raise IndexError(f"utterance index {utterance_index} out of range")
    entries = [
        ContextEntry(t.speaker, t.content_tags, list(t.utterances))
        for t in session.turns[:turn_index]
    ]
    if utterance_index > 0 or turn.content_tags:
        entries.append(ContextEntry(turn.speaker, turn.content_tags, list(turn.utterances[:utterance_index])))
    return entries


def render_entries(entries: Sequence[ContextEntry], max_turns: Optional[int] = None) -> str:
    if max_turns is not None:
        entries = entries[-max_turns:]
    return "\n".join(
        render_turn_line(e.speaker, e.content_tags, e.utterances) for e in entries
    )


def render_context(
    session: Session, turn_index: int, utterance_index: int, max_turns: Optional[int] = None
) -> str:
    return render_entries(context_entries(session, turn_index, utterance_index), max_turns)


def flatten_entries(entries: Sequence[ContextEntry]) -> list[tuple[str, ActUtterance]]:
    """Act-level utterances of a context in order, with their speakers."""
    return [(e.speaker, utt) for e in entries for utt in e.utterances]


def drop_last_utterance(entries: Sequence[ContextEntry]) -> tuple[list[ContextEntry], str, ActUtterance]:
    """Remove the final act-level utterance of the context's last speaker.

    Returns (remaining entries, removed speaker, removed utterance). The
    emptied turn keeps its line only if it still carries content tags.
    """
    out = [ContextEntry(e.speaker, e.content_tags, list(e.utterances)) for e in entries]
    for idx in range(len(out) - 1, -1, -1):
        if out[idx].utterances:
            removed = out[idx].utterances.pop()
            speaker = out[idx].speaker
            if not out[idx].utterances and not out[idx].content_tags:
                del out[idx]
            return out, speaker, removed
    raise ValueError("context holds no act-level utterances")


def render_content_tags(tags: Sequence[ContentTag]) -> str:
    """Learning-content text used in prompts: one '[id] body' line per tag."""
    lines = []
    for tag in tags:
        if tag.content_text:
            lines.append(f"[{tag.activity_id}] {tag.content_text}")
        else:
            lines.append(f"[{tag.activity_id}]")
    return "\n".join(lines)


def content_for_cut(session: Session, turn_index: int) -> str:
    """Content in play at a cut: the cut turn's tags, else the nearest earlier turn's."""
    for ti in range(turn_index, -1, -1):
        if session.turns[ti].content_tags:
            return render_content_tags(session.turns[ti].content_tags)
    return ""


_ACT_TAG_RE = re.compile(r"\[[ts]\.[a-z_]+(?:\.[a-z_]+)*\](?:\[(?:high|middle|low)\])?")


def last_utterance_text(context_text: str) -> str:
    """Text of the final act-level utterance in a rendered context (or "").

    Relies on the grammar's guarantee that utterance text contains no brackets:
    the text after the last act tag runs to the next turn-marker line (a
    trailing content-only line of the cut turn) or to the end of the excerpt.
    """
    matches = list(_ACT_TAG_RE.finditer(context_text))
    if not matches:
        return ""
    tail = context_text[matches[-1].end():]
    lines = tail.split("\n")
    kept = [lines[0]]
    for piece in lines[1:]:
        if piece.startswith(("tutor: ", "student: ")):
            break
        kept.append(piece)
    return "\n".join(kept).strip()
