"""Live tutoring sessions over HTTP, persisted as append-only event logs.

Each session is one JSONL file of numbered events (created, student_message,
tutor_step, error); replaying a log reconstructs the session state exactly.
Per-session processing is serialized: a second message arriving while one is
in flight is rejected with a busy signal rather than queued. Live sessions
run in a two-step mode (zero-shot or one-shot) so every tutor turn carries
its selected act; the act-free baseline mode is evaluation-only.
"""
from __future__ import annotations

import json
import os
import threading
import time
import uuid
from dataclasses import dataclass, field
from typing import Optional, Sequence

from pydantic import BaseModel, Field

from .acts import STUDENT, TUTOR, Taxonomy, TaxonomyError
from .engine import (
    MODE_ONE_SHOT,
    MODE_ZERO_SHOT,
    ActSelectionError,
    EngineError,
    ExampleIndex,
    TutorStep,
    run_two_step,
)
from .providers import ChatProvider, ProviderError
from .transcript import (
    ActUtterance,
    ContentTag,
    ContextEntry,
    Session,
    Turn,
    render_content_tags,
    render_entries,
    render_transcript,
)

LIVE_MODES = (MODE_ZERO_SHOT, MODE_ONE_SHOT)
DEFAULT_STUDENT_ACT = "s.answer.answer"


class SessionNotFound(KeyError):
    pass


class SessionBusy(RuntimeError):
    """A turn is already in flight for this session; retry after it finishes."""


class EngineFailure(RuntimeError):
    pass


@dataclass(frozen=True)
class SessionEvent:
    session_id: str
    sequence_no: int
    kind: str  # created | student_message | tutor_step | error
    payload: dict


class EventStore:
    """Append-only per-session JSONL event logs under one directory."""

    def __init__(self, root: str):
        self.root = root
        os.makedirs(root, exist_ok=True)
        self._lock = threading.Lock()

    def _path(self, session_id: str) -> str:
        return os.path.join(self.root, f"{session_id}.jsonl")

    def append(self, session_id: str, kind: str, payload: dict) -> SessionEvent:
        with self._lock:
            seq = len(self.events(session_id)) + 1
            event = SessionEvent(session_id, seq, kind, payload)
            with open(self._path(session_id), "a", encoding="utf-8") as fh:
                fh.write(
                    json.dumps(
                        {
                            "session_id": event.session_id,
                            "sequence_no": event.sequence_no,
                            "kind": event.kind,
                            "payload": event.payload,
                        },
                        ensure_ascii=False,
                    )
                    + "\n"
                )
            return event

    def events(self, session_id: str) -> list[SessionEvent]:
        path = self._path(session_id)
        if not os.path.exists(path):
            return []
        out = []
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    d = json.loads(line)
                    out.append(
                        SessionEvent(d["session_id"], d["sequence_no"], d["kind"], d["payload"])
                    )
        return out

    def session_ids(self) -> list[str]:
        return sorted(
            name[: -len(".jsonl")]
            for name in os.listdir(self.root)
            if name.endswith(".jsonl")
        )


@dataclass
class LiveSession:
    id: str
    content_pack: tuple[ContentTag, ...]
    mode: str
    created_at: float
    turns: list[Turn] = field(default_factory=list)
    last_sequence_no: int = 0


def replay_events(events: Sequence[SessionEvent], taxonomy: Taxonomy) -> LiveSession:
    """Rebuild session state from its event log (event-sourcing determinism)."""
    if not events or events[0].kind != "created":
        raise ValueError("event log must start with a 'created' event")
    head = events[0].payload
    state = LiveSession(
        id=events[0].session_id,
        content_pack=tuple(
            ContentTag(t["activity_id"], t.get("content_text")) for t in head["content_pack"]
        ),
        mode=head["mode"],
        created_at=head["created_at"],
    )
    last_seq = 0
    for event in events:
        if event.sequence_no <= last_seq:
            raise ValueError("event sequence numbers must be strictly increasing")
        last_seq = event.sequence_no
        if event.kind == "created" and event.sequence_no != 1:
            raise ValueError("'created' must be the first event")
        if event.kind in ("created", "error"):
            continue
        payload = event.payload
        speaker = STUDENT if event.kind == "student_message" else TUTOR
        act = taxonomy.validate_act(payload["act"])
        text = payload["text"] if event.kind == "student_message" else payload["utterance"]
        content = state.content_pack if not state.turns else ()
        state.turns.append(
            Turn(
                speaker=speaker,
                utterances=(ActUtterance(act=act, text=text),),
                content_tags=content,
            )
        )
    state.last_sequence_no = last_seq
    return state


class SessionService:
    """Creates sessions, routes student messages through the engine, exports
    transcripts. Thread-safe; one in-flight turn per session."""

    def __init__(
        self,
        taxonomy: Taxonomy,
        provider: ChatProvider,
        store: EventStore,
        example_index: Optional[ExampleIndex] = None,
    ):
        self.taxonomy = taxonomy
        self.provider = provider
        self.store = store
        self.example_index = example_index
        self._states: dict[str, LiveSession] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()

    def _session_lock(self, session_id: str) -> threading.Lock:
        with self._registry_lock:
            if session_id not in self._locks:
                self._locks[session_id] = threading.Lock()
            return self._locks[session_id]

    def _state(self, session_id: str) -> LiveSession:
        with self._registry_lock:
            state = self._states.get(session_id)
        if state is not None:
            return state
        events = self.store.events(session_id)
        if not events:
            raise SessionNotFound(session_id)
        state = replay_events(events, self.taxonomy)
        with self._registry_lock:
            self._states[session_id] = state
        return state

    def create_session(
        self,
        content_pack: Sequence[ContentTag],
        mode: str,
        open_with_tutor: bool = False,
    ) -> tuple[LiveSession, Optional[TutorStep]]:
        if mode not in LIVE_MODES:
            raise ValueError(f"invalid live mode {mode!r}; expected one of {LIVE_MODES}")
        if not content_pack:
            raise ValueError("content pack must be non-empty")
        session_id = uuid.uuid4().hex[:12]
        payload = {
            "content_pack": [
                {"activity_id": t.activity_id, "content_text": t.content_text}
                for t in content_pack
            ],
            "mode": mode,
            "created_at": time.time(),
        }
        event = self.store.append(session_id, "created", payload)
        state = LiveSession(
            id=session_id,
            content_pack=tuple(content_pack),
            mode=mode,
            created_at=payload["created_at"],
            last_sequence_no=event.sequence_no,
        )
        with self._registry_lock:
            self._states[session_id] = state

        opening: Optional[TutorStep] = None
        if open_with_tutor:
            opening = self._run_tutor(state)
        return state, opening

    def _context_text(self, state: LiveSession) -> str:
        entries = [
            ContextEntry(t.speaker, t.content_tags, list(t.utterances)) for t in state.turns
        ]
        if not entries:
            # No turns yet: surface the content pack the way a transcript would.
            entries = [ContextEntry(TUTOR, state.content_pack, [])]
        return render_entries(entries)

    def _run_tutor(self, state: LiveSession) -> TutorStep:
        try:
            step = run_two_step(
                self.provider,
                self.taxonomy,
                self._context_text(state),
                render_content_tags(state.content_pack),
                state.mode,
                example_index=self.example_index,
            )
        except (ActSelectionError, EngineError, ProviderError) as exc:
            event = self.store.append(state.id, "error", {"message": str(exc)})
            state.last_sequence_no = event.sequence_no
            raise EngineFailure(str(exc)) from exc
        event = self.store.append(
            state.id,
            "tutor_step",
            {
                "act": str(step.act),
                "utterance": step.utterance,
                "raw_act_reply": step.raw_act_reply,
                "attempts": step.attempts,
            },
        )
        state.turns.append(
            Turn(
                speaker=TUTOR,
                utterances=(ActUtterance(act=step.act, text=step.utterance),),
                content_tags=state.content_pack if not state.turns else (),
            )
        )
        state.last_sequence_no = event.sequence_no
        return step

    def post_student_message(
        self, session_id: str, text: str, act: Optional[str] = None
    ) -> TutorStep:
        if not text.strip():
            raise ValueError("message text must be non-empty")
        state = self._state(session_id)
        lock = self._session_lock(session_id)
        if not lock.acquire(blocking=False):
            raise SessionBusy(f"session {session_id} has a turn in flight; retry shortly")
        try:
            student_act = self.taxonomy.validate_act(act or DEFAULT_STUDENT_ACT)
            if student_act.role != STUDENT:
                raise TaxonomyError(f"{student_act} is not a student act")
            event = self.store.append(
                session_id, "student_message", {"text": text.strip(), "act": str(student_act)}
            )
            state.turns.append(
                Turn(
                    speaker=STUDENT,
                    utterances=(ActUtterance(act=student_act, text=text.strip()),),
                    content_tags=state.content_pack if not state.turns else (),
                )
            )
            state.last_sequence_no = event.sequence_no
            return self._run_tutor(state)
        finally:
            lock.release()

    def export_transcript(self, session_id: str) -> Optional[str]:
        """Transcript in the corpus grammar, or None for a turn-less session."""
        state = self._state(session_id)
        if not state.turns:
            return None
        session = Session(
            id=state.id,
            tutor_id="model",
            student_id="student",
            turns=tuple(state.turns),
        )
        return render_transcript(session)


class ContentTagBody(BaseModel):
    activity_id: str
    content_text: Optional[str] = None


class CreateSessionBody(BaseModel):
    content_pack: list[ContentTagBody] = Field(min_length=1)
    mode: str = MODE_ZERO_SHOT
    open_with_tutor: bool = False


class MessageBody(BaseModel):
    text: str
    act: Optional[str] = None


def create_app(service: SessionService):
    """FastAPI app exposing the session service."""
    from fastapi import FastAPI, HTTPException
    from fastapi.responses import PlainTextResponse, Response

    app = FastAPI(title="tutorkit session service")

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.get("/acts")
    def acts():
        return [
            {
                "id": str(d.id),
                "role": d.id.role,
                "category": d.category,
                "description": d.description,
                "example": d.example,
                "provisional": d.provisional,
            }
            for d in service.taxonomy
        ]

    @app.post("/sessions")
    def create_session(body: CreateSessionBody):
        try:
            pack = [ContentTag(t.activity_id, t.content_text) for t in body.content_pack]
            state, opening = service.create_session(pack, body.mode, body.open_with_tutor)
        except (ValueError, TaxonomyError) as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        except EngineFailure as exc:
            raise HTTPException(status_code=502, detail=str(exc))
        reply = {"session_id": state.id, "mode": state.mode}
        if opening is not None:
            reply["opening"] = {"act": str(opening.act), "utterance": opening.utterance}
        return reply

    @app.post("/sessions/{session_id}/messages")
    def post_message(session_id: str, body: MessageBody):
        try:
            step = service.post_student_message(session_id, body.text, body.act)
        except SessionNotFound:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id}")
        except SessionBusy as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        except (ValueError, TaxonomyError) as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        except EngineFailure as exc:
            raise HTTPException(status_code=502, detail=str(exc))
        return {"act": str(step.act), "utterance": step.utterance, "attempts": step.attempts}

    @app.get("/sessions/{session_id}/transcript")
    def transcript(session_id: str):
        try:
            text = service.export_transcript(session_id)
        except SessionNotFound:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id}")
        if text is None:
            return Response(status_code=204)
        return PlainTextResponse(text)

    return app
