"""Pluggable chat-completion and embedding providers.

The HTTP providers speak the common bearer-token chat/embeddings wire format
(``POST {base}/chat/completions`` and ``POST {base}/embeddings``); base URL
and key come from ``PROVIDER_BASE_URL`` / ``PROVIDER_API_KEY``. The offline
providers (scripted replies, gold replay, hashed embeddings, file-backed
embeddings) implement the same call surface so every test and demo runs
without network access.
"""
from __future__ import annotations

import hashlib
import json
import os
import threading
from dataclasses import dataclass, field
from typing import Optional, Protocol, Sequence

import numpy as np


class ProviderError(RuntimeError):
    """Transport failure or malformed provider response."""


@dataclass
class ProviderConfig:
    base_url: str = ""
    model: str = "gpt-4"
    api_key: Optional[str] = None
    temperature: float = 0.0
    max_tokens: int = 512
    timeout: float = 60.0

    def __post_init__(self):
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")

    @classmethod
    def from_env(cls, **overrides) -> "ProviderConfig":
        values = {
            "base_url": os.environ.get("PROVIDER_BASE_URL", ""),
            "api_key": os.environ.get("PROVIDER_API_KEY"),
            "model": os.environ.get("PROVIDER_MODEL", "gpt-4"),
        }
        values.update(overrides)
        return cls(**values)


Message = dict[str, str]  # {"role": "system" | "user" | "assistant", "content": ...}


class ChatProvider(Protocol):
    def complete(self, messages: Sequence[Message]) -> str: ...


class HttpChatProvider:
    """Chat completions over HTTP with bearer-token auth."""

    def __init__(self, config: ProviderConfig):
        if not config.base_url:
            raise ValueError("chat provider requires a base URL (PROVIDER_BASE_URL)")
        self.config = config

    def complete(self, messages: Sequence[Message]) -> str:
        import httpx

        headers = {"Content-Type": "application/json"}
        if self.config.api_key:
            headers["Authorization"] = f"Bearer {self.config.api_key}"
        payload = {
            "model": self.config.model,
            "messages": list(messages),
            "temperature": self.config.temperature,
            "max_tokens": self.config.max_tokens,
        }
        try:
            resp = httpx.post(
                self.config.base_url.rstrip("/") + "/chat/completions",
                json=payload,
                headers=headers,
                timeout=self.config.timeout,
            )
            resp.raise_for_status()
            body = resp.json()
            return body["choices"][0]["message"]["content"]
        except httpx.HTTPError as exc:
            raise ProviderError(f"chat request failed: {exc}") from exc
        except (KeyError, IndexError, TypeError, ValueError) as exc:
            raise ProviderError(f"malformed chat response: {exc}") from exc


@dataclass
class ScriptedChatProvider:
    """Replays a fixed list of replies; records every request for inspection.

    Reply order is the script order, so callers sharing one instance across
    threads should serialize their calls (the CLI pins parallelism to 1 for
    scripted eval runs).
    """

    replies: list[str]
    calls: list[list[Message]] = field(default_factory=list)

    def __post_init__(self):
        self._lock = threading.Lock()

    def complete(self, messages: Sequence[Message]) -> str:
        with self._lock:
            self.calls.append([dict(m) for m in messages])
            if not self.replies:
                raise ProviderError("scripted provider exhausted")
            return self.replies.pop(0)

    @classmethod
    def from_file(cls, path: str) -> "ScriptedChatProvider":
        replies = []
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    replies.append(json.loads(line)["reply"])
        return cls(replies)


@dataclass
class GoldReplayProvider:
    """Answers act-selection prompts with the gold act and everything else
    with the gold utterance; used for end-to-end identity checks."""

    gold_act: str
    gold_utterance: str
    calls: list[list[Message]] = field(default_factory=list)

    def complete(self, messages: Sequence[Message]) -> str:
        self.calls.append([dict(m) for m in messages])
        prompt = messages[-1]["content"] if messages else ""
        first = messages[0]["content"] if messages else ""
        if "- Act candidates:" in prompt or "- Act candidates:" in first:
            return self.gold_act
        return self.gold_utterance


# --------------------------------------------------------------------------
# embeddings

class EmbeddingProvider(Protocol):
    def embed_text(self, text: str) -> np.ndarray: ...

    def embed_tokens(self, text: str) -> tuple[list[str], np.ndarray]: ...


class HashEmbeddingProvider:
    """Deterministic offline embeddings: every distinct string maps to a fixed
    pseudo-random unit vector. Equal texts embed equally, so identity-style
    checks (same reply, same reference) behave like a real encoder would."""

    def __init__(self, dim: int = 64):
        self.dim = dim
        self._cache: dict[str, np.ndarray] = {}

    def _vector(self, key: str) -> np.ndarray:
        if key not in self._cache:
            digest = hashlib.sha256(key.encode("utf-8")).digest()
            rng = np.random.default_rng(int.from_bytes(digest[:8], "big"))
            v = rng.standard_normal(self.dim)
            self._cache[key] = v / np.linalg.norm(v)
        return self._cache[key]

    def embed_text(self, text: str) -> np.ndarray:
        return self._vector(text)

    def embed_tokens(self, text: str) -> tuple[list[str], np.ndarray]:
        tokens = text.split()
        if not tokens:
            return [], np.zeros((0, self.dim))
        return tokens, np.stack([self._vector(t) for t in tokens])


class FileEmbeddingProvider:
    """Precomputed vectors keyed by exact text, for fully offline evaluation.

    File format: JSONL rows ``{"text": ..., "vector": [...]}``. Token lookups
    fall back to per-token rows (text split on whitespace).
    """

    def __init__(self, vectors: dict[str, Sequence[float]]):
        self._vectors = {k: np.asarray(v, dtype=float) for k, v in vectors.items()}

    @classmethod
    def from_file(cls, path: str) -> "FileEmbeddingProvider":
        vectors = {}
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    row = json.loads(line)
                    vectors[row["text"]] = row["vector"]
        return cls(vectors)

    def _lookup(self, key: str) -> np.ndarray:
        try:
            return self._vectors[key]
        except KeyError:
            raise ProviderError(f"no precomputed embedding for {key!r}") from None

    def embed_text(self, text: str) -> np.ndarray:
        return self._lookup(text)

    def embed_tokens(self, text: str) -> tuple[list[str], np.ndarray]:
        tokens = text.split()
        if not tokens:
            return [], np.zeros((0, 1))
        return tokens, np.stack([self._lookup(t) for t in tokens])


class HttpEmbeddingProvider:
    """Whole-text embeddings over HTTP; token vectors embed each whitespace
    token as its own input."""

    def __init__(self, config: ProviderConfig, model: str = "text-embedding-3-large"):
        if not config.base_url:
            raise ValueError("embedding provider requires a base URL (PROVIDER_BASE_URL)")
        self.config = config
        self.model = model

    def _embed_batch(self, texts: Sequence[str]) -> np.ndarray:
        import httpx

        headers = {"Content-Type": "application/json"}
        if self.config.api_key:
            headers["Authorization"] = f"Bearer {self.config.api_key}"
        try:
            resp = httpx.post(
                self.config.base_url.rstrip("/") + "/embeddings",
                json={"model": self.model, "input": list(texts)},
                headers=headers,
                timeout=self.config.timeout,
            )
            resp.raise_for_status()
            body = resp.json()
            return np.array([row["embedding"] for row in body["data"]], dtype=float)
        except httpx.HTTPError as exc:
            raise ProviderError(f"embedding request failed: {exc}") from exc
        except (KeyError, IndexError, TypeError, ValueError) as exc:
            raise ProviderError(f"malformed embedding response: {exc}") from exc

    def embed_text(self, text: str) -> np.ndarray:
        return self._embed_batch([text])[0]

    def embed_tokens(self, text: str) -> tuple[list[str], np.ndarray]:
        tokens = text.split()
        if not tokens:
            return [], np.zeros((0, 1))
        return tokens, self._embed_batch(tokens)


def make_embedding_provider(spec: str, config: Optional[ProviderConfig] = None) -> EmbeddingProvider:
    """Parse an embedding-provider spec: ``hash``, ``file:<path>`` or ``http``."""
    if spec == "hash":
        return HashEmbeddingProvider()
    if spec.startswith("file:"):
        return FileEmbeddingProvider.from_file(spec.split(":", 1)[1])
    if spec == "http":
        return HttpEmbeddingProvider(config or ProviderConfig.from_env())
    raise ValueError(f"unknown embedding provider spec {spec!r}")
