"""Chat-completion and embedding backends.

Four providers share one interface: an HTTP client for chat-completions-style
endpoints, a scripted provider replaying recorded transcripts by request
fingerprint, a recording wrapper that produces those transcripts, and a fully
offline rule-based provider that fabricates valid structured outputs so the
whole pipeline runs with no network at all.
"""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable

import httpx
import jsonschema

from .errors import (
    AuthError,
    ContractError,
    DimensionMismatch,
    ScriptMiss,
    StructureError,
    TransportError,
)
from .prompts import render
from .schemas import SCHEMAS
from .serialize import canonical_json, sha256_hex

_WS = re.compile(r"\s+")


def collapse_ws(text: str) -> str:
    return _WS.sub(" ", text).strip()


@dataclass(frozen=True)
class ProviderConfig:
    endpoint: str = "http://localhost:8080/v1"
    model: str = "table-chat"
    credential_env: str = "TABLEREAD_API_KEY"  # secret reference: env var NAME
    timeout: float = 30.0
    max_retries: int = 2
    embedding_model: str = "table-embed"
    embedding_dimension: int = 64
    temperature_generate: float = 0.7
    temperature_evaluate: float = 0.0

    def __post_init__(self) -> None:
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")
        if self.timeout <= 0:
            raise ValueError("timeout must be > 0")
        if self.embedding_dimension < 1:
            raise ValueError("embedding_dimension must be >= 1")


@dataclass(frozen=True)
class ChatRequest:
    """One logical chat call: a template id plus its variables.

    `meta` carries attribution (e.g. which agent the call is issued for) and
    is excluded from the fingerprint so it never affects replay.
    """

    template_id: str
    variables: dict[str, str]
    expects_structure: bool = False
    schema_id: str | None = None
    temperature: float = 0.0
    meta: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.expects_structure != (self.schema_id is not None):
            raise ContractError("schema_id must be present iff expects_structure")
        if not 0.0 <= self.temperature <= 2.0:
            raise ContractError("temperature must be within [0, 2]")


def request_fingerprint(req: ChatRequest) -> str:
    # whitespace-normalized variables: cosmetic reformatting must not break replays
    payload = {
        "template_id": req.template_id,
        "variables": {k: collapse_ws(v) for k, v in sorted(req.variables.items())},
    }
    return sha256_hex(canonical_json(payload))


def embed_fingerprint(texts: list[str]) -> str:
    return sha256_hex(canonical_json({"embed": [collapse_ws(t) for t in texts]}))


class Provider:
    """Base interface; subclasses implement complete() and _embed()."""

    config: ProviderConfig

    def complete(self, req: ChatRequest) -> str:
        raise NotImplementedError

    def _embed(self, texts: list[str]) -> list[list[float]]:
        raise NotImplementedError

    def embed(self, texts: list[str]) -> list[list[float]]:
        if not texts or any(not t.strip() for t in texts):
            raise ContractError("embed requires a non-empty batch of non-empty texts")
        vectors = self._embed(texts)
        if len(vectors) != len(texts):
            raise DimensionMismatch(
                f"provider returned {len(vectors)} vectors for {len(texts)} texts"
            )
        dim = self.config.embedding_dimension
        for v in vectors:
            if len(v) != dim:
                raise DimensionMismatch(f"expected dimension {dim}, got {len(v)}")
        return vectors


def extract_json(raw: str) -> Any:
    """Parse the first JSON object out of a completion, tolerating fences."""
    text = raw.strip()
    if text.startswith("```"):
        text = re.sub(r"^```[a-zA-Z0-9_-]*\s*", "", text)
        text = re.sub(r"\s*```$", "", text)
        text = text.strip()
    if not (text.startswith("{") and text.endswith("}")):
        i, j = text.find("{"), text.rfind("}")
        if i != -1 and j > i:
            text = text[i : j + 1]
    return json.loads(text)


def complete_structured(req: ChatRequest, provider: Provider, check=None) -> Any:
    """Run a structured chat call with bounded reparse retries.

    Issues at most 1 + max_retries requests; each retry re-sends the request
    with a corrective `repair_hint` variable (which also changes the
    fingerprint, so scripted transcripts can model malformed-then-valid runs).
    `check`, when given, runs after schema validation and may raise ValueError
    to demand a retry on semantically invalid output.
    """
    if not req.expects_structure:
        raise ContractError("complete_structured requires expects_structure=true")
    schema = SCHEMAS[req.schema_id]
    attempts = provider.config.max_retries + 1
    current = req
    failure = ""
    for attempt in range(attempts):
        raw = provider.complete(current)
        try:
            value = extract_json(raw)
            jsonschema.validate(value, schema)
            if check is not None:
                check(value)
            return value
        except (jsonschema.ValidationError, ValueError) as exc:
            failure = collapse_ws(str(exc))[:160]
            current = ChatRequest(
                template_id=req.template_id,
                variables={
                    **req.variables,
                    "repair_hint": (
                        f"Attempt {attempt + 2}: the previous reply was not valid JSON "
                        f"for the required schema ({failure}). Reply with JSON only."
                    ),
                },
                expects_structure=True,
                schema_id=req.schema_id,
                temperature=req.temperature,
                meta=req.meta,
            )
    raise StructureError(
        f"template '{req.template_id}': invalid structured output after "
        f"{attempts} attempt(s): {failure}"
    )


# ---------------------------------------------------------------------------
# HTTP backend


class HttpProvider(Provider):
    """Client for a chat-completions-compatible HTTP endpoint."""

    def __init__(self, config: ProviderConfig, transport: httpx.BaseTransport | None = None):
        self.config = config
        self._client = httpx.Client(
            base_url=config.endpoint, timeout=config.timeout, transport=transport
        )

    def _headers(self) -> dict[str, str]:
        secret = os.environ.get(self.config.credential_env, "")
        if not secret:
            raise AuthError(f"credential env var '{self.config.credential_env}' is not set")
        return {"Authorization": f"Bearer {secret}"}

    def _post(self, path: str, payload: dict) -> Any:
        try:
            resp = self._client.post(path, json=payload, headers=self._headers())
        except httpx.HTTPError as exc:
            raise TransportError(f"{type(exc).__name__}: {exc}") from exc
        if resp.status_code in (401, 403):
            raise AuthError(f"provider rejected credential: HTTP {resp.status_code}")
        if resp.status_code >= 400:
            raise TransportError(f"HTTP {resp.status_code}: {resp.text[:200]}")
        try:
            return resp.json()
        except ValueError as exc:
            raise TransportError(f"non-JSON provider response: {exc}") from exc

    def complete(self, req: ChatRequest) -> str:
        prompt = render(req.template_id, req.variables)
        body = self._post(
            "/chat/completions",
            {
                "model": self.config.model,
                "temperature": req.temperature,
                "messages": [{"role": "user", "content": prompt}],
            },
        )
        try:
            return body["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise TransportError(f"malformed completion payload: {exc}") from exc

    def _embed(self, texts: list[str]) -> list[list[float]]:
        body = self._post(
            "/embeddings", {"model": self.config.embedding_model, "input": texts}
        )
        try:
            return [item["embedding"] for item in body["data"]]
        except (KeyError, TypeError) as exc:
            raise TransportError(f"malformed embeddings payload: {exc}") from exc


# ---------------------------------------------------------------------------
# transcripts: record / replay


@dataclass
class TranscriptEntry:
    kind: str  # "chat" | "embed"
    fingerprint: str
    request_digest: str
    response: Any
    template_id: str | None = None
    meta: dict[str, str] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "fingerprint": self.fingerprint,
            "request_digest": self.request_digest,
            "template_id": self.template_id,
            "meta": dict(self.meta),
            "response": self.response,
        }


class Transcript:
    """Ordered recorded exchanges plus free-form header/footer metadata."""

    def __init__(
        self,
        entries: Iterable[TranscriptEntry] = (),
        header: dict | None = None,
        footer: dict | None = None,
    ):
        self.entries: list[TranscriptEntry] = list(entries)
        self.header: dict = header or {}
        self.footer: dict = footer or {}

    def add_chat(self, req: ChatRequest, response: str) -> None:
        self.entries.append(
            TranscriptEntry(
                kind="chat",
                fingerprint=request_fingerprint(req),
                request_digest=sha256_hex(
                    canonical_json({"template_id": req.template_id, "variables": req.variables})
                ),
                response=response,
                template_id=req.template_id,
                meta=dict(req.meta),
            )
        )

    def add_embed(self, texts: list[str], vectors: list[list[float]]) -> None:
        self.entries.append(
            TranscriptEntry(
                kind="embed",
                fingerprint=embed_fingerprint(texts),
                request_digest=sha256_hex(canonical_json({"texts": texts})),
                response=vectors,
            )
        )

    def save(self, path: str | Path) -> None:
        path = Path(path)
        with path.open("w", encoding="utf-8") as fh:
            if self.header:
                fh.write(canonical_json({"kind": "header", **self.header}) + "\n")
            for entry in self.entries:
                fh.write(canonical_json(entry.to_dict()) + "\n")
            if self.footer:
                fh.write(canonical_json({"kind": "footer", **self.footer}) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "Transcript":
        header: dict = {}
        footer: dict = {}
        entries: list[TranscriptEntry] = []
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            row = json.loads(line)
            kind = row.get("kind")
            if kind == "header":
                header = {k: v for k, v in row.items() if k != "kind"}
            elif kind == "footer":
                footer = {k: v for k, v in row.items() if k != "kind"}
            elif kind in ("chat", "embed"):
                entries.append(
                    TranscriptEntry(
                        kind=kind,
                        fingerprint=row["fingerprint"],
                        request_digest=row.get("request_digest", ""),
                        response=row["response"],
                        template_id=row.get("template_id"),
                        meta=row.get("meta", {}),
                    )
                )
            else:
                raise ValueError(f"unknown transcript row kind: {kind!r}")
        return cls(entries, header=header, footer=footer)


class ScriptedProvider(Provider):
    """Deterministic playback keyed by request fingerprint."""

    def __init__(self, transcript: Transcript, config: ProviderConfig | None = None):
        self.config = config or ProviderConfig()
        self._chat: dict[str, str] = {}
        self._vectors: dict[str, list[list[float]]] = {}
        for entry in transcript.entries:
            if entry.kind == "chat":
                self._chat[entry.fingerprint] = entry.response
            else:
                self._vectors[entry.fingerprint] = entry.response

    def complete(self, req: ChatRequest) -> str:
        fp = request_fingerprint(req)
        if fp not in self._chat:
            raise ScriptMiss(
                f"no recorded response for template '{req.template_id}' "
                f"(fingerprint {fp[:12]}…)"
            )
        return self._chat[fp]

    def _embed(self, texts: list[str]) -> list[list[float]]:
        fp = embed_fingerprint(texts)
        if fp not in self._vectors:
            raise ScriptMiss(f"no recorded embedding batch (fingerprint {fp[:12]}…)")
        return [list(v) for v in self._vectors[fp]]


class RecordingProvider(Provider):
    """Wraps any provider and captures every exchange into a Transcript."""

    def __init__(self, inner: Provider):
        self.inner = inner
        self.config = inner.config
        self.transcript = Transcript()

    def complete(self, req: ChatRequest) -> str:
        response = self.inner.complete(req)
        self.transcript.add_chat(req, response)
        return response

    def _embed(self, texts: list[str]) -> list[list[float]]:
        vectors = self.inner.embed(texts)
        self.transcript.add_embed(texts, vectors)
        return vectors
