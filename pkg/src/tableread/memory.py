"""Per-agent dual memory.

Long-term: append-only embedded event descriptions with exact cosine top-k
recall (stores stay small; a full scan beats an ANN index here). Short-term:
the current scene's revealed lines plus the agent's own inner-thought
syntheses, cleared on scene transition.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ProviderError
from .providers import Provider
from .screenplay import PersonaProfile

DEFAULT_RECALL_K = 5
DEFAULT_CONTEXT_BUDGET = 8000  # characters, provider-agnostic


def embed(texts: list[str], provider: Provider) -> list[np.ndarray]:
    """Embed a batch and L2-normalize, so similarity is a plain dot product."""
    vectors = provider.embed(texts)
    out = []
    for vec in vectors:
        arr = np.asarray(vec, dtype=np.float64)
        norm = float(np.linalg.norm(arr))
        if norm == 0.0:
            raise ProviderError("provider returned a zero-norm embedding")
        out.append(arr / norm)
    return out


@dataclass(frozen=True)
class MemoryTrace:
    id: str
    agent: str
    scene_index: int
    description: str
    embedding: np.ndarray
    order: int

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "agent": self.agent,
            "scene_index": self.scene_index,
            "description": self.description,
            "order": self.order,
            "embedding": [float(x) for x in self.embedding],
        }


class LongTermStore:
    """Append-only trace store for one agent; optional JSONL persistence."""

    def __init__(self, agent: str, dimension: int, persist_path: str | Path | None = None):
        self.agent = agent
        self.dimension = dimension
        self.persist_path = Path(persist_path) if persist_path else None
        self._traces: list[MemoryTrace] = []
        if self.persist_path and not self.persist_path.exists():
            self.persist_path.parent.mkdir(parents=True, exist_ok=True)
            header = {"kind": "header", "agent": agent, "dimension": dimension}
            self.persist_path.write_text(
                json.dumps(header, ensure_ascii=False) + "\n", encoding="utf-8"
            )

    def __len__(self) -> int:
        return len(self._traces)

    @property
    def traces(self) -> tuple[MemoryTrace, ...]:
        return tuple(self._traces)

    def append(self, scene_index: int, description: str, embedding: np.ndarray) -> MemoryTrace:
        if embedding.shape != (self.dimension,):
            raise ValueError(
                f"embedding dimension {embedding.shape} != store dimension {self.dimension}"
            )
        order = len(self._traces)
        trace = MemoryTrace(
            id=f"{_slug(self.agent)}-trace-{order}",
            agent=self.agent,
            scene_index=scene_index,
            description=description,
            embedding=embedding,
            order=order,
        )
        self._traces.append(trace)
        if self.persist_path:
            with self.persist_path.open("a", encoding="utf-8") as fh:
                fh.write(json.dumps(trace.to_dict(), ensure_ascii=False) + "\n")
        return trace


def _slug(name: str) -> str:
    return "-".join(name.lower().split())


def append_trace(
    store: LongTermStore, scene_index: int, description: str, provider: Provider
) -> MemoryTrace:
    if not description.strip():
        raise ValueError("trace description must be non-empty")
    vector = embed([description], provider)[0]
    return store.append(scene_index, description, vector)


def recall(store: LongTermStore, query: str, k: int, provider: Provider) -> list[MemoryTrace]:
    """Top-k traces by descending cosine similarity to the embedded query,
    ties broken by ascending order number (older first)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if len(store) == 0:
        return []
    qvec = embed([query], provider)[0]
    traces = store.traces
    matrix = np.stack([t.embedding for t in traces])
    sims = matrix @ qvec
    orders = np.array([t.order for t in traces])
    ranked = np.lexsort((orders, -sims))  # primary: sim desc, secondary: order asc
    return [traces[i] for i in ranked[: min(k, len(traces))]]


@dataclass
class ShortTermMemory:
    scene_index: int = 0
    current_scene_text: list[str] = field(default_factory=list)
    current_inner_thoughts: list[str] = field(default_factory=list)

    def clear(self, scene_index: int) -> None:
        self.scene_index = scene_index
        self.current_scene_text = []
        self.current_inner_thoughts = []


@dataclass
class ContextWindow:
    persona_text: str
    recalled: list[str]
    scene_text: list[str]
    inner_thoughts: list[str]

    def render(self) -> str:
        parts = ["[who you are]", self.persona_text, "[your memories]"]
        parts.extend([f"- {d}" for d in self.recalled] or ["(none)"])
        parts.append("[the scene so far]")
        parts.extend(self.scene_text or ["(nothing yet)"])
        parts.append("[your inner thoughts so far]")
        parts.extend(self.inner_thoughts or ["(none)"])
        return "\n".join(parts)


def synthesize_context(
    short: ShortTermMemory,
    recalled: list[MemoryTrace],
    persona: PersonaProfile,
    budget: int = DEFAULT_CONTEXT_BUDGET,
) -> ContextWindow:
    """Deterministic assembly: persona, recalled memories (recall order),
    current scene text, current inner thoughts. When over budget, drop the
    oldest current-scene lines first, then the least-similar memories, then
    the oldest inner thoughts; the persona is never truncated."""
    window = ContextWindow(
        persona_text=persona.rendered(),
        recalled=[t.description for t in recalled],
        scene_text=list(short.current_scene_text),
        inner_thoughts=list(short.current_inner_thoughts),
    )
    while len(window.render()) > budget and window.scene_text:
        window.scene_text.pop(0)
    while len(window.render()) > budget and window.recalled:
        window.recalled.pop()
    while len(window.render()) > budget and window.inner_thoughts:
        window.inner_thoughts.pop(0)
    return window
