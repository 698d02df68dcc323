"""Shared fixtures and test doubles."""

from __future__ import annotations

import json
import random

import numpy as np

from tableread.offline import OfflineProvider
from tableread.providers import ChatRequest, Provider, ProviderConfig

SOLDIER_BODY = """INT. SIGNAL ROOM - NIGHT

SOLDIER A: Anything on the wire tonight?
SOLDIER B: Static. Same as every night.
The YOUTH lingers by the doorway, coat dripping.
YOUTH: Is this where people wait for the morning train?

EXT. PLATFORM - DAWN

The Youth studies the faded station sign.
YOUTH: I can't tell if this is an end or a beginning.
SOLDIER A: Trains came through here once. They will again.

INT. BAKERY STAND - MORNING

SOLDIER B: Bread's warm. That's the whole news.
YOUTH: Warm bread sounds like a beginning.
SOLDIER A: Or the end of yesterday's flour.
"""

SOLDIER_BIOS = """Youth: a drifter between towns, carries one photograph and no ticket.

Soldier A - the older of the watch pair, keeps hope like a ration.
"""

SOLDIER_OUTLINE = "A stranger waits at a dying station while two soldiers keep their vigil."

SOLDIER_ROLES = ["Youth", "Soldier A", "Soldier B"]


class CannedProvider(Provider):
    """Routes template_id -> fixed text or callable(req) -> text.

    Keeps every request it saw, so tests can assert counts and payloads.
    """

    def __init__(self, routes: dict, config: ProviderConfig | None = None, embedder=None):
        self.config = config or ProviderConfig(embedding_dimension=8, max_retries=2)
        self.routes = dict(routes)
        self.requests: list[ChatRequest] = []
        self._embedder = embedder
        self._offline = OfflineProvider(self.config)

    def complete(self, req: ChatRequest) -> str:
        self.requests.append(req)
        handler = self.routes[req.template_id]
        return handler(req) if callable(handler) else handler

    def _embed(self, texts: list[str]) -> list[list[float]]:
        if self._embedder is not None:
            return [self._embedder(t) for t in texts]
        return self._offline._embed(texts)


class CaptureProvider(Provider):
    """Wraps a provider and records (agent-or-None, request-content) blobs."""

    def __init__(self, inner: Provider):
        self.inner = inner
        self.config = inner.config
        self.captured: list[tuple[str | None, str]] = []

    def complete(self, req: ChatRequest) -> str:
        blob = req.template_id + "\n" + "\n".join(
            f"{k}={v}" for k, v in sorted(req.variables.items())
        )
        self.captured.append((req.meta.get("agent"), blob))
        return self.inner.complete(req)

    def _embed(self, texts: list[str]) -> list[list[float]]:
        self.captured.append((None, "\n".join(texts)))
        return self.inner.embed(texts)


def passing_assessment(usefulness: str | None = None, **overrides) -> str:
    """Assessment JSON with every criterion passing unless overridden.

    overrides: criterion -> (passed, note)
    """
    result = {
        "evidence": {"passed": True, "note": "located"},
        "diversity": {"passed": True, "note": "fresh"},
        "dimensions": {"passed": True, "note": "on framework"},
        "impact_timing": {"passed": True, "note": "urgent enough"},
    }
    for criterion, (passed, note) in overrides.items():
        result[criterion] = {"passed": passed, "note": note}
    if usefulness is not None:
        result["usefulness"] = usefulness
    return json.dumps(result)


def candidates_payload(rows: list[dict]) -> str:
    return json.dumps({"candidates": rows})


def thought_payload(
    interpretation="A beat lands.",
    recall_notes="It rhymes with an old night.",
    objective="Hold the door open.",
    synthesis="I want to stay unseen.",
) -> str:
    return json.dumps(
        {
            "interpretation": interpretation,
            "recall_notes": recall_notes,
            "objective": objective,
            "synthesis": synthesis,
        }
    )


def random_screenplay(seed: int, characters: int = 3, scenes: int = 3) -> tuple[str, list[str]]:
    """Randomized multi-scene screenplay for fuzz fixtures."""
    rng = random.Random(seed)
    words = [
        "lantern", "rust", "furrow", "signal", "ember", "hollow", "cinder",
        "vigil", "thaw", "meridian", "quarry", "sable", "anchor", "drift",
        "murmur", "cobalt", "harvest", "static", "garnet", "sidings",
    ]
    names = ["Vera", "Odell", "Moss", "Petra", "Juno"][:characters]
    lines = []
    for s in range(scenes):
        place = rng.choice(words).upper()
        lines.append(f"INT. {place} - NIGHT")
        lines.append("")
        for i in range(rng.randint(3, 5)):
            speaker = names[(s + i) % len(names)]
            sentence = " ".join(rng.choice(words) for _ in range(rng.randint(5, 9)))
            lines.append(f"{speaker.upper()}: {sentence.capitalize()}.")
    return "\n".join(lines) + "\n", names


def brute_force_recall(traces, query_vec: np.ndarray, k: int):
    """Independent oracle for recall: exhaustive ranking with the stated tie-break.

    Store vectors are L2-normalized at ingestion, so cosine similarity IS the
    dot product. The similarity kernel (one matrix product over every trace)
    is deliberately the same as the implementation's: BLAS computes dgemv and
    pairwise ddot with different last-ulp rounding, and under a different
    kernel mathematically-tied vectors land on different plateaus, making the
    tie-break comparison meaningless. Independence lives in the selection:
    full stable sort over all traces versus the implementation's lexsort.
    """
    q = np.asarray(query_vec, dtype=np.float64)
    sims = np.stack([np.asarray(t.embedding, dtype=np.float64) for t in traces]) @ q
    scored = [(t, float(sims[i])) for i, t in enumerate(traces)]
    ranked = sorted(scored, key=lambda pair: (-pair[1], pair[0].order))
    return ranked[: min(k, len(ranked))]
