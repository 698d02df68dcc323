"""Character agents.

Each agent enacts its character line by line (producing private, structured
inner thoughts) and can then speak from the actor's side of the same role to
raise feedback candidates grounded in that experience. Provider calls are
kept side-effect free ("plan_*" / think) so the orchestrator can commit
results only after a whole step succeeded.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ContractError, StructureError
from .memory import (
    DEFAULT_CONTEXT_BUDGET,
    DEFAULT_RECALL_K,
    LongTermStore,
    MemoryTrace,
    ShortTermMemory,
    append_trace,
    recall,
    synthesize_context,
)
from .providers import ChatRequest, Provider, complete_structured
from .schemas import EVIDENCE_SOURCES, FIVE_DIMENSIONS
from .screenplay import PersonaProfile, ScriptLine, names_equal
from .style import is_first_person


def slug(name: str) -> str:
    return "-".join(name.lower().split())


@dataclass
class InnerThought:
    """Four-step structured reasoning anchored to one script line; private."""

    id: str
    agent: str
    scene_index: int
    line_index: int
    interpretation: str
    recall_notes: str
    objective: str
    synthesis: str
    marked: bool = False

    def __post_init__(self) -> None:
        for label, value in (
            ("interpretation", self.interpretation),
            ("recall_notes", self.recall_notes),
            ("objective", self.objective),
            ("synthesis", self.synthesis),
        ):
            if not value.strip():
                raise ValueError(f"inner thought {label} must be non-empty")
        if not is_first_person(self.synthesis):
            raise ValueError("synthesis must be written in the first person")

    def fields(self) -> tuple[str, str, str, str]:
        return (self.interpretation, self.recall_notes, self.objective, self.synthesis)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "agent": self.agent,
            "scene_index": self.scene_index,
            "line_index": self.line_index,
            "interpretation": self.interpretation,
            "recall_notes": self.recall_notes,
            "objective": self.objective,
            "synthesis": self.synthesis,
            "marked": self.marked,
        }


@dataclass(frozen=True)
class EvidenceRef:
    source: str
    span: str

    def __post_init__(self) -> None:
        if self.source not in EVIDENCE_SOURCES:
            raise ValueError(f"unknown evidence source: {self.source!r}")
        if not self.span.strip():
            raise ValueError("evidence span must be non-empty")

    def to_dict(self) -> dict:
        return {"source": self.source, "span": self.span}


@dataclass
class FeedbackCandidate:
    id: str
    agent_or_source: str
    timing: str  # instant | posthoc
    scene_index: int
    line_index: int | None
    question: str
    rationale: str
    dimensions: tuple[str, ...]
    evidence_refs: tuple[EvidenceRef, ...]

    def __post_init__(self) -> None:
        if self.timing not in ("instant", "posthoc"):
            raise ValueError(f"unknown timing: {self.timing!r}")
        if self.timing == "instant" and self.line_index is None:
            raise ValueError("instant candidates require a line anchor")
        if self.timing == "posthoc" and self.line_index is not None:
            raise ValueError("posthoc candidates anchor to a scene, not a line")
        bad = set(self.dimensions) - set(FIVE_DIMENSIONS)
        if bad or not self.dimensions:
            raise ValueError(f"dimensions must be a non-empty subset of the framework: {bad}")

    @property
    def meta(self) -> dict[str, str]:
        if self.agent_or_source == "reviewer":
            return {}
        return {"agent": self.agent_or_source}

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "agent_or_source": self.agent_or_source,
            "timing": self.timing,
            "scene_index": self.scene_index,
            "line_index": self.line_index,
            "question": self.question,
            "rationale": self.rationale,
            "dimensions": list(self.dimensions),
            "evidence_refs": [r.to_dict() for r in self.evidence_refs],
        }


@dataclass
class EvidenceBundle:
    """The named sources a candidate's quoted spans are verified against."""

    background: str = ""
    outline: str = ""
    memories: list[str] = field(default_factory=list)
    scene_text: str = ""
    action_or_dialogue: str = ""
    full_screenplay: str | None = None
    experience: str | None = None

    def memories_text(self) -> str:
        return "\n".join(self.memories)

    def text_for_source(self, source: str) -> str | None:
        return {
            "authoritative_background": self.background,
            "story_outline": self.outline,
            "relevant_memories": self.memories_text(),
            "current_scene_text": self.scene_text,
            "current_action_or_dialogue": self.action_or_dialogue,
        }.get(source)


def _parse_candidates(
    payload: dict,
    *,
    agent_or_source: str,
    timing: str,
    scene_index: int,
    line_index: int | None,
    id_prefix: str,
) -> list[FeedbackCandidate]:
    out = []
    for i, row in enumerate(payload["candidates"]):
        try:
            out.append(
                FeedbackCandidate(
                    id=f"{id_prefix}-{i}",
                    agent_or_source=agent_or_source,
                    timing=timing,
                    scene_index=scene_index,
                    line_index=line_index,
                    question=row["question"],
                    rationale=row["rationale"],
                    dimensions=tuple(row["dimensions"]),
                    evidence_refs=tuple(
                        EvidenceRef(e["source"], e["span"]) for e in row["evidence"]
                    ),
                )
            )
        except ValueError as exc:
            raise StructureError(f"invalid candidate from provider: {exc}") from exc
    return out


class Agent:
    """One screenplay character: persona plus dual memory plus enactment."""

    def __init__(self, persona: PersonaProfile, long_term: LongTermStore):
        if not persona.character == long_term.agent:
            raise ContractError("persona and long-term store belong to different characters")
        self.id = persona.character
        self.persona = persona
        self.short_term = ShortTermMemory()
        self.long_term = long_term
        self._enacted: set[tuple[int, int]] = set()

    # -- commit-phase mutations ------------------------------------------

    def begin_scene(self, scene_index: int) -> None:
        self.short_term.clear(scene_index)

    def observe(self, rendered_line: str) -> None:
        self.short_term.current_scene_text.append(rendered_line)

    def record_thought(self, thought: InnerThought) -> None:
        anchor = (thought.scene_index, thought.line_index)
        if anchor in self._enacted:
            raise ContractError(f"line {anchor} was already enacted by {self.id}")
        self._enacted.add(anchor)
        self.short_term.current_inner_thoughts.append(thought.synthesis)

    # -- prepare-phase provider calls (no mutation) ------------------------

    def think(
        self,
        line: ScriptLine,
        provider: Provider,
        k: int = DEFAULT_RECALL_K,
        budget: int = DEFAULT_CONTEXT_BUDGET,
    ) -> tuple[InnerThought, list[MemoryTrace]]:
        """Recall, synthesize context, request the four-step thought."""
        if line.kind == "dialogue" and not names_equal(line.speaker, self.id):
            raise ContractError(f"{self.id} cannot enact a line spoken by {line.speaker}")
        if (line.scene_index, line.line_index) in self._enacted:
            raise ContractError(
                f"line ({line.scene_index}, {line.line_index}) was already enacted by {self.id}"
            )
        situation = line.rendered()
        recalled = recall(self.long_term, situation, k, provider) if len(self.long_term) else []
        window = synthesize_context(self.short_term, recalled, self.persona, budget)

        def check(value: dict) -> None:
            if not is_first_person(value["synthesis"]):
                raise ValueError("synthesis must be first-person")

        req = ChatRequest(
            template_id="enact",
            variables={
                "character": self.id,
                "context": window.render(),
                "line": situation,
                "scene_heading": f"scene {line.scene_index}",
            },
            expects_structure=True,
            schema_id="thought",
            temperature=provider.config.temperature_generate,
            meta={"agent": self.id},
        )
        value = complete_structured(req, provider, check=check)
        thought = InnerThought(
            id=f"{slug(self.id)}-thought-{line.scene_index}-{line.line_index}",
            agent=self.id,
            scene_index=line.scene_index,
            line_index=line.line_index,
            interpretation=value["interpretation"],
            recall_notes=value["recall_notes"],
            objective=value["objective"],
            synthesis=value["synthesis"],
        )
        return thought, recalled

    def enact_line(
        self,
        public_context: list[str],
        line: ScriptLine,
        provider: Provider,
        k: int = DEFAULT_RECALL_K,
        budget: int = DEFAULT_CONTEXT_BUDGET,
    ) -> InnerThought:
        """think + record in one call, for direct (non-orchestrated) use."""
        thought, _ = self.think(line, provider, k=k, budget=budget)
        self.record_thought(thought)
        return thought

    def plan_instant(
        self,
        line: ScriptLine,
        thought: InnerThought,
        provider: Provider,
        *,
        voice: str,  # "actor" | "character"
        scene_heading: str,
        scene_lines: list[str],
        background: str,
    ) -> list[FeedbackCandidate]:
        if (thought.scene_index, thought.line_index) != (line.scene_index, line.line_index):
            raise ContractError("thought is not anchored to this line")
        template = "instant_actor" if voice == "actor" else "instant_character"
        variables = {
            "character": self.id,
            "scene_heading": scene_heading,
            "scene_text": "\n".join(scene_lines),
            "line": line.rendered(),
            "experience": thought.synthesis,
        }
        if voice == "actor":
            variables["background"] = background or "(none)"
        req = ChatRequest(
            template_id=template,
            variables=variables,
            expects_structure=True,
            schema_id="candidates",
            temperature=provider.config.temperature_generate,
            meta={"agent": self.id},
        )
        payload = complete_structured(req, provider)
        return _parse_candidates(
            payload,
            agent_or_source=self.id,
            timing="instant",
            scene_index=line.scene_index,
            line_index=line.line_index,
            id_prefix=f"{slug(self.id)}-inst-{line.scene_index}-{line.line_index}",
        )

    def generate_instant_candidates(
        self,
        line: ScriptLine,
        thought: InnerThought,
        provider: Provider,
        *,
        voice: str = "actor",
        scene_heading: str = "",
        scene_lines: list[str] | None = None,
        background: str = "",
    ) -> list[FeedbackCandidate]:
        return self.plan_instant(
            line,
            thought,
            provider,
            voice=voice,
            scene_heading=scene_heading or f"scene {line.scene_index}",
            scene_lines=scene_lines if scene_lines is not None else list(
                self.short_term.current_scene_text
            ),
            background=background,
        )

    def plan_posthoc(
        self,
        provider: Provider,
        *,
        voice: str,  # "actor" | "character"
        scene_index: int,
        scene_heading: str,
        scene_text: str,
        screenplay_text: str,
        public_text: str,
        outline: str,
        background: str,
    ) -> list[FeedbackCandidate]:
        experience = "\n".join(self.short_term.current_inner_thoughts) or "(none)"
        if voice == "actor":
            template = "posthoc_actor"
            variables = {
                "character": self.id,
                "screenplay": screenplay_text,
                "scene_heading": scene_heading,
                "scene_text": scene_text,
                "experience": experience,
                "background": background or "(none)",
                "outline": outline or "(none)",
            }
        else:
            # character voice: restricted to what the character can know
            template = "posthoc_character"
            variables = {
                "character": self.id,
                "public_text": public_text,
                "scene_heading": scene_heading,
                "scene_text": scene_text,
                "experience": experience,
            }
        req = ChatRequest(
            template_id=template,
            variables=variables,
            expects_structure=True,
            schema_id="candidates",
            temperature=provider.config.temperature_generate,
            meta={"agent": self.id},
        )
        payload = complete_structured(req, provider)
        return _parse_candidates(
            payload,
            agent_or_source=self.id,
            timing="posthoc",
            scene_index=scene_index,
            line_index=None,
            id_prefix=f"{slug(self.id)}-post-{scene_index}",
        )

    generate_posthoc_candidates = plan_posthoc

    def plan_summary(self, scene_heading: str, scene_text: str, provider: Provider) -> str:
        req = ChatRequest(
            template_id="summary",
            variables={
                "character": self.id,
                "scene_heading": scene_heading,
                "scene_text": scene_text,
                "thoughts": "\n".join(self.short_term.current_inner_thoughts) or "(none)",
            },
            expects_structure=True,
            schema_id="summary",
            temperature=provider.config.temperature_generate,
            meta={"agent": self.id},
        )
        return complete_structured(req, provider)["description"]

    def summarize_scene(
        self, scene_index: int, scene_heading: str, scene_text: str, provider: Provider
    ) -> MemoryTrace:
        """Summary prompt, long-term write, short-term clear."""
        description = self.plan_summary(scene_heading, scene_text, provider)
        trace = append_trace(self.long_term, scene_index, description, provider)
        self.short_term.clear(scene_index + 1)
        return trace
