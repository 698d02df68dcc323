"""Central coordinator.

Owns the line cursor, public context, agent activation, instant/post-hoc
scheduling, the four run modes, and value marking. Provider work happens in a
prepare phase that never touches session state; mutations commit only after
every call in the step succeeded, so a provider failure leaves the session
resumable at the same cursor.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Callable

from .agents import (
    Agent,
    EvidenceBundle,
    EvidenceRef,
    FeedbackCandidate,
    InnerThought,
    slug,
)
from .errors import (
    ContractError,
    EndOfScreenplay,
    InvalidModeConfig,
    SceneIncomplete,
    UnknownCharacter,
    UnknownTarget,
)
from .evaluation import Verdict, assess_instant, assess_posthoc
from .memory import LongTermStore, embed, recall
from .providers import ChatRequest, Provider, complete_structured
from .schemas import FIVE_DIMENSIONS
from .screenplay import ParsedScreenplay, ScriptLine, extract_bio, names_equal
from .serialize import digest

SESSION_SCHEMA_VERSION = 1


class Mode(str, Enum):
    EVAL_PE = "EvalPE"      # actor voice grounded in enacted experience (full system)
    EXP_PE = "ExpPE"        # character voice grounded in enacted experience
    EVAL_NO_PE = "EvalNoPE" # actor voice, no enactment
    REV_NO_PE = "RevNoPE"   # external reviewer, no enactment

    @property
    def has_personal_experience(self) -> bool:
        return self in (Mode.EVAL_PE, Mode.EXP_PE)


@dataclass(frozen=True)
class SessionConfig:
    recall_k: int = 5
    context_budget: int = 8000
    embedding_dimension: int = 64
    memory_dir: str | Path | None = None  # JSONL long-term stores live here when set


@dataclass
class FeedbackItem:
    candidate: FeedbackCandidate
    verdict: Verdict
    marked: bool = False

    def __post_init__(self) -> None:
        if not self.verdict.accepted:
            raise ContractError("only accepted candidates become feedback items")

    def to_dict(self) -> dict:
        return {
            "candidate": self.candidate.to_dict(),
            "verdict": self.verdict.to_dict(),
            "marked": self.marked,
        }


@dataclass
class ValueMark:
    target_id: str
    character: str
    scene_content: str
    scene_number: int
    feedback_type: str  # inner_thought | instant | posthoc
    created_at: str

    def to_dict(self) -> dict:
        return {
            "target_id": self.target_id,
            "character": self.character,
            "scene_content": self.scene_content,
            "scene_number": self.scene_number,
            "feedback_type": self.feedback_type,
            "created_at": self.created_at,
        }

    def export_entry(self) -> dict:
        return {
            "character": self.character,
            "scene_content": self.scene_content,
            "scene_number": self.scene_number,
            "feedback_type": self.feedback_type,
        }


@dataclass
class StepResult:
    line: ScriptLine
    inner_thought: InnerThought | None
    accepted_instant: list[FeedbackItem]
    scene_complete: bool

    def to_dict(self) -> dict:
        return {
            "line": self.line.to_dict(),
            "inner_thought": self.inner_thought.to_dict() if self.inner_thought else None,
            "accepted_instant": [i.to_dict() for i in self.accepted_instant],
            "scene_complete": self.scene_complete,
        }


def _utc_now() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


class Session:
    def __init__(
        self,
        session_id: str,
        screenplay: ParsedScreenplay,
        mode: Mode,
        activated: list[str],
        config: SessionConfig,
        clock: Callable[[], str] = _utc_now,
    ):
        self.id = session_id
        self.screenplay = screenplay
        self.mode = mode
        self.activated = activated
        self.config = config
        self.clock = clock
        self.cursor = 0
        self.public: list[ScriptLine] = []
        self.agents: dict[str, Agent] = {}
        self.inner_thoughts: list[InnerThought] = []
        self.feedback_log: list[FeedbackItem] = []
        self.verdicts: list[Verdict] = []
        self.marks: list[ValueMark] = []
        self.finished_scenes: set[int] = set()
        self.events: list[dict] = []

    @property
    def at_end(self) -> bool:
        return self.cursor >= len(self.screenplay.lines)

    def cursor_position(self) -> tuple[int, int] | None:
        if self.at_end:
            return None
        line = self.screenplay.lines[self.cursor]
        return (line.scene_index, line.line_index)

    def background_for(self, name: str) -> str:
        bio = extract_bio(self.screenplay.bios, name)
        if bio:
            return bio
        persona = self.screenplay.personas.get(name)
        return persona.background if persona else ""

    def rendered_public_text(self) -> str:
        return "\n".join(l.rendered() for l in self.public)

    def rendered_scene_text(self, scene_index: int, upto: int | None = None) -> str:
        lines = [
            l.rendered()
            for l in self.public
            if l.scene_index == scene_index and (upto is None or l.line_index <= upto)
        ]
        return "\n".join(lines)


def create_session(
    parsed: ParsedScreenplay,
    mode: Mode | str,
    activated: set[str] | list[str],
    config: SessionConfig = SessionConfig(),
    *,
    session_id: str | None = None,
    clock: Callable[[], str] = _utc_now,
) -> Session:
    try:
        mode = Mode(mode)
    except ValueError as exc:
        raise InvalidModeConfig(f"unknown mode: {mode!r}") from exc

    resolved: list[str] = []
    for name in activated:
        canonical = parsed.resolve_character(name)
        if canonical is None:
            raise UnknownCharacter(f"'{name}' is not a character of this screenplay")
        if canonical not in resolved:
            resolved.append(canonical)
    # keep activation in first-appearance order for deterministic scheduling
    resolved = [c for c in parsed.characters if c in resolved]

    if mode.has_personal_experience and not resolved:
        raise InvalidModeConfig(f"mode {mode.value} requires at least one activated role")

    if session_id is None:
        session_id = "sess-" + digest(
            {"screenplay": parsed.to_dict(), "mode": mode.value, "activated": resolved}
        )[:12]

    session = Session(session_id, parsed, mode, resolved, config, clock)
    if mode.has_personal_experience:
        for name in resolved:
            persist = None
            if config.memory_dir is not None:
                persist = Path(config.memory_dir) / f"{session_id}-{slug(name)}.jsonl"
            store = LongTermStore(name, config.embedding_dimension, persist_path=persist)
            session.agents[name] = Agent(parsed.personas[name], store)
    return session


_WORD_CACHE: dict[str, re.Pattern] = {}


def _name_pattern(name: str) -> re.Pattern:
    if name not in _WORD_CACHE:
        _WORD_CACHE[name] = re.compile(rf"\b{re.escape(name)}\b", re.IGNORECASE)
    return _WORD_CACHE[name]


def _line_agent(session: Session, line: ScriptLine) -> str | None:
    """Which activated character does this line belong to, if any.

    Dialogue activates its speaker; an action line activates the first
    activated character named in it (earliest mention wins).
    """
    if line.kind == "dialogue":
        for name in session.activated:
            if names_equal(name, line.speaker):
                return name
        return None
    if line.kind == "action":
        best: tuple[int, str] | None = None
        for name in session.activated:
            m = _name_pattern(name).search(line.text)
            if m and (best is None or m.start() < best[0]):
                best = (m.start(), name)
        return best[1] if best else None
    return None


def step(session: Session, provider: Provider) -> StepResult:
    """Reveal the cursor line; enact + gate instant feedback in PE modes."""
    if session.at_end:
        raise EndOfScreenplay(f"session {session.id} has no more lines")
    line = session.screenplay.lines[session.cursor]
    entering_new_scene = line.line_index == 0

    # ---- prepare: all provider work, no session mutation
    thought: InnerThought | None = None
    accepted: list[FeedbackItem] = []
    step_verdicts: list[Verdict] = []
    agent_name = _line_agent(session, line) if session.mode.has_personal_experience else None
    if agent_name is not None:
        agent = session.agents[agent_name]
        if entering_new_scene and agent.short_term.scene_index != line.scene_index:
            # thoughts/lines of a previous scene never leak into this one
            agent.begin_scene(line.scene_index)
        thought, recalled = agent.think(
            line, provider, k=session.config.recall_k, budget=session.config.context_budget
        )
        scene = session.screenplay.scenes[line.scene_index]
        scene_lines = [
            l.rendered() for l in session.public if l.scene_index == line.scene_index
        ] + [line.rendered()]
        voice = "actor" if session.mode is Mode.EVAL_PE else "character"
        candidates = agent.plan_instant(
            line,
            thought,
            provider,
            voice=voice,
            scene_heading=scene.heading,
            scene_lines=scene_lines,
            background=session.background_for(agent_name),
        )
        bundle = EvidenceBundle(
            background=session.background_for(agent_name),
            outline=session.screenplay.outline,
            memories=[t.description for t in recalled],
            scene_text="\n".join(scene_lines),
            action_or_dialogue=line.rendered(),
        )
        for candidate in candidates:
            verdict = assess_instant(candidate, bundle, provider)
            step_verdicts.append(verdict)
            if verdict.accepted:
                accepted.append(FeedbackItem(candidate, verdict))

    # ---- commit
    if entering_new_scene:
        for agent in session.agents.values():
            if agent.short_term.scene_index != line.scene_index:
                agent.begin_scene(line.scene_index)
    session.public.append(line)
    for agent in session.agents.values():
        agent.observe(line.rendered())
    if thought is not None:
        session.agents[agent_name].record_thought(thought)
        session.inner_thoughts.append(thought)
    session.verdicts.extend(step_verdicts)
    session.feedback_log.extend(accepted)
    session.cursor += 1
    scene_complete = session.at_end or (
        session.screenplay.lines[session.cursor].scene_index != line.scene_index
    )
    result = StepResult(line, thought, accepted, scene_complete)
    session.events.append({"event": "step", "data": result.to_dict()})
    return result


def _plan_posthoc_without_agent(
    session: Session, provider: Provider, template_id: str,
    character: str | None, scene_index: int, scene_heading: str, scene_text: str,
) -> list[FeedbackCandidate]:
    """Posthoc candidates for the no-enactment modes (no Agent object)."""
    variables = {
        "screenplay": session.screenplay.full_text(),
        "scene_heading": scene_heading,
        "scene_text": scene_text,
        "outline": session.screenplay.outline or "(none)",
    }
    if character is not None:
        variables["character"] = character
        variables["background"] = session.background_for(character) or "(none)"
    req = ChatRequest(
        template_id=template_id,
        variables=variables,
        expects_structure=True,
        schema_id="candidates",
        temperature=provider.config.temperature_generate,
        meta={"agent": character} if character else {},
    )
    payload = complete_structured(req, provider)
    source = character if character is not None else "reviewer"
    out = []
    for i, row in enumerate(payload["candidates"]):
        out.append(
            FeedbackCandidate(
                id=f"{slug(source)}-post-{scene_index}-{i}",
                agent_or_source=source,
                timing="posthoc",
                scene_index=scene_index,
                line_index=None,
                question=row["question"],
                rationale=row["rationale"],
                dimensions=tuple(row["dimensions"]),
                evidence_refs=tuple(
                    EvidenceRef(e["source"], e["span"]) for e in row["evidence"]
                ),
            )
        )
    return out


def finish_scene(session: Session, provider: Provider) -> list[FeedbackItem]:
    """Post-hoc pass over the just-completed scene, then memory consolidation."""
    if session.cursor == 0:
        raise SceneIncomplete("no lines revealed yet")
    last = session.screenplay.lines[session.cursor - 1]
    if not session.at_end:
        nxt = session.screenplay.lines[session.cursor]
        if nxt.scene_index == last.scene_index:
            raise SceneIncomplete(
                f"scene {last.scene_index} still has unrevealed lines"
            )
    scene_index = last.scene_index
    if scene_index in session.finished_scenes:
        raise SceneIncomplete(f"scene {scene_index} was already finished")

    scene = session.screenplay.scenes[scene_index]
    scene_text = session.rendered_scene_text(scene_index)

    # ---- prepare
    planned: list[tuple[FeedbackCandidate, Verdict]] = []
    summaries: list[tuple[str, str, object]] = []  # (agent, description, embedding)

    if session.mode.has_personal_experience:
        voice = "actor" if session.mode is Mode.EVAL_PE else "character"
        for name in session.activated:
            agent = session.agents[name]
            recalled = (
                recall(agent.long_term, scene_text[:200], session.config.recall_k, provider)
                if len(agent.long_term)
                else []
            )
            candidates = agent.plan_posthoc(
                provider,
                voice=voice,
                scene_index=scene_index,
                scene_heading=scene.heading,
                scene_text=scene_text,
                screenplay_text=session.screenplay.full_text(),
                public_text=session.rendered_public_text(),
                outline=session.screenplay.outline,
                background=session.background_for(name),
            )
            bundle = EvidenceBundle(
                background=session.background_for(name),
                outline=session.screenplay.outline,
                memories=[t.description for t in recalled],
                scene_text=scene_text,
                action_or_dialogue=scene_text,
                full_screenplay=session.screenplay.full_text(),
                experience="\n".join(agent.short_term.current_inner_thoughts),
            )
            for candidate in candidates:
                planned.append((candidate, assess_posthoc(candidate, bundle, provider)))
            description = agent.plan_summary(scene.heading, scene_text, provider)
            vector = embed([description], provider)[0]
            summaries.append((name, description, vector))
    elif session.mode is Mode.EVAL_NO_PE:
        for name in session.activated:
            candidates = _plan_posthoc_without_agent(
                session, provider, "posthoc_actor_nope", name,
                scene_index, scene.heading, scene_text,
            )
            bundle = EvidenceBundle(
                background=session.background_for(name),
                outline=session.screenplay.outline,
                scene_text=scene_text,
                action_or_dialogue=scene_text,
                full_screenplay=session.screenplay.full_text(),
            )
            for candidate in candidates:
                planned.append((candidate, assess_posthoc(candidate, bundle, provider)))
    else:  # Mode.REV_NO_PE: one reviewer pass over the text alone
        candidates = _plan_posthoc_without_agent(
            session, provider, "posthoc_reviewer", None,
            scene_index, scene.heading, scene_text,
        )
        bundle = EvidenceBundle(
            outline=session.screenplay.outline,
            scene_text=scene_text,
            action_or_dialogue=scene_text,
            full_screenplay=session.screenplay.full_text(),
        )
        for candidate in candidates:
            planned.append((candidate, assess_posthoc(candidate, bundle, provider)))

    # ---- commit
    session.finished_scenes.add(scene_index)
    items: list[FeedbackItem] = []
    for candidate, verdict in planned:
        session.verdicts.append(verdict)
        if verdict.accepted:
            item = FeedbackItem(candidate, verdict)
            items.append(item)
            session.feedback_log.append(item)
            session.events.append({"event": "posthoc", "data": item.to_dict()})
    for name, description, vector in summaries:
        agent = session.agents[name]
        agent.long_term.append(scene_index, description, vector)
        agent.short_term.clear(scene_index + 1)
    return items


@dataclass
class SessionReport:
    session_id: str
    mode: Mode
    instant_count: int
    posthoc_count: int
    per_dimension: dict[str, int]
    per_source: dict[str, int]
    candidates_assessed: int
    accepted_count: int
    acceptance_rate: float
    items: list[FeedbackItem] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "schema_version": SESSION_SCHEMA_VERSION,
            "session_id": self.session_id,
            "mode": self.mode.value,
            "instant_count": self.instant_count,
            "posthoc_count": self.posthoc_count,
            "per_dimension": dict(self.per_dimension),
            "per_source": dict(self.per_source),
            "candidates_assessed": self.candidates_assessed,
            "accepted_count": self.accepted_count,
            "acceptance_rate": self.acceptance_rate,
            "items": [i.to_dict() for i in self.items],
        }


def build_report(session: Session) -> SessionReport:
    per_dimension = {d: 0 for d in FIVE_DIMENSIONS}
    per_source: dict[str, int] = {}
    instant = posthoc = 0
    for item in session.feedback_log:
        if item.candidate.timing == "instant":
            instant += 1
        else:
            posthoc += 1
        for dim in item.candidate.dimensions:
            per_dimension[dim] += 1
        source = item.candidate.agent_or_source
        per_source[source] = per_source.get(source, 0) + 1
    assessed = len(session.verdicts)
    accepted = len(session.feedback_log)
    rate = round(accepted / assessed, 6) if assessed else 0.0
    return SessionReport(
        session_id=session.id,
        mode=session.mode,
        instant_count=instant,
        posthoc_count=posthoc,
        per_dimension=per_dimension,
        per_source=dict(sorted(per_source.items())),
        candidates_assessed=assessed,
        accepted_count=accepted,
        acceptance_rate=rate,
        items=list(session.feedback_log),
    )


def run_all(session: Session, provider: Provider) -> SessionReport:
    """Step through every line, finishing each scene; report the totals."""
    if session.cursor != 0 or session.feedback_log or session.marks:
        raise ContractError("run_all requires a fresh session")
    while True:
        try:
            result = step(session, provider)
        except EndOfScreenplay:
            break
        if result.scene_complete:
            finish_scene(session, provider)
    return build_report(session)


def mark_value(session: Session, target_id: str) -> ValueMark:
    """Mark an inner thought or feedback item as valuable; idempotent."""
    for existing in session.marks:
        if existing.target_id == target_id:
            return existing

    character: str | None = None
    scene_index: int | None = None
    feedback_type: str | None = None
    for thought in session.inner_thoughts:
        if thought.id == target_id:
            thought.marked = True
            character, scene_index, feedback_type = (
                thought.agent, thought.scene_index, "inner_thought"
            )
            break
    if feedback_type is None:
        for item in session.feedback_log:
            if item.candidate.id == target_id:
                item.marked = True
                character = item.candidate.agent_or_source
                scene_index = item.candidate.scene_index
                feedback_type = item.candidate.timing
                break
    if feedback_type is None:
        raise UnknownTarget(f"no inner thought or feedback item with id '{target_id}'")

    mark = ValueMark(
        target_id=target_id,
        character=character,
        scene_content=session.screenplay.scenes[scene_index].text(),
        scene_number=scene_index,
        feedback_type=feedback_type,
        created_at=session.clock(),
    )
    session.marks.append(mark)
    session.events.append({"event": "mark", "data": mark.to_dict()})
    return mark


def export_session(session: Session) -> dict:
    position = session.cursor
    return {
        "schema_version": SESSION_SCHEMA_VERSION,
        "id": session.id,
        "mode": session.mode.value,
        "activated": list(session.activated),
        "cursor": position,
        "public_context": [l.to_dict() for l in session.public],
        "inner_thoughts": [t.to_dict() for t in session.inner_thoughts],
        "feedback_log": [i.to_dict() for i in session.feedback_log],
        "verdicts": [v.to_dict() for v in session.verdicts],
        "marks": [m.to_dict() for m in session.marks],
        "screenplay": session.screenplay.to_dict(),
    }


def export_marks(session: Session) -> list[dict]:
    return [m.export_entry() for m in session.marks]
