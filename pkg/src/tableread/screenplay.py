"""Screenplay parsing: scene segmentation, line classification, personas.

The provider does the smart work (segmentation, labeling, persona synthesis);
everything it returns is validated against mechanical invariants, with a
deterministic regex fallback for segmentation. Line text always comes from
the source document, never from the model, so nothing can be dropped or
rewritten.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from .errors import ClassificationError, ProviderError, StructureError
from .providers import ChatRequest, Provider, collapse_ws, complete_structured

SCHEMA_VERSION = 1

DEFAULT_HEADING_PREFIXES = ("INT./EXT", "INT/EXT", "I/E", "INT", "EXT")


@dataclass(frozen=True)
class ParserConfig:
    """Knobs for segmentation and naming; pattern set is configurable so
    non-English heading conventions can be added without code changes."""

    heading_prefixes: tuple[str, ...] = DEFAULT_HEADING_PREFIXES
    synthetic_heading: str = "SCENE {n}"
    persona_excerpt_lines: int = 12

    def heading_regex(self) -> re.Pattern:
        alternatives = "|".join(re.escape(p) for p in self.heading_prefixes)
        return re.compile(rf"^(?:{alternatives})[. ]", re.IGNORECASE)


DEFAULT_PARSER_CONFIG = ParserConfig()


def normalize_body(text: str) -> str:
    """Canonical form: CRLF/CR to LF, trailing whitespace stripped per line,
    blank lines preserved."""
    unified = text.replace("\r\n", "\n").replace("\r", "\n")
    return "\n".join(line.rstrip() for line in unified.split("\n"))


_SECTION_RE = re.compile(r"^===\s*(BIOS|OUTLINE)\s*===$", re.IGNORECASE)


def split_sections(text: str) -> tuple[str, str | None, str | None]:
    """Split a single file into (body, bios, outline).

    Bios/outline may ride along in the screenplay file as sections delimited
    by `=== BIOS ===` / `=== OUTLINE ===` lines. Without delimiters the text
    passes through byte-identical.
    """
    lines = normalize_body(text).split("\n")
    if not any(_SECTION_RE.match(line.strip()) for line in lines):
        return text, None, None
    sections: dict[str, list[str]] = {"body": []}
    current = "body"
    for line in lines:
        m = _SECTION_RE.match(line.strip())
        if m:
            current = m.group(1).lower()
            sections.setdefault(current, [])
            continue
        sections[current].append(line)
    body = "\n".join(sections["body"]).strip("\n")
    bios = "\n".join(sections["bios"]).strip("\n") if "bios" in sections else None
    outline = "\n".join(sections["outline"]).strip("\n") if "outline" in sections else None
    return body, bios or None, outline or None


def canonical_name(name: str) -> str:
    return collapse_ws(name)


def names_equal(a: str, b: str) -> bool:
    return canonical_name(a).casefold() == canonical_name(b).casefold()


@dataclass(frozen=True)
class RawScreenplay:
    title: str
    body: str
    bios: str | None = None
    outline: str | None = None

    def __post_init__(self) -> None:
        if not normalize_body(self.body).strip():
            raise ValueError("screenplay body is empty after normalization")


@dataclass
class Scene:
    index: int
    heading: str
    body_lines: list[str]
    heading_is_line: bool

    def text(self) -> str:
        return "\n".join(self.body_lines)


@dataclass(frozen=True)
class ScriptLine:
    scene_index: int
    line_index: int
    kind: str  # heading | action | dialogue
    text: str
    speaker: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("heading", "action", "dialogue"):
            raise ValueError(f"unknown line kind: {self.kind!r}")
        if self.kind == "dialogue" and not (self.speaker and self.speaker.strip()):
            raise ValueError("dialogue lines require a non-empty speaker")
        if self.kind != "dialogue" and self.speaker is not None:
            raise ValueError("only dialogue lines carry a speaker")
        if self.kind == "heading" and self.line_index != 0:
            raise ValueError("heading lines may only appear at line_index 0")

    def rendered(self) -> str:
        if self.kind == "dialogue":
            return f"{self.speaker}: {self.text}"
        return self.text

    def to_dict(self) -> dict:
        return {
            "scene_index": self.scene_index,
            "line_index": self.line_index,
            "kind": self.kind,
            "speaker": self.speaker,
            "text": self.text,
        }

    @classmethod
    def from_dict(cls, row: dict) -> "ScriptLine":
        return cls(
            scene_index=row["scene_index"],
            line_index=row["line_index"],
            kind=row["kind"],
            text=row["text"],
            speaker=row.get("speaker"),
        )


@dataclass
class PersonaProfile:
    character: str
    background: str
    traits: list[str]
    goals: str
    motivations: str
    source: str  # authoritative_bio | synthesized | merged

    def __post_init__(self) -> None:
        for label, value in (
            ("background", self.background),
            ("goals", self.goals),
            ("motivations", self.motivations),
        ):
            if not value.strip():
                raise ValueError(f"persona {label} must be non-empty")
        if not self.traits or any(not t.strip() for t in self.traits):
            raise ValueError("persona traits must be non-empty")
        if self.source not in ("authoritative_bio", "synthesized", "merged"):
            raise ValueError(f"unknown persona source: {self.source!r}")

    def rendered(self) -> str:
        return (
            f"Character: {self.character}\n"
            f"Background: {self.background}\n"
            f"Traits: {', '.join(self.traits)}\n"
            f"Goals: {self.goals}\n"
            f"Motivations: {self.motivations}"
        )

    def to_dict(self) -> dict:
        return {
            "character": self.character,
            "background": self.background,
            "traits": list(self.traits),
            "goals": self.goals,
            "motivations": self.motivations,
            "source": self.source,
        }

    @classmethod
    def from_dict(cls, row: dict) -> "PersonaProfile":
        return cls(
            character=row["character"],
            background=row["background"],
            traits=list(row["traits"]),
            goals=row["goals"],
            motivations=row["motivations"],
            source=row["source"],
        )


@dataclass
class ParsedScreenplay:
    title: str
    scenes: list[Scene]
    lines: list[ScriptLine]
    characters: list[str]  # first-appearance order; compared case-insensitively
    personas: dict[str, PersonaProfile]
    diagnostics: list[str] = field(default_factory=list)
    bios: str = ""
    outline: str = ""

    def line_at(self, scene_index: int, line_index: int) -> ScriptLine | None:
        for line in self.lines:
            if line.scene_index == scene_index and line.line_index == line_index:
                return line
        return None

    def scene_lines(self, scene_index: int) -> list[ScriptLine]:
        return [l for l in self.lines if l.scene_index == scene_index]

    def has_character(self, name: str) -> bool:
        return any(names_equal(name, c) for c in self.characters)

    def resolve_character(self, name: str) -> str | None:
        for c in self.characters:
            if names_equal(name, c):
                return c
        return None

    def full_text(self) -> str:
        return "\n".join(scene.text() for scene in self.scenes)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "title": self.title,
            "scenes": [
                {
                    "index": s.index,
                    "heading": s.heading,
                    "body_lines": list(s.body_lines),
                    "heading_is_line": s.heading_is_line,
                }
                for s in self.scenes
            ],
            "lines": [l.to_dict() for l in self.lines],
            "characters": list(self.characters),
            "personas": {name: p.to_dict() for name, p in self.personas.items()},
            "diagnostics": list(self.diagnostics),
            "bios": self.bios,
            "outline": self.outline,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "ParsedScreenplay":
        return cls(
            title=doc["title"],
            scenes=[
                Scene(
                    index=s["index"],
                    heading=s["heading"],
                    body_lines=list(s["body_lines"]),
                    heading_is_line=s["heading_is_line"],
                )
                for s in doc["scenes"]
            ],
            lines=[ScriptLine.from_dict(l) for l in doc["lines"]],
            characters=list(doc["characters"]),
            personas={
                name: PersonaProfile.from_dict(p) for name, p in doc["personas"].items()
            },
            diagnostics=list(doc.get("diagnostics", [])),
            bios=doc.get("bios", ""),
            outline=doc.get("outline", ""),
        )


# ---------------------------------------------------------------------------
# segmentation


def _scenes_from_bounds(lines: list[str], bounds: list[int], config: ParserConfig) -> list[Scene]:
    """bounds = sorted start indices of scenes (first must be 0)."""
    pattern = config.heading_regex()
    scenes = []
    for i, start in enumerate(bounds):
        end = bounds[i + 1] if i + 1 < len(bounds) else len(lines)
        body = lines[start:end]
        if body and pattern.match(body[0]):
            scenes.append(Scene(i, body[0].strip(), body, heading_is_line=True))
        else:
            heading = config.synthetic_heading.format(n=i + 1)
            scenes.append(Scene(i, heading, body, heading_is_line=False))
    return scenes


def fallback_segment(
    raw: RawScreenplay, config: ParserConfig = DEFAULT_PARSER_CONFIG
) -> list[Scene]:
    """Deterministic regex segmentation: split at heading-pattern lines."""
    lines = normalize_body(raw.body).split("\n")
    pattern = config.heading_regex()
    starts = [i for i, line in enumerate(lines) if pattern.match(line)]
    if not starts:
        bounds = [0]
    elif starts[0] == 0:
        bounds = starts
    else:
        bounds = [0] + starts
    return _scenes_from_bounds(lines, bounds, config)


def _validate_spans(spans: list[dict], n_lines: int) -> None:
    """Provider spans must partition [0, n) in document order."""
    if not spans:
        raise ValueError("no scenes returned")
    expected_start = 0
    for span in spans:
        start, end = span["start_line"], span["end_line"]
        if start != expected_start:
            raise ValueError(f"span starts at {start}, expected {expected_start}")
        if end <= start:
            raise ValueError(f"empty span at {start}")
        expected_start = end
    if expected_start != n_lines:
        raise ValueError(f"spans cover {expected_start} lines of {n_lines}")


def segment_scenes(
    raw: RawScreenplay,
    provider: Provider,
    config: ParserConfig = DEFAULT_PARSER_CONFIG,
    diagnostics: list[str] | None = None,
) -> list[Scene]:
    """Provider-backed segmentation with automatic regex fallback.

    The provider result is accepted only when its spans exactly partition the
    normalized body (no gaps, no overlaps, no text loss); otherwise the
    fallback result is used and a diagnostics note is recorded.
    """
    lines = normalize_body(raw.body).split("\n")
    numbered = "\n".join(f"{i}: {line}" for i, line in enumerate(lines))
    req = ChatRequest(
        template_id="segment",
        variables={"title": raw.title, "numbered_body": numbered, "body": "\n".join(lines)},
        expects_structure=True,
        schema_id="segment",
        temperature=provider.config.temperature_evaluate,
    )
    try:
        result = complete_structured(
            req, provider, check=lambda value: _validate_spans(value["scenes"], len(lines))
        )
    except ProviderError as exc:
        if diagnostics is not None:
            diagnostics.append(f"segmentation fell back to regex: {exc}")
        return fallback_segment(raw, config)
    bounds = [span["start_line"] for span in result["scenes"]]
    return _scenes_from_bounds(lines, bounds, config)


# ---------------------------------------------------------------------------
# classification


def _canonical_speaker(name: str) -> str:
    return canonical_name(name)


def classify_lines(
    scene: Scene,
    provider: Provider,
    config: ParserConfig = DEFAULT_PARSER_CONFIG,
) -> list[ScriptLine]:
    """Label every body line of a scene; text always comes from the scene."""
    if not scene.body_lines:
        raise ValueError("scene has no body lines")

    def check(value: dict) -> None:
        rows = value["lines"]
        if len(rows) != len(scene.body_lines):
            raise ValueError(
                f"expected {len(scene.body_lines)} labels, got {len(rows)}"
            )
        for idx, row in enumerate(rows):
            if row["kind"] == "heading" and idx != 0:
                raise ValueError(f"heading label at line {idx}")
            if row["kind"] == "dialogue" and not (row.get("speaker") or "").strip():
                raise ValueError(f"dialogue without speaker at line {idx}")

    numbered = "\n".join(f"{i}: {line}" for i, line in enumerate(scene.body_lines))
    req = ChatRequest(
        template_id="classify",
        variables={
            "heading": scene.heading,
            "numbered_lines": numbered,
            "lines_json": json.dumps(scene.body_lines, ensure_ascii=False),
        },
        expects_structure=True,
        schema_id="classify",
        temperature=provider.config.temperature_evaluate,
    )
    try:
        result = complete_structured(req, provider, check=check)
    except StructureError as exc:
        raise ClassificationError(str(exc)) from exc

    out: list[ScriptLine] = []
    for idx, (text, row) in enumerate(zip(scene.body_lines, result["lines"])):
        kind = row["kind"]
        speaker = row.get("speaker")
        if idx == 0 and scene.heading_is_line:
            kind, speaker = "heading", None
        elif kind == "heading":
            kind, speaker = "action", None
        if kind == "dialogue":
            speaker = _canonical_speaker(speaker)
        else:
            speaker = None
        out.append(
            ScriptLine(
                scene_index=scene.index,
                line_index=idx,
                kind=kind,
                text=text,
                speaker=speaker,
            )
        )
    return out


def extract_characters(lines: list[ScriptLine]) -> list[str]:
    """Distinct speakers in first-appearance order (case-insensitive dedupe)."""
    seen: list[str] = []
    for line in lines:
        if line.kind != "dialogue":
            continue
        if not any(names_equal(line.speaker, s) for s in seen):
            seen.append(line.speaker)
    return seen


# ---------------------------------------------------------------------------
# personas


def extract_bio(bios: str | None, name: str) -> str | None:
    """Find the bio paragraph for `name`: a paragraph whose first line is the
    name or starts with `name:` / `name -`."""
    if not bios:
        return None
    for paragraph in re.split(r"\n\s*\n", normalize_body(bios)):
        paragraph = paragraph.strip()
        if not paragraph:
            continue
        first = paragraph.split("\n", 1)[0].strip()
        m = re.match(r"^(.*?)\s*[:—–-]\s", first + " ")
        candidate = m.group(1) if m else first
        if names_equal(candidate, name):
            return paragraph
    return None


def _appearance_scenes(name: str, parsed: ParsedScreenplay) -> list[int]:
    mention = re.compile(rf"\b{re.escape(canonical_name(name))}\b", re.IGNORECASE)
    out = []
    for scene in parsed.scenes:
        for line in parsed.scene_lines(scene.index):
            if line.kind == "dialogue" and names_equal(line.speaker, name):
                out.append(scene.index)
                break
            if line.kind == "action" and mention.search(line.text):
                out.append(scene.index)
                break
    return out


def build_persona(
    name: str,
    parsed: ParsedScreenplay,
    raw: RawScreenplay,
    provider: Provider,
    config: ParserConfig = DEFAULT_PARSER_CONFIG,
) -> PersonaProfile:
    if not parsed.has_character(name):
        raise ValueError(f"unknown character: {name}")
    name = parsed.resolve_character(name)
    bio = extract_bio(raw.bios, name)
    appearances = _appearance_scenes(name, parsed)
    excerpts = []
    for idx in appearances:
        scene = parsed.scenes[idx]
        head = scene.body_lines[: config.persona_excerpt_lines]
        excerpts.append(f"[{scene.heading}]\n" + "\n".join(head))
    req = ChatRequest(
        template_id="persona",
        variables={
            "character": name,
            "bio": bio or "",
            "outline": raw.outline or "",
            "scene_excerpts": "\n\n".join(excerpts) or "(no scenes)",
        },
        expects_structure=True,
        schema_id="persona",
        temperature=provider.config.temperature_generate,
    )
    result = complete_structured(req, provider)
    if bio and appearances:
        source = "merged"
    elif bio:
        source = "authoritative_bio"
    else:
        source = "synthesized"
    return PersonaProfile(
        character=name,
        background=result["background"],
        traits=list(result["traits"]),
        goals=result["goals"],
        motivations=result["motivations"],
        source=source,
    )


def parse_screenplay(
    raw: RawScreenplay,
    provider: Provider,
    config: ParserConfig = DEFAULT_PARSER_CONFIG,
) -> ParsedScreenplay:
    """Full pipeline: segment, classify, collect characters, build personas."""
    diagnostics: list[str] = []
    scenes = segment_scenes(raw, provider, config, diagnostics=diagnostics)
    lines: list[ScriptLine] = []
    for scene in scenes:
        lines.extend(classify_lines(scene, provider, config))
    characters = extract_characters(lines)
    parsed = ParsedScreenplay(
        title=raw.title,
        scenes=scenes,
        lines=lines,
        characters=characters,
        personas={},
        diagnostics=diagnostics,
        bios=raw.bios or "",
        outline=raw.outline or "",
    )
    for name in characters:
        parsed.personas[name] = build_persona(name, parsed, raw, provider, config)
    return parsed
