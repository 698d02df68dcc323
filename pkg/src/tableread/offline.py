"""Rule-based offline provider.

Fabricates deterministic, schema-valid responses for every prompt template so
the entire pipeline (and the record/replay harness) runs with no network and
no model. Responses are pure functions of the request variables.

Inner-thought text is woven from request-derived tokens placed at most a few
characters apart. That keeps any 15-character window of a thought effectively
unique to its (agent, line) origin, which is what the information-boundary
checks rely on: shared template wording can never masquerade as a leak.
"""

from __future__ import annotations

import hashlib
import json
import re

from .providers import Provider, ProviderConfig, ChatRequest, collapse_ws
from .schemas import FIVE_DIMENSIONS

_ALPHABET = "0123456789abcdefghijklmnopqrstuvwxyz"

_SPEAKER_RE = re.compile(r"^\s*([A-Z][A-Za-z0-9 .'’-]{0,40}?)\s*(?:\([^)]*\))?\s*:\s+\S")

_TRAITS = (
    "guarded", "restless", "wry", "stubborn", "tender", "watchful",
    "blunt", "patient", "haunted", "curious",
)


def _token(seed: str, salt: str, length: int = 10) -> str:
    digest = hashlib.sha256(f"{seed}|{salt}".encode("utf-8")).digest()
    return "".join(_ALPHABET[b % 36] for b in digest[:length])


def _pick(seed: str, salt: str, options: tuple[str, ...]) -> str:
    digest = hashlib.sha256(f"{seed}|{salt}".encode("utf-8")).digest()
    return options[digest[0] % len(options)]


def _first_words(text: str, n: int) -> str:
    words = collapse_ws(text).split(" ")
    return " ".join(words[:n])


def _seed(variables: dict[str, str]) -> str:
    blob = json.dumps(
        {k: collapse_ws(v) for k, v in sorted(variables.items())},
        sort_keys=True,
        ensure_ascii=False,
    )
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def heading_regex() -> re.Pattern:
    # mirrors the parser's default fallback pattern
    return re.compile(r"^(?:INT\./EXT|INT/EXT|I/E|INT|EXT)[. ]", re.IGNORECASE)


class OfflineProvider(Provider):
    """Deterministic stand-in for a live model."""

    def __init__(self, config: ProviderConfig | None = None):
        self.config = config or ProviderConfig()

    # -- embeddings: hash-stream pseudo-vectors ---------------------------

    def _embed(self, texts: list[str]) -> list[list[float]]:
        dim = self.config.embedding_dimension
        out = []
        for text in texts:
            values: list[float] = []
            counter = 0
            key = collapse_ws(text).encode("utf-8")
            while len(values) < dim:
                digest = hashlib.sha256(key + counter.to_bytes(4, "big")).digest()
                for i in range(0, len(digest) - 3, 4):
                    if len(values) >= dim:
                        break
                    raw = int.from_bytes(digest[i : i + 4], "big")
                    values.append(raw / 2**31 - 1.0)
                counter += 1
            out.append(values)
        return out

    # -- chat ---------------------------------------------------------------

    def complete(self, req: ChatRequest) -> str:
        handler = getattr(self, f"_t_{req.template_id}", None)
        if handler is None:
            raise ValueError(f"offline provider has no rule for template '{req.template_id}'")
        return handler(req.variables)

    def _t_segment(self, v: dict[str, str]) -> str:
        lines = v["body"].split("\n")
        pattern = heading_regex()
        starts = [i for i, line in enumerate(lines) if pattern.match(line)]
        scenes = []
        if not starts:
            scenes.append({"heading": "SCENE 1", "start_line": 0, "end_line": len(lines)})
        else:
            if starts[0] > 0:
                scenes.append({"heading": "SCENE 1", "start_line": 0, "end_line": starts[0]})
            for pos, start in enumerate(starts):
                end = starts[pos + 1] if pos + 1 < len(starts) else len(lines)
                scenes.append(
                    {"heading": lines[start].strip(), "start_line": start, "end_line": end}
                )
        return json.dumps({"scenes": scenes}, ensure_ascii=False)

    def _t_classify(self, v: dict[str, str]) -> str:
        lines = json.loads(v["lines_json"])
        pattern = heading_regex()
        labeled = []
        for idx, line in enumerate(lines):
            if idx == 0 and pattern.match(line):
                labeled.append({"kind": "heading", "speaker": None})
                continue
            m = _SPEAKER_RE.match(line)
            if m:
                name = collapse_ws(m.group(1))
                if name.isupper():
                    name = name.title()
                labeled.append({"kind": "dialogue", "speaker": name})
            else:
                labeled.append({"kind": "action", "speaker": None})
        return json.dumps({"lines": labeled}, ensure_ascii=False)

    def _t_persona(self, v: dict[str, str]) -> str:
        seed = _seed(v)
        name = v["character"]
        bio = collapse_ws(v.get("bio", ""))
        traits = [
            _pick(seed, "trait1", _TRAITS),
            _pick(seed, "trait2", _TRAITS[::-1]),
        ]
        background = (
            f"{name} carries the story's weight here; {bio[:120]}" if bio
            else f"{name} is sketched from the scenes alone, present wherever the script lets them act."
        )
        profile = {
            "background": background,
            "traits": traits,
            "goals": f"{name} wants the next moment to break their way.",
            "motivations": f"What happened before these scenes still drives {name}.",
        }
        return json.dumps(profile, ensure_ascii=False)

    def _t_enact(self, v: dict[str, str]) -> str:
        s = _seed(v)
        t = lambda salt: _token(s, salt)  # noqa: E731
        thought = {
            "interpretation": f"Nt {t('i1')} rvb {t('i2')} tilt {t('i3')}.",
            "recall_notes": f"Rm {t('r1')} knot {t('r2')} from {t('r3')}.",
            "objective": f"Aim {t('o1')} quiet {t('o2')} hold {t('o3')}.",
            "synthesis": f"I feel {t('s1')}, want {t('s2')} now.",
        }
        return json.dumps(thought, ensure_ascii=False)

    def _candidate(self, v: dict[str, str], voice: str, timing: str, n: int) -> dict:
        s = _seed(v)
        character = v.get("character", "the lead")
        dims = list(FIVE_DIMENSIONS)
        dim = _pick(s, f"dim{n}", tuple(dims))
        if timing == "instant":
            span_src = "current_action_or_dialogue"
            span = _first_words(v["line"], 6)
            quoted = _first_words(v["line"], 4)
            if voice == "character":
                question = (
                    f"How can I sit inside '{quoted}' and still keep what I want from this moment?"
                )
                rationale = (
                    f"I hear myself at '{span}' and the want underneath it pulls another way."
                )
            else:
                question = (
                    f"Does the beat at '{quoted}' carry {character}'s intent, "
                    f"or does it need a clearer physical cue?"
                )
                rationale = (
                    f"Playing the moment, the line '{span}' reads flatter than the "
                    f"intent behind it."
                )
        else:
            span_src = "current_scene_text"
            first_content = next(
                (ln for ln in v["scene_text"].split("\n") if ln.strip()), v["scene_text"]
            )
            span = _first_words(first_content, 6)
            heading = v.get("scene_heading", "the scene")
            if voice == "character":
                question = (
                    f"How do I square what I want with where '{heading}' leaves me by the end?"
                )
                rationale = (
                    f"From inside it, the stretch starting '{span}' moves past me "
                    f"faster than I can turn."
                )
            elif voice == "reviewer":
                question = (
                    f"Does '{heading}' earn its turn, or does the middle stretch sag "
                    f"before the exit?"
                )
                rationale = (
                    f"On the page, the run beginning '{span}' repeats its own beat."
                )
            else:
                question = (
                    f"Across '{heading}', does {character}'s arc actually move, or does "
                    f"the scene hold its breath?"
                )
                rationale = (
                    f"The stretch starting '{span}' gives {character} no turn to play."
                )
        return {
            "question": question,
            "rationale": rationale,
            "dimensions": [dim],
            "evidence": [{"source": span_src, "span": span}],
        }

    def _candidates_payload(self, v: dict[str, str], voice: str, timing: str, count: int) -> str:
        anchor = v.get("line") if timing == "instant" else v.get("scene_text")
        if not anchor or not collapse_ws(anchor):
            return json.dumps({"candidates": []})
        cands = [self._candidate(v, voice, timing, i) for i in range(count)]
        return json.dumps({"candidates": cands}, ensure_ascii=False)

    def _t_instant_actor(self, v: dict[str, str]) -> str:
        return self._candidates_payload(v, "actor", "instant", 1)

    def _t_instant_character(self, v: dict[str, str]) -> str:
        return self._candidates_payload(v, "character", "instant", 1)

    def _t_posthoc_actor(self, v: dict[str, str]) -> str:
        return self._candidates_payload(v, "actor", "posthoc", 2)

    def _t_posthoc_character(self, v: dict[str, str]) -> str:
        return self._candidates_payload(v, "character", "posthoc", 2)

    def _t_posthoc_actor_nope(self, v: dict[str, str]) -> str:
        return self._candidates_payload(v, "actor", "posthoc", 2)

    def _t_posthoc_reviewer(self, v: dict[str, str]) -> str:
        return self._candidates_payload(v, "reviewer", "posthoc", 2)

    def _t_summary(self, v: dict[str, str]) -> str:
        s = _seed(v)
        heading = v.get("scene_heading", "the scene")
        description = (
            f"In '{heading}' I held {_token(s, 'm1')}, watched {_token(s, 'm2')}, "
            f"and left wanting {_token(s, 'm3')}."
        )
        return json.dumps({"description": description}, ensure_ascii=False)

    def _assessment(self) -> str:
        result = {
            "evidence": {"passed": True, "note": "cited spans located in their sources"},
            "diversity": {"passed": True, "note": "phrasing is plain and unforced"},
            "dimensions": {"passed": True, "note": "claimed dimension is genuinely addressed"},
            "impact_timing": {"passed": True, "note": "severe enough to surface at this timing"},
        }
        return json.dumps(result, ensure_ascii=False)

    def _t_assess_instant(self, v: dict[str, str]) -> str:
        return self._assessment()

    def _t_assess_posthoc(self, v: dict[str, str]) -> str:
        return self._assessment()
