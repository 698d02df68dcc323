"""Deterministic style lint for generated feedback text.

Catches the failure modes the generation prompts forbid: formulaic openings,
over-used pet phrases, academic jargon, verbatim copying of script text, and
mixed first/third-person reference to the played character.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

_FIRST_PERSON = re.compile(
    r"\b(i|me|my|mine|myself|i'm|i've|i'd|i'll)\b", re.IGNORECASE
)
_SENTENCE_SPLIT = re.compile(r"[.!?]+")


def is_first_person(text: str) -> bool:
    return bool(_FIRST_PERSON.search(text))


@dataclass(frozen=True)
class StyleConfig:
    formulaic_openings: tuple[str, ...] = ("while performing", "when i played")
    restricted_phrases: tuple[str, ...] = ("could it be",)
    jargon_terms: tuple[str, ...] = (
        "diegesis",
        "focalization",
        "mise-en-scene",
        "mise-en-scène",
        "narratological",
        "semiotic",
        "hermeneutic",
        "intertextuality",
        "verisimilitude",
    )
    verbatim_word_ngram: int = 8
    verbatim_char_ngram: int = 12
    # below this many spaces per character the corpus counts as unsegmented
    # (no word boundaries to n-gram over), and the character rule applies
    unsegmented_space_ratio: float = 0.05


DEFAULT_STYLE_CONFIG = StyleConfig()


@dataclass(frozen=True)
class StyleViolation:
    rule: str  # formulaic_opening | restricted_phrase | jargon | verbatim_copy | pronoun_confusion
    span: str


@dataclass
class StyleReport:
    violations: list[StyleViolation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def rules(self) -> set[str]:
        return {v.rule for v in self.violations}


def _words(text: str) -> list[str]:
    # edge punctuation is cosmetic: a copied span followed by a comma is still a copy
    tokens = [w.strip("\"'.,;:!?()[]“”‘’") for w in text.casefold().split()]
    return [w for w in tokens if w]


def _find_verbatim_words(text: str, corpus: str, n: int) -> str | None:
    text_words = _words(text)
    corpus_words = _words(corpus)
    if len(text_words) < n or len(corpus_words) < n:
        return None
    corpus_grams = {
        tuple(corpus_words[i : i + n]) for i in range(len(corpus_words) - n + 1)
    }
    for i in range(len(text_words) - n + 1):
        gram = tuple(text_words[i : i + n])
        if gram in corpus_grams:
            return " ".join(gram)
    return None


def _find_verbatim_chars(text: str, corpus: str, n: int) -> str | None:
    flat_text = "".join(text.split()).casefold()
    flat_corpus = "".join(corpus.split()).casefold()
    if len(flat_text) < n or len(flat_corpus) < n:
        return None
    corpus_grams = {flat_corpus[i : i + n] for i in range(len(flat_corpus) - n + 1)}
    for i in range(len(flat_text) - n + 1):
        gram = flat_text[i : i + n]
        if gram in corpus_grams:
            return gram
    return None


def _space_ratio(text: str) -> float:
    if not text:
        return 1.0
    return sum(1 for c in text if c.isspace()) / len(text)


def lint_style(
    question: str,
    rationale: str,
    source_corpus: str,
    character: str | None = None,
    config: StyleConfig = DEFAULT_STYLE_CONFIG,
) -> StyleReport:
    """Pure function: identical inputs always produce identical reports."""
    report = StyleReport()
    for text in (question, rationale):
        stripped = text.strip().strip('"“”‘’\'').lstrip()
        lowered = stripped.casefold()
        for opening in config.formulaic_openings:
            if lowered.startswith(opening):
                report.violations.append(
                    StyleViolation("formulaic_opening", stripped[: len(opening)])
                )
        folded = text.casefold()
        for phrase in config.restricted_phrases:
            if phrase in folded:
                report.violations.append(StyleViolation("restricted_phrase", phrase))
        for term in config.jargon_terms:
            if re.search(rf"\b{re.escape(term)}\b", folded):
                report.violations.append(StyleViolation("jargon", term))
        if source_corpus.strip():
            if _space_ratio(source_corpus) < config.unsegmented_space_ratio:
                hit = _find_verbatim_chars(text, source_corpus, config.verbatim_char_ngram)
            else:
                hit = _find_verbatim_words(text, source_corpus, config.verbatim_word_ngram)
            if hit:
                report.violations.append(StyleViolation("verbatim_copy", hit))
        if character:
            name_re = re.compile(rf"\b{re.escape(character)}\b", re.IGNORECASE)
            for sentence in _SENTENCE_SPLIT.split(text):
                if _FIRST_PERSON.search(sentence) and name_re.search(sentence):
                    report.violations.append(
                        StyleViolation("pronoun_confusion", sentence.strip())
                    )
    return report
