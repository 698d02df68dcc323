"""The self-verification gate.

Every feedback candidate is scored against four criteria (evidence,
expression diversity, dimension relevance, impact/timing) and accepted or
rejected by a deterministic decision table. Evidence is additionally checked
locally: a quoted span that cannot be located in its named source fails the
evidence criterion no matter what the model judged.
"""

from __future__ import annotations

from dataclasses import dataclass

from .agents import EvidenceBundle, FeedbackCandidate
from .errors import ContractError, StructureError
from .providers import ChatRequest, Provider, collapse_ws, complete_structured
from .schemas import CRITERIA, FIVE_DIMENSIONS


@dataclass(frozen=True)
class CriterionResult:
    criterion: str
    passed: bool
    note: str

    def __post_init__(self) -> None:
        if self.criterion not in CRITERIA:
            raise ContractError(f"unknown criterion: {self.criterion!r}")
        if not self.passed and not self.note.strip():
            raise ContractError("failed criteria require a non-empty note")

    def to_dict(self) -> dict:
        return {"criterion": self.criterion, "passed": self.passed, "note": self.note}


@dataclass(frozen=True)
class Verdict:
    candidate_id: str
    results: tuple[CriterionResult, ...]
    usefulness: str | None
    accepted: bool

    def result_for(self, criterion: str) -> CriterionResult:
        for r in self.results:
            if r.criterion == criterion:
                return r
        raise KeyError(criterion)

    def to_dict(self) -> dict:
        return {
            "candidate_id": self.candidate_id,
            "results": [r.to_dict() for r in self.results],
            "usefulness": self.usefulness,
            "accepted": self.accepted,
        }


def decide(results: list[CriterionResult] | tuple[CriterionResult, ...],
           usefulness: str | None = None) -> bool:
    """Pure decision table.

    accept when all four criteria pass, or when only diversity fails and
    usefulness is high; any failure among evidence/dimensions/impact_timing
    rejects regardless of diversity, and a diversity failure combined with
    any other failure rejects too.
    """
    by_criterion = {}
    for result in results:
        if result.criterion in by_criterion:
            raise ContractError(f"duplicate criterion: {result.criterion}")
        by_criterion[result.criterion] = result
    missing = [c for c in CRITERIA if c not in by_criterion]
    if missing:
        raise ContractError(f"missing criteria: {', '.join(missing)}")

    diversity_failed = not by_criterion["diversity"].passed
    if diversity_failed and usefulness not in ("low", "high"):
        raise ContractError("usefulness is required when diversity failed")
    if not diversity_failed and usefulness is not None:
        raise ContractError("usefulness is only allowed when diversity failed")

    hard_failure = any(
        not by_criterion[c].passed for c in ("evidence", "dimensions", "impact_timing")
    )
    if hard_failure:
        return False
    if diversity_failed:
        return usefulness == "high"
    return True


def _normalize_for_match(text: str) -> str:
    return collapse_ws(text).casefold()


def span_locates(span: str, source_text: str | None) -> bool:
    if not source_text:
        return False
    return _normalize_for_match(span) in _normalize_for_match(source_text)


def verify_evidence_locally(candidate: FeedbackCandidate, bundle: EvidenceBundle) -> list[str]:
    """Return one note per evidence_ref whose span is not locatable."""
    misses = []
    for ref in candidate.evidence_refs:
        if not span_locates(ref.span, bundle.text_for_source(ref.source)):
            misses.append(f"span not found in {ref.source}: '{ref.span[:60]}'")
    return misses


def _render_evidence(candidate: FeedbackCandidate) -> str:
    if not candidate.evidence_refs:
        return "(none cited)"
    return "\n".join(f"- {r.source}: \"{r.span}\"" for r in candidate.evidence_refs)


def _assess(candidate: FeedbackCandidate, bundle: EvidenceBundle,
            provider: Provider, template_id: str) -> Verdict:
    # dimension tags are structurally limited to the five-dimension set;
    # assert the intersection before spending a provider call
    if not set(candidate.dimensions) & set(FIVE_DIMENSIONS):
        raise ContractError("candidate dimensions do not intersect the framework")

    def check(value: dict) -> None:
        if not value["diversity"]["passed"] and value.get("usefulness") not in ("low", "high"):
            raise ValueError("usefulness rating required when diversity failed")

    variables = {
        "question": candidate.question,
        "rationale": candidate.rationale,
        "dimensions": ", ".join(candidate.dimensions),
        "evidence": _render_evidence(candidate),
        "background": bundle.background or "(none)",
        "outline": bundle.outline or "(none)",
        "memories": bundle.memories_text() or "(none)",
        "scene_text": bundle.scene_text or "(none)",
        "line": bundle.action_or_dialogue or "(none)",
    }
    if template_id == "assess_posthoc":
        variables["screenplay"] = bundle.full_screenplay or "(none)"
        variables["experience"] = bundle.experience or "(none)"
    req = ChatRequest(
        template_id=template_id,
        variables=variables,
        expects_structure=True,
        schema_id="assessment",
        temperature=provider.config.temperature_evaluate,
        meta=dict(candidate.meta),
    )
    judged = complete_structured(req, provider, check=check)

    results = []
    for criterion in CRITERIA:
        row = judged[criterion]
        passed = bool(row["passed"])
        note = (row.get("note") or "").strip() or (
            "passed" if passed else "judged failed without rationale"
        )
        results.append(CriterionResult(criterion, passed, note))

    # local verification layered under the model's judgment: unverifiable
    # spans force the evidence criterion to failed
    misses = verify_evidence_locally(candidate, bundle)
    if misses:
        results[0] = CriterionResult("evidence", False, "; ".join(misses))

    usefulness = judged.get("usefulness") if not results[1].passed else None
    if not results[1].passed and usefulness not in ("low", "high"):
        raise StructureError("assessment lacked a usefulness rating for failed diversity")
    accepted = decide(results, usefulness)
    return Verdict(
        candidate_id=candidate.id,
        results=tuple(results),
        usefulness=usefulness,
        accepted=accepted,
    )


def assess_instant(candidate: FeedbackCandidate, bundle: EvidenceBundle,
                   provider: Provider) -> Verdict:
    if candidate.timing != "instant":
        raise ContractError("assess_instant requires an instant candidate")
    return _assess(candidate, bundle, provider, "assess_instant")


def assess_posthoc(candidate: FeedbackCandidate, bundle: EvidenceBundle,
                   provider: Provider) -> Verdict:
    if candidate.timing != "posthoc":
        raise ContractError("assess_posthoc requires a posthoc candidate")
    return _assess(candidate, bundle, provider, "assess_posthoc")
