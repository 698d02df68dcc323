"""JSON Schemas: structured provider outputs and the documents the engine emits.

Provider-output schemas gate complete_structured(); document schemas let tests
validate every serialized artifact (parsed screenplay, session export, report,
marks export, API bodies).
"""

FIVE_DIMENSIONS = (
    "character_emotions",
    "behavioral_motivation",
    "character_relationships",
    "plot_pacing",
    "thematic_consistency",
)

EVIDENCE_SOURCES = (
    "authoritative_background",
    "story_outline",
    "relevant_memories",
    "current_scene_text",
    "current_action_or_dialogue",
)

CRITERIA = ("evidence", "diversity", "dimensions", "impact_timing")

_nonempty = {"type": "string", "minLength": 1}

SEGMENT_SCHEMA = {
    "type": "object",
    "required": ["scenes"],
    "properties": {
        "scenes": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["heading", "start_line", "end_line"],
                "properties": {
                    "heading": _nonempty,
                    "start_line": {"type": "integer", "minimum": 0},
                    "end_line": {"type": "integer", "minimum": 1},
                },
            },
        }
    },
}

CLASSIFY_SCHEMA = {
    "type": "object",
    "required": ["lines"],
    "properties": {
        "lines": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["kind"],
                "properties": {
                    "kind": {"enum": ["heading", "action", "dialogue"]},
                    "speaker": {"type": ["string", "null"]},
                },
            },
        }
    },
}

PERSONA_SCHEMA = {
    "type": "object",
    "required": ["background", "traits", "goals", "motivations"],
    "properties": {
        "background": _nonempty,
        "traits": {"type": "array", "minItems": 1, "items": _nonempty},
        "goals": _nonempty,
        "motivations": _nonempty,
    },
}

THOUGHT_SCHEMA = {
    "type": "object",
    "required": ["interpretation", "recall_notes", "objective", "synthesis"],
    "properties": {
        "interpretation": _nonempty,
        "recall_notes": _nonempty,
        "objective": _nonempty,
        "synthesis": _nonempty,
    },
}

CANDIDATES_SCHEMA = {
    "type": "object",
    "required": ["candidates"],
    "properties": {
        "candidates": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["question", "rationale", "dimensions", "evidence"],
                "properties": {
                    "question": _nonempty,
                    "rationale": _nonempty,
                    "dimensions": {
                        "type": "array",
                        "minItems": 1,
                        "items": {"enum": list(FIVE_DIMENSIONS)},
                    },
                    "evidence": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["source", "span"],
                            "properties": {
                                "source": {"enum": list(EVIDENCE_SOURCES)},
                                "span": _nonempty,
                            },
                        },
                    },
                },
            },
        }
    },
}

_criterion_judgment = {
    "type": "object",
    "required": ["passed"],
    "properties": {"passed": {"type": "boolean"}, "note": {"type": "string"}},
}

ASSESSMENT_SCHEMA = {
    "type": "object",
    "required": list(CRITERIA),
    "properties": {
        "evidence": _criterion_judgment,
        "diversity": _criterion_judgment,
        "dimensions": _criterion_judgment,
        "impact_timing": _criterion_judgment,
        "usefulness": {"enum": ["low", "high"]},
    },
}

SUMMARY_SCHEMA = {
    "type": "object",
    "required": ["description"],
    "properties": {"description": _nonempty},
}

# every structured template id maps to the schema its output must satisfy
SCHEMAS = {
    "segment": SEGMENT_SCHEMA,
    "classify": CLASSIFY_SCHEMA,
    "persona": PERSONA_SCHEMA,
    "thought": THOUGHT_SCHEMA,
    "candidates": CANDIDATES_SCHEMA,
    "assessment": ASSESSMENT_SCHEMA,
    "summary": SUMMARY_SCHEMA,
}


# ---------------------------------------------------------------------------
# document schemas (validation surface for tests and the service)

SCRIPT_LINE_SCHEMA = {
    "type": "object",
    "required": ["scene_index", "line_index", "kind", "text"],
    "properties": {
        "scene_index": {"type": "integer", "minimum": 0},
        "line_index": {"type": "integer", "minimum": 0},
        "kind": {"enum": ["heading", "action", "dialogue"]},
        "speaker": {"type": ["string", "null"]},
        "text": {"type": "string"},
    },
}

PARSED_SCREENPLAY_SCHEMA = {
    "type": "object",
    "required": ["schema_version", "title", "scenes", "lines", "characters", "personas"],
    "properties": {
        "schema_version": {"type": "integer"},
        "title": {"type": "string"},
        "scenes": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["index", "heading", "body_lines", "heading_is_line"],
                "properties": {
                    "index": {"type": "integer", "minimum": 0},
                    "heading": _nonempty,
                    "body_lines": {"type": "array", "items": {"type": "string"}},
                    "heading_is_line": {"type": "boolean"},
                },
            },
        },
        "lines": {"type": "array", "items": SCRIPT_LINE_SCHEMA},
        "characters": {"type": "array", "items": _nonempty},
        "personas": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "required": ["character", "background", "traits", "goals", "motivations", "source"],
                "properties": {
                    "source": {"enum": ["authoritative_bio", "synthesized", "merged"]}
                },
            },
        },
        "diagnostics": {"type": "array", "items": {"type": "string"}},
    },
}

INNER_THOUGHT_SCHEMA = {
    "type": "object",
    "required": [
        "id", "agent", "scene_index", "line_index",
        "interpretation", "recall_notes", "objective", "synthesis",
    ],
    "properties": {
        "id": _nonempty,
        "agent": _nonempty,
        "scene_index": {"type": "integer", "minimum": 0},
        "line_index": {"type": "integer", "minimum": 0},
        "interpretation": _nonempty,
        "recall_notes": _nonempty,
        "objective": _nonempty,
        "synthesis": _nonempty,
        "marked": {"type": "boolean"},
    },
}

CANDIDATE_SCHEMA = {
    "type": "object",
    "required": [
        "id", "agent_or_source", "timing", "scene_index",
        "question", "rationale", "dimensions", "evidence_refs",
    ],
    "properties": {
        "id": _nonempty,
        "agent_or_source": _nonempty,
        "timing": {"enum": ["instant", "posthoc"]},
        "scene_index": {"type": "integer", "minimum": 0},
        "line_index": {"type": ["integer", "null"]},
        "question": _nonempty,
        "rationale": _nonempty,
        "dimensions": {
            "type": "array",
            "minItems": 1,
            "items": {"enum": list(FIVE_DIMENSIONS)},
        },
        "evidence_refs": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["source", "span"],
                "properties": {
                    "source": {"enum": list(EVIDENCE_SOURCES)},
                    "span": _nonempty,
                },
            },
        },
    },
}

VERDICT_SCHEMA = {
    "type": "object",
    "required": ["candidate_id", "results", "usefulness", "accepted"],
    "properties": {
        "candidate_id": _nonempty,
        "results": {
            "type": "array",
            "minItems": 4,
            "maxItems": 4,
            "items": {
                "type": "object",
                "required": ["criterion", "passed", "note"],
                "properties": {
                    "criterion": {"enum": list(CRITERIA)},
                    "passed": {"type": "boolean"},
                    "note": {"type": "string"},
                },
            },
        },
        "usefulness": {"enum": ["low", "high", None]},
        "accepted": {"type": "boolean"},
    },
}

FEEDBACK_ITEM_SCHEMA = {
    "type": "object",
    "required": ["candidate", "verdict", "marked"],
    "properties": {
        "candidate": CANDIDATE_SCHEMA,
        "verdict": VERDICT_SCHEMA,
        "marked": {"type": "boolean"},
    },
}

STEP_RESULT_SCHEMA = {
    "type": "object",
    "required": ["line", "inner_thought", "accepted_instant", "scene_complete"],
    "properties": {
        "line": SCRIPT_LINE_SCHEMA,
        "inner_thought": {"oneOf": [INNER_THOUGHT_SCHEMA, {"type": "null"}]},
        "accepted_instant": {"type": "array", "items": FEEDBACK_ITEM_SCHEMA},
        "scene_complete": {"type": "boolean"},
    },
}

MARK_SCHEMA = {
    "type": "object",
    "required": [
        "target_id", "character", "scene_content", "scene_number",
        "feedback_type", "created_at",
    ],
    "properties": {
        "target_id": _nonempty,
        "character": _nonempty,
        "scene_content": {"type": "string"},
        "scene_number": {"type": "integer", "minimum": 0},
        "feedback_type": {"enum": ["inner_thought", "instant", "posthoc"]},
        "created_at": _nonempty,
    },
}

# standalone marks export: exactly the four metadata fields per entry
MARKS_EXPORT_SCHEMA = {
    "type": "array",
    "items": {
        "type": "object",
        "required": ["character", "scene_content", "scene_number", "feedback_type"],
        "additionalProperties": False,
        "properties": {
            "character": _nonempty,
            "scene_content": {"type": "string"},
            "scene_number": {"type": "integer", "minimum": 0},
            "feedback_type": {"enum": ["inner_thought", "instant", "posthoc"]},
        },
    },
}

SESSION_EXPORT_SCHEMA = {
    "type": "object",
    "required": [
        "schema_version", "id", "mode", "activated", "cursor",
        "public_context", "inner_thoughts", "feedback_log", "verdicts",
        "marks", "screenplay",
    ],
    "properties": {
        "schema_version": {"type": "integer"},
        "id": _nonempty,
        "mode": {"enum": ["EvalPE", "ExpPE", "EvalNoPE", "RevNoPE"]},
        "activated": {"type": "array", "items": _nonempty},
        "cursor": {"type": "integer", "minimum": 0},
        "public_context": {"type": "array", "items": SCRIPT_LINE_SCHEMA},
        "inner_thoughts": {"type": "array", "items": INNER_THOUGHT_SCHEMA},
        "feedback_log": {"type": "array", "items": FEEDBACK_ITEM_SCHEMA},
        "verdicts": {"type": "array", "items": VERDICT_SCHEMA},
        "marks": {"type": "array", "items": MARK_SCHEMA},
        "screenplay": PARSED_SCREENPLAY_SCHEMA,
    },
}

REPORT_SCHEMA = {
    "type": "object",
    "required": [
        "schema_version", "session_id", "mode", "instant_count", "posthoc_count",
        "per_dimension", "per_source", "candidates_assessed", "accepted_count",
        "acceptance_rate", "items",
    ],
    "properties": {
        "schema_version": {"type": "integer"},
        "session_id": _nonempty,
        "mode": {"enum": ["EvalPE", "ExpPE", "EvalNoPE", "RevNoPE"]},
        "instant_count": {"type": "integer", "minimum": 0},
        "posthoc_count": {"type": "integer", "minimum": 0},
        "per_dimension": {
            "type": "object",
            "required": list(FIVE_DIMENSIONS),
            "additionalProperties": {"type": "integer"},
        },
        "per_source": {"type": "object", "additionalProperties": {"type": "integer"}},
        "candidates_assessed": {"type": "integer", "minimum": 0},
        "accepted_count": {"type": "integer", "minimum": 0},
        "acceptance_rate": {"type": "number", "minimum": 0, "maximum": 1},
        "items": {"type": "array", "items": FEEDBACK_ITEM_SCHEMA},
    },
}

ERROR_BODY_SCHEMA = {
    "type": "object",
    "required": ["code", "message"],
    "properties": {"code": _nonempty, "message": _nonempty},
}
