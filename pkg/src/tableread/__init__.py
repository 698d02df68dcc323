"""tableread: screenplay table-read engine.

Character agents enact a script line by line, building private inner
thoughts on a dual memory, then step into the actor's chair to raise
feedback questions that only reach the writer after a four-criterion
self-verification gate.
"""

from .agents import Agent, EvidenceBundle, EvidenceRef, FeedbackCandidate, InnerThought
from .evaluation import CriterionResult, Verdict, assess_instant, assess_posthoc, decide
from .memory import (
    ContextWindow,
    LongTermStore,
    MemoryTrace,
    ShortTermMemory,
    append_trace,
    embed,
    recall,
    synthesize_context,
)
from .offline import OfflineProvider
from .orchestrator import (
    FeedbackItem,
    Mode,
    Session,
    SessionConfig,
    SessionReport,
    StepResult,
    ValueMark,
    build_report,
    create_session,
    export_marks,
    export_session,
    finish_scene,
    mark_value,
    run_all,
    step,
)
from .providers import (
    ChatRequest,
    HttpProvider,
    Provider,
    ProviderConfig,
    RecordingProvider,
    ScriptedProvider,
    Transcript,
    complete_structured,
)
from .screenplay import (
    ParsedScreenplay,
    ParserConfig,
    PersonaProfile,
    RawScreenplay,
    Scene,
    ScriptLine,
    build_persona,
    classify_lines,
    extract_characters,
    fallback_segment,
    normalize_body,
    parse_screenplay,
    segment_scenes,
)
from .style import StyleConfig, StyleReport, StyleViolation, is_first_person, lint_style

__version__ = "0.1.0"
