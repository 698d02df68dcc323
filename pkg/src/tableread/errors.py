"""Exception taxonomy shared across the engine."""


class TableReadError(Exception):
    """Base class for all engine errors."""


class ProviderError(TableReadError):
    """A model-provider call failed."""


class TransportError(ProviderError):
    """Network / HTTP-level failure talking to the provider."""


class AuthError(ProviderError):
    """Missing or rejected provider credential."""


class StructureError(ProviderError):
    """Structured output stayed invalid after the bounded retries."""


class ScriptMiss(ProviderError):
    """Scripted provider has no recorded response for this request."""


class DimensionMismatch(ProviderError):
    """Provider returned embeddings of inconsistent or unexpected dimension."""


class ClassificationError(TableReadError):
    """Line classification stayed invalid after the bounded retries."""


class ContractError(TableReadError):
    """Caller violated an operation's input contract."""


class UnknownCharacter(TableReadError):
    """An activated name is not a character of the screenplay."""


class InvalidModeConfig(TableReadError):
    """Session mode/activation combination is not allowed."""


class EndOfScreenplay(TableReadError):
    """The cursor is already past the last line."""


class SceneIncomplete(TableReadError):
    """finish_scene called before every line of the scene was revealed."""


class UnknownTarget(TableReadError):
    """mark_value target id does not exist in this session."""


class DocumentNotFound(TableReadError):
    """Document store has no document with this kind/id."""


class CorruptDocument(TableReadError):
    """Stored document failed envelope/schema validation on read."""
