"""Natural-language translation layer with a pluggable completion backend."""

from .backends import BackendUnavailable, CompletionBackend, MockBackend, RemoteBackend
from .operations import (
    EmptySequence,
    IntentResult,
    PatchResult,
    StillInvalidAfterRetries,
    UnrecognizedRuleType,
    adjust_parameters,
    advise,
    extract_rule_type,
    generate_intent,
    generate_rule_sequence,
)
from .prompts import (
    OPERATIONS,
    InvalidCorrection,
    PromptStore,
    UnknownOperation,
    build_prompt,
    record_feedback,
)

__all__ = [
    "OPERATIONS",
    "BackendUnavailable",
    "CompletionBackend",
    "EmptySequence",
    "IntentResult",
    "InvalidCorrection",
    "MockBackend",
    "PatchResult",
    "PromptStore",
    "RemoteBackend",
    "StillInvalidAfterRetries",
    "UnknownOperation",
    "UnrecognizedRuleType",
    "adjust_parameters",
    "advise",
    "build_prompt",
    "extract_rule_type",
    "generate_intent",
    "generate_rule_sequence",
    "record_feedback",
]
