"""The two JSON grammars spoken between the translator and the engine."""

from .documents import (
    INTENT_KEYS,
    PATCH_KEYS,
    IntentDocument,
    ParameterPatch,
    PivotRef,
    PositionRef,
    ValidationError,
    format_errors_for_regeneration,
    parse_intent_document,
    parse_parameter_patch,
    serialize_intent_document,
    serialize_parameter_patch,
    strip_code_fences,
)

__all__ = [
    "INTENT_KEYS",
    "PATCH_KEYS",
    "IntentDocument",
    "ParameterPatch",
    "PivotRef",
    "PositionRef",
    "ValidationError",
    "format_errors_for_regeneration",
    "parse_intent_document",
    "parse_parameter_patch",
    "serialize_intent_document",
    "serialize_parameter_patch",
    "strip_code_fences",
]
