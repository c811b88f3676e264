"""Translator operations: generation, extraction, adjustment, sequencing.

The JSON-producing operations share one bounded correction loop: validate
the completion, and on failure re-prompt with the error block appended,
at most twice.  A run therefore costs at most 3 backend calls.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..engine.rules import RuleType, parse_rule_type_name
from ..intent import (
    IntentDocument,
    ParameterPatch,
    ValidationError,
    format_errors_for_regeneration,
    parse_intent_document,
    parse_parameter_patch,
)
from .backends import CompletionBackend
from .prompts import (
    SECTION_CLARIFY,
    SECTION_CORRECTION,
    PromptStore,
    build_prompt,
)

# Correction retries after the initial call ("n" in the loop design).
MAX_CORRECTION_RETRIES = 2


class StillInvalidAfterRetries(Exception):
    """The correction loop ran out of retries; carries the evidence."""

    def __init__(self, errors: list[ValidationError], raw: str, backend_calls: int):
        super().__init__(format_errors_for_regeneration(errors))
        self.errors = errors
        self.raw = raw
        self.backend_calls = backend_calls


class UnrecognizedRuleType(Exception):
    def __init__(self, raw: str):
        super().__init__(f"backend answer matches no rule type: {raw!r}")
        self.raw = raw


class EmptySequence(Exception):
    pass


@dataclass
class IntentResult:
    document: IntentDocument
    raw: str
    backend_calls: int


@dataclass
class PatchResult:
    patch: ParameterPatch
    raw: str
    backend_calls: int


def _correction_loop(operation: str, payload: str, store: PromptStore,
                     backend: CompletionBackend, parser):
    base_prompt = build_prompt(operation, store, payload)
    prompt = base_prompt
    calls = 0
    raw = ""
    errors: list[ValidationError] = []
    for _attempt in range(1 + MAX_CORRECTION_RETRIES):
        raw = backend.complete(prompt)
        calls += 1
        value, errors = parser(raw)
        if value is not None:
            return value, raw, calls
        prompt = (
            base_prompt
            + f"\n\n{SECTION_CORRECTION}\nThe previous output failed validation."
            + f"\nPrevious output:\n{raw}\nErrors:\n"
            + format_errors_for_regeneration(errors)
            + "\nReturn only the corrected JSON object."
        )
    raise StillInvalidAfterRetries(errors, raw, calls)


def generate_intent(user_text: str, store: PromptStore,
                    backend: CompletionBackend) -> IntentResult:
    """User message -> validated intent document, through the correction loop."""
    if not user_text.strip():
        raise ValueError("user text must be non-empty")
    document, raw, calls = _correction_loop(
        "code_generation", user_text, store, backend, parse_intent_document)
    return IntentResult(document=document, raw=raw, backend_calls=calls)


def adjust_parameters(description: str, store: PromptStore,
                      backend: CompletionBackend) -> PatchResult:
    """Parameter instruction -> validated patch, through the correction loop."""
    if not description.strip():
        raise ValueError("description must be non-empty")
    patch, raw, calls = _correction_loop(
        "parameter_adjustment", description, store, backend, parse_parameter_patch)
    return PatchResult(patch=patch, raw=raw, backend_calls=calls)


def extract_rule_type(description: str, store: PromptStore,
                      backend: CompletionBackend) -> RuleType:
    """Rule description -> one of the six rule types.

    The answer is normalized (case and punctuation insensitive); if it
    matches nothing, one clarifying retry enumerates the legal names.
    """
    if not description.strip():
        raise ValueError("description must be non-empty")
    prompt = build_prompt("rule_extraction", store, description)
    raw = backend.complete(prompt)
    rule_type = parse_rule_type_name(raw)
    if rule_type is not None:
        return rule_type
    names = ", ".join(t.value for t in RuleType)
    retry_prompt = (prompt + f"\n\n{SECTION_CLARIFY}\nAnswer with exactly one of: "
                    + names + ".")
    raw = backend.complete(retry_prompt)
    rule_type = parse_rule_type_name(raw)
    if rule_type is None:
        raise UnrecognizedRuleType(raw)
    return rule_type


_LINE_PREFIX = re.compile(r"^\s*(?:[-*]|\d+[.)])?\s*")


def generate_rule_sequence(model_description: str, catalog_names: list[str],
                           store: PromptStore, backend: CompletionBackend) -> list[str]:
    """Model description -> rule descriptions in application order.

    The backend lists rules by descending space occupancy; application
    must run smallest-first, so the returned list is the backend order
    reversed.
    """
    payload = (model_description.strip()
               + "\nAvailable ingredients: " + ", ".join(catalog_names))
    prompt = build_prompt("rule_sequence", store, payload)
    raw = backend.complete(prompt)
    lines = [_LINE_PREFIX.sub("", line).strip() for line in raw.splitlines()]
    lines = [line for line in lines if line]
    if not lines:
        raise EmptySequence(f"backend produced no rule descriptions for "
                            f"{model_description!r}")
    return list(reversed(lines))


def advise(question: str, store: PromptStore, backend: CompletionBackend) -> str:
    """Pass-through advisor completion, returned verbatim for display."""
    prompt = build_prompt("advisor", store, question)
    return backend.complete(prompt)
