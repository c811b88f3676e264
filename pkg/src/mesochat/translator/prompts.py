"""Prompt assembly and the persisted example store.

Every translator operation runs from the same prompt skeleton: a task
description, optional expert decision logic, the fixture examples, any
user-feedback examples (oldest first), and finally the payload.  User
corrections append to the feedback section, so a store that has seen a
correction produces better prompts from then on without touching any
model weights.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

OPERATIONS = (
    "code_generation",
    "rule_extraction",
    "parameter_adjustment",
    "advisor",
    "rule_sequence",
)

# Bounded prompt size: oldest feedback examples are evicted past this.
FEEDBACK_CAP = 50

SECTION_TASK = "## Task:"
SECTION_LOGIC = "## Decision logic"
SECTION_EXAMPLES = "## Examples"
SECTION_FEEDBACK = "## Feedback examples"
SECTION_INPUT = "## Input"
SECTION_CORRECTION = "## Correction"
SECTION_CLARIFY = "## Clarify"


class UnknownOperation(Exception):
    pass


class InvalidCorrection(Exception):
    pass


@dataclass
class OperationPrompts:
    task_description: str
    initial_examples: list[tuple[str, str]] = field(default_factory=list)
    feedback_examples: list[tuple[str, str, str]] = field(default_factory=list)
    decision_logic: str = ""

    def to_dict(self) -> dict:
        out = {
            "task_description": self.task_description,
            "initial_examples": [list(pair) for pair in self.initial_examples],
            "feedback_examples": [list(entry) for entry in self.feedback_examples],
        }
        if self.decision_logic:
            out["decision_logic"] = self.decision_logic
        return out

    @staticmethod
    def from_dict(data: dict) -> "OperationPrompts":
        return OperationPrompts(
            task_description=data["task_description"],
            initial_examples=[tuple(p) for p in data.get("initial_examples", [])],
            feedback_examples=[tuple(p) for p in data.get("feedback_examples", [])],
            decision_logic=data.get("decision_logic", ""),
        )


class PromptStore:
    """Per-operation prompt material, persisted one JSON file per operation."""

    def __init__(self, records: dict[str, OperationPrompts],
                 directory: Optional[Path] = None):
        self.records = records
        self.directory = Path(directory) if directory else None
        # The store is shared across sessions; appends are single-writer.
        self._write_lock = threading.Lock()

    def record(self, operation: str) -> OperationPrompts:
        if operation not in self.records:
            raise UnknownOperation(f"unknown translator operation {operation!r}")
        return self.records[operation]

    def append_feedback(self, operation: str, input_text: str, output_text: str) -> None:
        rec = self.record(operation)
        stamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
        with self._write_lock:
            rec.feedback_examples.append((input_text, output_text, stamp))
            if len(rec.feedback_examples) > FEEDBACK_CAP:
                del rec.feedback_examples[: len(rec.feedback_examples) - FEEDBACK_CAP]
            self.save()

    def save(self, directory: Optional[Path] = None) -> None:
        target = Path(directory) if directory else self.directory
        if target is None:
            return
        target.mkdir(parents=True, exist_ok=True)
        for operation, rec in self.records.items():
            path = target / f"{operation}.json"
            path.write_text(json.dumps(rec.to_dict(), indent=2) + "\n", encoding="utf-8")

    @staticmethod
    def load(directory) -> "PromptStore":
        """Load a store; operations without a file fall back to built-in defaults."""
        directory = Path(directory)
        base = default_records()
        for operation in OPERATIONS:
            path = directory / f"{operation}.json"
            if path.exists():
                base[operation] = OperationPrompts.from_dict(
                    json.loads(path.read_text(encoding="utf-8")))
        return PromptStore(base, directory=directory)

    @staticmethod
    def default(directory: Optional[Path] = None) -> "PromptStore":
        return PromptStore(default_records(), directory=directory)


def build_prompt(operation: str, store: PromptStore, payload: str) -> str:
    """Deterministic prompt: task, (logic), examples, feedback, payload."""
    rec = store.record(operation)
    parts = [f"{SECTION_TASK} {operation}\n{rec.task_description.strip()}"]
    if rec.decision_logic:
        parts.append(f"{SECTION_LOGIC}\n{rec.decision_logic.strip()}")
    if rec.initial_examples:
        blocks = [f"Input: {inp}\nOutput: {out}" for inp, out in rec.initial_examples]
        parts.append(SECTION_EXAMPLES + "\n" + "\n\n".join(blocks))
    if rec.feedback_examples:
        blocks = [f"Input: {inp}\nOutput: {out}" for inp, out, _ in rec.feedback_examples]
        parts.append(SECTION_FEEDBACK + "\n" + "\n\n".join(blocks))
    parts.append(f"{SECTION_INPUT}\n{payload}")
    return "\n\n".join(parts)


def record_feedback(operation: str, input_text: str, corrected_output: str,
                    store: PromptStore) -> PromptStore:
    """Validate and append a user correction; rejects outputs the pipeline
    could not consume so the store never poisons later prompts."""
    from ..engine.rules import parse_rule_type_name
    from ..intent import parse_intent_document, parse_parameter_patch

    if operation not in OPERATIONS:
        raise UnknownOperation(f"unknown translator operation {operation!r}")
    if operation == "code_generation":
        doc, errors = parse_intent_document(corrected_output)
        if doc is None:
            raise InvalidCorrection(
                "corrected output is not a valid intent document: "
                + "; ".join(str(e) for e in errors))
    elif operation == "parameter_adjustment":
        patch, errors = parse_parameter_patch(corrected_output)
        if patch is None:
            raise InvalidCorrection(
                "corrected output is not a valid parameter patch: "
                + "; ".join(str(e) for e in errors))
    elif operation == "rule_extraction":
        if parse_rule_type_name(corrected_output) is None:
            raise InvalidCorrection(
                f"corrected output {corrected_output!r} is not a rule type name")
    else:
        if not corrected_output.strip():
            raise InvalidCorrection("corrected output must be non-empty")
    store.append_feedback(operation, input_text, corrected_output)
    return store


# --- built-in fixture material ------------------------------------------------

_BLOOD_PLASMA_SEQUENCE = "\n".join([
    "Add Albumin into the box to occupy 5% of the space",
    "Add Immunoglobulin G into the box to occupy 4% of the space",
    "Add Fibrinogen into the box to occupy 3% of the space",
    "Add Immunoglobulin M into the box to occupy 3% of the space",
    "Add Transferrin into the box to occupy 2% of the space",
    "Add Haptoglobin into the box to occupy 2% of the space",
    "Add Apolipoprotein into the box to occupy 2% of the space",
    "Add Heparin into the box to occupy 2% of the space",
])


def blood_plasma_sequence() -> str:
    """Fixture rule descriptions, most space-occupying first."""
    return _BLOOD_PLASMA_SEQUENCE


def default_records() -> dict[str, OperationPrompts]:
    return {
        "code_generation": OperationPrompts(
            task_description=(
                "Translate one user message from a modeling conversation into a JSON\n"
                "intent object. Allowed keys: selectIngredient, selectSkeleton,\n"
                "createRule, editRule, saveModel, loadModel, updatePivot,\n"
                "updatePosition, highlightIngredient, modifyColor, changeMode,\n"
                "labeling. selectIngredient, selectSkeleton, highlightIngredient and\n"
                "modifyColor are arrays of records. Include only intents the message\n"
                "states or clearly implies, and return exactly one JSON object."),
            initial_examples=[
                ("Populate the Au atom uniformly on a rectangle skeleton",
                 '{"selectIngredient": [{"ingredient": "Au"}], '
                 '"selectSkeleton": [{"skeleton": "rectangle"}], '
                 '"createRule": "Populate the Au atom uniformly on a rectangle skeleton"}'),
                ("make the lipids red and highlight them",
                 '{"modifyColor": [{"ingredient": "lipid", "color": [1.0, 0.0, 0.0]}], '
                 '"highlightIngredient": [{"ingredient": "lipid"}]}'),
                ("save the model",
                 '{"saveModel": true}'),
            ],
        ),
        "rule_extraction": OperationPrompts(
            task_description=(
                "Classify a rule description into exactly one of: parent-child\n"
                "(distance), parent-child (relative), siblings, siblings-parent,\n"
                "fill, connection. Answer with the type name only."),
            decision_logic=(
                "1. Two different ingredient types joined by a curve or linker means\n"
                "   a connection rule.\n"
                "2. Elements spreading through a volume or occupying space uniformly\n"
                "   in or on a skeleton means a fill rule.\n"
                "3. Placement anchored to a specific skeleton vertex means a\n"
                "   parent-child (relative) rule.\n"
                "4. Elements repeating side by side while staying constrained to the\n"
                "   skeleton surface means a siblings-parent rule.\n"
                "5. Elements repeating by copying a transform between neighbors means\n"
                "   a siblings rule.\n"
                "6. Elements sitting at a given distance above or below the skeleton\n"
                "   surface means a parent-child (distance) rule."),
            initial_examples=[
                ("Add Heparin into the box to occupy 2% of the space", "fill"),
                ("Populate the Au atom uniformly on a rectangle skeleton", "fill"),
                ("create curves between HDT and SpyCatcher instances", "connection"),
                ("populate lipids at distance 3 above the membrane surface",
                 "parent-child (distance)"),
            ],
        ),
        "parameter_adjustment": OperationPrompts(
            task_description=(
                "Translate a parameter instruction into a JSON object with any of:\n"
                "elements (int), distance (number), collisionDetection (bool),\n"
                "space (int percent), alignDirection (normal | inverse-normal),\n"
                "length (number), curve (string), tweaking (string), std (number).\n"
                "Return exactly one JSON object with only the mentioned fields."),
            initial_examples=[
                ("I would like to populate 1000 lipids on the skeleton surface.",
                 '{"elements": 1000, "distance": 0.0}'),
                ("occupy 2% of the space", '{"space": 2}'),
                ("no collision checks please", '{"collisionDetection": false}'),
            ],
        ),
        "advisor": OperationPrompts(
            task_description=(
                "Give practical modeling guidance: which structures to model first,\n"
                "which rules fit which substructures, and sensible parameter ranges.\n"
                "Answer in plain prose."),
            initial_examples=[
                ("Which part of SARS-CoV-2 should I model first?",
                 "Start with the envelope membrane as the space-defining surface, "
                 "then place the spike proteins on it, then fill the interior."),
            ],
        ),
        "rule_sequence": OperationPrompts(
            task_description=(
                "Turn one model description into a sequence of rule descriptions,\n"
                "one per line, ordered by descending share of occupied space. Use\n"
                "only ingredients from the provided list."),
            initial_examples=[
                ("Generate a blood plasma model inside a box.", _BLOOD_PLASMA_SEQUENCE),
            ],
        ),
    }
