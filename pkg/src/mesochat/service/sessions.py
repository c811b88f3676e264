"""Conversational sessions: intent interpretation and action execution.

A session owns one scene and processes turns strictly in order.  Each
turn runs generate -> interpret -> execute; execution stops at the first
failing action and reports its index, leaving the scene exactly as of
the last successful action.  Name selections that match several catalog
entries suspend the turn into a pending selection that only a choice (or
cancel) can resolve.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

from ..engine import (
    RuleType,
    Scene,
    apply_rule,
    create_rule,
    edit_rule,
    load_scene,
    revert_rule,
    save_scene,
    update_pivot,
    update_position,
)
from ..engine.errors import EngineError
from ..engine.rules import parse_rule_type_name
from ..intent import (
    IntentDocument,
    PositionRef,
    parse_intent_document,
    parse_parameter_patch,
    serialize_intent_document,
)
from ..translator import (
    BackendUnavailable,
    CompletionBackend,
    EmptySequence,
    PromptStore,
    StillInvalidAfterRetries,
    UnrecognizedRuleType,
    adjust_parameters,
    advise,
    extract_rule_type,
    generate_intent,
    generate_rule_sequence,
    record_feedback,
)
from ..translator.prompts import InvalidCorrection
from .catalog import Catalog

ADVICE_PREFIX = "advice:"
AUTOMATIC_PREFIX = "auto:"

# Fixed execution order of intent fields within one turn.
_FIELD_ORDER = [
    ("select_ingredient", "SelectIngredient"),
    ("select_skeleton", "SelectSkeleton"),
    ("update_pivot", "UpdatePivot"),
    ("update_position", "UpdatePosition"),
    ("create_rule", "CreateRule"),
    ("edit_rule", "EditRule"),
    ("highlight_ingredient", "Highlight"),
    ("modify_color", "ModifyColor"),
    ("change_mode", "ChangeMode"),
    ("labeling", "Labeling"),
    ("save_model", "SaveModel"),
    ("load_model", "LoadModel"),
]


class SessionError(Exception):
    pass


class AmbiguousSelectionPending(SessionError):
    pass


class UnknownIngredient(SessionError):
    pass


class UnknownSkeleton(SessionError):
    pass


class NoRuleContext(SessionError):
    pass


@dataclass
class Action:
    kind: str
    payload: Any = None


@dataclass
class PendingSelection:
    kind: str  # "ingredient" | "skeleton"
    query: str
    candidates: list[str]
    remaining_names: list[str]
    remaining_actions: list[Action]

    def to_dict(self) -> dict:
        return {"kind": self.kind, "query": self.query, "candidates": self.candidates}


@dataclass
class TurnOutcome:
    ok: bool = True
    messages: list[str] = field(default_factory=list)
    errors: list[dict] = field(default_factory=list)
    pending_selection: Optional[dict] = None
    created_rules: list[int] = field(default_factory=list)
    applied: list[dict] = field(default_factory=list)
    reverted: list[int] = field(default_factory=list)
    intent: Optional[str] = None  # serialized intent wire form
    raw_output: Optional[str] = None
    failed_operation: Optional[str] = None  # translator op to correct via feedback
    failed_input: Optional[str] = None
    failed_action_index: Optional[int] = None
    advice: Optional[str] = None
    step_index: Optional[int] = None  # automatic mode
    turn_index: Optional[int] = None
    replaces_turn: Optional[int] = None
    instance_count: int = 0
    rule_count: int = 0

    def to_dict(self) -> dict:
        return {k: v for k, v in self.__dict__.items()}


@dataclass
class TurnRecord:
    kind: str  # message | select | apply | revert | automatic | feedback
    user_text: str
    intent: Optional[str] = None
    raw_output: Optional[str] = None
    outcome: Optional[TurnOutcome] = None


def levenshtein(a: str, b: str) -> int:
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            current.append(min(previous[j] + 1, current[j - 1] + 1,
                               previous[j - 1] + (ca != cb)))
        previous = current
    return previous[-1]


def fuzzy_candidates(query: str, names) -> list[str]:
    """Case-insensitive substring match first, then edit distance <= 2; cap 8."""
    q = query.lower().strip()
    exact = [n for n in names if n.lower() == q]
    if exact:
        return exact
    subs = sorted(n for n in names if q in n.lower() or n.lower() in q)
    if subs:
        return subs[:8]
    close = sorted(n for n in names if levenshtein(q, n.lower()) <= 2)
    return close[:8]


def _id_ranges(ids: list[int]) -> list[list[int]]:
    """Compress sorted ids into inclusive [start, end] ranges."""
    ranges = []
    for _, group in itertools.groupby(enumerate(sorted(ids)), lambda p: p[1] - p[0]):
        block = [g[1] for g in group]
        ranges.append([block[0], block[-1]])
    return ranges


class Session:
    """One conversation: a scene, its catalogs, and the turn machinery."""

    _counter = itertools.count(1)

    def __init__(self, catalog: Catalog, store: PromptStore,
                 backend: CompletionBackend, seed: int = 0,
                 model_path: str = "model.json"):
        self.id = next(Session._counter)
        self.catalog = Catalog(ingredients=dict(catalog.ingredients),
                               skeletons=dict(catalog.skeletons))
        self.store = store
        self.backend = backend
        self.scene = Scene(seed=seed)
        self.model_path = model_path
        self.selected_ingredients: list[str] = []
        self.selected_skeleton: Optional[str] = None
        self.pending_selection: Optional[PendingSelection] = None
        self.last_rule_id: Optional[int] = None
        self.history: list[TurnRecord] = []
        self.listeners: list[Callable[[dict], None]] = []

    # --- events ------------------------------------------------------------
    def _emit(self, event: dict) -> None:
        for listener in list(self.listeners):
            listener(event)

    def _finish(self, record: TurnRecord, outcome: TurnOutcome,
                pre_ids: set[int], pre_view: dict) -> TurnOutcome:
        outcome.instance_count = len(self.scene.instances)
        outcome.rule_count = len(self.scene.rules)
        record.outcome = outcome
        self.history.append(record)
        outcome.turn_index = len(self.history) - 1
        post_ids = {i.id for i in self.scene.instances}
        delta = {
            "type": "scene-delta",
            "added": _id_ranges(sorted(post_ids - pre_ids)),
            "removed": sorted(pre_ids - post_ids),
            "view": self.scene.view.to_dict(),
            "instance_count": len(self.scene.instances),
        }
        self._emit({"type": "turn", "outcome": outcome.to_dict()})
        if delta["added"] or delta["removed"] or delta["view"] != pre_view:
            self._emit(delta)
        return outcome

    def _snapshot_pre(self) -> tuple[set[int], dict]:
        return {i.id for i in self.scene.instances}, self.scene.view.to_dict()

    # --- interpretation ------------------------------------------------------
    def interpret(self, doc: IntentDocument) -> list[Action]:
        """Map present intent fields to actions in the fixed execution order."""
        actions: list[Action] = []
        for attr, kind in _FIELD_ORDER:
            value = getattr(doc, attr)
            if value is None:
                continue
            actions.append(Action(kind=kind, payload=value))
        return actions

    # --- public turn entry points ---------------------------------------------
    def handle_turn(self, user_text: str) -> TurnOutcome:
        pre = self._snapshot_pre()
        record = TurnRecord(kind="message", user_text=user_text)
        lowered = user_text.strip().lower()

        if self.pending_selection is not None:
            if lowered == "cancel":
                self.pending_selection = None
                return self._finish(record, TurnOutcome(
                    messages=["selection cancelled"]), *pre)
            outcome = TurnOutcome(ok=False, errors=[{
                "message": "a selection is pending; choose a candidate or say 'cancel'",
                "kind": "AmbiguousSelectionPending",
            }], pending_selection=self.pending_selection.to_dict())
            return self._finish(record, outcome, *pre)

        if lowered.startswith(ADVICE_PREFIX):
            question = user_text.strip()[len(ADVICE_PREFIX):].strip()
            try:
                answer = advise(question, self.store, self.backend)
                outcome = TurnOutcome(messages=[answer], advice=answer)
            except BackendUnavailable as exc:
                outcome = TurnOutcome(ok=False, errors=[{
                    "message": str(exc), "kind": "BackendUnavailable"}])
            return self._finish(record, outcome, *pre)

        if lowered.startswith(AUTOMATIC_PREFIX):
            description = user_text.strip()[len(AUTOMATIC_PREFIX):].strip()
            outcomes = self.run_automatic(description)
            return outcomes[-1]

        try:
            result = generate_intent(user_text, self.store, self.backend)
        except BackendUnavailable as exc:
            return self._finish(record, TurnOutcome(ok=False, errors=[{
                "message": str(exc), "kind": "BackendUnavailable"}]), *pre)
        except StillInvalidAfterRetries as exc:
            record.raw_output = exc.raw
            outcome = TurnOutcome(
                ok=False,
                errors=[{"message": str(e), "kind": e.kind, "path": e.path}
                        for e in exc.errors],
                raw_output=exc.raw,
                failed_operation="code_generation",
                failed_input=user_text,
                messages=["the intent could not be validated; you can correct it "
                          "and submit feedback"],
            )
            return self._finish(record, outcome, *pre)

        record.intent = serialize_intent_document(result.document)
        record.raw_output = result.raw
        actions = self.interpret(result.document)
        outcome = TurnOutcome(intent=record.intent)
        self._run_actions(actions, outcome)
        return self._finish(record, outcome, *pre)

    def resolve_selection(self, candidate_index: int) -> TurnOutcome:
        pre = self._snapshot_pre()
        record = TurnRecord(kind="select", user_text=f"@select {candidate_index}")
        pending = self.pending_selection
        outcome = TurnOutcome()
        if pending is None:
            outcome.ok = False
            outcome.errors.append({"message": "no selection pending",
                                   "kind": "NoPendingSelection"})
            return self._finish(record, outcome, *pre)
        if not 0 <= candidate_index < len(pending.candidates):
            outcome.ok = False
            outcome.errors.append({"message": f"candidate index {candidate_index} "
                                              f"out of range", "kind": "BadIndex"})
            return self._finish(record, outcome, *pre)

        chosen = pending.candidates[candidate_index]
        self.pending_selection = None
        self._commit_selection(pending.kind, chosen, outcome)
        if pending.kind == "ingredient":
            finished = self._select_ingredients(pending.remaining_names,
                                                pending.remaining_actions, outcome,
                                                reset=False)
        else:
            finished = self._select_skeletons(pending.remaining_names,
                                              pending.remaining_actions, outcome)
        if finished and outcome.ok:
            self._run_actions(pending.remaining_actions, outcome)
        return self._finish(record, outcome, *pre)

    def apply_rule_by_id(self, rule_id: int) -> TurnOutcome:
        pre = self._snapshot_pre()
        record = TurnRecord(kind="apply", user_text=f"@apply {rule_id}")
        outcome = TurnOutcome()
        try:
            report = apply_rule(self.scene, rule_id)
            outcome.applied.append(report.to_dict())
            message = (f"applied rule {rule_id}: placed "
                       f"{len(report.added_ids)}/{report.requested}")
            if report.shortfall:
                message += f" (shortfall {report.shortfall})"
            if report.notes:
                message += f"; {report.notes}"
            outcome.messages.append(message)
        except EngineError as exc:
            outcome.ok = False
            outcome.errors.append({"message": str(exc), "kind": type(exc).__name__})
        return self._finish(record, outcome, *pre)

    def revert_rule_by_id(self, rule_id: int) -> TurnOutcome:
        pre = self._snapshot_pre()
        record = TurnRecord(kind="revert", user_text=f"@revert {rule_id}")
        outcome = TurnOutcome()
        try:
            removed = revert_rule(self.scene, rule_id)
            outcome.reverted = removed
            outcome.messages.append(
                f"reverted rule {rule_id}: removed {len(removed)} instances")
        except EngineError as exc:
            outcome.ok = False
            outcome.errors.append({"message": str(exc), "kind": type(exc).__name__})
        return self._finish(record, outcome, *pre)

    def run_automatic(self, description: str) -> list[TurnOutcome]:
        """Rule-sequence generation followed by per-step create+apply."""
        outcomes: list[TurnOutcome] = []
        pre = self._snapshot_pre()
        record = TurnRecord(kind="automatic", user_text=description)
        try:
            sequence = generate_rule_sequence(
                description, self.catalog.ingredient_names(), self.store, self.backend)
        except (EmptySequence, BackendUnavailable) as exc:
            outcome = TurnOutcome(ok=False, errors=[{
                "message": str(exc), "kind": type(exc).__name__}])
            outcomes.append(self._finish(record, outcome, *pre))
            return outcomes

        overall_skeleton = self._skeleton_in_text(description)
        for index, rule_description in enumerate(sequence):
            pre_step = self._snapshot_pre()
            step_record = TurnRecord(kind="automatic", user_text=rule_description)
            outcome = TurnOutcome(step_index=index)
            try:
                self._automatic_step(rule_description, overall_skeleton, outcome)
            except (SessionError, EngineError, BackendUnavailable,
                    UnrecognizedRuleType, StillInvalidAfterRetries) as exc:
                outcome.ok = False
                outcome.errors.append({"message": str(exc),
                                       "kind": type(exc).__name__})
            outcomes.append(self._finish(step_record, outcome, *pre_step))
            if not outcome.ok:
                break  # halt the run, keep the partial scene
        return outcomes

    def submit_feedback(self, turn_index: int, corrected_output: str,
                        operation: Optional[str] = None) -> TurnOutcome:
        """Record a correction, then re-run the turn with refreshed prompts."""
        if not 0 <= turn_index < len(self.history):
            raise SessionError(f"turn {turn_index} does not exist")
        turn = self.history[turn_index]
        op, input_text = self._feedback_target(turn, corrected_output, operation)
        record_feedback(op, input_text, corrected_output, self.store)  # may raise
        rerun = self.handle_turn(turn.user_text)
        rerun.replaces_turn = turn_index
        rerun.messages.insert(0, f"feedback recorded for {op}; turn re-run")
        return rerun

    def save_model(self, path: Optional[str] = None) -> str:
        target = path or self.model_path
        save_scene(self.scene, target)
        return target

    def load_model(self, path: Optional[str] = None) -> str:
        source = path or self.model_path
        scene = load_scene(source, self.catalog.ingredients, self.catalog.skeletons)
        self.scene = scene
        # Rule ids from the previous scene are meaningless now.
        self.last_rule_id = None
        self.pending_selection = None
        return source

    # --- internals ---------------------------------------------------------
    def _feedback_target(self, turn: TurnRecord, corrected: str,
                         operation: Optional[str]) -> tuple[str, str]:
        outcome = turn.outcome
        if operation is None and outcome is not None and outcome.failed_operation:
            operation = outcome.failed_operation
        if operation is None:
            if parse_rule_type_name(corrected) is not None:
                operation = "rule_extraction"
            elif parse_intent_document(corrected)[0] is not None:
                operation = "code_generation"
            elif parse_parameter_patch(corrected)[0] is not None:
                operation = "parameter_adjustment"
            else:
                raise InvalidCorrection(
                    f"cannot infer a target operation for {corrected!r}")
        if operation == "rule_extraction":
            doc, _ = parse_intent_document(turn.intent) if turn.intent else (None, [])
            if doc is not None and doc.create_rule:
                return operation, doc.create_rule
            return operation, turn.user_text
        if operation == "parameter_adjustment":
            doc, _ = parse_intent_document(turn.intent) if turn.intent else (None, [])
            if doc is not None and doc.edit_rule:
                return operation, doc.edit_rule
            return operation, turn.user_text
        if outcome is not None and outcome.failed_input:
            return operation, outcome.failed_input
        return operation, turn.user_text

    def _skeleton_in_text(self, text: str) -> Optional[str]:
        lowered = text.lower()
        hits = [name for name in self.catalog.skeletons if name.lower() in lowered]
        hits.sort(key=lambda n: (-len(n), n))
        return hits[0] if hits else None

    def _ingredient_in_text(self, text: str) -> Optional[str]:
        lowered = text.lower()
        hits = [name for name in self.catalog.ingredients if name.lower() in lowered]
        hits.sort(key=lambda n: (-len(n), n))
        return hits[0] if hits else None

    def _automatic_step(self, rule_description: str, overall_skeleton: Optional[str],
                        outcome: TurnOutcome) -> None:
        ingredient = self._ingredient_in_text(rule_description)
        if ingredient is None:
            raise UnknownIngredient(
                f"no catalog ingredient found in {rule_description!r}")
        skeleton = self._skeleton_in_text(rule_description) or overall_skeleton
        rule_type = extract_rule_type(rule_description, self.store, self.backend)
        patch = adjust_parameters(rule_description, self.store, self.backend).patch

        self.selected_ingredients = [ingredient]
        self.scene.register_ingredient(self.catalog.ingredients[ingredient])
        if skeleton is not None:
            self.selected_skeleton = skeleton
            self.scene.register_skeleton(self.catalog.skeletons[skeleton])
        rule = create_rule(self.scene, rule_type, [ingredient], skeleton,
                           description=rule_description)
        self.last_rule_id = rule.id
        edit_rule(self.scene, rule.id, patch)
        report = apply_rule(self.scene, rule.id)
        outcome.created_rules.append(rule.id)
        outcome.applied.append(report.to_dict())
        message = (f"step: {rule_description} -> {rule_type.value}, placed "
                   f"{len(report.added_ids)}/{report.requested}")
        if report.shortfall:
            message += f" (shortfall {report.shortfall})"
        outcome.messages.append(message)

    def _commit_selection(self, kind: str, name: str, outcome: TurnOutcome) -> None:
        if kind == "ingredient":
            self.selected_ingredients.append(name)
            self.scene.register_ingredient(self.catalog.ingredients[name])
            outcome.messages.append(f"selected ingredient {name}")
        else:
            self.selected_skeleton = name
            self.scene.register_skeleton(self.catalog.skeletons[name])
            outcome.messages.append(f"selected skeleton {name}")

    def _select_ingredients(self, names: list[str], remaining_actions: list[Action],
                            outcome: TurnOutcome, reset: bool = True) -> bool:
        """Resolve names in order; returns False if a selection went pending."""
        if reset:
            self.selected_ingredients = []
        for i, name in enumerate(names):
            candidates = fuzzy_candidates(name, self.catalog.ingredients)
            if len(candidates) == 1:
                self._commit_selection("ingredient", candidates[0], outcome)
            elif not candidates:
                raise UnknownIngredient(f"no catalog ingredient matches {name!r}")
            else:
                self.pending_selection = PendingSelection(
                    kind="ingredient", query=name, candidates=candidates,
                    remaining_names=list(names[i + 1:]),
                    remaining_actions=remaining_actions)
                outcome.pending_selection = self.pending_selection.to_dict()
                outcome.messages.append(
                    f"{len(candidates)} ingredients match {name!r}; pick one")
                return False
        return True

    def _select_skeletons(self, names: list[str], remaining_actions: list[Action],
                          outcome: TurnOutcome) -> bool:
        for i, name in enumerate(names):
            candidates = fuzzy_candidates(name, self.catalog.skeletons)
            if len(candidates) == 1:
                self._commit_selection("skeleton", candidates[0], outcome)
            elif not candidates:
                raise UnknownSkeleton(f"no catalog skeleton matches {name!r}")
            else:
                self.pending_selection = PendingSelection(
                    kind="skeleton", query=name, candidates=candidates,
                    remaining_names=list(names[i + 1:]),
                    remaining_actions=remaining_actions)
                outcome.pending_selection = self.pending_selection.to_dict()
                outcome.messages.append(
                    f"{len(candidates)} skeletons match {name!r}; pick one")
                return False
        return True

    def _resolve_unique(self, name: str) -> str:
        candidates = fuzzy_candidates(name, self.catalog.ingredients)
        if len(candidates) != 1:
            raise UnknownIngredient(
                f"ingredient {name!r} does not resolve uniquely "
                f"({len(candidates)} matches)")
        return candidates[0]

    def _run_actions(self, actions: list[Action], outcome: TurnOutcome) -> None:
        """Execute actions in order; stop at the first failure or pending gate."""
        for index, action in enumerate(actions):
            try:
                finished = self._execute_action(action, actions[index + 1:], outcome)
                if not finished:
                    return  # pending selection took over the remainder
            except (SessionError, EngineError, BackendUnavailable, OSError,
                    UnrecognizedRuleType, StillInvalidAfterRetries) as exc:
                outcome.ok = False
                entry = {"message": str(exc), "kind": type(exc).__name__,
                         "action_index": index, "action": action.kind}
                if isinstance(exc, UnrecognizedRuleType):
                    outcome.failed_operation = "rule_extraction"
                    outcome.failed_input = action.payload
                    outcome.raw_output = exc.raw
                if isinstance(exc, StillInvalidAfterRetries):
                    outcome.failed_operation = (
                        "parameter_adjustment" if action.kind == "EditRule"
                        else "code_generation")
                    outcome.failed_input = action.payload
                    outcome.raw_output = exc.raw
                outcome.errors.append(entry)
                outcome.failed_action_index = index
                return

    def _execute_action(self, action: Action, rest: list[Action],
                        outcome: TurnOutcome) -> bool:
        kind, payload = action.kind, action.payload
        if kind == "SelectIngredient":
            return self._select_ingredients(list(payload), rest, outcome)
        if kind == "SelectSkeleton":
            return self._select_skeletons(list(payload), rest, outcome)
        if kind == "UpdatePivot":
            if not self.selected_ingredients:
                raise NoRuleContext("select an ingredient before updating its pivot")
            name = self.selected_ingredients[-1]
            updated = update_pivot(self.catalog.ingredients[name],
                                   payload.chain_id, payload.residue_id)
            self.catalog.ingredients[name] = updated
            self.scene.register_ingredient(updated)
            outcome.messages.append(
                f"pivot of {name} set to chain {payload.chain_id} "
                f"residue {payload.residue_id}")
        elif kind == "UpdatePosition":
            main, sub = payload
            main_ref = PositionRef(self._resolve_unique(main.ingredient),
                                   main.chain_id, main.residue_id)
            sub_ref = PositionRef(self._resolve_unique(sub.ingredient),
                                  sub.chain_id, sub.residue_id)
            moved = update_position(self.scene, main_ref, sub_ref)
            outcome.messages.append(
                f"moved instance {moved.id} ({sub_ref.ingredient}) onto "
                f"{main_ref.ingredient}")
        elif kind == "CreateRule":
            rule_type = extract_rule_type(payload, self.store, self.backend)
            ingredients = self._rule_ingredients(rule_type)
            skeleton = self.selected_skeleton
            rule = create_rule(self.scene, rule_type, ingredients, skeleton,
                               description=payload)
            self.last_rule_id = rule.id
            outcome.created_rules.append(rule.id)
            outcome.messages.append(
                f"created rule {rule.id} ({rule_type.value}); apply it when ready")
        elif kind == "EditRule":
            target = self._edit_target(payload)
            patch = adjust_parameters(payload, self.store, self.backend).patch
            edit_rule(self.scene, target, patch)
            outcome.messages.append(
                f"updated rule {target}: {', '.join(patch.present_fields())}")
        elif kind == "Highlight":
            resolved = {self._resolve_unique(n) for n in payload}
            self.scene.view.highlights = resolved
            outcome.messages.append(
                "highlighting " + ", ".join(sorted(resolved)) if resolved
                else "highlights cleared")
        elif kind == "ModifyColor":
            for name, rgb in payload:
                resolved = self._resolve_unique(name)
                self.scene.view.colors[resolved] = tuple(rgb)
                outcome.messages.append(f"{resolved} colored {list(rgb)}")
        elif kind == "ChangeMode":
            self.scene.view.render_mode = payload
            outcome.messages.append(f"render mode: {payload}")
        elif kind == "Labeling":
            self.scene.view.labeling = bool(payload)
            outcome.messages.append(
                "labels on" if payload else "labels off")
        elif kind == "SaveModel":
            if payload:
                target = self.save_model()
                outcome.messages.append(f"model saved to {target}")
        elif kind == "LoadModel":
            if payload:
                source = self.load_model()
                outcome.messages.append(f"model loaded from {source}")
        else:
            raise SessionError(f"unknown action kind {kind!r}")
        return True

    def _rule_ingredients(self, rule_type: RuleType) -> list[str]:
        selected = self.selected_ingredients
        if rule_type is RuleType.CONNECTION:
            if len(selected) < 2:
                raise NoRuleContext(
                    "a connection rule needs two selected ingredients")
            return selected[-2:]
        if not selected:
            raise NoRuleContext("select an ingredient before creating a rule")
        if rule_type in (RuleType.SIBLINGS, RuleType.SIBLINGS_PARENT):
            return list(selected)
        return [selected[0]]

    def _edit_target(self, description: str) -> int:
        m = re.search(r"\brule\s+(\d+)\b", description.lower())
        if m:
            return int(m.group(1))
        if self.last_rule_id is None:
            raise NoRuleContext("no rule to edit; create one first")
        return self.last_rule_id
