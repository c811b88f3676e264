"""Parsing and validation for the two JSON formats the translator emits.

An *intent document* carries the per-turn modeling actions; a *parameter
patch* carries rule-parameter edits.  Both parsers accept raw completion
text (possibly wrapped in markdown fences or prose), locate the first
top-level JSON object, and validate it against a closed vocabulary.
Validation failures come back as structured errors whose text is fed to
the regeneration loop, so messages always name the offending fragment.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Optional

# Listing-order key vocabulary of the intent grammar.
INTENT_KEYS = (
    "selectIngredient",
    "selectSkeleton",
    "createRule",
    "editRule",
    "saveModel",
    "loadModel",
    "updatePivot",
    "updatePosition",
    "highlightIngredient",
    "modifyColor",
    "changeMode",
    "labeling",
)

# Listing-order key vocabulary of the parameter grammar.
PATCH_KEYS = (
    "elements",
    "distance",
    "collisionDetection",
    "space",
    "alignDirection",
    "length",
    "curve",
    "tweaking",
    "std",
)

RENDER_MODES = ("protein", "chain", "atomistic")

# Informal phrasings that map onto the three render modes.
_MODE_SYNONYMS = {
    "protein": "protein",
    "protein level": "protein",
    "chain": "chain",
    "chain level": "chain",
    "atomistic": "atomistic",
    "atomistic level": "atomistic",
    "residue": "atomistic",
    "residue level": "atomistic",
    "amino acid": "atomistic",
    "amino acid level": "atomistic",
}

ALIGN_DIRECTIONS = ("normal", "inverse-normal")

# Named colors users can say instead of an RGB triple.
NAMED_COLORS = {
    "red": (1.0, 0.0, 0.0),
    "green": (0.0, 0.5, 0.0),
    "blue": (0.0, 0.0, 1.0),
    "yellow": (1.0, 1.0, 0.0),
    "orange": (1.0, 0.647, 0.0),
    "purple": (0.5, 0.0, 0.5),
    "cyan": (0.0, 1.0, 1.0),
    "magenta": (1.0, 0.0, 1.0),
    "white": (1.0, 1.0, 1.0),
    "black": (0.0, 0.0, 0.0),
    "gray": (0.5, 0.5, 0.5),
    "brown": (0.647, 0.165, 0.165),
    "pink": (1.0, 0.753, 0.796),
    "lime": (0.0, 1.0, 0.0),
    "navy": (0.0, 0.0, 0.5),
    "gold": (1.0, 0.843, 0.0),
}


@dataclass(frozen=True)
class ValidationError:
    """One validation failure, addressed by a JSON-pointer-style path."""

    kind: str  # parse | array-shape | data-type | unknown-key | domain
    path: str
    message: str

    def __str__(self) -> str:
        return f"ERROR {self.kind} at {self.path}: {self.message}"


@dataclass(frozen=True)
class PivotRef:
    chain_id: int
    residue_id: int


@dataclass(frozen=True)
class PositionRef:
    ingredient: str
    chain_id: int
    residue_id: int


@dataclass(frozen=True)
class IntentDocument:
    """Validated, normalized form of one turn's intent JSON."""

    select_ingredient: Optional[tuple[str, ...]] = None
    select_skeleton: Optional[tuple[str, ...]] = None
    create_rule: Optional[str] = None
    edit_rule: Optional[str] = None
    save_model: Optional[bool] = None
    load_model: Optional[bool] = None
    update_pivot: Optional[PivotRef] = None
    update_position: Optional[tuple[PositionRef, PositionRef]] = None
    highlight_ingredient: Optional[tuple[str, ...]] = None
    modify_color: Optional[tuple[tuple[str, tuple[float, float, float]], ...]] = None
    change_mode: Optional[str] = None
    labeling: Optional[bool] = None

    def present_fields(self) -> list[str]:
        """Listing-vocabulary names of the fields present in this document."""
        attr_by_key = _INTENT_ATTRS
        return [k for k in INTENT_KEYS if getattr(self, attr_by_key[k]) is not None]


_INTENT_ATTRS = {
    "selectIngredient": "select_ingredient",
    "selectSkeleton": "select_skeleton",
    "createRule": "create_rule",
    "editRule": "edit_rule",
    "saveModel": "save_model",
    "loadModel": "load_model",
    "updatePivot": "update_pivot",
    "updatePosition": "update_position",
    "highlightIngredient": "highlight_ingredient",
    "modifyColor": "modify_color",
    "changeMode": "change_mode",
    "labeling": "labeling",
}


@dataclass(frozen=True)
class ParameterPatch:
    """Validated rule-parameter edits; unset fields stay None."""

    elements: Optional[int] = None
    distance: Optional[float] = None
    collision_detection: Optional[bool] = None
    space: Optional[int] = None
    align_direction: Optional[str] = None
    length: Optional[float] = None
    curve: Optional[str] = None
    tweaking: Optional[str] = None
    std: Optional[float] = None

    def present_fields(self) -> list[str]:
        return [k for k in PATCH_KEYS if getattr(self, _PATCH_ATTRS[k]) is not None]


_PATCH_ATTRS = {
    "elements": "elements",
    "distance": "distance",
    "collisionDetection": "collision_detection",
    "space": "space",
    "alignDirection": "align_direction",
    "length": "length",
    "curve": "curve",
    "tweaking": "tweaking",
    "std": "std",
}


def strip_code_fences(raw: str) -> Any:
    """Locate the first top-level JSON object in arbitrary completion text.

    Markdown fences and surrounding prose are treated as noise: decoding is
    attempted from each '{' until one yields a JSON object.  Returns the
    decoded dict, or None if the text contains no parseable object.
    """
    decoder = json.JSONDecoder()
    idx = raw.find("{")
    while idx != -1:
        try:
            value, _end = decoder.raw_decode(raw, idx)
        except ValueError:
            value = None
        if isinstance(value, dict):
            return value
        idx = raw.find("{", idx + 1)
    return None


def _is_bool(v: Any) -> bool:
    return isinstance(v, bool)


def _is_int(v: Any) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def _is_number(v: Any) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _type_name(v: Any) -> str:
    return {dict: "object", list: "array", str: "string", bool: "boolean",
            int: "integer", float: "number", type(None): "null"}.get(type(v), type(v).__name__)


def _name_list(value: Any, path: str, record_key: str, errors: list[ValidationError]) -> Optional[tuple[str, ...]]:
    """Validate an array of ``{record_key: name}`` records (bare strings allowed)."""
    if not isinstance(value, list):
        errors.append(ValidationError(
            "array-shape", path,
            f"expected an array of {{{record_key!r}: name}} records, found {_type_name(value)} {_fragment(value)}"))
        return None
    local: list[ValidationError] = []
    names: list[str] = []
    for i, item in enumerate(value):
        if isinstance(item, str):
            names.append(item)
        elif isinstance(item, dict):
            if record_key not in item:
                local.append(ValidationError(
                    "domain", f"{path}/{i}",
                    f"record is missing the {record_key!r} key: {_fragment(item)}"))
                continue
            name = item[record_key]
            if not isinstance(name, str):
                local.append(ValidationError(
                    "data-type", f"{path}/{i}/{record_key}",
                    f"expected string, found {_type_name(name)} {_fragment(name)}"))
                continue
            for extra in item:
                if extra != record_key:
                    local.append(ValidationError(
                        "unknown-key", f"{path}/{i}/{extra}",
                        f"unexpected key {extra!r} in {record_key} record"))
            names.append(name)
        else:
            local.append(ValidationError(
                "data-type", f"{path}/{i}",
                f"expected {{{record_key!r}: name}} record, found {_type_name(item)} {_fragment(item)}"))
    errors.extend(local)
    if local:
        return None
    return tuple(names)


def _fragment(value: Any) -> str:
    text = json.dumps(value, ensure_ascii=False, default=str)
    return text if len(text) <= 60 else text[:57] + "..."


def _pivot_record(value: Any, path: str, errors: list[ValidationError]) -> Optional[PivotRef]:
    if not isinstance(value, dict):
        errors.append(ValidationError(
            "data-type", path,
            f"expected object with chainId and residueId, found {_type_name(value)} {_fragment(value)}"))
        return None
    ok = True
    for key in ("chainId", "residueId"):
        if key not in value:
            errors.append(ValidationError("domain", f"{path}/{key}", f"missing required key {key!r}"))
            ok = False
        elif not _is_int(value[key]):
            errors.append(ValidationError(
                "data-type", f"{path}/{key}",
                f"expected integer, found {_type_name(value[key])} {_fragment(value[key])}"))
            ok = False
        elif value[key] < 0:
            errors.append(ValidationError(
                "domain", f"{path}/{key}", f"index must be >= 0, found {value[key]}"))
            ok = False
    for extra in value:
        if extra not in ("chainId", "residueId"):
            errors.append(ValidationError(
                "unknown-key", f"{path}/{extra}", f"unexpected key {extra!r} in pivot record"))
            ok = False
    if not ok:
        return None
    return PivotRef(chain_id=value["chainId"], residue_id=value["residueId"])


def _position_record(value: Any, path: str, name_key: str,
                     errors: list[ValidationError]) -> Optional[PositionRef]:
    if not isinstance(value, dict):
        errors.append(ValidationError(
            "data-type", path,
            f"expected object, found {_type_name(value)} {_fragment(value)}"))
        return None
    if name_key not in value:
        errors.append(ValidationError(
            "domain", path, f"record must name {name_key!r}: {_fragment(value)}"))
        return None
    name = value[name_key]
    if not isinstance(name, str):
        errors.append(ValidationError(
            "data-type", f"{path}/{name_key}",
            f"expected string, found {_type_name(name)} {_fragment(name)}"))
        return None
    pivot = _pivot_record({k: v for k, v in value.items() if k != name_key}, path, errors)
    if pivot is None:
        return None
    return PositionRef(ingredient=name, chain_id=pivot.chain_id, residue_id=pivot.residue_id)


def _color_value(value: Any, path: str, errors: list[ValidationError]) -> Optional[tuple[float, float, float]]:
    if isinstance(value, str):
        rgb = NAMED_COLORS.get(value.strip().lower())
        if rgb is None:
            errors.append(ValidationError(
                "domain", path,
                f"unknown color name {value!r}; use an RGB triple or one of {sorted(NAMED_COLORS)}"))
            return None
        return rgb
    if not isinstance(value, list) or len(value) != 3:
        errors.append(ValidationError(
            "array-shape", path,
            f"expected [r, g, b] triple, found {_fragment(value)}"))
        return None
    out = []
    for i, comp in enumerate(value):
        if not _is_number(comp):
            errors.append(ValidationError(
                "data-type", f"{path}/{i}",
                f"expected number, found {_type_name(comp)} {_fragment(comp)}"))
            return None
        if not 0.0 <= comp <= 1.0:
            errors.append(ValidationError(
                "domain", f"{path}/{i}", f"color component must be in [0, 1], found {comp}"))
            return None
        out.append(float(comp))
    return (out[0], out[1], out[2])


def parse_intent_document(raw: str) -> tuple[Optional[IntentDocument], list[ValidationError]]:
    """Parse completion text into an intent document.

    Returns ``(document, [])`` on success or ``(None, errors)`` on failure.
    """
    errors: list[ValidationError] = []
    data = strip_code_fences(raw)
    if data is None:
        errors.append(ValidationError(
            "parse", "/", f"no parseable JSON object found in: {_fragment(raw.strip() or '<empty>')}"))
        return None, errors

    if len(data) == 0:
        errors.append(ValidationError("domain", "/", "empty intent: no fields present"))
        return None, errors

    fields: dict[str, Any] = {}
    for key, value in data.items():
        path = f"/{key}"
        if key not in INTENT_KEYS:
            errors.append(ValidationError(
                "unknown-key", path, f"unknown key {key!r} is not part of the intent vocabulary"))
            continue
        if key in ("selectIngredient", "highlightIngredient"):
            names = _name_list(value, path, "ingredient", errors)
            if names is not None:
                fields[_INTENT_ATTRS[key]] = names
        elif key == "selectSkeleton":
            names = _name_list(value, path, "skeleton", errors)
            if names is not None:
                fields[_INTENT_ATTRS[key]] = names
        elif key in ("createRule", "editRule"):
            if not isinstance(value, str):
                errors.append(ValidationError(
                    "data-type", path, f"expected string, found {_type_name(value)} {_fragment(value)}"))
            elif not value.strip():
                errors.append(ValidationError("domain", path, "rule description must be non-empty"))
            else:
                fields[_INTENT_ATTRS[key]] = value
        elif key in ("saveModel", "loadModel", "labeling"):
            if not _is_bool(value):
                errors.append(ValidationError(
                    "data-type", path, f"expected boolean, found {_type_name(value)} {_fragment(value)}"))
            else:
                fields[_INTENT_ATTRS[key]] = value
        elif key == "updatePivot":
            pivot = _pivot_record(value, path, errors)
            if pivot is not None:
                fields["update_pivot"] = pivot
        elif key == "updatePosition":
            if not isinstance(value, list):
                errors.append(ValidationError(
                    "array-shape", path,
                    f"expected a two-record array, found {_type_name(value)} {_fragment(value)}"))
            elif len(value) != 2:
                errors.append(ValidationError(
                    "array-shape", path,
                    f"expected exactly one main/sub pair (2 records), found {len(value)}"))
            else:
                main = _position_record(value[0], f"{path}/0", "mainIngredient", errors)
                sub = _position_record(value[1], f"{path}/1", "subIngredient", errors)
                if main is not None and sub is not None:
                    fields["update_position"] = (main, sub)
        elif key == "modifyColor":
            if not isinstance(value, list):
                errors.append(ValidationError(
                    "array-shape", path,
                    f"expected an array of {{ingredient, color}} records, found {_type_name(value)} {_fragment(value)}"))
            else:
                entries = []
                bad = False
                for i, item in enumerate(value):
                    if not isinstance(item, dict) or "ingredient" not in item or "color" not in item:
                        errors.append(ValidationError(
                            "domain", f"{path}/{i}",
                            f"record must have ingredient and color keys: {_fragment(item)}"))
                        bad = True
                        continue
                    if not isinstance(item["ingredient"], str):
                        errors.append(ValidationError(
                            "data-type", f"{path}/{i}/ingredient",
                            f"expected string, found {_type_name(item['ingredient'])}"))
                        bad = True
                        continue
                    rgb = _color_value(item["color"], f"{path}/{i}/color", errors)
                    if rgb is None:
                        bad = True
                        continue
                    entries.append((item["ingredient"], rgb))
                if not bad:
                    fields["modify_color"] = tuple(entries)
        elif key == "changeMode":
            if not isinstance(value, str):
                errors.append(ValidationError(
                    "data-type", path, f"expected string, found {_type_name(value)} {_fragment(value)}"))
            else:
                mode = _MODE_SYNONYMS.get(value.strip().lower())
                if mode is None:
                    errors.append(ValidationError(
                        "domain", path,
                        f"unknown render mode {value!r}; expected one of {list(RENDER_MODES)}"))
                else:
                    fields["change_mode"] = mode

    if errors:
        return None, errors
    if not fields:
        return None, [ValidationError("domain", "/", "empty intent: no fields present")]
    return IntentDocument(**fields), []


def parse_parameter_patch(raw: str) -> tuple[Optional[ParameterPatch], list[ValidationError]]:
    """Parse completion text into a parameter patch.

    Same contract and error taxonomy as :func:`parse_intent_document`.
    """
    errors: list[ValidationError] = []
    data = strip_code_fences(raw)
    if data is None:
        errors.append(ValidationError(
            "parse", "/", f"no parseable JSON object found in: {_fragment(raw.strip() or '<empty>')}"))
        return None, errors
    if len(data) == 0:
        errors.append(ValidationError("domain", "/", "empty patch: no fields present"))
        return None, errors

    fields: dict[str, Any] = {}
    for key, value in data.items():
        path = f"/{key}"
        if key not in PATCH_KEYS:
            errors.append(ValidationError(
                "unknown-key", path, f"unknown key {key!r} is not part of the parameter vocabulary"))
            continue
        if key == "elements":
            if not _is_int(value):
                errors.append(ValidationError(
                    "data-type", path, f"expected integer, found {_type_name(value)} {_fragment(value)}"))
            elif value <= 0:
                errors.append(ValidationError("domain", path, f"elements must be positive, found {value}"))
            else:
                fields["elements"] = value
        elif key in ("distance", "std"):
            if not _is_number(value):
                errors.append(ValidationError(
                    "data-type", path, f"expected number, found {_type_name(value)} {_fragment(value)}"))
            elif value < 0:
                errors.append(ValidationError("domain", path, f"{key} must be >= 0, found {value}"))
            else:
                fields[_PATCH_ATTRS[key]] = float(value)
        elif key == "length":
            if not _is_number(value):
                errors.append(ValidationError(
                    "data-type", path, f"expected number, found {_type_name(value)} {_fragment(value)}"))
            elif value <= 0:
                errors.append(ValidationError("domain", path, f"length must be positive, found {value}"))
            else:
                fields["length"] = float(value)
        elif key == "collisionDetection":
            if not _is_bool(value):
                errors.append(ValidationError(
                    "data-type", path, f"expected boolean, found {_type_name(value)} {_fragment(value)}"))
            else:
                fields["collision_detection"] = value
        elif key == "space":
            if not _is_int(value):
                errors.append(ValidationError(
                    "data-type", path, f"expected integer percent, found {_type_name(value)} {_fragment(value)}"))
            elif not 0 < value <= 100:
                errors.append(ValidationError(
                    "domain", path, f"space must be an integer percent in (0, 100], found {value}"))
            else:
                fields["space"] = value
        elif key == "alignDirection":
            if not isinstance(value, str):
                errors.append(ValidationError(
                    "data-type", path, f"expected string, found {_type_name(value)} {_fragment(value)}"))
            else:
                norm = value.strip().lower().replace("_", "-").replace(" ", "-")
                if norm not in ALIGN_DIRECTIONS:
                    errors.append(ValidationError(
                        "domain", path,
                        f"unknown direction {value!r}; expected one of {list(ALIGN_DIRECTIONS)}"))
                else:
                    fields["align_direction"] = norm
        elif key in ("curve", "tweaking"):
            # Free strings at this layer; the rule engine interprets them.
            if not isinstance(value, str):
                errors.append(ValidationError(
                    "data-type", path, f"expected string, found {_type_name(value)} {_fragment(value)}"))
            else:
                fields[key] = value

    if "elements" in fields and "space" in fields:
        errors.append(ValidationError(
            "domain", "/space",
            "elements and space are mutually exclusive in one patch"))

    if errors:
        return None, errors
    if not fields:
        return None, [ValidationError("domain", "/", "empty patch: no fields present")]
    return ParameterPatch(**fields), []


def format_errors_for_regeneration(errors: list[ValidationError]) -> str:
    """Render errors as one deterministic block for the regeneration prompt."""
    if not errors:
        raise ValueError("format_errors_for_regeneration requires a non-empty error list")
    lines = [str(e) for e in sorted(errors, key=lambda e: (e.path, e.kind, e.message))]
    return "\n".join(lines)


def serialize_intent_document(doc: IntentDocument) -> str:
    """Emit the wire form: Listing-order keys, 2-space indentation."""
    out: dict[str, Any] = {}
    if doc.select_ingredient is not None:
        out["selectIngredient"] = [{"ingredient": n} for n in doc.select_ingredient]
    if doc.select_skeleton is not None:
        out["selectSkeleton"] = [{"skeleton": n} for n in doc.select_skeleton]
    if doc.create_rule is not None:
        out["createRule"] = doc.create_rule
    if doc.edit_rule is not None:
        out["editRule"] = doc.edit_rule
    if doc.save_model is not None:
        out["saveModel"] = doc.save_model
    if doc.load_model is not None:
        out["loadModel"] = doc.load_model
    if doc.update_pivot is not None:
        out["updatePivot"] = {"chainId": doc.update_pivot.chain_id,
                              "residueId": doc.update_pivot.residue_id}
    if doc.update_position is not None:
        main, sub = doc.update_position
        out["updatePosition"] = [
            {"mainIngredient": main.ingredient, "chainId": main.chain_id, "residueId": main.residue_id},
            {"subIngredient": sub.ingredient, "chainId": sub.chain_id, "residueId": sub.residue_id},
        ]
    if doc.highlight_ingredient is not None:
        out["highlightIngredient"] = [{"ingredient": n} for n in doc.highlight_ingredient]
    if doc.modify_color is not None:
        out["modifyColor"] = [{"ingredient": n, "color": list(rgb)} for n, rgb in doc.modify_color]
    if doc.change_mode is not None:
        out["changeMode"] = doc.change_mode
    if doc.labeling is not None:
        out["labeling"] = doc.labeling
    return json.dumps(out, indent=2)


def serialize_parameter_patch(patch: ParameterPatch) -> str:
    """Emit the wire form: Listing-order keys, 2-space indentation."""
    out: dict[str, Any] = {}
    for key in PATCH_KEYS:
        value = getattr(patch, _PATCH_ATTRS[key])
        if value is not None:
            out[key] = value
    return json.dumps(out, indent=2)
