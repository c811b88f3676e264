"""Rule types, rule parameters, and the space-to-count conversion."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional

import numpy as np

from ..geometry import Skeleton
from ..geometry.transforms import RigidTransform
from ..intent import ParameterPatch
from .errors import InvalidParameter, SpaceOnSurfaceSkeleton
from .ingredients import Ingredient


class RuleType(Enum):
    PARENT_CHILD_DISTANCE = "parent-child (distance)"
    PARENT_CHILD_RELATIVE = "parent-child (relative)"
    SIBLINGS = "siblings"
    SIBLINGS_PARENT = "siblings-parent"
    FILL = "fill"
    CONNECTION = "connection"


# Normalized-name lookup; longer keys first so "siblingsparent" wins over "siblings".
_RULE_TYPE_LOOKUP = [
    ("parentchilddistance", RuleType.PARENT_CHILD_DISTANCE),
    ("parentchildrelative", RuleType.PARENT_CHILD_RELATIVE),
    ("siblingsparent", RuleType.SIBLINGS_PARENT),
    ("siblings", RuleType.SIBLINGS),
    ("connection", RuleType.CONNECTION),
    ("fill", RuleType.FILL),
]


def parse_rule_type_name(text: str) -> Optional[RuleType]:
    """Match free text (case/punctuation-insensitive) to one of the six types."""
    normalized = re.sub(r"[^a-z]", "", text.lower())
    if not normalized:
        return None
    for key, rule_type in _RULE_TYPE_LOOKUP:
        if normalized == key:
            return rule_type
    for key, rule_type in _RULE_TYPE_LOOKUP:
        if key in normalized:
            return rule_type
    return None


CURVE_KINDS = {"catmull-rom": "catmull-rom", "catmullrom": "catmull-rom",
               "catmull rom": "catmull-rom", "straight": "straight", "line": "straight"}


def normalize_curve_kind(text: str) -> str:
    kind = CURVE_KINDS.get(text.strip().lower())
    if kind is None:
        raise InvalidParameter(
            f"unknown curve kind {text!r}; expected CatmullRom or Straight")
    return kind


def parse_tweaking(text: str) -> float:
    """Cone half-angle in degrees extracted from a tweaking descriptor string."""
    m = re.search(r"(\d+(?:\.\d+)?)", text)
    if m is None:
        raise InvalidParameter(f"cannot read a tweaking angle from {text!r}")
    angle = float(m.group(1))
    if angle < 0:
        raise InvalidParameter(f"tweaking angle must be >= 0, got {angle}")
    return angle


@dataclass
class RuleParams:
    """Effective rule parameters; defaults apply at rule creation."""

    elements: int = 100
    distance: float = 0.0
    collision_detection: bool = True
    align_direction: str = "normal"
    length: Optional[float] = None  # None: natural pivot-to-pivot length
    curve: str = "catmull-rom"
    tweaking_deg: float = 0.0
    std: float = 0.0

    def merged(self, patch: ParameterPatch, skeleton: Optional[Skeleton],
               ingredient: Optional[Ingredient]) -> "RuleParams":
        """Field-wise merge of a validated patch; unpatched fields survive.

        A `space` field is converted to `elements` here, which needs the
        rule's volumetric skeleton and the ingredient's bounding sphere.
        """
        out = replace(self)
        if patch.elements is not None:
            out.elements = patch.elements
        if patch.space is not None:
            if skeleton is None or not skeleton.supports_volume():
                raise SpaceOnSurfaceSkeleton(
                    "space percentage needs a volumetric skeleton")
            if ingredient is None:
                raise InvalidParameter("space percentage needs an ingredient")
            out.elements = space_to_count(patch.space, skeleton, ingredient)
        if patch.distance is not None:
            out.distance = patch.distance
        if patch.collision_detection is not None:
            out.collision_detection = patch.collision_detection
        if patch.align_direction is not None:
            out.align_direction = patch.align_direction
        if patch.length is not None:
            out.length = patch.length
        if patch.curve is not None:
            out.curve = normalize_curve_kind(patch.curve)
        if patch.tweaking is not None:
            out.tweaking_deg = parse_tweaking(patch.tweaking)
        if patch.std is not None:
            out.std = patch.std
        return out

    def to_dict(self) -> dict:
        return {
            "elements": self.elements,
            "distance": self.distance,
            "collisionDetection": self.collision_detection,
            "alignDirection": self.align_direction,
            "length": self.length,
            "curve": self.curve,
            "tweaking": self.tweaking_deg,
            "std": self.std,
        }

    @staticmethod
    def from_dict(data: dict) -> "RuleParams":
        return RuleParams(
            elements=int(data.get("elements", 100)),
            distance=float(data.get("distance", 0.0)),
            collision_detection=bool(data.get("collisionDetection", True)),
            align_direction=data.get("alignDirection", "normal"),
            length=data.get("length"),
            curve=data.get("curve", "catmull-rom"),
            tweaking_deg=float(data.get("tweaking", 0.0)),
            std=float(data.get("std", 0.0)),
        )


@dataclass
class ApplicationRecord:
    """One application of a rule: the instances it added, for reverting."""

    instance_ids: list[int]
    requested: int
    shortfall: int = 0
    notes: str = ""

    def to_dict(self) -> dict:
        return {"instance_ids": list(self.instance_ids), "requested": self.requested,
                "shortfall": self.shortfall, "notes": self.notes}

    @staticmethod
    def from_dict(data: dict) -> "ApplicationRecord":
        return ApplicationRecord(
            instance_ids=list(data["instance_ids"]), requested=int(data["requested"]),
            shortfall=int(data.get("shortfall", 0)), notes=data.get("notes", ""))


@dataclass
class Rule:
    id: int
    rule_type: RuleType
    ingredients: list[str]
    skeleton: Optional[str] = None
    params: RuleParams = field(default_factory=RuleParams)
    seed_transforms: Optional[list[RigidTransform]] = None
    vertex_indices: Optional[list[int]] = None  # parent-child (relative) targets
    offset: Optional[RigidTransform] = None  # vertex frame -> instance pose
    description: str = ""
    applied: list[ApplicationRecord] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "type": self.rule_type.value,
            "ingredients": list(self.ingredients),
            "skeleton": self.skeleton,
            "params": self.params.to_dict(),
            "seed_transforms": None if self.seed_transforms is None
            else [t.to_dict() for t in self.seed_transforms],
            "vertex_indices": self.vertex_indices,
            "offset": None if self.offset is None else self.offset.to_dict(),
            "description": self.description,
            "applied": [a.to_dict() for a in self.applied],
        }

    @staticmethod
    def from_dict(data: dict) -> "Rule":
        rule_type = parse_rule_type_name(data["type"])
        if rule_type is None:
            raise InvalidParameter(f"unknown rule type {data['type']!r}")
        transforms = data.get("seed_transforms")
        offset = data.get("offset")
        return Rule(
            id=int(data["id"]),
            rule_type=rule_type,
            ingredients=list(data["ingredients"]),
            skeleton=data.get("skeleton"),
            params=RuleParams.from_dict(data.get("params", {})),
            seed_transforms=None if transforms is None
            else [RigidTransform.from_dict(t) for t in transforms],
            vertex_indices=data.get("vertex_indices"),
            offset=None if offset is None else RigidTransform.from_dict(offset),
            description=data.get("description", ""),
            applied=[ApplicationRecord.from_dict(a) for a in data.get("applied", [])],
        )


def space_to_count(space_percent: int, skeleton: Skeleton, ingredient: Ingredient) -> int:
    """Instance count for a requested occupancy percentage.

    count = floor((space/100) * skeleton volume / bounding-sphere volume),
    never below 1.
    """
    if not 0 < space_percent <= 100:
        raise InvalidParameter(f"space must be in (0, 100], got {space_percent}")
    sphere_volume = 4.0 / 3.0 * np.pi * ingredient.bounding_radius ** 3
    count = math.floor((space_percent / 100.0) * skeleton.volume() / sphere_volume)
    return max(count, 1)
