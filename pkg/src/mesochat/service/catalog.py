"""Catalog loading: ingredients and skeletons from a directory of JSON files."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from ..engine import Ingredient
from ..geometry import Skeleton, skeleton_from_dict


@dataclass
class Catalog:
    ingredients: dict[str, Ingredient] = field(default_factory=dict)
    skeletons: dict[str, Skeleton] = field(default_factory=dict)

    def ingredient_names(self) -> list[str]:
        return sorted(self.ingredients)

    def skeleton_names(self) -> list[str]:
        return sorted(self.skeletons)


def load_catalog(directory) -> Catalog:
    """Read ``ingredients/*.json`` and ``skeletons/*.json`` under `directory`."""
    directory = Path(directory)
    catalog = Catalog()
    ingredient_dir = directory / "ingredients"
    if ingredient_dir.is_dir():
        for path in sorted(ingredient_dir.glob("*.json")):
            data = json.loads(path.read_text(encoding="utf-8"))
            ingredient = Ingredient.from_dict(data)
            catalog.ingredients[ingredient.name] = ingredient
    skeleton_dir = directory / "skeletons"
    if skeleton_dir.is_dir():
        for path in sorted(skeleton_dir.glob("*.json")):
            data = json.loads(path.read_text(encoding="utf-8"))
            skeleton = skeleton_from_dict(data)
            catalog.skeletons[skeleton.name] = skeleton
    return catalog
