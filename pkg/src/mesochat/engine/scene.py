"""Scene state: placed instances, rules, view settings, and persistence.

Scene files are versioned JSON.  Catalog entries are stored as refs
(``ingredient:NAME`` / ``skeleton:NAME``) and re-resolved at load time so
a scene file stays small and the catalog remains the single source of
geometry.  All randomness flows through the scene's seeded generator
(PCG64, recorded in the export), which makes exports reproducible from
the same seed and operation log.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..geometry import Skeleton, skeleton_from_dict
from ..geometry.meshes import icosphere
from ..geometry.transforms import RigidTransform
from .errors import MissingCatalogEntry, VersionMismatch
from .ingredients import BALL_INGREDIENT, Ingredient
from .rules import Rule

SCENE_VERSION = 1
RNG_ALGORITHM = "pcg64"


@dataclass
class Instance:
    id: int
    ingredient: str
    pose: RigidTransform

    def to_dict(self) -> dict:
        return {"id": self.id, "ingredient": self.ingredient, **self.pose.to_dict()}

    @staticmethod
    def from_dict(data: dict) -> "Instance":
        return Instance(id=int(data["id"]), ingredient=data["ingredient"],
                        pose=RigidTransform.from_dict(data))


@dataclass
class ViewState:
    colors: dict[str, tuple[float, float, float]] = field(default_factory=dict)
    highlights: set[str] = field(default_factory=set)
    render_mode: str = "protein"
    labeling: bool = False

    def to_dict(self) -> dict:
        return {
            "colors": {k: list(v) for k, v in sorted(self.colors.items())},
            "highlights": sorted(self.highlights),
            "render_mode": self.render_mode,
            "labeling": self.labeling,
        }

    @staticmethod
    def from_dict(data: dict) -> "ViewState":
        return ViewState(
            colors={k: tuple(v) for k, v in data.get("colors", {}).items()},
            highlights=set(data.get("highlights", [])),
            render_mode=data.get("render_mode", "protein"),
            labeling=bool(data.get("labeling", False)),
        )


class Scene:
    """Ordered instances plus the rules that produced them.

    Owned by exactly one session and mutated serially; ids are assigned
    monotonically and never reused.
    """

    def __init__(self, seed: int = 0):
        self.seed = int(seed)
        self.rng = np.random.default_rng(self.seed)
        self.instances: list[Instance] = []
        self.rules: list[Rule] = []
        self.view = ViewState()
        self.catalog: dict[str, Ingredient] = {"ball": BALL_INGREDIENT}
        self.skeletons: dict[str, Skeleton] = {}
        self._next_instance_id = 1
        self._next_rule_id = 1

    # --- bookkeeping -------------------------------------------------------
    def next_instance_id(self) -> int:
        out = self._next_instance_id
        self._next_instance_id += 1
        return out

    def next_rule_id(self) -> int:
        out = self._next_rule_id
        self._next_rule_id += 1
        return out

    def rule_by_id(self, rule_id: int) -> Optional[Rule]:
        for rule in self.rules:
            if rule.id == rule_id:
                return rule
        return None

    def instances_of(self, ingredient: str) -> list[Instance]:
        return [inst for inst in self.instances if inst.ingredient == ingredient]

    def ingredient_of(self, instance: Instance) -> Ingredient:
        return self.catalog[instance.ingredient]

    def register_ingredient(self, ingredient: Ingredient) -> None:
        self.catalog[ingredient.name] = ingredient

    def register_skeleton(self, skeleton: Skeleton) -> None:
        self.skeletons[skeleton.name] = skeleton

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        """AABB over instance spheres and registered skeletons."""
        los, his = [], []
        for inst in self.instances:
            r = self.catalog[inst.ingredient].bounding_radius
            c = inst.pose.translation
            los.append(c - r)
            his.append(c + r)
        for skel in self.skeletons.values():
            try:
                lo, hi = skel.bbox()
            except Exception:
                continue
            los.append(lo)
            his.append(hi)
        if not los:
            return np.full(3, -100.0), np.full(3, 100.0)
        return np.min(los, axis=0), np.max(his, axis=0)


# --- persistence -------------------------------------------------------------

def scene_to_dict(scene: Scene) -> dict:
    ingredient_refs = sorted({inst.ingredient for inst in scene.instances}
                             | {name for rule in scene.rules for name in rule.ingredients})
    skeleton_refs = sorted({rule.skeleton for rule in scene.rules if rule.skeleton})
    return {
        "version": SCENE_VERSION,
        "seed": scene.seed,
        "rng": RNG_ALGORITHM,
        "catalog_refs": ([f"ingredient:{n}" for n in ingredient_refs]
                         + [f"skeleton:{n}" for n in skeleton_refs]),
        "rules": [rule.to_dict() for rule in scene.rules],
        "instances": [inst.to_dict() for inst in scene.instances],
        "view": scene.view.to_dict(),
    }


def scene_to_json(scene: Scene) -> str:
    return json.dumps(scene_to_dict(scene), indent=2)


def save_scene(scene: Scene, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(scene_to_json(scene))
        fh.write("\n")


def scene_from_dict(data: dict, ingredients: dict[str, Ingredient],
                    skeletons: dict[str, Skeleton]) -> Scene:
    """Rebuild a scene, re-resolving catalog refs against the given catalogs."""
    version = data.get("version")
    if version != SCENE_VERSION:
        raise VersionMismatch(f"scene file version {version!r}, expected {SCENE_VERSION}")
    scene = Scene(seed=int(data.get("seed", 0)))
    for ref in data.get("catalog_refs", []):
        kind, _, name = ref.partition(":")
        if kind == "ingredient":
            if name == "ball":
                continue  # reserved, always present
            if name not in ingredients:
                raise MissingCatalogEntry(f"ingredient {name!r} not in catalog")
            scene.register_ingredient(ingredients[name])
        elif kind == "skeleton":
            if name not in skeletons:
                raise MissingCatalogEntry(f"skeleton {name!r} not in catalog")
            scene.register_skeleton(skeletons[name])
        else:
            raise MissingCatalogEntry(f"malformed catalog ref {ref!r}")
    scene.rules = [Rule.from_dict(r) for r in data.get("rules", [])]
    scene.instances = [Instance.from_dict(i) for i in data.get("instances", [])]
    scene.view = ViewState.from_dict(data.get("view", {}))
    if scene.instances:
        scene._next_instance_id = max(i.id for i in scene.instances) + 1
    if scene.rules:
        scene._next_rule_id = max(r.id for r in scene.rules) + 1
    return scene


def load_scene(path, ingredients: dict[str, Ingredient],
               skeletons: dict[str, Skeleton]) -> Scene:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    return scene_from_dict(data, ingredients, skeletons)


def export_obj(scene: Scene, path) -> None:
    """One icosphere per instance, scaled by the ingredient's bounding radius."""
    verts, tris = icosphere(1.0, subdivisions=1)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# mesochat scene export\n")
        offset = 0
        for inst in scene.instances:
            r = scene.catalog[inst.ingredient].bounding_radius
            c = inst.pose.translation
            fh.write(f"o instance_{inst.id}_{inst.ingredient}\n")
            for v in verts:
                p = c + r * v
                fh.write(f"v {p[0]:.6f} {p[1]:.6f} {p[2]:.6f}\n")
            for t in tris:
                fh.write(f"f {t[0] + 1 + offset} {t[1] + 1 + offset} {t[2] + 1 + offset}\n")
            offset += len(verts)
