"""Rule lifecycle: create, edit, apply (populate instances), revert.

Application is the hot path: every candidate placement runs one
spatial-hash overlap query, candidates are re-sampled on rejection (for
stochastic rules) or skipped (for deterministic ones), and the attempt
budget of 100x the requested count makes dense packings degrade into
partial success with a reported shortfall instead of hanging.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..geometry import SpatialHash, catmull_rom, resample_by_arclength, straight_curve
from ..geometry.transforms import (
    RigidTransform,
    quat_align_z,
    quat_between,
    quat_multiply,
    quat_rotate,
    random_direction_in_cone,
    random_unit_quaternion,
)
from ..intent import ParameterPatch
from .errors import (
    ArityViolation,
    IndexOutOfRange,
    InfeasiblePopulation,
    NoSuchInstance,
    NothingToRevert,
    UnknownRule,
)
from .rules import ApplicationRecord, Rule, RuleParams, RuleType
from .scene import Instance, Scene

ATTEMPT_BUDGET_FACTOR = 100

_NEEDS_SKELETON = {
    RuleType.FILL,
    RuleType.PARENT_CHILD_DISTANCE,
    RuleType.PARENT_CHILD_RELATIVE,
    RuleType.SIBLINGS_PARENT,
}


@dataclass
class ApplicationReport:
    rule_id: int
    added_ids: list[int]
    requested: int
    shortfall: int
    notes: str = ""

    def to_dict(self) -> dict:
        return {"rule_id": self.rule_id, "added_ids": list(self.added_ids),
                "requested": self.requested, "shortfall": self.shortfall,
                "notes": self.notes}


def _check_arity(rule_type: RuleType, ingredients: list[str], skeleton: Optional[str]) -> None:
    n = len(ingredients)
    if rule_type in (RuleType.FILL, RuleType.PARENT_CHILD_DISTANCE,
                     RuleType.PARENT_CHILD_RELATIVE):
        if n != 1:
            raise ArityViolation(f"{rule_type.value} rule needs exactly 1 ingredient, got {n}")
    elif rule_type in (RuleType.SIBLINGS, RuleType.SIBLINGS_PARENT):
        if n < 1:
            raise ArityViolation(f"{rule_type.value} rule needs at least 1 ingredient")
    elif rule_type is RuleType.CONNECTION:
        if n != 2:
            raise ArityViolation(f"connection rule needs exactly 2 endpoint ingredients, got {n}")
    if rule_type in _NEEDS_SKELETON and skeleton is None:
        raise ArityViolation(f"{rule_type.value} rule needs a skeleton")


def _parse_vertex_indices(description: str) -> Optional[list[int]]:
    hits = re.findall(r"vert(?:ex|ices)\s+(\d+)", description.lower())
    return [int(h) for h in hits] or None


def create_rule(scene: Scene, rule_type: RuleType, ingredients: list[str],
                skeleton: Optional[str] = None, description: str = "",
                seed_transforms: Optional[list[RigidTransform]] = None,
                params: Optional[RuleParams] = None) -> Rule:
    """Create (not apply) a rule; parameter defaults are fixed here."""
    _check_arity(rule_type, ingredients, skeleton)
    for name in ingredients:
        if name not in scene.catalog:
            raise ArityViolation(f"ingredient {name!r} is not registered in the scene")
    if skeleton is not None and skeleton not in scene.skeletons:
        raise ArityViolation(f"skeleton {skeleton!r} is not registered in the scene")

    if rule_type in (RuleType.SIBLINGS, RuleType.SIBLINGS_PARENT) and not seed_transforms:
        # Default propagation step: one bounding diameter along +x.
        r = scene.catalog[ingredients[0]].bounding_radius
        seed_transforms = [RigidTransform.from_translation([2.0 * r, 0.0, 0.0])]

    rule = Rule(
        id=scene.next_rule_id(),
        rule_type=rule_type,
        ingredients=list(ingredients),
        skeleton=skeleton,
        params=params if params is not None else RuleParams(),
        seed_transforms=seed_transforms,
        vertex_indices=_parse_vertex_indices(description),
        description=description,
    )
    scene.rules.append(rule)
    return rule


def edit_rule(scene: Scene, rule_id: int, patch: ParameterPatch) -> Rule:
    """Merge a validated patch into the rule's parameters.

    Previously applied instances are untouched; re-application is explicit.
    """
    rule = scene.rule_by_id(rule_id)
    if rule is None:
        raise UnknownRule(f"no rule with id {rule_id}")
    skeleton = scene.skeletons.get(rule.skeleton) if rule.skeleton else None
    ingredient = scene.catalog.get(rule.ingredients[0]) if rule.ingredients else None
    rule.params = rule.params.merged(patch, skeleton, ingredient)
    return rule


class _CollisionGuard:
    """Overlap bookkeeping for one application: existing plus committed instances."""

    def __init__(self, scene: Scene, new_radius: float, enabled: bool):
        self.enabled = enabled
        radii = [scene.catalog[i.ingredient].bounding_radius for i in scene.instances]
        max_r = max(radii + [new_radius])
        self.hash = SpatialHash.for_max_radius(max_r)
        for inst in scene.instances:
            r = scene.catalog[inst.ingredient].bounding_radius
            self.hash.insert(inst.id, inst.pose.translation, r)

    def blocked(self, center, radius: float) -> bool:
        return self.enabled and self.hash.any_overlap(center, radius)

    def commit(self, ident: int, center, radius: float) -> None:
        # Later candidates must also avoid instances committed in this batch.
        self.hash.insert(ident, center, radius)


def _commit_instance(scene: Scene, rule: Rule, pose: RigidTransform,
                     guard: _CollisionGuard, radius: float,
                     added: list[int], ingredient_name: str) -> Instance:
    inst = Instance(id=scene.next_instance_id(), ingredient=ingredient_name, pose=pose)
    scene.instances.append(inst)
    guard.commit(inst.id, pose.translation, radius)
    added.append(inst.id)
    return inst


def apply_rule(scene: Scene, rule_id: int) -> ApplicationReport:
    """Populate instances for the rule and record the application for revert."""
    rule = scene.rule_by_id(rule_id)
    if rule is None:
        raise UnknownRule(f"no rule with id {rule_id}")
    _check_arity(rule.rule_type, rule.ingredients, rule.skeleton)

    handler = {
        RuleType.PARENT_CHILD_DISTANCE: _apply_parent_child_distance,
        RuleType.PARENT_CHILD_RELATIVE: _apply_parent_child_relative,
        RuleType.SIBLINGS: _apply_siblings,
        RuleType.SIBLINGS_PARENT: _apply_siblings,
        RuleType.FILL: _apply_fill,
        RuleType.CONNECTION: _apply_connection,
    }[rule.rule_type]
    report = handler(scene, rule)
    rule.applied.append(ApplicationRecord(
        instance_ids=list(report.added_ids), requested=report.requested,
        shortfall=report.shortfall, notes=report.notes))
    return report


def revert_rule(scene: Scene, rule_id: int) -> list[int]:
    """Remove the most recent application's instances; earlier ones remain."""
    rule = scene.rule_by_id(rule_id)
    if rule is None:
        raise UnknownRule(f"no rule with id {rule_id}")
    if not rule.applied:
        raise NothingToRevert(f"rule {rule_id} has no application to revert")
    record = rule.applied.pop()
    doomed = set(record.instance_ids)
    scene.instances = [inst for inst in scene.instances if inst.id not in doomed]
    return list(record.instance_ids)


# --- per-type population -----------------------------------------------------

def _apply_parent_child_distance(scene: Scene, rule: Rule) -> ApplicationReport:
    skeleton = scene.skeletons[rule.skeleton]
    ingredient = scene.catalog[rule.ingredients[0]]
    params = rule.params
    guard = _CollisionGuard(scene, ingredient.bounding_radius, params.collision_detection)

    target = params.elements
    budget = ATTEMPT_BUDGET_FACTOR * target
    added: list[int] = []
    attempts = 0
    half_angle = np.deg2rad(params.tweaking_deg)
    while len(added) < target and attempts < budget:
        attempts += 1
        point, normal = skeleton.sample_surface(scene.rng)
        d = params.distance
        if params.std > 0.0:
            d += scene.rng.normal(0.0, params.std)
        d = max(d, 0.0)
        center = point + normal * d
        axis = normal if params.align_direction == "normal" else -normal
        direction = (random_direction_in_cone(axis, half_angle, scene.rng)
                     if params.tweaking_deg > 0.0 else axis)
        if guard.blocked(center, ingredient.bounding_radius):
            continue
        pose = RigidTransform(quat_align_z(direction), center)
        _commit_instance(scene, rule, pose, guard, ingredient.bounding_radius,
                         added, ingredient.name)
    if target > 0 and not added:
        raise InfeasiblePopulation(
            f"rule {rule.id}: no placement found in {budget} attempts")
    return ApplicationReport(rule.id, added, target, target - len(added))


def _apply_parent_child_relative(scene: Scene, rule: Rule) -> ApplicationReport:
    skeleton = scene.skeletons[rule.skeleton]
    ingredient = scene.catalog[rule.ingredients[0]]
    params = rule.params
    guard = _CollisionGuard(scene, ingredient.bounding_radius, params.collision_detection)

    verts = skeleton.vertices()
    indices = rule.vertex_indices if rule.vertex_indices is not None else list(range(len(verts)))
    for idx in indices:
        if not 0 <= idx < len(verts):
            raise IndexOutOfRange(
                f"vertex {idx} out of range for skeleton {rule.skeleton!r} ({len(verts)} vertices)")
    offset = rule.offset if rule.offset is not None else RigidTransform.identity()

    added: list[int] = []
    skipped = 0
    for idx in indices:
        frame = RigidTransform(quat_align_z(skeleton.vertex_normal(idx)), verts[idx])
        pose = frame.compose(offset)
        if guard.blocked(pose.translation, ingredient.bounding_radius):
            skipped += 1
            continue
        _commit_instance(scene, rule, pose, guard, ingredient.bounding_radius,
                         added, ingredient.name)
    if indices and not added:
        raise InfeasiblePopulation(f"rule {rule.id}: every designated vertex is blocked")
    return ApplicationReport(rule.id, added, len(indices), skipped)


def _apply_siblings(scene: Scene, rule: Rule) -> ApplicationReport:
    constrained = rule.rule_type is RuleType.SIBLINGS_PARENT
    skeleton = scene.skeletons[rule.skeleton] if constrained else None
    ingredient = scene.catalog[rule.ingredients[0]]
    params = rule.params
    guard = _CollisionGuard(scene, ingredient.bounding_radius, params.collision_detection)

    target = params.elements
    budget = ATTEMPT_BUDGET_FACTOR * target
    added: list[int] = []
    attempts = 0

    seeds = scene.instances_of(ingredient.name)
    if not seeds:
        # Nothing to propagate from: place a prototype at the origin.
        pose = RigidTransform.identity()
        if not guard.blocked(pose.translation, ingredient.bounding_radius):
            seed = _commit_instance(scene, rule, pose, guard, ingredient.bounding_radius,
                                    added, ingredient.name)
            seeds = [seed]
        else:
            raise InfeasiblePopulation(f"rule {rule.id}: seed placement is blocked")

    # Growth guard: a step may not leave the current scene bounds doubled.
    lo, hi = scene.bounding_box()

    def in_bounds(center: np.ndarray) -> bool:
        c = (lo + hi) / 2.0
        half = np.maximum((hi - lo) / 2.0, 1e-6)
        return bool(np.all(np.abs(center - c) <= 2.0 * half + 1e-9))

    def grow_bounds(center: np.ndarray, r: float) -> None:
        nonlocal lo, hi
        lo = np.minimum(lo, center - r)
        hi = np.maximum(hi, center + r)

    for seed in seeds:
        if len(added) >= target or attempts >= budget:
            break
        for transform in rule.seed_transforms or []:
            if len(added) >= target or attempts >= budget:
                break
            current = seed.pose
            while len(added) < target and attempts < budget:
                attempts += 1
                current = transform.compose(current)
                center = current.translation
                if constrained:
                    point, normal = skeleton.closest_surface_point(center)
                    # Re-align the propagated frame's +z onto the local normal.
                    z_now = quat_rotate(current.rotation, np.array([0.0, 0.0, 1.0]))
                    realign = quat_between(z_now, normal)
                    current = RigidTransform(
                        quat_multiply(realign, current.rotation),
                        point + normal * params.distance)
                    center = current.translation
                if not in_bounds(center):
                    break
                if guard.blocked(center, ingredient.bounding_radius):
                    break  # chain stops at the first collision
                _commit_instance(scene, rule, current, guard, ingredient.bounding_radius,
                                 added, ingredient.name)
                grow_bounds(center, ingredient.bounding_radius)
    if target > 0 and not added:
        raise InfeasiblePopulation(f"rule {rule.id}: no sibling placement possible")
    return ApplicationReport(rule.id, added, target, max(target - len(added), 0))


def _apply_fill(scene: Scene, rule: Rule) -> ApplicationReport:
    skeleton = scene.skeletons[rule.skeleton]
    ingredient = scene.catalog[rule.ingredients[0]]
    params = rule.params
    guard = _CollisionGuard(scene, ingredient.bounding_radius, params.collision_detection)

    target = params.elements
    budget = ATTEMPT_BUDGET_FACTOR * target
    added: list[int] = []
    attempts = 0

    if skeleton.supports_volume():
        lo, hi = skeleton.bbox()
        span = hi - lo
        while len(added) < target and attempts < budget:
            attempts += 1
            p = lo + scene.rng.random(3) * span
            if not skeleton.inside(p):
                continue
            rot = random_unit_quaternion(scene.rng)
            if guard.blocked(p, ingredient.bounding_radius):
                continue
            _commit_instance(scene, rule, RigidTransform(rot, p), guard,
                             ingredient.bounding_radius, added, ingredient.name)
    elif skeleton.supports_surface():
        # Surface skeletons fill their area instead: uniform samples on the patch.
        while len(added) < target and attempts < budget:
            attempts += 1
            point, normal = skeleton.sample_surface(scene.rng)
            if guard.blocked(point, ingredient.bounding_radius):
                continue
            pose = RigidTransform(quat_align_z(normal), point)
            _commit_instance(scene, rule, pose, guard, ingredient.bounding_radius,
                             added, ingredient.name)
    else:
        raise ArityViolation(f"skeleton {rule.skeleton!r} supports neither volume nor surface fill")

    if target > 0 and not added:
        raise InfeasiblePopulation(f"rule {rule.id}: no placement found in {budget} attempts")
    return ApplicationReport(rule.id, added, target, target - len(added))


def _apply_connection(scene: Scene, rule: Rule) -> ApplicationReport:
    name_a, name_b = rule.ingredients
    params = rule.params
    ball = scene.catalog["ball"]
    guard = _CollisionGuard(scene, ball.bounding_radius, params.collision_detection)

    pop_a = scene.instances_of(name_a)
    pop_b = scene.instances_of(name_b)
    if not pop_a or not pop_b:
        raise InfeasiblePopulation(
            f"rule {rule.id}: both {name_a!r} and {name_b!r} need placed instances")

    pivot_a = scene.catalog[name_a].pivot
    pivot_b = scene.catalog[name_b].pivot
    world_a = {inst.id: inst.pose.apply(pivot_a) for inst in pop_a}
    world_b = {inst.id: inst.pose.apply(pivot_b) for inst in pop_b}

    # Greedy globally-closest matching, each instance used at most once.
    candidates = sorted(
        (float(np.linalg.norm(world_a[a.id] - world_b[b.id])), a.id, b.id)
        for a in pop_a for b in pop_b)
    used_a: set[int] = set()
    used_b: set[int] = set()
    pairs: list[tuple[int, int]] = []
    for _, aid, bid in candidates:
        if aid in used_a or bid in used_b:
            continue
        used_a.add(aid)
        used_b.add(bid)
        pairs.append((aid, bid))

    unmatched = len(pop_a) + len(pop_b) - 2 * len(pairs)
    k = max(params.elements, 2)
    per_curve = k - 2
    added: list[int] = []
    skipped = 0
    for aid, bid in pairs:
        start, end = world_a[aid], world_b[bid]
        control = np.array([start, end])
        make = catmull_rom if params.curve == "catmull-rom" else straight_curve
        curve = make(control)
        natural = curve.total_length()
        if params.length is not None and natural > 1e-12:
            factor = params.length / natural
            control = start + (control - start) * factor
            curve = make(control)
        points = resample_by_arclength(curve, k)
        for p in points[1:-1]:
            if guard.blocked(p, ball.bounding_radius):
                skipped += 1
                continue
            pose = RigidTransform.from_translation(p)
            _commit_instance(scene, rule, pose, guard, ball.bounding_radius, added, "ball")

    requested = per_curve * len(pairs)
    notes = f"{unmatched} endpoint instances unmatched" if unmatched else ""
    if requested > 0 and not added:
        raise InfeasiblePopulation(f"rule {rule.id}: every curve point is blocked")
    return ApplicationReport(rule.id, added, requested, skipped, notes)


# --- instance-level edits ------------------------------------------------------

def update_position(scene: Scene, main_ref, sub_ref) -> Instance:
    """Translate the nearest sub instance so its residue meets the main residue.

    `main_ref` / `sub_ref` carry (ingredient, chain_id, residue_id) with
    catalog-resolved ingredient names; rotation of the moved instance is
    preserved.
    """
    main_pop = scene.instances_of(main_ref.ingredient)
    sub_pop = scene.instances_of(sub_ref.ingredient)
    if not main_pop:
        raise NoSuchInstance(f"no placed instance of {main_ref.ingredient!r}")
    if not sub_pop:
        raise NoSuchInstance(f"no placed instance of {sub_ref.ingredient!r}")

    main_inst = main_pop[0]
    main_local = scene.catalog[main_ref.ingredient].residue_position(
        main_ref.chain_id, main_ref.residue_id)
    target = main_inst.pose.apply(main_local)

    sub_inst = min(
        sub_pop,
        key=lambda i: (float(np.linalg.norm(i.pose.translation - main_inst.pose.translation)), i.id))
    sub_local = scene.catalog[sub_ref.ingredient].residue_position(
        sub_ref.chain_id, sub_ref.residue_id)
    current = sub_inst.pose.apply(sub_local)
    sub_inst.pose = RigidTransform(sub_inst.pose.rotation,
                                   sub_inst.pose.translation + (target - current))
    return sub_inst
