"""Acceptance suite: one test per acceptance criterion, at stated tolerances.

Each test prints an ``ACCEPTANCE PASS`` line on success (visible with
``pytest -s`` or in the captured output), so the suite doubles as a
checklist report.
"""

import json
import math
import time
from pathlib import Path

import numpy as np
import pytest

from mesochat.cli import main as cli_main
from mesochat.engine import (
    Ingredient,
    RuleParams,
    RuleType,
    Scene,
    apply_rule,
    create_rule,
    revert_rule,
    space_to_count,
)
from mesochat.engine.errors import NothingToRevert
from mesochat.engine.scene import scene_from_dict, scene_to_dict, scene_to_json
from mesochat.geometry import Box, Rectangle, SpatialHash, spheres_overlap
from mesochat.intent import (
    parse_intent_document,
    parse_parameter_patch,
    serialize_intent_document,
)
from mesochat.service import Session, load_catalog
from mesochat.translator import (
    MockBackend,
    PromptStore,
    StillInvalidAfterRetries,
    extract_rule_type,
    generate_intent,
    record_feedback,
)

REPO = Path(__file__).resolve().parent.parent
CATALOG = load_catalog(REPO / "catalog")


def report(name):
    print(f"ACCEPTANCE PASS: {name}")


# --- criterion: intent-grammar suite -----------------------------------------

VALID_DOCS = [
    '{"selectIngredient": [{"ingredient": "HDT"}]}',
    '{"selectIngredient": [{"ingredient": "HDT"}, {"ingredient": "Au"}]}',
    '{"selectSkeleton": [{"skeleton": "rectangle"}]}',
    '{"createRule": "Add Heparin into the box to occupy 2% of the space"}',
    '{"editRule": "set the number of elements to 400"}',
    '{"saveModel": true}',
    '{"loadModel": false}',
    '{"updatePivot": {"chainId": 0, "residueId": 4}}',
    ('{"updatePosition": [{"mainIngredient": "SpyCatcher", "chainId": 0, "residueId": 1},'
     ' {"subIngredient": "HDT", "chainId": 1, "residueId": 2}]}'),
    '{"highlightIngredient": [{"ingredient": "lipid"}]}',
    '{"modifyColor": [{"ingredient": "lipid", "color": [1.0, 0.0, 0.0]}]}',
    '{"modifyColor": [{"ingredient": "lipid", "color": "red"}]}',
    '{"changeMode": "protein"}',
    '{"changeMode": "residue level"}',
    '{"labeling": true}',
    ('{"selectIngredient": [{"ingredient": "Au"}], '
     '"selectSkeleton": [{"skeleton": "rectangle"}], '
     '"createRule": "Populate the Au atom uniformly on a rectangle skeleton"}'),
]

INVALID_DOCS = [
    ("{not json", "parse", "/"),
    ("no object here at all", "parse", "/"),
    ("{}", "domain", "/"),
    ('{"saveModel": "yes"}', "data-type", "/saveModel"),
    ('{"labeling": 1}', "data-type", "/labeling"),
    ('{"selectIngredient": {"ingredient": "HDT"}}', "array-shape", "/selectIngredient"),
    ('{"updatePosition": [{"mainIngredient": "A", "chainId": 0, "residueId": 0}]}',
     "array-shape", "/updatePosition"),
    ('{"modifyColor": [{"ingredient": "x", "color": [1, 0]}]}',
     "array-shape", "/modifyColor/0/color"),
    ('{"selectProtein": ["Au"]}', "unknown-key", "/selectProtein"),
    ('{"createRule": "x", "ruleKind": "fill"}', "unknown-key", "/ruleKind"),
    ('{"changeMode": "wireframe"}', "domain", "/changeMode"),
    ('{"updatePivot": {"chainId": -1, "residueId": 0}}', "domain",
     "/updatePivot/chainId"),
    ('{"modifyColor": [{"ingredient": "x", "color": [2, 0, 0]}]}', "domain",
     "/modifyColor/0/color/0"),
]

INVALID_PATCHES = [
    ('{"elements": -5}', "domain", "/elements"),
    ('{"elements": 10, "space": 5}', "domain", "/space"),
    ('{"space": 0}', "domain", "/space"),
    ('{"distance": "far"}', "data-type", "/distance"),
    ('{"granularity": 3}', "unknown-key", "/granularity"),
]


def test_intent_grammar_suite():
    assert len(VALID_DOCS) + len(INVALID_DOCS) + len(INVALID_PATCHES) >= 25
    covered = set()
    for raw in VALID_DOCS:
        doc, errors = parse_intent_document(raw)
        assert errors == [], f"{raw} unexpectedly invalid: {errors}"
        covered.update(doc.present_fields())
        again, errors = parse_intent_document(serialize_intent_document(doc))
        assert errors == [] and again == doc, f"round trip failed for {raw}"
    from mesochat.intent import INTENT_KEYS
    assert covered == set(INTENT_KEYS), f"uncovered intents: {set(INTENT_KEYS) - covered}"

    kinds = set()
    for raw, kind, path in INVALID_DOCS:
        doc, errors = parse_intent_document(raw)
        assert doc is None, f"{raw} unexpectedly valid"
        assert any(e.kind == kind and e.path == path for e in errors), \
            f"{raw}: wanted {kind}@{path}, got {[(e.kind, e.path) for e in errors]}"
        kinds.add(kind)
    for raw, kind, path in INVALID_PATCHES:
        patch, errors = parse_parameter_patch(raw)
        assert patch is None
        assert any(e.kind == kind and e.path == path for e in errors)
        kinds.add(kind)
    assert kinds == {"parse", "array-shape", "data-type", "unknown-key", "domain"}
    report("intent-grammar suite (valid round-trips, error kinds at paths)")


# --- criterion: correction-loop bound -----------------------------------------

class FailingKTimes:
    name = "failing"

    def __init__(self, k):
        self.k = k
        self.calls = 0

    def complete(self, prompt):
        self.calls += 1
        if self.calls <= self.k:
            return "{broken json"
        return '{"saveModel": true}'


def test_correction_loop_bound(tmp_path):
    store = PromptStore.default(directory=tmp_path / "prompts")
    for k in (0, 1, 2):
        backend = FailingKTimes(k)
        result = generate_intent("save the model", store, backend)
        assert result.document.save_model is True
        assert backend.calls == k + 1, f"k={k}: {backend.calls} calls"
    backend = FailingKTimes(3)
    with pytest.raises(StillInvalidAfterRetries) as err:
        generate_intent("save the model", store, backend)
    assert backend.calls == 3  # initial call + 2 retries
    assert err.value.raw == "{broken json"
    report("correction-loop bound (k<=2 succeeds, k=3 fails after 3 calls)")


# --- criterion: space_to_count oracle ------------------------------------------

def test_space_to_count_oracle():
    box = Box(name="b", extents=[100, 100, 100])
    assert space_to_count(2, box, Ingredient(name="x", bounding_radius=5.0)) == 38
    rng = np.random.default_rng(7)
    for _ in range(50):
        side = float(rng.uniform(5, 500))
        radius = float(rng.uniform(0.1, side / 3))
        space = int(rng.integers(1, 101))
        expected = max(1, math.floor(
            (space / 100.0) * side ** 3 / (4.0 / 3.0 * math.pi * radius ** 3)))
        got = space_to_count(space, Box(name="b", extents=[side] * 3),
                             Ingredient(name="x", bounding_radius=radius))
        assert got == expected, (side, radius, space)
    report("space_to_count oracle (38 reference + 50 randomized triples)")


# --- criterion: fill invariants -------------------------------------------------

def test_fill_invariants_twenty_seeds():
    for seed in range(20):
        scene = Scene(seed=seed)
        scene.register_ingredient(Ingredient(name="probe", bounding_radius=5.0))
        box = Box(name="box", extents=[100, 100, 100])
        scene.register_skeleton(box)
        rule = create_rule(scene, RuleType.FILL, ["probe"], "box",
                           params=RuleParams(elements=38, collision_detection=True))
        start = time.perf_counter()
        report_ = apply_rule(scene, rule.id)
        elapsed = time.perf_counter() - start
        assert elapsed < 1.0, f"seed {seed}: fill took {elapsed:.3f}s"
        assert len(report_.added_ids) == 38
        centers = np.array([i.pose.translation for i in scene.instances])
        assert all(box.inside(c) for c in centers)
        for i in range(len(centers)):
            for j in range(i + 1, len(centers)):
                d = float(np.linalg.norm(centers[i] - centers[j]))
                assert d >= 10.0 - 1e-9, f"seed {seed}: pair at {d}"
    report("fill invariants (20 seeds: containment, spacing >= 10, < 1 s/seed)")


# --- criterion: distance law ----------------------------------------------------

def test_distance_law():
    scene = Scene(seed=5)
    scene.register_ingredient(Ingredient(name="lipid", bounding_radius=1.0))
    scene.register_skeleton(Rectangle(name="r", center=[0, 0, 0], extents=[60, 60],
                                      normal=[0, 0, 1]))
    rule = create_rule(scene, RuleType.PARENT_CHILD_DISTANCE, ["lipid"], "r",
                       params=RuleParams(elements=1000, distance=4.0, std=0.0,
                                         collision_detection=False))
    apply_rule(scene, rule.id)
    offsets = np.array([inst.pose.translation[2] for inst in scene.instances])
    assert np.max(np.abs(offsets - 4.0)) < 1e-6

    scene2 = Scene(seed=6)
    scene2.register_ingredient(Ingredient(name="lipid", bounding_radius=1.0))
    scene2.register_skeleton(Rectangle(name="r", center=[0, 0, 0], extents=[60, 60],
                                       normal=[0, 0, 1]))
    rule2 = create_rule(scene2, RuleType.PARENT_CHILD_DISTANCE, ["lipid"], "r",
                        params=RuleParams(elements=2000, distance=4.0, std=0.5,
                                          collision_detection=False))
    apply_rule(scene2, rule2.id)
    offsets = np.array([inst.pose.translation[2] for inst in scene2.instances])
    assert len(offsets) == 2000
    assert abs(offsets.mean() - 4.0) <= 3 * 0.5 / math.sqrt(2000)
    report("distance law (std=0 exact within 1e-6; std=0.5 mean within 3 sigma)")


# --- criterion: collision oracle equivalence -------------------------------------

def test_collision_oracle_equivalence():
    rng = np.random.default_rng(11)
    for trial in range(100):
        n = 500
        centers = rng.uniform(-25, 25, size=(n, 3))
        radii = rng.uniform(0.2, 2.5, size=n)
        grid = SpatialHash.for_max_radius(float(radii.max()))
        for i in range(n):
            grid.insert(i, centers[i], float(radii[i]))
        qc = rng.uniform(-26, 26, size=3)
        qr = float(rng.uniform(0.2, 3.0))
        expected = [i for i in range(n)
                    if spheres_overlap(centers[i], float(radii[i]), qc, qr)]
        assert sorted(grid.query_overlapping(qc, qr)) == expected, f"trial {trial}"
    report("collision oracle equivalence (hash == brute force, 100 trials)")


# --- criterion: apply/revert model check -----------------------------------------

def test_apply_revert_model_check():
    scene = Scene(seed=13)
    scene.register_ingredient(Ingredient(name="lipid", bounding_radius=1.0))
    scene.register_skeleton(Box(name="box", extents=[100, 100, 100]))
    rules = [create_rule(scene, RuleType.FILL, ["lipid"], "box",
                         params=RuleParams(elements=8)) for _ in range(4)]
    stacks = {r.id: [] for r in rules}
    alive = set()
    rng = np.random.default_rng(17)
    for step in range(50):
        rule = rules[int(rng.integers(len(rules)))]
        if rng.random() < 0.6:
            rep = apply_rule(scene, rule.id)
            stacks[rule.id].append(list(rep.added_ids))
            alive |= set(rep.added_ids)
        else:
            if stacks[rule.id]:
                expected = stacks[rule.id].pop()
                assert revert_rule(scene, rule.id) == expected
                alive -= set(expected)
            else:
                with pytest.raises(NothingToRevert):
                    revert_rule(scene, rule.id)
        assert {i.id for i in scene.instances} == alive, f"diverged at step {step}"
        assert [len(stacks[r.id]) for r in rules] == [len(r.applied) for r in rules]
    report("apply/revert model check (50 steps against reference stack)")


# --- criterion: determinism and the linker scenario ------------------------------

def test_determinism_and_linker_scenario(tmp_path):
    start = time.perf_counter()
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for target in (a, b):
        code = cli_main(["--script", str(REPO / "demos/blood_plasma.script"),
                         "--seed", "42", "--backend", "mock",
                         "--export", str(target)])
        assert code == 0
    assert a.read_bytes() == b.read_bytes(), "blood plasma reruns differ"

    linker_export = tmp_path / "linker.json"
    code = cli_main(["--script", str(REPO / "demos/linker_assembly.script"),
                     "--seed", "42", "--backend", "mock",
                     "--export", str(linker_export)])
    assert code == 0
    scene = json.loads(linker_export.read_text())
    balls = [i for i in scene["instances"] if i["ingredient"] == "ball"]
    assert len(balls) == 300
    # Balls commit per curve in order: 30 curves x 10 interior points.
    for c in range(30):
        chunk = balls[c * 10:(c + 1) * 10]
        pts = np.array([i["position"] for i in chunk])
        spacing = np.linalg.norm(np.diff(pts, axis=0), axis=1)
        deviation = np.max(np.abs(spacing - spacing.mean())) / spacing.mean()
        assert deviation < 0.01, f"curve {c}: spacing deviation {deviation:.4f}"
    elapsed = time.perf_counter() - start
    assert elapsed < 60.0, f"scenario runtime {elapsed:.1f}s"
    report("determinism (byte-identical plasma reruns) + linker arc spacing < 1%")


# --- criterion: mock rule-extraction table ---------------------------------------

EXTRACTION_CASES = [
    ("Add Heparin into the box to occupy 2% of the space", RuleType.FILL),
    ("Populate the Au atom uniformly on a rectangle skeleton", RuleType.FILL),
    ("create curves between HDT and SpyCatcher instances", RuleType.CONNECTION),
    ("populate lipids at distance 3 above the membrane surface",
     RuleType.PARENT_CHILD_DISTANCE),
    ("fill the box with glucose molecules", RuleType.FILL),
    ("let Ferritin occupy 10% of the vesicle", RuleType.FILL),
    ("scatter ions inside the capsid", RuleType.FILL),
    ("arrange Au uniformly on the sheet", RuleType.FILL),
    ("draw a linker between HDT and SpyCatcher", RuleType.CONNECTION),
    ("connect the two domains with a curve", RuleType.CONNECTION),
    ("place a cap relative to vertex 3 of the shell", RuleType.PARENT_CHILD_RELATIVE),
    ("populate lipids 2 units above the membrane", RuleType.PARENT_CHILD_DISTANCE),
    ("repeat the spike with the same transform", RuleType.SIBLINGS),
    ("line proteins next to each other on the skeleton surface",
     RuleType.SIBLINGS_PARENT),
]


def test_mock_rule_extraction_table(tmp_path):
    store = PromptStore.default(directory=tmp_path / "prompts")
    backend = MockBackend()
    for text, expected in EXTRACTION_CASES:
        got = extract_rule_type(text, store, backend)
        assert got == expected, f"{text!r}: {got} != {expected}"
    # A phrasing the keyword table deliberately misclassifies, corrected once.
    text = "populate copies above the membrane"
    assert extract_rule_type(text, store, backend) == RuleType.PARENT_CHILD_DISTANCE
    record_feedback("rule_extraction", text, "siblings", store)
    assert extract_rule_type(text, store, backend) == RuleType.SIBLINGS
    report("mock rule-extraction table (14 cases + feedback-corrected re-run)")


# --- criterion: save/load round trips --------------------------------------------

def test_save_load_round_trips(tmp_path):
    rng = np.random.default_rng(23)
    ingredient_names = CATALOG.ingredient_names()
    for case in range(10):
        scene = Scene(seed=int(rng.integers(10_000)))
        picks = rng.choice(len(ingredient_names), size=3, replace=False)
        for k in picks:
            scene.register_ingredient(CATALOG.ingredients[ingredient_names[k]])
        scene.register_skeleton(CATALOG.skeletons["box"])
        scene.register_skeleton(CATALOG.skeletons["rectangle"])
        for name in (ingredient_names[k] for k in picks):
            skel = "box" if rng.random() < 0.5 else "rectangle"
            rule_type = RuleType.FILL if skel == "box" else RuleType.PARENT_CHILD_DISTANCE
            rule = create_rule(scene, rule_type, [name], skel,
                               params=RuleParams(elements=int(rng.integers(3, 12)),
                                                 distance=float(rng.uniform(0, 3)),
                                                 collision_detection=False))
            apply_rule(scene, rule.id)
        if rng.random() < 0.5:
            revert_rule(scene, scene.rules[-1].id)
        scene.view.render_mode = ["protein", "chain", "atomistic"][case % 3]
        scene.view.labeling = bool(case % 2)
        scene.view.colors["lipid"] = (1.0, 0.0, 0.0)

        path = tmp_path / f"scene_{case}.json"
        path.write_text(scene_to_json(scene))
        loaded = scene_from_dict(json.loads(path.read_text()),
                                 CATALOG.ingredients, CATALOG.skeletons)
        assert scene_to_json(loaded) == scene_to_json(scene), f"case {case}"

    # error paths fire as specified
    from mesochat.engine import MissingCatalogEntry, VersionMismatch
    good = scene_to_dict(Scene(seed=1))
    bad_version = dict(good, version=99)
    with pytest.raises(VersionMismatch):
        scene_from_dict(bad_version, CATALOG.ingredients, CATALOG.skeletons)
    bad_ref = dict(good, catalog_refs=["ingredient:vanished"])
    with pytest.raises(MissingCatalogEntry, match="vanished"):
        scene_from_dict(bad_ref, CATALOG.ingredients, CATALOG.skeletons)
    report("save/load (10 randomized round trips + version/catalog errors)")
