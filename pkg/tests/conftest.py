"""Shared fixtures: small ingredient/skeleton catalogs and scene builders."""

import numpy as np
import pytest

from mesochat.engine import Ingredient, Scene
from mesochat.geometry import Box, Rectangle, Sphere


def helix_chain(n, radius=1.2, pitch=0.35, phase=0.0):
    """Deterministic residue coordinates on a small helix."""
    t = np.arange(n) * 0.8 + phase
    return np.stack([radius * np.cos(t), radius * np.sin(t), pitch * (t - t.mean())], axis=1)


@pytest.fixture
def basic_catalog():
    return {
        "lipid": Ingredient(name="lipid", bounding_radius=1.0, color=(0.9, 0.8, 0.2)),
        "Au": Ingredient(name="Au", bounding_radius=0.4, color=(1.0, 0.84, 0.0)),
        "Heparin": Ingredient(name="Heparin", bounding_radius=2.6, color=(0.4, 0.6, 0.9)),
        "probe": Ingredient(name="probe", bounding_radius=5.0, color=(0.5, 0.5, 0.5)),
        "HDT_dithiol": Ingredient(
            name="HDT_dithiol", bounding_radius=1.0, color=(0.55, 0.27, 0.07),
            chains=[helix_chain(6, radius=0.5)]),
        "SpyCatcher": Ingredient(
            name="SpyCatcher", bounding_radius=2.0, color=(0.2, 0.7, 0.3),
            chains=[helix_chain(8), helix_chain(8, phase=2.1)]),
    }


@pytest.fixture
def basic_skeletons():
    return {
        "rectangle": Rectangle(name="rectangle", center=[0, 0, 0], extents=[40, 40],
                               normal=[0, 0, 1]),
        "box": Box(name="box", center=[0, 0, 0], extents=[100, 100, 100]),
        "ballome": Sphere(name="ballome", center=[0, 0, 0], radius=20.0),
    }


@pytest.fixture
def make_scene(basic_catalog, basic_skeletons):
    def _make(seed=0, ingredients=("probe",), skeletons=("box",)):
        scene = Scene(seed=seed)
        for name in ingredients:
            scene.register_ingredient(basic_catalog[name])
        for name in skeletons:
            scene.register_skeleton(basic_skeletons[name])
        return scene

    return _make
