"""Spatial-hash collision queries over bounding spheres.

The core grid lives in a compiled extension when available; a pure-Python
twin with identical semantics is selected otherwise (or when the
MESOCHAT_PURE_PYTHON environment variable is set).  Both produce
bit-identical answers, so kernel choice never affects scene content,
only speed.
"""

from __future__ import annotations

import os

import numpy as np

from . import hash_py

if os.environ.get("MESOCHAT_PURE_PYTHON"):
    _core = hash_py
else:
    try:
        from mesochat import _hash_core as _core  # type: ignore[no-redef]
    except ImportError:
        _core = hash_py

HASH_IMPLEMENTATION: str = _core.IMPLEMENTATION

# Touching spheres do not collide: strict inequality with this slack.
OVERLAP_SLACK = hash_py.OVERLAP_SLACK


def spheres_overlap(c1, r1: float, c2, r2: float) -> bool:
    """Strict overlap test; spheres exactly touching are not overlapping."""
    d = np.asarray(c1, dtype=float) - np.asarray(c2, dtype=float)
    s = r1 + r2 - OVERLAP_SLACK
    return s > 0.0 and float(d @ d) < s * s


class SpatialHash:
    """Uniform grid of bounding spheres keyed by caller-provided ids."""

    def __init__(self, cell_size: float):
        self._core = _core.HashCore(cell_size)
        self.cell_size = float(cell_size)

    @staticmethod
    def for_max_radius(max_radius: float) -> "SpatialHash":
        # Cell edge of one max diameter keeps any overlapping pair within
        # adjacent cells while AABB registration keeps queries exact.
        return SpatialHash(2.0 * max(max_radius, 1e-6))

    def __len__(self) -> int:
        return len(self._core)

    def insert(self, ident: int, center, radius: float) -> None:
        x, y, z = (float(v) for v in center)
        self._core.insert(ident, x, y, z, float(radius))

    def query_candidates(self, center, radius: float) -> list[int]:
        """Superset of the ids whose spheres may overlap the query sphere."""
        x, y, z = (float(v) for v in center)
        return self._core.query_candidates(x, y, z, float(radius))

    def query_overlapping(self, center, radius: float) -> list[int]:
        """Exactly the ids whose spheres strictly overlap the query sphere."""
        x, y, z = (float(v) for v in center)
        return self._core.query_overlapping(x, y, z, float(radius))

    def any_overlap(self, center, radius: float) -> bool:
        x, y, z = (float(v) for v in center)
        return self._core.any_overlap(x, y, z, float(radius))
