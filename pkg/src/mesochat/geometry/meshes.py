"""Small procedural meshes: icosahedra for tests and sphere export."""

from __future__ import annotations

import numpy as np


def icosahedron(radius: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Unit icosahedron scaled to the given circumradius."""
    phi = (1.0 + np.sqrt(5.0)) / 2.0
    verts = np.array([
        [-1, phi, 0], [1, phi, 0], [-1, -phi, 0], [1, -phi, 0],
        [0, -1, phi], [0, 1, phi], [0, -1, -phi], [0, 1, -phi],
        [phi, 0, -1], [phi, 0, 1], [-phi, 0, -1], [-phi, 0, 1],
    ], dtype=float)
    verts *= radius / np.linalg.norm(verts[0])
    tris = np.array([
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ], dtype=int)
    return verts, tris


def icosphere(radius: float = 1.0, subdivisions: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Icosahedron refined by edge-midpoint subdivision, projected to the sphere."""
    verts, tris = icosahedron(1.0)
    verts = [v for v in verts]
    for _ in range(subdivisions):
        midpoint_cache: dict[tuple[int, int], int] = {}

        def midpoint(i: int, j: int) -> int:
            key = (min(i, j), max(i, j))
            if key not in midpoint_cache:
                m = (verts[i] + verts[j]) / 2.0
                m = m / np.linalg.norm(m)
                verts.append(m)
                midpoint_cache[key] = len(verts) - 1
            return midpoint_cache[key]

        new_tris = []
        for a, b, c in tris:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            new_tris += [[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]
        tris = np.array(new_tris, dtype=int)
    out = np.array(verts)
    out = out / np.linalg.norm(out, axis=1, keepdims=True) * radius
    return out, tris
