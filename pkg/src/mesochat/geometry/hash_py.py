"""Pure-Python spatial-hash core.

Fallback twin of the compiled extension in ``mesochat._hash_core``; both
implement the exact same cell registration, candidate enumeration, and
overlap predicate so that results are bit-identical whichever one the
package selects at import time.
"""

from __future__ import annotations

from math import floor

IMPLEMENTATION = "python"

# Touching spheres do not collide: strict inequality with this slack.
OVERLAP_SLACK = 1e-9


class HashCore:
    """Uniform grid over sphere AABBs; exact sphere-overlap queries."""

    __slots__ = ("cell", "cells", "xs", "ys", "zs", "rs", "ids")

    def __init__(self, cell_size: float):
        if cell_size <= 0:
            raise ValueError("cell_size must be positive")
        self.cell = float(cell_size)
        self.cells: dict[tuple[int, int, int], list[int]] = {}
        self.xs: list[float] = []
        self.ys: list[float] = []
        self.zs: list[float] = []
        self.rs: list[float] = []
        self.ids: list[int] = []

    def __len__(self) -> int:
        return len(self.ids)

    def _cell_bounds(self, x, y, z, r):
        c = self.cell
        return (int(floor((x - r) / c)), int(floor((x + r) / c)),
                int(floor((y - r) / c)), int(floor((y + r) / c)),
                int(floor((z - r) / c)), int(floor((z + r) / c)))

    def insert(self, ident: int, x: float, y: float, z: float, r: float) -> None:
        if r <= 0:
            raise ValueError("radius must be positive")
        idx = len(self.ids)
        self.ids.append(int(ident))
        self.xs.append(float(x))
        self.ys.append(float(y))
        self.zs.append(float(z))
        self.rs.append(float(r))
        x0, x1, y0, y1, z0, z1 = self._cell_bounds(x, y, z, r)
        for cx in range(x0, x1 + 1):
            for cy in range(y0, y1 + 1):
                for cz in range(z0, z1 + 1):
                    self.cells.setdefault((cx, cy, cz), []).append(idx)

    def query_candidates(self, x: float, y: float, z: float, r: float) -> list[int]:
        """Ids whose spheres could overlap the query sphere (superset)."""
        x0, x1, y0, y1, z0, z1 = self._cell_bounds(x, y, z, r)
        seen = set()
        out = []
        for cx in range(x0, x1 + 1):
            for cy in range(y0, y1 + 1):
                for cz in range(z0, z1 + 1):
                    for idx in self.cells.get((cx, cy, cz), ()):
                        if idx not in seen:
                            seen.add(idx)
                            out.append(self.ids[idx])
        return out

    def query_overlapping(self, x: float, y: float, z: float, r: float) -> list[int]:
        """Ids whose spheres strictly overlap the query sphere."""
        x0, x1, y0, y1, z0, z1 = self._cell_bounds(x, y, z, r)
        seen = set()
        out = []
        for cx in range(x0, x1 + 1):
            for cy in range(y0, y1 + 1):
                for cz in range(z0, z1 + 1):
                    for idx in self.cells.get((cx, cy, cz), ()):
                        if idx in seen:
                            continue
                        seen.add(idx)
                        dx = self.xs[idx] - x
                        dy = self.ys[idx] - y
                        dz = self.zs[idx] - z
                        s = self.rs[idx] + r - OVERLAP_SLACK
                        if s > 0.0 and dx * dx + dy * dy + dz * dz < s * s:
                            out.append(self.ids[idx])
        return out

    def any_overlap(self, x: float, y: float, z: float, r: float) -> bool:
        x0, x1, y0, y1, z0, z1 = self._cell_bounds(x, y, z, r)
        seen = set()
        for cx in range(x0, x1 + 1):
            for cy in range(y0, y1 + 1):
                for cz in range(z0, z1 + 1):
                    for idx in self.cells.get((cx, cy, cz), ()):
                        if idx in seen:
                            continue
                        seen.add(idx)
                        dx = self.xs[idx] - x
                        dy = self.ys[idx] - y
                        dz = self.zs[idx] - z
                        s = self.rs[idx] + r - OVERLAP_SLACK
                        if s > 0.0 and dx * dx + dy * dy + dz * dz < s * s:
                            return True
        return False
