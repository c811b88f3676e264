"""Skeleton primitives: placement hosts for the rule engine.

Surface skeletons (rectangle, sphere surface, triangle meshes) answer
uniform area sampling and closest-point queries; volumetric skeletons
(box, sphere, watertight meshes) answer containment and volume.  A
variant supports only the queries that make geometric sense for it and
raises UnsupportedSkeletonVariant otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .transforms import unit


class UnsupportedSkeletonVariant(Exception):
    """The skeleton variant cannot answer the requested query."""


class NonWatertightMesh(Exception):
    """A volume mesh has boundary or non-manifold edges."""


@dataclass
class Skeleton:
    name: str = ""

    # --- capability flags -------------------------------------------------
    def supports_surface(self) -> bool:
        return False

    def supports_volume(self) -> bool:
        return False

    # --- queries ----------------------------------------------------------
    def sample_surface(self, rng: np.random.Generator):
        raise UnsupportedSkeletonVariant(f"{type(self).__name__} has no sampleable surface")

    def inside(self, p: np.ndarray) -> bool:
        raise UnsupportedSkeletonVariant(f"{type(self).__name__} has no interior")

    def volume(self) -> float:
        raise UnsupportedSkeletonVariant(f"{type(self).__name__} has no volume")

    def closest_surface_point(self, p: np.ndarray):
        raise UnsupportedSkeletonVariant(f"{type(self).__name__} has no surface projection")

    def bbox(self) -> tuple[np.ndarray, np.ndarray]:
        raise UnsupportedSkeletonVariant(f"{type(self).__name__} has no bounding box")

    def vertices(self) -> np.ndarray:
        raise UnsupportedSkeletonVariant(f"{type(self).__name__} has no designatable vertices")

    def vertex_normal(self, index: int) -> np.ndarray:
        raise UnsupportedSkeletonVariant(f"{type(self).__name__} has no vertex normals")

    def to_dict(self) -> dict:
        raise NotImplementedError


def _plane_frame(normal: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic orthonormal (u, v) spanning the plane of `normal`."""
    n = unit(normal)
    helper = np.array([1.0, 0.0, 0.0]) if abs(n[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    v = unit(np.cross(n, helper))
    u = np.cross(v, n)
    return u, v


@dataclass
class Rectangle(Skeleton):
    """Finite plane patch; extents are full side lengths along (u, v)."""

    center: np.ndarray = field(default_factory=lambda: np.zeros(3))
    extents: np.ndarray = field(default_factory=lambda: np.array([1.0, 1.0]))
    normal: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 1.0]))

    def __post_init__(self):
        self.center = np.asarray(self.center, dtype=float)
        self.extents = np.asarray(self.extents, dtype=float)
        self.normal = unit(np.asarray(self.normal, dtype=float))

    def supports_surface(self) -> bool:
        return True

    def area(self) -> float:
        return float(self.extents[0] * self.extents[1])

    def sample_surface(self, rng):
        u, v = _plane_frame(self.normal)
        a = (rng.random() - 0.5) * self.extents[0]
        b = (rng.random() - 0.5) * self.extents[1]
        return self.center + a * u + b * v, self.normal.copy()

    def closest_surface_point(self, p):
        u, v = _plane_frame(self.normal)
        d = np.asarray(p, dtype=float) - self.center
        a = np.clip(float(np.dot(d, u)), -self.extents[0] / 2, self.extents[0] / 2)
        b = np.clip(float(np.dot(d, v)), -self.extents[1] / 2, self.extents[1] / 2)
        return self.center + a * u + b * v, self.normal.copy()

    def bbox(self):
        corners = self.vertices()
        return corners.min(axis=0), corners.max(axis=0)

    def vertices(self):
        u, v = _plane_frame(self.normal)
        he = self.extents / 2.0
        return np.array([self.center + su * he[0] * u + sv * he[1] * v
                         for su in (-1.0, 1.0) for sv in (-1.0, 1.0)])

    def vertex_normal(self, index):
        return self.normal.copy()

    def to_dict(self):
        return {"variant": "rectangle", "name": self.name,
                "center": self.center.tolist(), "extents": self.extents.tolist(),
                "normal": self.normal.tolist()}


@dataclass
class Box(Skeleton):
    """Axis-aligned box; extents are full side lengths."""

    center: np.ndarray = field(default_factory=lambda: np.zeros(3))
    extents: np.ndarray = field(default_factory=lambda: np.array([1.0, 1.0, 1.0]))

    def __post_init__(self):
        self.center = np.asarray(self.center, dtype=float)
        self.extents = np.asarray(self.extents, dtype=float)

    def supports_volume(self) -> bool:
        return True

    def inside(self, p):
        d = np.abs(np.asarray(p, dtype=float) - self.center)
        return bool(np.all(d <= self.extents / 2.0))

    def volume(self):
        return float(np.prod(self.extents))

    def bbox(self):
        he = self.extents / 2.0
        return self.center - he, self.center + he

    def vertices(self):
        he = self.extents / 2.0
        return np.array([self.center + np.array([sx * he[0], sy * he[1], sz * he[2]])
                         for sx in (-1.0, 1.0) for sy in (-1.0, 1.0) for sz in (-1.0, 1.0)])

    def vertex_normal(self, index):
        return unit(self.vertices()[index] - self.center)

    def to_dict(self):
        return {"variant": "box", "name": self.name,
                "center": self.center.tolist(), "extents": self.extents.tolist()}


@dataclass
class Sphere(Skeleton):
    """Sphere; surface queries address the shell, volume queries the ball."""

    center: np.ndarray = field(default_factory=lambda: np.zeros(3))
    radius: float = 1.0

    def __post_init__(self):
        self.center = np.asarray(self.center, dtype=float)
        self.radius = float(self.radius)

    def supports_surface(self) -> bool:
        return True

    def supports_volume(self) -> bool:
        return True

    def sample_surface(self, rng):
        v = rng.normal(size=3)
        n = unit(v)
        return self.center + self.radius * n, n

    def inside(self, p):
        return bool(np.linalg.norm(np.asarray(p, dtype=float) - self.center) <= self.radius)

    def volume(self):
        return 4.0 / 3.0 * np.pi * self.radius ** 3

    def closest_surface_point(self, p):
        d = np.asarray(p, dtype=float) - self.center
        if np.linalg.norm(d) < 1e-12:
            d = np.array([0.0, 0.0, 1.0])
        n = unit(d)
        return self.center + self.radius * n, n

    def bbox(self):
        r = np.array([self.radius] * 3)
        return self.center - r, self.center + r

    def to_dict(self):
        return {"variant": "sphere", "name": self.name,
                "center": self.center.tolist(), "radius": self.radius}


def _triangle_areas(vertices: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    a = vertices[triangles[:, 0]]
    b = vertices[triangles[:, 1]]
    c = vertices[triangles[:, 2]]
    return 0.5 * np.linalg.norm(np.cross(b - a, c - a), axis=1)


def _face_normals(vertices: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    a = vertices[triangles[:, 0]]
    b = vertices[triangles[:, 1]]
    c = vertices[triangles[:, 2]]
    n = np.cross(b - a, c - a)
    lengths = np.linalg.norm(n, axis=1, keepdims=True)
    lengths[lengths < 1e-300] = 1.0
    return n / lengths


def _closest_point_on_triangle(p, a, b, c):
    # Ericson, Real-Time Collision Detection, 5.1.5.
    ab, ac, ap = b - a, c - a, p - a
    d1, d2 = np.dot(ab, ap), np.dot(ac, ap)
    if d1 <= 0 and d2 <= 0:
        return a
    bp = p - b
    d3, d4 = np.dot(ab, bp), np.dot(ac, bp)
    if d3 >= 0 and d4 <= d3:
        return b
    vc = d1 * d4 - d3 * d2
    if vc <= 0 and d1 >= 0 and d3 <= 0:
        return a + ab * (d1 / (d1 - d3))
    cp = p - c
    d5, d6 = np.dot(ab, cp), np.dot(ac, cp)
    if d6 >= 0 and d5 <= d6:
        return c
    vb = d5 * d2 - d1 * d6
    if vb <= 0 and d2 >= 0 and d6 <= 0:
        return a + ac * (d2 / (d2 - d6))
    va = d3 * d6 - d5 * d4
    if va <= 0 and (d4 - d3) >= 0 and (d5 - d6) >= 0:
        return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)))
    denom = 1.0 / (va + vb + vc)
    return a + ab * (vb * denom) + ac * (vc * denom)


@dataclass
class SurfaceMesh(Skeleton):
    """Open or closed triangle mesh used as a 2D placement host."""

    verts: np.ndarray = field(default_factory=lambda: np.zeros((0, 3)))
    triangles: np.ndarray = field(default_factory=lambda: np.zeros((0, 3), dtype=int))
    vertex_normals: Optional[np.ndarray] = None

    def __post_init__(self):
        self.verts = np.asarray(self.verts, dtype=float)
        self.triangles = np.asarray(self.triangles, dtype=int)
        if self.vertex_normals is not None:
            self.vertex_normals = np.asarray(self.vertex_normals, dtype=float)
        self._areas = _triangle_areas(self.verts, self.triangles)
        self._cum_areas = np.cumsum(self._areas)
        self._face_normals = _face_normals(self.verts, self.triangles)

    def supports_surface(self) -> bool:
        return True

    def area(self) -> float:
        return float(self._cum_areas[-1])

    def sample_surface(self, rng):
        # Area-weighted face pick, then uniform barycentric point.
        t = rng.random() * self._cum_areas[-1]
        face = int(np.searchsorted(self._cum_areas, t))
        face = min(face, len(self.triangles) - 1)
        i, j, k = self.triangles[face]
        r1, r2 = rng.random(2)
        s = np.sqrt(r1)
        u, v = 1.0 - s, r2 * s
        w = 1.0 - u - v
        point = u * self.verts[i] + v * self.verts[j] + w * self.verts[k]
        if self.vertex_normals is not None:
            n = u * self.vertex_normals[i] + v * self.vertex_normals[j] + w * self.vertex_normals[k]
            n = unit(n)
        else:
            n = self._face_normals[face]
        return point, n

    def closest_surface_point(self, p):
        p = np.asarray(p, dtype=float)
        best, best_d2, best_face = None, np.inf, -1
        for face in range(len(self.triangles)):
            i, j, k = self.triangles[face]
            q = _closest_point_on_triangle(p, self.verts[i], self.verts[j], self.verts[k])
            d2 = float(np.dot(p - q, p - q))
            if d2 < best_d2:
                best, best_d2, best_face = q, d2, face
        return best, self._face_normals[best_face]

    def bbox(self):
        return self.verts.min(axis=0), self.verts.max(axis=0)

    def vertices(self):
        return self.verts

    def vertex_normal(self, index):
        if self.vertex_normals is not None:
            return unit(self.vertex_normals[index])
        # Area-weighted average of incident face normals.
        mask = np.any(self.triangles == index, axis=1)
        n = (self._face_normals[mask] * self._areas[mask, None]).sum(axis=0)
        return unit(n)

    def to_dict(self):
        out = {"variant": "surface_mesh", "name": self.name,
               "vertices": self.verts.tolist(), "triangles": self.triangles.tolist()}
        if self.vertex_normals is not None:
            out["normals"] = self.vertex_normals.tolist()
        return out


_RAY_DIRECTIONS = (
    np.array([0.5773502691896258, 0.5773502691896257, 0.5773502691896259]),
    np.array([0.8017837257372732, 0.2672612419124244, -0.5345224838248488]),
    np.array([-0.1690308509457033, 0.8451542547285166, 0.5070925528371099]),
)


@dataclass
class VolumeMesh(Skeleton):
    """Watertight triangle mesh used as a 3D placement host."""

    verts: np.ndarray = field(default_factory=lambda: np.zeros((0, 3)))
    triangles: np.ndarray = field(default_factory=lambda: np.zeros((0, 3), dtype=int))

    def __post_init__(self):
        self.verts = np.asarray(self.verts, dtype=float)
        self.triangles = np.asarray(self.triangles, dtype=int)
        self._check_watertight()

    def _check_watertight(self):
        counts: dict[tuple[int, int], int] = {}
        for tri in self.triangles:
            for e in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])):
                key = (min(e), max(e))
                counts[key] = counts.get(key, 0) + 1
        bad = [e for e, c in counts.items() if c != 2]
        if bad:
            raise NonWatertightMesh(
                f"{len(bad)} edges are not shared by exactly 2 triangles (first: {bad[0]})")

    def supports_volume(self) -> bool:
        return True

    def _ray_crossings(self, origin: np.ndarray, direction: np.ndarray) -> int:
        # Moller-Trumbore against all faces at once.
        a = self.verts[self.triangles[:, 0]]
        b = self.verts[self.triangles[:, 1]]
        c = self.verts[self.triangles[:, 2]]
        e1, e2 = b - a, c - a
        h = np.cross(direction[None, :], e2)
        det = np.einsum("ij,ij->i", e1, h)
        parallel = np.abs(det) < 1e-12
        det[parallel] = 1.0
        inv = 1.0 / det
        s = origin[None, :] - a
        u = np.einsum("ij,ij->i", s, h) * inv
        q = np.cross(s, e1)
        v = np.einsum("j,ij->i", direction, q) * inv
        t = np.einsum("ij,ij->i", e2, q) * inv
        hits = (~parallel) & (u >= 0) & (v >= 0) & (u + v <= 1) & (t > 1e-9)
        return int(np.count_nonzero(hits))

    def inside(self, p, direction_index: int = 0):
        p = np.asarray(p, dtype=float)
        return self._ray_crossings(p, _RAY_DIRECTIONS[direction_index]) % 2 == 1

    def volume(self):
        a = self.verts[self.triangles[:, 0]]
        b = self.verts[self.triangles[:, 1]]
        c = self.verts[self.triangles[:, 2]]
        signed = np.einsum("ij,ij->i", a, np.cross(b, c)).sum() / 6.0
        return float(abs(signed))

    def closest_surface_point(self, p):
        shell = SurfaceMesh(name=self.name, verts=self.verts, triangles=self.triangles)
        return shell.closest_surface_point(p)

    def bbox(self):
        return self.verts.min(axis=0), self.verts.max(axis=0)

    def vertices(self):
        return self.verts

    def vertex_normal(self, index):
        shell = SurfaceMesh(name=self.name, verts=self.verts, triangles=self.triangles)
        return shell.vertex_normal(index)

    def to_dict(self):
        return {"variant": "volume_mesh", "name": self.name,
                "vertices": self.verts.tolist(), "triangles": self.triangles.tolist()}


# --- module-level operation surface ----------------------------------------

def sample_surface_uniform(skeleton: Skeleton, rng: np.random.Generator):
    """Uniform-by-area surface sample: returns (point, outward unit normal)."""
    return skeleton.sample_surface(rng)


def inside(skeleton: Skeleton, p) -> bool:
    return skeleton.inside(p)


def volume(skeleton: Skeleton) -> float:
    return skeleton.volume()


def skeleton_from_dict(data: dict) -> Skeleton:
    variant = data.get("variant")
    name = data.get("name", "")
    if variant == "rectangle":
        return Rectangle(name=name, center=np.array(data["center"], dtype=float),
                         extents=np.array(data["extents"], dtype=float),
                         normal=np.array(data["normal"], dtype=float))
    if variant == "box":
        return Box(name=name, center=np.array(data["center"], dtype=float),
                   extents=np.array(data["extents"], dtype=float))
    if variant == "sphere":
        return Sphere(name=name, center=np.array(data["center"], dtype=float),
                      radius=float(data["radius"]))
    if variant == "surface_mesh":
        normals = data.get("normals")
        return SurfaceMesh(name=name, verts=np.array(data["vertices"], dtype=float),
                           triangles=np.array(data["triangles"], dtype=int),
                           vertex_normals=None if normals is None else np.array(normals, dtype=float))
    if variant == "volume_mesh":
        return VolumeMesh(name=name, verts=np.array(data["vertices"], dtype=float),
                          triangles=np.array(data["triangles"], dtype=int))
    raise ValueError(f"unknown skeleton variant: {variant!r}")
