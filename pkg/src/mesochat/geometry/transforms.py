"""Rigid-body math: unit quaternions (w, x, y, z) and rigid transforms.

Quaternions are plain float64 numpy arrays; all constructors return unit
quaternions.  Rotation composition follows the world-frame convention:
``compose(A, B)`` applies B first, then A.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_EPS = 1e-12


def unit(v: np.ndarray) -> np.ndarray:
    n = np.linalg.norm(v)
    if n < _EPS:
        raise ValueError("cannot normalize a zero-length vector")
    return v / n


def quat_identity() -> np.ndarray:
    return np.array([1.0, 0.0, 0.0, 0.0])


def quat_normalize(q: np.ndarray) -> np.ndarray:
    return q / np.linalg.norm(q)


def quat_multiply(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    aw, ax, ay, az = a
    bw, bx, by, bz = b
    return np.array([
        aw * bw - ax * bx - ay * by - az * bz,
        aw * bx + ax * bw + ay * bz - az * by,
        aw * by - ax * bz + ay * bw + az * bx,
        aw * bz + ax * by - ay * bx + az * bw,
    ])


def quat_conjugate(q: np.ndarray) -> np.ndarray:
    return np.array([q[0], -q[1], -q[2], -q[3]])


def quat_rotate(q: np.ndarray, v: np.ndarray) -> np.ndarray:
    # v' = q * (0, v) * q^-1, expanded to avoid building quaternions.
    w, x, y, z = q
    u = np.array([x, y, z])
    return v + 2.0 * np.cross(u, np.cross(u, v) + w * v)


def quat_from_axis_angle(axis: np.ndarray, angle: float) -> np.ndarray:
    axis = unit(np.asarray(axis, dtype=float))
    half = 0.5 * angle
    s = np.sin(half)
    return np.array([np.cos(half), axis[0] * s, axis[1] * s, axis[2] * s])


def quat_between(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Shortest-arc rotation taking direction a onto direction b."""
    a = unit(np.asarray(a, dtype=float))
    b = unit(np.asarray(b, dtype=float))
    d = float(np.dot(a, b))
    if d > 1.0 - 1e-12:
        return quat_identity()
    if d < -1.0 + 1e-12:
        # Opposite directions: rotate pi about any axis orthogonal to a.
        helper = np.array([1.0, 0.0, 0.0]) if abs(a[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
        axis = unit(np.cross(a, helper))
        return quat_from_axis_angle(axis, np.pi)
    axis = np.cross(a, b)
    w = 1.0 + d
    return quat_normalize(np.array([w, axis[0], axis[1], axis[2]]))


def quat_align_z(direction: np.ndarray) -> np.ndarray:
    """Rotation taking the local +z axis onto the given direction."""
    return quat_between(np.array([0.0, 0.0, 1.0]), direction)


def random_unit_quaternion(rng: np.random.Generator) -> np.ndarray:
    # Shoemake's subgroup algorithm: uniform over SO(3).
    u1, u2, u3 = rng.random(3)
    a = np.sqrt(1.0 - u1)
    b = np.sqrt(u1)
    return np.array([
        a * np.sin(2.0 * np.pi * u2),
        a * np.cos(2.0 * np.pi * u2),
        b * np.sin(2.0 * np.pi * u3),
        b * np.cos(2.0 * np.pi * u3),
    ])


def random_direction_in_cone(axis: np.ndarray, half_angle_rad: float,
                             rng: np.random.Generator) -> np.ndarray:
    """Uniform direction within the spherical cap of the given half-angle."""
    axis = unit(np.asarray(axis, dtype=float))
    if half_angle_rad <= 0.0:
        return axis
    cos_min = np.cos(half_angle_rad)
    u1, u2 = rng.random(2)
    cos_t = 1.0 - u1 * (1.0 - cos_min)  # uniform in [cos_min, 1]
    sin_t = np.sqrt(max(0.0, 1.0 - cos_t * cos_t))
    phi = 2.0 * np.pi * u2
    local = np.array([sin_t * np.cos(phi), sin_t * np.sin(phi), cos_t])
    return quat_rotate(quat_align_z(axis), local)


def quat_to_matrix(q: np.ndarray) -> np.ndarray:
    w, x, y, z = q
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ])


@dataclass
class RigidTransform:
    """Rotation followed by translation: p -> R p + t."""

    rotation: np.ndarray = field(default_factory=quat_identity)
    translation: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        rotation = np.asarray(self.rotation, dtype=float)
        # Renormalizing an already-unit quaternion would perturb its last
        # bits and break byte-stable save/load round trips.
        norm = np.linalg.norm(rotation)
        if abs(norm - 1.0) > 1e-12:
            rotation = rotation / norm
        self.rotation = rotation
        self.translation = np.asarray(self.translation, dtype=float)

    @staticmethod
    def identity() -> "RigidTransform":
        return RigidTransform()

    @staticmethod
    def from_translation(t) -> "RigidTransform":
        return RigidTransform(quat_identity(), np.asarray(t, dtype=float))

    def apply(self, p: np.ndarray) -> np.ndarray:
        return quat_rotate(self.rotation, np.asarray(p, dtype=float)) + self.translation

    def compose(self, other: "RigidTransform") -> "RigidTransform":
        """self after other: (self.compose(other)).apply(p) == self.apply(other.apply(p))."""
        return RigidTransform(
            quat_multiply(self.rotation, other.rotation),
            quat_rotate(self.rotation, other.translation) + self.translation,
        )

    def inverse(self) -> "RigidTransform":
        inv_rot = quat_conjugate(self.rotation)
        return RigidTransform(inv_rot, -quat_rotate(inv_rot, self.translation))

    def power(self, k: int) -> "RigidTransform":
        out = RigidTransform.identity()
        for _ in range(k):
            out = self.compose(out)
        return out

    def almost_equal(self, other: "RigidTransform", tol: float = 1e-9) -> bool:
        # q and -q encode the same rotation.
        rot_close = (np.allclose(self.rotation, other.rotation, atol=tol)
                     or np.allclose(self.rotation, -other.rotation, atol=tol))
        return rot_close and np.allclose(self.translation, other.translation, atol=tol)

    def to_dict(self) -> dict:
        return {"position": [float(v) for v in self.translation],
                "quaternion": [float(v) for v in self.rotation]}

    @staticmethod
    def from_dict(data: dict) -> "RigidTransform":
        return RigidTransform(np.array(data["quaternion"], dtype=float),
                              np.array(data["position"], dtype=float))
