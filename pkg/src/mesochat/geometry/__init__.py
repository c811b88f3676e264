"""Geometric substrate: transforms, skeletons, curves, collision queries."""

from .collision import HASH_IMPLEMENTATION, SpatialHash, spheres_overlap
from .curves import (
    Curve,
    TooFewPoints,
    catmull_rom,
    resample_by_arclength,
    straight_curve,
)
from .skeletons import (
    Box,
    NonWatertightMesh,
    Rectangle,
    Skeleton,
    Sphere,
    SurfaceMesh,
    UnsupportedSkeletonVariant,
    VolumeMesh,
    inside,
    sample_surface_uniform,
    skeleton_from_dict,
    volume,
)
from .transforms import RigidTransform

__all__ = [
    "Box",
    "Curve",
    "HASH_IMPLEMENTATION",
    "NonWatertightMesh",
    "Rectangle",
    "RigidTransform",
    "Skeleton",
    "SpatialHash",
    "Sphere",
    "SurfaceMesh",
    "TooFewPoints",
    "UnsupportedSkeletonVariant",
    "VolumeMesh",
    "catmull_rom",
    "inside",
    "resample_by_arclength",
    "sample_surface_uniform",
    "skeleton_from_dict",
    "spheres_overlap",
    "straight_curve",
    "volume",
]
