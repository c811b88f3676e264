"""Geometry substrate: transforms, skeletons, curves, collision."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mesochat.geometry import (
    Box,
    NonWatertightMesh,
    Rectangle,
    RigidTransform,
    SpatialHash,
    Sphere,
    SurfaceMesh,
    UnsupportedSkeletonVariant,
    VolumeMesh,
    catmull_rom,
    inside,
    resample_by_arclength,
    sample_surface_uniform,
    skeleton_from_dict,
    spheres_overlap,
    straight_curve,
    volume,
)
from mesochat.geometry import hash_py
from mesochat.geometry.curves import TooFewPoints
from mesochat.geometry.meshes import icosahedron
from mesochat.geometry.transforms import (
    quat_align_z,
    quat_multiply,
    quat_rotate,
    quat_to_matrix,
    random_direction_in_cone,
    random_unit_quaternion,
)


def rng_for(seed=0):
    return np.random.default_rng(seed)


# --- transforms -------------------------------------------------------------

class TestTransforms:
    def test_identity_roundtrip(self):
        t = RigidTransform.from_translation([1, 2, 3])
        p = np.array([4.0, 5.0, 6.0])
        assert np.allclose(t.inverse().apply(t.apply(p)), p, atol=1e-9)

    def test_compose_application_order(self):
        a = RigidTransform.from_translation([1, 0, 0])
        b = RigidTransform(quat_align_z([1, 0, 0]), [0, 0, 0])
        p = np.array([0.0, 0.0, 1.0])
        assert np.allclose(a.compose(b).apply(p), a.apply(b.apply(p)), atol=1e-12)

    @given(st.integers(0, 1000))
    @settings(max_examples=30, deadline=None)
    def test_random_quaternion_is_unit_and_rotation(self, seed):
        q = random_unit_quaternion(rng_for(seed))
        assert abs(np.linalg.norm(q) - 1.0) < 1e-9
        m = quat_to_matrix(q)
        assert np.allclose(m @ m.T, np.eye(3), atol=1e-9)
        assert np.linalg.det(m) > 0

    @given(st.integers(0, 500), st.integers(0, 500))
    @settings(max_examples=20, deadline=None)
    def test_quat_multiply_matches_matrix_product(self, s1, s2):
        q1, q2 = random_unit_quaternion(rng_for(s1)), random_unit_quaternion(rng_for(s2))
        lhs = quat_to_matrix(quat_multiply(q1, q2))
        rhs = quat_to_matrix(q1) @ quat_to_matrix(q2)
        assert np.allclose(lhs, rhs, atol=1e-9)

    def test_align_z(self):
        d = np.array([1.0, -2.0, 0.5])
        q = quat_align_z(d)
        out = quat_rotate(q, np.array([0.0, 0.0, 1.0]))
        assert np.allclose(out, d / np.linalg.norm(d), atol=1e-9)

    def test_align_z_opposite(self):
        q = quat_align_z(np.array([0.0, 0.0, -1.0]))
        out = quat_rotate(q, np.array([0.0, 0.0, 1.0]))
        assert np.allclose(out, [0, 0, -1], atol=1e-9)

    def test_cone_sampling_stays_in_cone(self):
        rng = rng_for(7)
        axis = np.array([0.0, 1.0, 0.0])
        half = np.deg2rad(15.0)
        for _ in range(200):
            d = random_direction_in_cone(axis, half, rng)
            assert np.dot(d, axis) >= np.cos(half) - 1e-9


# --- skeletons ---------------------------------------------------------------

class TestRectangle:
    def test_samples_on_patch(self):
        rect = Rectangle(name="r", center=[0, 0, 0], extents=[10, 10], normal=[0, 0, 1])
        rng = rng_for(1)
        for _ in range(200):
            p, n = sample_surface_uniform(rect, rng)
            assert abs(p[2]) < 1e-12
            assert abs(p[0]) <= 5.0 and abs(p[1]) <= 5.0
            assert np.allclose(n, [0, 0, 1])

    def test_quadrants_uniform(self):
        # Chi-square style check: each quadrant receives 25% +/- 1%.
        rect = Rectangle(name="r", center=[0, 0, 0], extents=[10, 10], normal=[0, 0, 1])
        rng = rng_for(42)
        counts = np.zeros(4)
        n = 100_000
        for _ in range(n):
            p, _ = rect.sample_surface(rng)
            counts[(p[0] > 0) * 2 + (p[1] > 0)] += 1
        assert np.all(np.abs(counts / n - 0.25) < 0.01)

    def test_no_volume(self):
        rect = Rectangle(name="r", extents=[2, 2])
        with pytest.raises(UnsupportedSkeletonVariant):
            volume(rect)
        with pytest.raises(UnsupportedSkeletonVariant):
            inside(rect, [0, 0, 0])

    def test_closest_point_clamps(self):
        rect = Rectangle(name="r", center=[0, 0, 0], extents=[10, 10], normal=[0, 0, 1])
        q, n = rect.closest_surface_point(np.array([7.0, 0.0, 3.0]))
        assert np.allclose(q, [5, 0, 0], atol=1e-12)


class TestBoxSphere:
    def test_box_inside_volume(self):
        box = Box(name="b", center=[0, 0, 0], extents=[100, 100, 100])
        assert inside(box, [0, 0, 0])
        assert not inside(box, [51, 0, 0])
        assert volume(box) == 1_000_000.0

    def test_sphere_volume_closed_form(self):
        s = Sphere(name="s", center=[0, 0, 0], radius=5.0)
        assert volume(s) == pytest.approx(4.0 / 3.0 * np.pi * 125.0, abs=1e-9)

    def test_sphere_surface_samples_at_radius(self):
        s = Sphere(name="s", center=[1, 2, 3], radius=4.0)
        rng = rng_for(3)
        for _ in range(100):
            p, n = sample_surface_uniform(s, rng)
            assert abs(np.linalg.norm(p - s.center) - 4.0) < 1e-9
            assert np.allclose(p, s.center + 4.0 * n, atol=1e-9)

    def test_box_has_no_surface_sampling(self):
        with pytest.raises(UnsupportedSkeletonVariant):
            sample_surface_uniform(Box(name="b"), rng_for(0))


class TestMeshes:
    def make_ico_volume(self, radius=3.0):
        verts, tris = icosahedron(radius)
        return VolumeMesh(name="ico", verts=verts, triangles=tris)

    def test_watertight_check(self):
        verts, tris = icosahedron(1.0)
        with pytest.raises(NonWatertightMesh):
            VolumeMesh(name="broken", verts=verts, triangles=tris[:-1])

    def test_volume_against_monte_carlo(self):
        # Independent oracle: hit rate of ray-parity containment in the bbox.
        mesh = self.make_ico_volume(3.0)
        lo, hi = mesh.bbox()
        rng = rng_for(11)
        n = 200_000
        pts = lo + rng.random((n, 3)) * (hi - lo)
        hits = sum(1 for p in pts if mesh.inside(p))
        box_vol = float(np.prod(hi - lo))
        mc = box_vol * hits / n
        assert abs(mesh.volume() - mc) / mc < 0.005

    def test_inside_agrees_across_ray_directions(self):
        mesh = self.make_ico_volume(2.0)
        rng = rng_for(5)
        lo, hi = mesh.bbox()
        for _ in range(300):
            p = lo + rng.random(3) * (hi - lo)
            answers = {mesh.inside(p, direction_index=k) for k in range(3)}
            assert len(answers) == 1

    def test_inradius_circumradius_bounds(self):
        # Analytic containment bounds, independent of ray parity.
        mesh = self.make_ico_volume(1.0)
        # icosahedron inradius/circumradius ratio
        ratio = (np.sqrt(3) / 12.0) * (3 + np.sqrt(5)) / (np.sin(2 * np.pi / 5))
        assert mesh.inside([0, 0, 0])
        assert mesh.inside([0.9 * ratio, 0, 0])
        assert not mesh.inside([1.01, 0, 0])

    def test_surface_mesh_sampling_area_weighted(self):
        # Two triangles with areas 0.5 and 3.0 -> first receives 1/7 of samples.
        verts = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, -3, 0], [-2, 0, 0.0]])
        tris = np.array([[0, 1, 2], [0, 3, 4]])
        mesh = SurfaceMesh(name="two", verts=verts, triangles=tris)
        rng = rng_for(9)
        n = 50_000
        in_first = 0
        for _ in range(n):
            p, _ = mesh.sample_surface(rng)
            if p[0] >= 0 and p[1] >= 0:
                in_first += 1
        assert abs(in_first / n - 1.0 / 7.0) < 0.01

    def test_signed_distance_of_samples(self):
        mesh = self.make_ico_volume(2.0)
        shell = SurfaceMesh(name="shell", verts=mesh.verts, triangles=mesh.triangles)
        rng = rng_for(13)
        for _ in range(100):
            p, _ = shell.sample_surface(rng)
            q, _ = shell.closest_surface_point(p)
            assert np.linalg.norm(p - q) < 1e-6

    def test_serialization_roundtrip(self):
        for skel in (
            Rectangle(name="r", center=[1, 2, 3], extents=[4, 5], normal=[0, 1, 0]),
            Box(name="b", center=[0, 0, 0], extents=[1, 2, 3]),
            Sphere(name="s", center=[1, 1, 1], radius=2.5),
            self.make_ico_volume(1.5),
        ):
            again = skeleton_from_dict(skel.to_dict())
            assert type(again) is type(skel)
            assert again.name == skel.name


# --- curves ------------------------------------------------------------------

class TestCurves:
    def test_straight_two_point_resample(self):
        c = straight_curve([[0, 0, 0], [10, 0, 0]])
        pts = resample_by_arclength(c, 5)
        assert np.allclose(pts[:, 0], [0, 2.5, 5, 7.5, 10], atol=1e-9)
        assert np.allclose(pts[:, 1:], 0.0)

    def test_endpoints_exact(self):
        control = np.array([[0, 0, 0], [1, 2, 0], [3, 1, -1], [4, 4, 4.0]])
        c = catmull_rom(control)
        pts = resample_by_arclength(c, 7)
        assert np.array_equal(pts[0], control[0])
        assert np.array_equal(pts[-1], control[-1])

    def test_curve_passes_through_control_points(self):
        control = np.array([[0, 0, 0], [1, 2, 0], [3, 1, -1], [4, 4, 4.0]])
        c = catmull_rom(control)
        for i, p in enumerate(control):
            assert np.allclose(c.point_at(float(i)), p, atol=1e-9)

    def test_quarter_circle_arclength(self):
        # Dense-polyline oracle: quarter circle of radius 5 has length pi*r/2.
        r = 5.0
        angles = np.linspace(0, np.pi / 2, 9)
        control = np.stack([r * np.cos(angles), r * np.sin(angles), np.zeros_like(angles)], axis=1)
        c = catmull_rom(control)
        dense_u = np.linspace(0, c.n_segments, 20_001)
        dense = np.array([c.point_at(u) for u in dense_u])
        oracle = np.linalg.norm(np.diff(dense, axis=0), axis=1).sum()
        assert abs(c.total_length() - oracle) / oracle < 1e-4
        assert abs(c.total_length() - np.pi * r / 2) / (np.pi * r / 2) < 0.01

    def test_resample_spacing_uniform_within_one_percent(self):
        angles = np.linspace(0, np.pi / 2, 9)
        control = np.stack([3 * np.cos(angles), 3 * np.sin(angles), angles], axis=1)
        c = catmull_rom(control)
        pts = resample_by_arclength(c, 24)
        # Arc positions measured on an independent, much denser polyline.
        dense_u = np.linspace(0, c.n_segments, 50_001)
        dense = np.array([c.point_at(u) for u in dense_u])
        seg = np.linalg.norm(np.diff(dense, axis=0), axis=1)
        cum = np.concatenate([[0], np.cumsum(seg)])
        arc_pos = []
        for p in pts:
            i = int(np.argmin(np.linalg.norm(dense - p, axis=1)))
            arc_pos.append(cum[i])
        spacing = np.diff(arc_pos)
        assert np.max(np.abs(spacing - spacing.mean())) / spacing.mean() < 0.01

    def test_too_few_points(self):
        with pytest.raises(TooFewPoints):
            catmull_rom([[0, 0, 0]])
        c = straight_curve([[0, 0, 0], [1, 0, 0]])
        with pytest.raises(TooFewPoints):
            resample_by_arclength(c, 1)


# --- collision ---------------------------------------------------------------

def brute_force_overlaps(centers, radii, qc, qr):
    out = []
    for i, (c, r) in enumerate(zip(centers, radii)):
        if spheres_overlap(c, r, qc, qr):
            out.append(i)
    return out


class TestSpatialHash:
    def test_two_spheres_basics(self):
        h = SpatialHash(2.0)
        h.insert(0, (0, 0, 0), 1.0)
        assert h.any_overlap((1.5, 0, 0), 1.0)  # distance 1.5 < 2
        assert not h.any_overlap((2.0, 0, 0), 1.0)  # touching is not colliding

    def test_superset_property(self):
        h = SpatialHash(1.0)
        h.insert(7, (0.9, 0, 0), 0.6)
        assert 7 in h.query_candidates((0, 0, 0), 0.5)

    @pytest.mark.parametrize("trial", range(10))
    def test_matches_brute_force(self, trial):
        rng = rng_for(100 + trial)
        n = 500
        centers = rng.uniform(-20, 20, size=(n, 3))
        radii = rng.uniform(0.2, 2.0, size=n)
        h = SpatialHash.for_max_radius(radii.max())
        for i in range(n):
            h.insert(i, centers[i], radii[i])
        for _ in range(50):
            qc = rng.uniform(-22, 22, size=3)
            qr = float(rng.uniform(0.2, 2.5))
            assert sorted(h.query_overlapping(qc, qr)) == brute_force_overlaps(centers, radii, qc, qr)

    def test_python_and_selected_backend_agree(self):
        rng = rng_for(77)
        n = 300
        centers = rng.uniform(-10, 10, size=(n, 3))
        radii = rng.uniform(0.3, 1.5, size=n)
        selected = SpatialHash(2.5)
        fallback = hash_py.HashCore(2.5)
        for i in range(n):
            selected.insert(i, centers[i], radii[i])
            fallback.insert(i, *(float(v) for v in centers[i]), float(radii[i]))
        for _ in range(100):
            qc = rng.uniform(-11, 11, size=3)
            qr = float(rng.uniform(0.2, 2.0))
            assert selected.query_overlapping(qc, qr) == fallback.query_overlapping(
                float(qc[0]), float(qc[1]), float(qc[2]), qr)
            assert selected.any_overlap(qc, qr) == fallback.any_overlap(
                float(qc[0]), float(qc[1]), float(qc[2]), qr)

    @given(st.integers(0, 10_000))
    @settings(max_examples=25, deadline=None)
    def test_overlap_predicate_symmetry(self, seed):
        rng = rng_for(seed)
        c1, c2 = rng.uniform(-3, 3, size=(2, 3))
        r1, r2 = rng.uniform(0.1, 2.0, size=2)
        assert spheres_overlap(c1, r1, c2, r2) == spheres_overlap(c2, r2, c1, r1)


class TestSamplingDeterminism:
    def test_same_seed_same_sequence(self):
        rect = Rectangle(name="r", extents=[6, 4], normal=[0, 1, 0])
        a = [rect.sample_surface(rng_for(5))[0] for _ in range(1)]
        run1 = []
        rng = rng_for(5)
        for _ in range(50):
            run1.append(rect.sample_surface(rng)[0])
        rng = rng_for(5)
        run2 = [rect.sample_surface(rng)[0] for _ in range(50)]
        assert np.array_equal(np.array(run1), np.array(run2))
