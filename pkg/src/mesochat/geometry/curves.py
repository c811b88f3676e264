"""Interpolating curves and arc-length resampling for connection rules."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Dense samples per segment when tabulating arc length.
_TABLE_SAMPLES_PER_SEGMENT = 256

CATMULL_ROM = "catmull-rom"
STRAIGHT = "straight"


class TooFewPoints(Exception):
    pass


@dataclass
class Curve:
    """A parametric curve through its control points.

    The parameter runs over [0, n_segments]; integer values hit control
    points.  An arc-length table (strictly increasing) maps parameters to
    cumulative length for inversion.
    """

    control_points: np.ndarray
    kind: str = CATMULL_ROM
    table_params: np.ndarray = field(default=None, repr=False)
    table_lengths: np.ndarray = field(default=None, repr=False)

    @property
    def n_segments(self) -> int:
        return len(self.control_points) - 1

    def total_length(self) -> float:
        return float(self.table_lengths[-1])

    def point_at(self, u: float) -> np.ndarray:
        if self.kind == STRAIGHT:
            return _polyline_point(self.control_points, u)
        return _catmull_rom_point(self.control_points, u)


def _polyline_point(points: np.ndarray, u: float) -> np.ndarray:
    n_seg = len(points) - 1
    u = min(max(u, 0.0), float(n_seg))
    i = min(int(np.floor(u)), n_seg - 1)
    t = u - i
    return (1.0 - t) * points[i] + t * points[i + 1]


def _centripetal_knots(p0, p1, p2, p3) -> tuple[float, float, float, float]:
    # alpha = 0.5; degenerate (repeated) points get a tiny positive step.
    def step(a, b):
        d = float(np.linalg.norm(b - a))
        return max(d ** 0.5, 1e-9)

    t0 = 0.0
    t1 = t0 + step(p0, p1)
    t2 = t1 + step(p1, p2)
    t3 = t2 + step(p2, p3)
    return t0, t1, t2, t3


def _catmull_rom_segment(p0, p1, p2, p3, t_local: float) -> np.ndarray:
    # Barry-Goldman pyramid on centripetal knots; t_local in [0, 1] maps to [t1, t2].
    t0, t1, t2, t3 = _centripetal_knots(p0, p1, p2, p3)
    t = t1 + t_local * (t2 - t1)
    a1 = (t1 - t) / (t1 - t0) * p0 + (t - t0) / (t1 - t0) * p1
    a2 = (t2 - t) / (t2 - t1) * p1 + (t - t1) / (t2 - t1) * p2
    a3 = (t3 - t) / (t3 - t2) * p2 + (t - t2) / (t3 - t2) * p3
    b1 = (t2 - t) / (t2 - t0) * a1 + (t - t0) / (t2 - t0) * a2
    b2 = (t3 - t) / (t3 - t1) * a2 + (t - t1) / (t3 - t1) * a3
    return (t2 - t) / (t2 - t1) * b1 + (t - t1) / (t2 - t1) * b2


def _phantom_points(points: np.ndarray) -> np.ndarray:
    # Reflection endpoints so every segment has a full quadruple.
    first = 2.0 * points[0] - points[1]
    last = 2.0 * points[-1] - points[-2]
    return np.vstack([first, points, last])


def _catmull_rom_point(points: np.ndarray, u: float) -> np.ndarray:
    n_seg = len(points) - 1
    u = min(max(u, 0.0), float(n_seg))
    i = min(int(np.floor(u)), n_seg - 1)
    t = u - i
    ext = _phantom_points(points)
    return _catmull_rom_segment(ext[i], ext[i + 1], ext[i + 2], ext[i + 3], t)


def _build_table(curve: Curve) -> None:
    n = curve.n_segments * _TABLE_SAMPLES_PER_SEGMENT
    params = np.linspace(0.0, float(curve.n_segments), n + 1)
    pts = np.array([curve.point_at(u) for u in params])
    steps = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    lengths = np.concatenate([[0.0], np.cumsum(steps)])
    # Strictly increasing table: drop zero-length repeats (degenerate geometry).
    keep = np.concatenate([[True], np.diff(lengths) > 0.0])
    keep[0] = True
    curve.table_params = params[keep]
    curve.table_lengths = lengths[keep]


def catmull_rom(points) -> Curve:
    """Centripetal Catmull-Rom curve through all the given points."""
    points = np.asarray(points, dtype=float)
    if len(points) < 2:
        raise TooFewPoints("a curve needs at least 2 control points")
    curve = Curve(control_points=points, kind=CATMULL_ROM)
    _build_table(curve)
    return curve


def straight_curve(points) -> Curve:
    """Polyline through the given points."""
    points = np.asarray(points, dtype=float)
    if len(points) < 2:
        raise TooFewPoints("a curve needs at least 2 control points")
    curve = Curve(control_points=points, kind=STRAIGHT)
    _build_table(curve)
    return curve


def resample_by_arclength(curve: Curve, k: int) -> np.ndarray:
    """k points along the curve at uniform arc-length spacing, endpoints included."""
    if k < 2:
        raise TooFewPoints("resampling needs k >= 2")
    total = curve.total_length()
    targets = np.linspace(0.0, total, k)
    params = np.interp(targets, curve.table_lengths, curve.table_params)
    pts = np.array([curve.point_at(u) for u in params])
    # Endpoints are exact control points by construction.
    pts[0] = curve.control_points[0]
    pts[-1] = curve.control_points[-1]
    return pts
