"""Topological predicates between bounding boxes and lines.

All predicates accept either an :class:`~ontodetect.pointcloud.Aabb` or
anything carrying one in a ``box`` attribute (such as a detected
``BoundingBox``). Distances are measured in the ground plane.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import InvalidDistance, InvalidParams
from .pointcloud import Aabb


@dataclass(frozen=True)
class TopologyParams:
    touch_eps: float = 0.10
    distance_tol_fraction: float = 0.10
    perpendicular_tol: float = 10.0
    footprint_overlap_min: float = 0.25

    def __post_init__(self):
        if not (self.touch_eps > 0 and self.perpendicular_tol > 0):
            raise InvalidParams("touch_eps and perpendicular_tol must be positive")
        for name in ("distance_tol_fraction", "footprint_overlap_min"):
            v = getattr(self, name)
            if not 0.0 < v <= 1.0:
                raise InvalidParams(f"{name} must lie in (0, 1], got {v}")


DEFAULT_PARAMS = TopologyParams()


def _aabb(x) -> Aabb:
    return x if isinstance(x, Aabb) else x.box


def _bounds(x):
    b = _aabb(x)
    return np.asarray(b.min, dtype=float), np.asarray(b.max, dtype=float)


def centroid_distance(a, b) -> float:
    ca, cb = _aabb(a).center, _aabb(b).center
    return math.hypot(ca.x - cb.x, ca.y - cb.y)


def is_distant_from(a, b, d: float, params: TopologyParams = DEFAULT_PARAMS) -> bool:
    """True when the ground-plane centroid distance is ``d`` within a relative tolerance."""
    if not (d > 0 and math.isfinite(d)):
        raise InvalidDistance(f"distance must be positive, got {d}")
    return abs(centroid_distance(a, b) - d) <= params.distance_tol_fraction * d


def intersects(a, b) -> bool:
    alo, ahi = _bounds(a)
    blo, bhi = _bounds(b)
    return bool(np.all((alo <= bhi) & (blo <= ahi)))


def interiors_overlap(a, b) -> bool:
    alo, ahi = _bounds(a)
    blo, bhi = _bounds(b)
    return bool(np.all(np.maximum(alo, blo) < np.minimum(ahi, bhi)))


def gap_distance(a, b) -> float:
    """Euclidean distance between the closest points of two closed boxes."""
    alo, ahi = _bounds(a)
    blo, bhi = _bounds(b)
    gap = np.maximum(0.0, np.maximum(alo - bhi, blo - ahi))
    return float(np.linalg.norm(gap))


def touches(a, b, params: TopologyParams = DEFAULT_PARAMS) -> bool:
    return not interiors_overlap(a, b) and gap_distance(a, b) <= params.touch_eps


def is_connected(a, b, params: TopologyParams = DEFAULT_PARAMS) -> bool:
    return intersects(a, b) or touches(a, b, params)


def footprint_overlap_area(a, b) -> float:
    alo, ahi = _bounds(a)
    blo, bhi = _bounds(b)
    ov = np.minimum(ahi[:2], bhi[:2]) - np.maximum(alo[:2], blo[:2])
    if np.any(ov < 0):
        return 0.0
    return float(ov[0] * ov[1])


def upper(a, b, params: TopologyParams = DEFAULT_PARAMS) -> bool:
    """``a`` sits above ``b`` and their ground footprints overlap enough."""
    alo, ahi = _bounds(a)
    blo, bhi = _bounds(b)
    if alo[2] < bhi[2] - params.touch_eps:
        return False
    if np.any(np.minimum(ahi[:2], bhi[:2]) < np.maximum(alo[:2], blo[:2])):
        return False
    area_a = float(np.prod(ahi[:2] - alo[:2]))
    area_b = float(np.prod(bhi[:2] - blo[:2]))
    return footprint_overlap_area(a, b) >= params.footprint_overlap_min * min(area_a, area_b)


def line_angle(d1, d2) -> float:
    """Acute angle between two directions, in degrees."""
    u = np.asarray(d1, dtype=float)
    v = np.asarray(d2, dtype=float)
    c = abs(float(u @ v)) / (np.linalg.norm(u) * np.linalg.norm(v))
    return math.degrees(math.acos(min(1.0, c)))


def perpendicular(l1, l2, params: TopologyParams = DEFAULT_PARAMS) -> bool:
    d1 = getattr(l1, "direction", l1)
    d2 = getattr(l2, "direction", l2)
    return abs(90.0 - line_angle(d1, d2)) <= params.perpendicular_tol
